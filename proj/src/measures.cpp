#include "rwlab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <thread>
#include <unordered_map>

#include "rwlab/errors.hpp"
#include "rwlab/numeric.hpp"

namespace rwlab {

namespace {
constexpr double neg_inf = -std::numeric_limits<double>::infinity();
}

sparse_measure normalize_into(const group& g, std::vector<atom>&& atoms, bool probability) {
    for (const auto& a : atoms) {
        g.validate(a.elem);
        if (!(a.mass > 0.0) || !std::isfinite(a.mass))
            throw domain_error("measure atoms must carry finite positive mass (atom " + g.format(a.elem) + ")");
    }
    std::sort(atoms.begin(), atoms.end(), [](const atom& x, const atom& y) { return x.elem < y.elem; });
    sparse_measure m(g);
    for (auto& a : atoms) {
        if (!m.atoms_.empty() && m.atoms_.back().elem == a.elem)
            m.atoms_.back().mass += a.mass;
        else
            m.atoms_.push_back(std::move(a));
    }
    if (probability) {
        double t = m.total();
        if (std::fabs(t - 1.0) > 1e-12)
            throw domain_error("probability measure masses sum to " + std::to_string(t) + ", not 1");
    }
    return m;
}

sparse_measure sparse_measure::from_atoms(const group& g, std::vector<atom> atoms, bool probability) {
    return normalize_into(g, std::move(atoms), probability);
}

sparse_measure sparse_measure::dirac(const group& g) { return dirac(g, g.identity()); }

sparse_measure sparse_measure::dirac(const group& g, const element& x) {
    auto m = from_atoms(g, {{x, 1.0}});
    m.set_exact({rational(1)});
    return m;
}

sparse_measure sparse_measure::srw(const group& g) {
    std::vector<element> gens = g.generators();
    std::sort(gens.begin(), gens.end());
    gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
    std::vector<atom> atoms;
    for (auto& s : gens) atoms.push_back({s, 1.0 / static_cast<double>(gens.size())});
    auto m = from_atoms(g, atoms, false);
    if (std::fabs(m.total() - 1.0) > 1e-12) throw domain_error("srw normalisation failed");
    m.set_exact(std::vector<rational>(m.size(), rational(1, static_cast<long>(gens.size()))));
    return m;
}

sparse_measure sparse_measure::lazy_srw(const group& g, double hold) {
    if (!(hold >= 0.0 && hold < 1.0)) throw config_error("lazy-srw hold must lie in [0,1)");
    auto base = srw(g);
    std::vector<atom> atoms;
    std::vector<std::pair<element, rational>> ex;
    rational h(hold);
    for (size_t i = 0; i < base.size(); ++i) {
        atoms.push_back({base.atoms()[i].elem, (1.0 - hold) * base.atoms()[i].mass});
        ex.push_back({base.atoms()[i].elem, (1 - h) * base.exact()[i]});
    }
    if (hold > 0) {
        atoms.push_back({g.identity(), hold});
        ex.push_back({g.identity(), h});
    }
    auto m = from_atoms(g, atoms, false);
    std::map<element, rational> acc;
    for (auto& [e, r] : ex) acc[e] += r;
    std::vector<rational> exact;
    for (auto& a : m.atoms()) exact.push_back(acc[a.elem]);
    m.set_exact(std::move(exact));
    return m;
}

double sparse_measure::mass(const element& x) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x, [](const atom& a, const element& e) { return a.elem < e; });
    if (it != atoms_.end() && it->elem == x) return it->mass;
    return 0.0;
}

double sparse_measure::total() const {
    kahan_sum k;
    for (const auto& a : atoms_) k.add(a.mass);
    return k.value();
}

bool sparse_measure::is_symmetric(double tol) const {
    for (const auto& a : atoms_)
        if (std::fabs(mass(g_.inverse(a.elem)) - a.mass) > tol) return false;
    return true;
}

bool sparse_measure::is_dirac_identity() const { return atoms_.size() == 1 && g_.is_identity(atoms_[0].elem); }

long sparse_measure::max_length() const {
    long r = 0;
    for (const auto& a : atoms_) r = std::max(r, g_.length(a.elem));
    return r;
}

void sparse_measure::set_exact(std::vector<rational> masses) {
    if (masses.size() != atoms_.size()) throw domain_error("exact shadow size mismatch");
    exact_ = std::move(masses);
}

sparse_measure convolve(const sparse_measure& mu, const sparse_measure& nu, const conv_limits& lim) {
    if (mu.grp() != nu.grp()) throw domain_error("convolve: measures live on different groups");
    const group& g = mu.grp();
    double work = static_cast<double>(mu.size()) * static_cast<double>(nu.size());
    if (work > lim.work_cap)
        throw resource_error("convolution work " + std::to_string(work) +
                             " exceeds cap; use the radial or lattice path, or Monte Carlo sampling");
    std::unordered_map<element, double, element_hash> acc;
    acc.reserve(static_cast<size_t>(std::min<double>(work, static_cast<double>(lim.support_cap)) * 1.3) + 16);
    element prod;
    for (const auto& a : mu.atoms()) {
        for (const auto& b : nu.atoms()) {
            prod = a.elem;
            g.right_multiply(prod, b.elem);
            acc[prod] += a.mass * b.mass;
        }
        if (static_cast<long long>(acc.size()) > lim.support_cap)
            throw resource_error("convolution support exceeds cap " + std::to_string(lim.support_cap) +
                                 "; use the radial or lattice path, or Monte Carlo sampling");
    }
    std::vector<atom> atoms;
    atoms.reserve(acc.size());
    for (auto& [e, m] : acc) atoms.push_back({e, m});
    std::sort(atoms.begin(), atoms.end(), [](const atom& x, const atom& y) { return x.elem < y.elem; });
    sparse_measure out(g);
    out.atoms_ = std::move(atoms);
    if (mu.has_exact() && nu.has_exact() && work <= static_cast<double>(lim.exact_shadow_cap) * 50 &&
        out.size() <= lim.exact_shadow_cap) {
        std::unordered_map<element, rational, element_hash> ex;
        for (size_t i = 0; i < mu.size(); ++i)
            for (size_t j = 0; j < nu.size(); ++j)
                ex[g.multiply(mu.atoms()[i].elem, nu.atoms()[j].elem)] += mu.exact()[i] * nu.exact()[j];
        std::vector<rational> shadow;
        shadow.reserve(out.size());
        for (auto& a : out.atoms_) shadow.push_back(ex[a.elem]);
        out.exact_ = std::move(shadow);
    }
    return out;
}

// ---------------------------------------------------------------- radial

double radial_measure::log_sphere_size(long r) const {
    if (r == 0) return 0.0;
    return std::log(2.0 * k) + static_cast<double>(r - 1) * std::log(2.0 * k - 1.0);
}

double radial_measure::log_atom_mass(long r) const {
    if (r < 0 || r > radius()) return neg_inf;
    double m = sphere_mass[r];
    if (m <= 0) return neg_inf;
    return std::log(m) - log_sphere_size(r);
}

std::optional<radial_measure> radial_measure::from_sparse(const sparse_measure& mu, double tol) {
    const group& g = mu.grp();
    if (g.fam() != family::free) return std::nullopt;
    long R = 0;
    for (const auto& a : mu.atoms()) R = std::max<long>(R, static_cast<long>(a.elem.size()));
    std::vector<double> count(R + 1, 0.0), lo(R + 1, std::numeric_limits<double>::infinity()), hi(R + 1, 0.0),
        tot(R + 1, 0.0);
    for (const auto& a : mu.atoms()) {
        long r = static_cast<long>(a.elem.size());
        count[r] += 1;
        lo[r] = std::min(lo[r], a.mass);
        hi[r] = std::max(hi[r], a.mass);
        tot[r] += a.mass;
    }
    radial_measure out;
    out.k = g.rank();
    out.sphere_mass = Eigen::VectorXd::Zero(R + 1);
    for (long r = 0; r <= R; ++r) {
        if (count[r] == 0) continue;
        double expect = std::exp(out.log_sphere_size(r));
        if (std::fabs(count[r] - expect) > 0.5) return std::nullopt;
        if (hi[r] - lo[r] > tol * std::max(1.0, hi[r])) return std::nullopt;
        out.sphere_mass[r] = tot[r];
    }
    return out;
}

sparse_measure radial_measure::to_sparse(const group& g) const {
    if (g.fam() != family::free || g.rank() != k) throw domain_error("radial measure needs the free group of rank k");
    std::vector<atom> atoms;
    for (long r = 0; r <= radius(); ++r) {
        if (sphere_mass[r] <= 0) continue;
        auto sph = g.sphere(r);
        double each = sphere_mass[r] / static_cast<double>(sph.size());
        for (auto& s : sph) atoms.push_back({s, each});
        if (static_cast<long long>(atoms.size()) > g.limits().element_cap)
            throw resource_error("radial expansion exceeds element cap");
    }
    return sparse_measure::from_atoms(g, atoms, false);
}

radial_measure radial_convolve(const radial_measure& a, const radial_measure& b) {
    if (a.k != b.k) throw domain_error("radial_convolve: rank mismatch");
    const int k = a.k;
    const double q = 2.0 * k - 1.0;
    const long R1 = a.radius(), R2 = b.radius();
    const long M = std::min(R1, R2);
    // P(at least i cancellations) for two non-trivial independent uniform elements
    std::vector<double> ge(M + 2, 0.0);
    ge[0] = 1.0;
    if (M >= 1) ge[1] = 1.0 / (2.0 * k);
    for (long i = 2; i <= M + 1; ++i) ge[i] = ge[i - 1] / q;
    radial_measure out;
    out.k = k;
    out.sphere_mass = Eigen::VectorXd::Zero(R1 + R2 + 1);
    for (long r = 0; r <= R1; ++r) {
        double ar = a.sphere_mass[r];
        if (ar == 0) continue;
        for (long s = 0; s <= R2; ++s) {
            double w = ar * b.sphere_mass[s];
            if (w == 0) continue;
            if (r == 0 || s == 0) {
                out.sphere_mass[r + s] += w;
                continue;
            }
            long m = std::min(r, s);
            for (long i = 0; i < m; ++i) out.sphere_mass[r + s - 2 * i] += w * (ge[i] - ge[i + 1]);
            out.sphere_mass[r + s - 2 * m] += w * ge[m];
        }
    }
    return out;
}

// ---------------------------------------------------------------- lattice

lattice_measure lattice_measure::from_sparse(const sparse_measure& mu) {
    const group& g = mu.grp();
    lattice_measure out;
    if (g.fam() == family::cyclic) {
        out.d = 1;
        out.periodic = true;
        out.period = g.order();
        out.lo = {0};
        out.ext = {g.order()};
        out.mass.assign(g.order(), 0.0);
        for (const auto& a : mu.atoms()) out.mass[a.elem[0]] += a.mass;
        return out;
    }
    if (g.fam() != family::abelian) throw domain_error("lattice path needs an abelian or cyclic group");
    out.d = g.rank();
    out.lo.assign(out.d, std::numeric_limits<long>::max());
    std::vector<long> hi(out.d, std::numeric_limits<long>::min());
    for (const auto& a : mu.atoms())
        for (int i = 0; i < out.d; ++i) {
            out.lo[i] = std::min<long>(out.lo[i], a.elem[i]);
            hi[i] = std::max<long>(hi[i], a.elem[i]);
        }
    out.ext.resize(out.d);
    size_t total = 1;
    for (int i = 0; i < out.d; ++i) {
        out.ext[i] = hi[i] - out.lo[i] + 1;
        total *= out.ext[i];
    }
    out.mass.assign(total, 0.0);
    for (const auto& a : mu.atoms()) out.mass[*out.index_of(a.elem)] += a.mass;
    return out;
}

element lattice_measure::cell_element(size_t idx) const {
    element e(d);
    for (int i = d - 1; i >= 0; --i) {
        e[i] = static_cast<int32_t>(lo[i] + static_cast<long>(idx % ext[i]));
        idx /= ext[i];
    }
    return e;
}

std::optional<size_t> lattice_measure::index_of(const element& x) const {
    if (static_cast<int>(x.size()) != d) return std::nullopt;
    size_t idx = 0;
    for (int i = 0; i < d; ++i) {
        long c = x[i] - lo[i];
        if (periodic) c = ((c % period) + period) % period;
        if (c < 0 || c >= ext[i]) return std::nullopt;
        idx = idx * ext[i] + static_cast<size_t>(c);
    }
    return idx;
}

double lattice_measure::at(const element& x) const {
    auto i = index_of(x);
    return i ? mass[*i] : 0.0;
}

lattice_measure lattice_convolve(const lattice_measure& a, const sparse_measure& step, const conv_limits& lim) {
    lattice_measure out;
    out.d = a.d;
    out.periodic = a.periodic;
    out.period = a.period;
    if (a.periodic) {
        out.lo = a.lo;
        out.ext = a.ext;
        out.mass.assign(a.mass.size(), 0.0);
        const long n = a.period;
        for (long x = 0; x < n; ++x) {
            double m = a.mass[x];
            if (m == 0) continue;
            for (const auto& s : step.atoms()) out.mass[(x + s.elem[0]) % n] += m * s.mass;
        }
        return out;
    }
    const int d = a.d;
    std::vector<long> slo(d, std::numeric_limits<long>::max()), shi(d, std::numeric_limits<long>::min());
    for (const auto& s : step.atoms())
        for (int i = 0; i < d; ++i) {
            slo[i] = std::min<long>(slo[i], s.elem[i]);
            shi[i] = std::max<long>(shi[i], s.elem[i]);
        }
    out.lo.resize(d);
    out.ext.resize(d);
    double total = 1;
    for (int i = 0; i < d; ++i) {
        out.lo[i] = a.lo[i] + slo[i];
        out.ext[i] = a.ext[i] + (shi[i] - slo[i]);
        total *= static_cast<double>(out.ext[i]);
    }
    if (total > static_cast<double>(lim.support_cap))
        throw resource_error("lattice box exceeds support cap " + std::to_string(lim.support_cap));
    out.mass.assign(static_cast<size_t>(total), 0.0);
    // strides of the output box
    std::vector<long> stride(d, 1);
    for (int i = d - 2; i >= 0; --i) stride[i] = stride[i + 1] * out.ext[i + 1];
    std::vector<long> shift;
    for (const auto& s : step.atoms()) {
        long off = 0;
        for (int i = 0; i < d; ++i) off += (s.elem[i] - slo[i]) * stride[i];
        shift.push_back(off);
    }
    std::vector<long> idx(d, 0);
    for (size_t c = 0; c < a.mass.size(); ++c) {
        double m = a.mass[c];
        if (m != 0) {
            long base = 0;
            for (int i = 0; i < d; ++i) base += idx[i] * stride[i];
            for (size_t j = 0; j < shift.size(); ++j) out.mass[base + shift[j]] += m * step.atoms()[j].mass;
        }
        for (int i = d - 1; i >= 0; --i) {
            if (++idx[i] < a.ext[i]) break;
            idx[i] = 0;
        }
    }
    return out;
}

// ---------------------------------------------------------------- powers

const char* path_name(power_path p) {
    switch (p) {
        case power_path::sparse: return "sparse";
        case power_path::radial: return "radial";
        case power_path::lattice: return "lattice";
    }
    return "?";
}

power_policy parse_policy(const std::string& s) {
    if (s == "auto" || s == "automatic") return power_policy::automatic;
    if (s == "exact" || s == "sparse" || s == "cap") return power_policy::exact;
    if (s == "radial") return power_policy::radial;
    if (s == "lattice") return power_policy::lattice;
    throw config_error("unknown convolution policy '" + s + "'");
}

walk_powers::walk_powers(const sparse_measure& mu, power_policy policy, const conv_limits& lim)
    : base_(mu), lim_(lim), path_(power_path::sparse), state_(sparse_measure::dirac(mu.grp())) {
    const group& g = mu.grp();
    auto rad = radial_measure::from_sparse(mu);
    bool lat_ok = g.fam() == family::abelian || g.fam() == family::cyclic;
    switch (policy) {
        case power_policy::automatic:
            if (rad)
                path_ = power_path::radial;
            else if (lat_ok)
                path_ = power_path::lattice;
            break;
        case power_policy::exact: break;
        case power_policy::radial:
            if (!rad) throw domain_error("radial path requested but the measure is not radial on a free group");
            path_ = power_path::radial;
            break;
        case power_policy::lattice:
            if (!lat_ok) throw domain_error("lattice path requested on a non-abelian family");
            path_ = power_path::lattice;
            break;
    }
    if (path_ == power_path::radial) {
        radial_step_ = rad;
        radial_measure id;
        id.k = g.rank();
        id.sphere_mass = Eigen::VectorXd::Ones(1);
        state_ = id;
    } else if (path_ == power_path::lattice) {
        state_ = lattice_measure::from_sparse(sparse_measure::dirac(g));
    }
}

void walk_powers::advance() {
    switch (path_) {
        case power_path::sparse: state_ = convolve(std::get<sparse_measure>(state_), base_, lim_); break;
        case power_path::radial: state_ = radial_convolve(std::get<radial_measure>(state_), *radial_step_); break;
        case power_path::lattice: state_ = lattice_convolve(std::get<lattice_measure>(state_), base_, lim_); break;
    }
    ++n_;
}

void walk_powers::advance_to(int n) {
    if (n < n_) throw domain_error("walk_powers cannot rewind");
    while (n_ < n) advance();
}

namespace {

template <class F>
void visit_cells(const lattice_measure& L, F&& f) {
    for (size_t i = 0; i < L.mass.size(); ++i)
        if (L.mass[i] > 0) f(i, L.mass[i]);
}

long lattice_length(const lattice_measure& L, const group& g, size_t idx) {
    if (L.periodic) {
        long r = static_cast<long>(idx);
        return std::min<long>(r, g.order() - r);
    }
    long s = 0;
    for (int i = L.d - 1; i >= 0; --i) {
        s += std::labs(L.lo[i] + static_cast<long>(idx % L.ext[i]));
        idx /= L.ext[i];
    }
    return s;
}

}  // namespace

double walk_powers::entropy() const {
    kahan_sum k;
    switch (path_) {
        case power_path::sparse:
            for (const auto& a : std::get<sparse_measure>(state_).atoms()) k.add(-a.mass * std::log(a.mass));
            break;
        case power_path::radial: {
            const auto& R = std::get<radial_measure>(state_);
            for (long r = 0; r <= R.radius(); ++r) {
                double m = R.sphere_mass[r];
                if (m > 0) k.add(-m * (std::log(m) - R.log_sphere_size(r)));
            }
            break;
        }
        case power_path::lattice:
            visit_cells(std::get<lattice_measure>(state_), [&](size_t, double m) { k.add(-m * std::log(m)); });
            break;
    }
    return std::max(0.0, k.value());
}

double walk_powers::log_lq_norm(double q) const {
    if (!(q > 0)) throw domain_error("lq exponent must be positive");
    log_sum_exp acc;
    switch (path_) {
        case power_path::sparse:
            for (const auto& a : std::get<sparse_measure>(state_).atoms()) acc.add(q * std::log(a.mass));
            break;
        case power_path::radial: {
            const auto& R = std::get<radial_measure>(state_);
            for (long r = 0; r <= R.radius(); ++r) {
                if (R.sphere_mass[r] <= 0) continue;
                double ls = R.log_sphere_size(r);
                acc.add(ls + q * (std::log(R.sphere_mass[r]) - ls));
            }
            break;
        }
        case power_path::lattice:
            visit_cells(std::get<lattice_measure>(state_), [&](size_t, double m) { acc.add(q * std::log(m)); });
            break;
    }
    return acc.value() / q;
}

double walk_powers::identity_mass() const {
    switch (path_) {
        case power_path::sparse: return std::get<sparse_measure>(state_).mass(grp().identity());
        case power_path::radial: return std::get<radial_measure>(state_).sphere_mass[0];
        case power_path::lattice: return std::get<lattice_measure>(state_).at(grp().identity());
    }
    return 0;
}

double walk_powers::log_mass_at(const element& x) const {
    double m = 0;
    switch (path_) {
        case power_path::sparse: m = std::get<sparse_measure>(state_).mass(x); break;
        case power_path::radial: return std::get<radial_measure>(state_).log_atom_mass(static_cast<long>(x.size()));
        case power_path::lattice: m = std::get<lattice_measure>(state_).at(x); break;
    }
    return m > 0 ? std::log(m) : neg_inf;
}

double walk_powers::length_moment(const std::function<double(long)>& f) const {
    kahan_sum k;
    switch (path_) {
        case power_path::sparse: {
            const auto& S = std::get<sparse_measure>(state_);
            for (const auto& a : S.atoms()) k.add(a.mass * f(S.grp().length(a.elem)));
            break;
        }
        case power_path::radial: {
            const auto& R = std::get<radial_measure>(state_);
            for (long r = 0; r <= R.radius(); ++r)
                if (R.sphere_mass[r] > 0) k.add(R.sphere_mass[r] * f(r));
            break;
        }
        case power_path::lattice: {
            const auto& L = std::get<lattice_measure>(state_);
            visit_cells(L, [&](size_t i, double m) { k.add(m * f(lattice_length(L, grp(), i))); });
            break;
        }
    }
    return k.value();
}

double walk_powers::speed_term() const {
    return length_moment([](long r) { return static_cast<double>(r); });
}

size_t walk_powers::support_size() const {
    switch (path_) {
        case power_path::sparse: return std::get<sparse_measure>(state_).size();
        case power_path::radial: {
            size_t c = 0;
            const auto& R = std::get<radial_measure>(state_);
            for (long r = 0; r <= R.radius(); ++r) c += R.sphere_mass[r] > 0;
            return c;
        }
        case power_path::lattice: {
            size_t c = 0;
            for (double m : std::get<lattice_measure>(state_).mass) c += m > 0;
            return c;
        }
    }
    return 0;
}

void walk_powers::for_each_atom(const std::function<void(const element&, double)>& fn) const {
    switch (path_) {
        case power_path::sparse:
            for (const auto& a : std::get<sparse_measure>(state_).atoms()) fn(a.elem, a.mass);
            break;
        case power_path::radial: {
            const auto& R = std::get<radial_measure>(state_);
            auto sp = R.to_sparse(grp());
            for (const auto& a : sp.atoms()) fn(a.elem, a.mass);
            break;
        }
        case power_path::lattice: {
            const auto& L = std::get<lattice_measure>(state_);
            visit_cells(L, [&](size_t i, double m) {
                element e = L.cell_element(i);
                fn(e, m);
            });
            break;
        }
    }
}

void walk_powers::for_each_sphere(const std::function<void(long, double, double)>& fn) const {
    const auto* R = radial();
    if (!R) throw domain_error("sphere visitor needs the radial path");
    for (long r = 0; r <= R->radius(); ++r)
        if (R->sphere_mass[r] > 0) fn(r, R->sphere_mass[r], R->log_sphere_size(r));
}

sparse_measure convolution_power(const sparse_measure& mu, int n, power_policy policy, const conv_limits& lim) {
    if (n < 0) throw domain_error("convolution power must be non-negative");
    walk_powers w(mu, policy, lim);
    w.advance_to(n);
    if (auto* s = w.sparse()) return *s;
    if (auto* r = w.radial()) return r->to_sparse(mu.grp());
    std::vector<atom> atoms;
    w.for_each_atom([&](const element& e, double m) { atoms.push_back({e, m}); });
    return sparse_measure::from_atoms(mu.grp(), atoms, false);
}

double shannon_entropy(const sparse_measure& mu) {
    kahan_sum k;
    for (const auto& a : mu.atoms()) k.add(-a.mass * std::log(a.mass));
    return std::max(0.0, k.value());
}

double lq_norm(const sparse_measure& mu, double q) {
    if (!(q > 1.0)) throw domain_error("lq_norm needs q > 1");
    kahan_sum k;
    for (const auto& a : mu.atoms()) k.add(std::pow(a.mass, q));
    return std::pow(k.value(), 1.0 / q);
}

double log_moment(const sparse_measure& mu, const std::function<double(const element&)>& f) {
    kahan_sum k;
    for (const auto& a : mu.atoms()) k.add(a.mass * f(a.elem));
    return k.value();
}

double alpha_moment(const sparse_measure& mu, double alpha) {
    const group& g = mu.grp();
    return log_moment(mu, [&](const element& e) { return std::pow(static_cast<double>(g.length(e)), alpha); });
}

double speed_term(const sparse_measure& mu) {
    const group& g = mu.grp();
    return log_moment(mu, [&](const element& e) { return static_cast<double>(g.length(e)); });
}

path_stats sample_paths(const sparse_measure& mu, long n, long count, uint64_t seed,
                        const std::function<double(const element&)>& log_mass, int threads) {
    if (count < 1) throw config_error("sample_paths needs count >= 1");
    if (n < 0) throw config_error("sample_paths needs n >= 0");
    const group& g = mu.grp();
    path_stats st;
    st.n = n;
    st.count = count;
    st.seed = seed;
    st.has_kv = static_cast<bool>(log_mass);
    st.has_speed = g.fam() != family::lamplighter || n <= g.limits().length_radius_cap;
    std::vector<double> probs;
    for (const auto& a : mu.atoms()) probs.push_back(a.mass);
    std::vector<double> len(count, 0.0), kv(count, 0.0);
    std::vector<char> ret(count, 0);
    std::vector<char> speed_ok(count, 1);

    auto run = [&](long begin, long end) {
        std::discrete_distribution<size_t> pick(probs.begin(), probs.end());
        for (long p = begin; p < end; ++p) {
            std::mt19937_64 rng(stream_seed(seed, static_cast<uint64_t>(p)));
            pick.reset();
            element w = g.identity();
            for (long i = 0; i < n; ++i) g.right_multiply(w, mu.atoms()[pick(rng)].elem);
            if (st.has_speed) {
                try {
                    len[p] = static_cast<double>(g.length(w));
                } catch (const resource_error&) {
                    speed_ok[p] = 0;
                }
            }
            if (log_mass) kv[p] = -log_mass(w);
            ret[p] = g.is_identity(w);
        }
    };
    threads = std::max(1, threads);
    if (threads == 1 || count < 2 * threads) {
        run(0, count);
    } else {
        std::vector<std::thread> pool;
        long block = (count + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            long b = t * block, e = std::min(count, b + block);
            if (b < e) pool.emplace_back(run, b, e);
        }
        for (auto& th : pool) th.join();
    }
    // fixed-order reduction
    for (char ok : speed_ok)
        if (!ok) st.has_speed = false;
    auto mean_sd = [&](const std::vector<double>& v, double& mean, double& se) {
        kahan_sum s;
        for (double x : v) s.add(x);
        mean = s.value() / static_cast<double>(count);
        kahan_sum s2;
        for (double x : v) s2.add((x - mean) * (x - mean));
        double var = count > 1 ? s2.value() / static_cast<double>(count - 1) : 0.0;
        se = std::sqrt(var / static_cast<double>(count));
    };
    double denom = n > 0 ? static_cast<double>(n) : 1.0;
    if (st.has_speed) {
        double m, se;
        mean_sd(len, m, se);
        st.speed = n > 0 ? m / denom : 0.0;
        st.speed_stderr = n > 0 ? se / denom : 0.0;
    }
    if (st.has_kv) {
        double m, se;
        mean_sd(kv, m, se);
        st.kv_entropy = n > 0 ? m / denom : 0.0;
        st.kv_stderr = n > 0 ? se / denom : 0.0;
    }
    long r = 0;
    for (char c : ret) r += c;
    st.return_fraction = static_cast<double>(r) / static_cast<double>(count);
    return st;
}

}  // namespace rwlab
