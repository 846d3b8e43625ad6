#include "rwlab/boundary.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "rwlab/errors.hpp"
#include "rwlab/numeric.hpp"

namespace rwlab {

namespace {

rational q_power(long q, int e) {
    boost::multiprecision::cpp_int p = 1;
    for (int i = 0; i < std::abs(e); ++i) p *= q;
    return e >= 0 ? rational(p) : rational(boost::multiprecision::cpp_int(1), p);
}

std::vector<rational> exact_masses(const sparse_measure& mu) {
    if (mu.has_exact()) return mu.exact();
    std::vector<rational> out;
    for (const auto& a : mu.atoms()) out.emplace_back(a.mass);
    return out;
}

void require_free(const group& g, const char* what) {
    if (g.fam() != family::free || g.rank() < 2)
        throw domain_error(std::string(what) + " needs a free group of rank >= 2, got " + g.spec());
}

void require_match(const sparse_measure& mu, const cylinder_measure& nu) {
    if (mu.grp() != nu.grp()) throw domain_error("measure lives on " + mu.grp().spec() + ", boundary on " + nu.grp().spec());
    if (mu.max_length() > nu.depth())
        throw domain_error("cylinder depth " + std::to_string(nu.depth()) + " is below the support radius " +
                           std::to_string(mu.max_length()));
}

element prefix(const element& w, size_t m) { return element(w.begin(), w.begin() + static_cast<long>(std::min(m, w.size()))); }

double to_double(const rational& r) { return r.convert_to<double>(); }

}  // namespace

// ---------------------------------------------------------------- cylinders

cylinder_measure cylinder_measure::harmonic(int k, int depth, int depth_cap) {
    if (k < 2) throw domain_error("boundary measure needs rank >= 2");
    if (depth < 1) throw config_error("cylinder depth must be >= 1");
    if (depth > depth_cap)
        throw resource_error("cylinder depth " + std::to_string(depth) + " exceeds cap " + std::to_string(depth_cap));
    cylinder_measure nu(group::free(k));
    nu.depth_ = depth;
    nu.words_ = nu.g_.sphere(depth);
    rational m = nu.mass(nu.words_.front());
    nu.masses_.assign(nu.words_.size(), m);
    nu.index_.reserve(nu.words_.size());
    for (size_t i = 0; i < nu.words_.size(); ++i) nu.index_.emplace(nu.words_[i], i);
    return nu;
}

std::optional<size_t> cylinder_measure::index_of(const element& w) const {
    auto it = index_.find(w);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

rational cylinder_measure::mass(const element& w) const {
    if (w.empty()) return rational(1);
    return rational(1, 2L * k()) * q_power(q(), -static_cast<int>(w.size() - 1));
}

std::vector<element> cylinder_measure::image_cylinders(const element& s, const element& w) const {
    if (s.size() > w.size()) throw domain_error("image of C_w under s needs |s| <= |w|");
    if (s.empty()) return {w};
    int j = cancellation(s, w);
    if (static_cast<size_t>(j) < w.size()) return {g_.multiply(s, w)};
    // s = w^-1: the image is everything not starting with the inverse of w's last letter
    std::vector<element> out;
    for (int x = -k(); x <= k(); ++x)
        if (x != 0 && x != -w.back()) out.push_back({x});
    return out;
}

rational cylinder_measure::image_mass(const element& s, const element& w) const {
    rational t = 0;
    for (const auto& c : image_cylinders(s, w)) t += mass(c);
    return t;
}

cylinder_measure cylinder_measure::refine() const {
    return harmonic(k(), depth_ + 1, std::numeric_limits<int>::max());
}

rational total_mass(const cylinder_measure& nu) {
    rational t = 0;
    for (const auto& m : nu.masses()) t += m;
    return t;
}

bool refinement_consistent(const cylinder_measure& nu) {
    auto fine = nu.refine();
    std::vector<rational> sums(nu.size(), rational(0));
    for (size_t i = 0; i < fine.size(); ++i) {
        auto idx = nu.index_of(prefix(fine.words()[i], nu.depth()));
        if (!idx) return false;
        sums[*idx] += fine.masses()[i];
    }
    for (size_t i = 0; i < nu.size(); ++i)
        if (sums[i] != nu.masses()[i]) return false;
    return true;
}

std::vector<rational> stationarity_defect(const sparse_measure& mu, const cylinder_measure& nu) {
    require_match(mu, nu);
    auto ex = exact_masses(mu);
    const group& g = nu.grp();
    std::vector<rational> out(nu.size());
    for (size_t i = 0; i < nu.size(); ++i) {
        rational acc = 0;
        for (size_t a = 0; a < mu.size(); ++a) acc += ex[a] * nu.image_mass(g.inverse(mu.atoms()[a].elem), nu.words()[i]);
        out[i] = acc - nu.masses()[i];
    }
    return out;
}

bool is_stationary(const sparse_measure& mu, const cylinder_measure& nu) {
    for (const auto& d : stationarity_defect(mu, nu))
        if (d != 0) return false;
    return true;
}

int cancellation(const element& s, const element& w) {
    int j = 0;
    while (static_cast<size_t>(j) < s.size() && static_cast<size_t>(j) < w.size() && s[s.size() - 1 - j] == -w[j]) ++j;
    return j;
}

// ---------------------------------------------------------------- cocycle

rational rho_on(const cylinder_measure& nu, const element& s, const element& w) {
    if (s.empty()) return rational(1);
    return nu.image_mass(s, w) / nu.mass(w);
}

rn_cocycle rn_derivative(const element& s, const cylinder_measure& nu) {
    nu.grp().validate(s);
    if (static_cast<long>(s.size()) > nu.depth())
        throw domain_error("rho(s, .) is not constant on depth-" + std::to_string(nu.depth()) + " cylinders when |s| = " +
                           std::to_string(s.size()));
    rn_cocycle r;
    r.s = s;
    r.depth = nu.depth();
    r.q = nu.q();
    r.value.reserve(nu.size());
    for (const auto& w : nu.words()) {
        rational v = rho_on(nu, s, w);
        int e = 2 * cancellation(s, w) - static_cast<int>(s.size());
        if (v != q_power(r.q, e)) throw domain_error("cocycle value on " + nu.grp().format(w) + " is not a power of q");
        r.value.push_back(v);
        r.q_exponent.push_back(e);
    }
    return r;
}

rational integrate(const rn_cocycle& rho, const cylinder_measure& nu) {
    rational t = 0;
    for (size_t i = 0; i < nu.size(); ++i) t += rho.value[i] * nu.masses()[i];
    return t;
}

long cocycle_mismatches(int k, const element& s, const element& t) {
    int m = std::max<int>(1, static_cast<int>(s.size() + t.size()));
    auto nu = cylinder_measure::harmonic(k, m, std::numeric_limits<int>::max());
    const group& g = nu.grp();
    g.validate(s);
    g.validate(t);
    element st = g.multiply(s, t);
    long bad = 0;
    for (const auto& w : nu.words()) {
        rational lhs = rho_on(nu, st, w);
        rational first = 1;
        if (!s.empty()) first = rho_on(nu, s, g.multiply(t, w));  // t C_w is one cylinder of length >= |s|
        if (lhs != first * rho_on(nu, t, w)) ++bad;
    }
    return bad;
}

// ---------------------------------------------------------------- laws, Xi, entropy

exponent_law rho_exponent_law(const element& s, const cylinder_measure& nu) {
    auto r = rn_derivative(s, nu);
    exponent_law law;
    for (size_t i = 0; i < nu.size(); ++i) law[r.q_exponent[i]] += nu.masses()[i];
    return law;
}

exponent_law radial_exponent_law(int k, long r) {
    if (k < 2) throw domain_error("radial law needs rank >= 2");
    if (r < 0) throw domain_error("radius must be non-negative");
    exponent_law law;
    if (r == 0) {
        law[0] = 1;
        return law;
    }
    const long q = 2L * k - 1;
    const rational first(1, 2L * k);
    // P(j = i) for the cancellation length j of a fixed word of length r against a boundary point
    law[static_cast<int>(-r)] = 1 - first;
    for (long i = 1; i < r; ++i)
        law[static_cast<int>(2 * i - r)] = first * q_power(q, -static_cast<int>(i - 1)) - first * q_power(q, -static_cast<int>(i));
    law[static_cast<int>(r)] += first * q_power(q, -static_cast<int>(r - 1));
    return law;
}

double law_moment(const exponent_law& law, long q, double t) {
    kahan_sum s;
    for (const auto& [e, m] : law) s.add(to_double(m) * std::pow(static_cast<double>(q), e * t));
    return s.value();
}

double harish_chandra_xi(const element& s, const cylinder_measure& nu) {
    if (s.empty()) return 1.0;
    return law_moment(rho_exponent_law(s, nu), nu.q(), 0.5);
}

double log_xi_radial(int k, long r) {
    if (k < 2) throw domain_error("radial Xi needs rank >= 2");
    if (r <= 0) return 0.0;
    const double q = 2.0 * k - 1.0;
    // sum of the radial law: q^{-r/2} (2q + (r-1)(q-1)) / (q+1)
    return -0.5 * static_cast<double>(r) * std::log(q) + std::log((2 * q + static_cast<double>(r - 1) * (q - 1)) / (q + 1));
}

furstenberg_value furstenberg_entropy(const sparse_measure& mu, const cylinder_measure& nu) {
    require_match(mu, nu);
    auto ex = exact_masses(mu);
    furstenberg_value out;
    out.q = nu.q();
    rational c = 0;
    for (size_t a = 0; a < mu.size(); ++a) {
        const element& s = mu.atoms()[a].elem;
        if (s.empty()) continue;
        rational inner = 0;
        for (const auto& [e, m] : rho_exponent_law(s, nu)) inner += m * e;
        c -= ex[a] * inner;
    }
    out.log_q_coefficient = c;
    out.value = to_double(c) * std::log(static_cast<double>(out.q));
    return out;
}

finite_space cyclic_self_space(int n) {
    if (n < 1) throw config_error("cyclic space needs n >= 1");
    finite_space x;
    x.xi.assign(n, rational(1, n));
    x.act = [n](const element& s, size_t p) { return static_cast<size_t>((s.at(0) + static_cast<long>(p)) % n); };
    return x;
}

bool is_stationary(const sparse_measure& mu, const finite_space& x) {
    auto ex = exact_masses(mu);
    std::vector<rational> pushed(x.xi.size(), rational(0));
    for (size_t a = 0; a < mu.size(); ++a)
        for (size_t p = 0; p < x.xi.size(); ++p) pushed[x.act(mu.atoms()[a].elem, p)] += ex[a] * x.xi[p];
    return pushed == x.xi;
}

double furstenberg_entropy(const sparse_measure& mu, const finite_space& x) {
    kahan_sum s;
    for (size_t a = 0; a < mu.size(); ++a) {
        for (size_t p = 0; p < x.xi.size(); ++p) {
            if (x.xi[p] == 0) continue;
            rational rho = x.xi[x.act(mu.atoms()[a].elem, p)] / x.xi[p];
            if (rho == 1) continue;
            s.add(-mu.atoms()[a].mass * to_double(x.xi[p]) * std::log(to_double(rho)));
        }
    }
    return s.value();
}

// ---------------------------------------------------------------- Koopman

double koopman_pairing(const sparse_measure& mu, const cylinder_measure& nu, double p) {
    if (!(p >= 1.0)) throw config_error("pairing exponent p must be >= 1");
    require_match(mu, nu);
    kahan_sum s;
    for (const auto& a : mu.atoms()) {
        if (a.elem.empty()) {
            s.add(a.mass);
            continue;
        }
        s.add(a.mass * law_moment(rho_exponent_law(a.elem, nu), nu.q(), 1.0 / p));
    }
    return s.value();
}

estimate_report koopman_limit(const sparse_measure& mu, const cylinder_measure& nu, const pairing_config& cfg) {
    estimate_report rep;
    rep.quantity = "koopman_pairing_limit";
    rep.params = {{"group", nu.grp().spec()}, {"depth", nu.depth()}, {"p_grid", cfg.p_grid}, {"fit_fraction", cfg.fit_fraction},
                  {"monotone_slack", cfg.monotone_slack}};
    asymptotic_sequence vals("neg_p_log_pairing", index_kind::exponent);
    nlohmann::json per_p = nlohmann::json::array();
    for (double p : cfg.p_grid) {
        double pr = koopman_pairing(mu, nu, p);
        vals.push(p, -p * std::log(pr));
        per_p.push_back({{"p", p}, {"pairing", pr}});
    }
    auto f = vals.fit_inverse_index(cfg.fit_fraction);
    auto fe = furstenberg_entropy(mu, nu);
    rep.estimate = f.c0;
    rep.lower = vals.max_value();
    rep.upper = fe.value;
    rep.estimate = std::clamp(rep.estimate, *rep.lower, std::max(*rep.lower, *rep.upper));
    rep.method = "closed-form pairing, 1/p fit";
    bool mono = vals.non_decreasing(cfg.monotone_slack);
    if (!mono) rep.flags.push_back("non_monotone");
    rep.diagnostics = {{"fit", {{"c0", f.c0}, {"c1", f.c1}, {"residual", f.residual}, {"points", f.points}}},
                       {"monotone", mono},
                       {"furstenberg_entropy", fe.value},
                       {"furstenberg_log_q_coefficient", fe.log_q_coefficient.str()},
                       {"per_p", per_p}};
    rep.sequences = {vals};
    return rep;
}

estimate_report xi_entropy_limit(const sparse_measure& mu, int n_max, power_policy policy, const conv_limits& lim) {
    require_free(mu.grp(), "Xi entropy");
    if (n_max < 1) throw config_error("n_max must be >= 1");
    const int k = mu.grp().rank();
    estimate_report rep;
    rep.quantity = "xi_entropy_limit";
    rep.params = {{"group", mu.grp().spec()}, {"n_max", n_max}};
    asymptotic_sequence per_n("per_n"), diff("difference");
    std::vector<double> table;
    auto log_xi = [&](long r) {
        while (static_cast<long>(table.size()) <= r) table.push_back(log_xi_radial(k, static_cast<long>(table.size())));
        return table[r];
    };
    walk_powers wp(mu, policy, lim);
    double prev = 0;
    for (int n = 1; n <= n_max; ++n) {
        wp.advance();
        kahan_sum s;
        if (wp.radial())
            wp.for_each_sphere([&](long r, double m, double) { s.add(m * log_xi(r)); });
        else
            wp.for_each_atom([&](const element& e, double m) { s.add(m * log_xi(static_cast<long>(e.size()))); });
        double total = -2.0 * s.value();
        per_n.push(n, total / n);
        diff.push(n, total - prev);
        prev = total;
    }
    rep.params["path"] = path_name(wp.path());
    rep.estimate = mu.is_dirac_identity() ? 0.0 : diff.back().value;
    rep.lower = 0.0;
    rep.method = "radial Xi table, last difference";
    rep.diagnostics["per_n_last"] = per_n.back().value;
    rep.sequences = {per_n, diff};
    return rep;
}

koopman_bound koopman_norm_lower(const sparse_measure& mu, const cylinder_measure& nu, double q, int iters,
                                 size_t dim_cap) {
    if (!(q > 1.0)) throw config_error("Koopman exponent q must exceed 1");
    require_match(mu, nu);
    koopman_bound out;
    if (mu.is_dirac_identity()) {
        out.bound = out.pairing = out.norm_ratio = out.cw_ratio = 1.0;
        out.dimension = nu.size();
        return out;
    }
    const group& g = nu.grp();
    const size_t dim = nu.size();
    if (dim > dim_cap) throw resource_error("Koopman truncation of dimension " + std::to_string(dim) + " exceeds cap");
    out.dimension = dim;
    const int m = nu.depth();
    const long L = mu.max_length();
    const int M = m + static_cast<int>(L);
    auto fine = g.sphere(M);
    const double qd = static_cast<double>(nu.q());
    const double sub = std::pow(qd, -static_cast<double>(M - m));  // nu(C_z) / nu(C_w) for z below w
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(static_cast<long>(dim), static_cast<long>(dim));
    for (const auto& a : mu.atoms()) {
        element sinv = g.inverse(a.elem);
        for (const auto& z : fine) {
            element w = prefix(z, m);
            element v = prefix(g.multiply(sinv, z), m);
            int e = 2 * cancellation(sinv, w) - static_cast<int>(sinv.size());
            auto wi = nu.index_of(w), vi = nu.index_of(v);
            if (!wi || !vi) throw domain_error("cylinder bookkeeping failed");
            T(static_cast<long>(*wi), static_cast<long>(*vi)) += a.mass * std::pow(qd, e / q) * sub;
        }
    }
    Eigen::VectorXd weight(static_cast<long>(dim));
    for (size_t i = 0; i < dim; ++i) weight(static_cast<long>(i)) = to_double(nu.masses()[i]);
    auto norm = [&](const Eigen::VectorXd& f) {
        double s = 0;
        for (long i = 0; i < f.size(); ++i) s += weight(i) * std::pow(std::fabs(f(i)), q);
        return std::pow(s, 1.0 / q);
    };
    Eigen::VectorXd f = Eigen::VectorXd::Ones(static_cast<long>(dim));
    out.pairing = weight.dot(T * f);
    for (int it = 0; it < iters; ++it) {
        Eigen::VectorXd h = T * f;
        double nf = norm(f), nh = norm(h);
        if (!(nh > 0)) break;
        out.norm_ratio = std::max(out.norm_ratio, nh / nf);
        double cw = std::numeric_limits<double>::infinity();
        for (long i = 0; i < f.size(); ++i)
            if (f(i) > 0) cw = std::min(cw, h(i) / f(i));
        if (std::isfinite(cw)) out.cw_ratio = std::max(out.cw_ratio, cw);
        f = h / nh;
        out.iterations = it + 1;
    }
    out.bound = std::max({out.pairing, out.norm_ratio, out.cw_ratio});
    return out;
}

}  // namespace rwlab
