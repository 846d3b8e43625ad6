#include "rwlab/dlvp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "rwlab/errors.hpp"
#include "rwlab/numeric.hpp"

namespace rwlab {

element_function named_function(const group& g, const std::string& name) {
    if (name == "log1pL") return [g](const element& e) { return std::log1p(static_cast<double>(g.length(e))); };
    if (name == "L") return [g](const element& e) { return static_cast<double>(g.length(e)); };
    if (name == "zero") return [](const element&) { return 0.0; };
    throw config_error("unknown test function '" + name + "' (expected log1pL, L or zero)");
}

dlvp_bundle dlvp_bundle::build(const sparse_measure& mu, const element_function& f, const dlvp_config& cfg) {
    std::vector<std::pair<double, double>> mv;
    mv.reserve(mu.size());
    for (const auto& a : mu.atoms()) {
        double v = f(a.elem);
        if (!(v >= 0) || !std::isfinite(v))
            throw domain_error("test function must be finite and non-negative, got " + std::to_string(v) + " at " +
                               mu.grp().format(a.elem));
        mv.emplace_back(a.mass, v);
    }
    return from_values(std::move(mv), cfg);
}

dlvp_bundle dlvp_bundle::from_values(std::vector<std::pair<double, double>> mass_value, const dlvp_config& cfg) {
    if (cfg.max_thresholds < 1) throw config_error("max_thresholds must be >= 1");
    if (!(cfg.grid_step > 0)) throw config_error("grid step must be positive");
    dlvp_bundle b;
    kahan_sum total;
    for (const auto& [m, v] : mass_value) {
        if (!(m > 0) || !(v >= 0) || !std::isfinite(v)) throw domain_error("masses must be positive and values finite non-negative");
        total.add(m);
    }
    double deficit = 1.0 - total.value();
    if (deficit < -1e-12) throw domain_error("total mass exceeds 1");
    if (deficit > 1e-12 && !cfg.declared_tail)
        throw domain_error("tail bound cannot be certified: mass " + std::to_string(deficit) +
                           " lies outside the support and no tail bound was declared");
    b.declared_ = cfg.declared_tail.value_or(0.0);
    if (b.declared_ < 0) throw config_error("declared tail must be non-negative");
    std::sort(mass_value.begin(), mass_value.end(), [](const auto& a, const auto& c) { return a.second > c.second; });
    b.atoms_ = std::move(mass_value);

    long prev = 0;
    for (int n = 1; n <= cfg.max_thresholds; ++n) {
        double bound = std::ldexp(1.0, -n);
        if (b.declared_ >= bound) break;
        long c = prev + 1;
        while (b.tail(static_cast<double>(c)) + b.declared_ >= bound) {
            // jump to the next value where the tail changes
            double next = std::numeric_limits<double>::infinity();
            for (const auto& [m, v] : b.atoms_)
                if (v >= static_cast<double>(c)) next = v;  // smallest value still counted
            c = std::max(c + 1, static_cast<long>(std::floor(next)));
        }
        b.c_.push_back(c);
        prev = c;
        if (b.declared_ == 0 && b.tail(static_cast<double>(c)) == 0) {
            b.complete_ = true;
            break;
        }
    }
    if (b.c_.empty())
        throw domain_error("tail bound cannot be certified: uncertified tail mass " + std::to_string(b.declared_) +
                           " is not below 1/2");
    b.Psi_at_.assign(b.c_.size(), 0.0);
    for (size_t i = 1; i < b.c_.size(); ++i) {
        // psi goes from i-1 to i across [c_i, c_{i+1}] (1-based), trapezoid is exact
        b.Psi_at_[i] = b.Psi_at_[i - 1] + static_cast<double>(b.c_[i] - b.c_[i - 1]) * (2.0 * static_cast<double>(i) - 1.0) / 2.0;
    }
    b.locate_constants(cfg);
    return b;
}

double dlvp_bundle::tail(double c) const {
    kahan_sum s;
    for (const auto& [m, v] : atoms_) {
        if (v <= c) break;
        s.add(m * v);
    }
    return s.value();
}

double dlvp_bundle::covered_to() const {
    return complete_ ? std::numeric_limits<double>::infinity() : static_cast<double>(c_.back());
}

void dlvp_bundle::check_range(double y) const {
    if (!(y >= 0)) throw domain_error("argument must be non-negative, got " + std::to_string(y));
    if (y > covered_to())
        throw domain_error("argument " + std::to_string(y) + " lies beyond the certified thresholds (last " +
                           std::to_string(c_.back()) + ")");
}

double dlvp_bundle::phi(double y) const {
    check_range(y);
    auto it = std::lower_bound(c_.begin(), c_.end(), y, [](long c, double v) { return static_cast<double>(c) < v; });
    double count = static_cast<double>(it - c_.begin());
    double last = static_cast<double>(c_.back());
    if (complete_ && y > last) count += std::max(0.0, std::ceil(y - last) - 1.0);
    return count;
}

double dlvp_bundle::psi(double y) const {
    check_range(y);
    double c1 = static_cast<double>(c_.front());
    if (y <= c1) return 0.0;
    auto it = std::upper_bound(c_.begin(), c_.end(), y, [](double v, long c) { return v < static_cast<double>(c); });
    size_t n = static_cast<size_t>(it - c_.begin());  // c_[n-1] <= y
    double base = static_cast<double>(c_[n - 1]);
    if (n == c_.size()) return static_cast<double>(n - 1) + (y - base);
    return static_cast<double>(n - 1) + (y - base) / static_cast<double>(c_[n] - c_[n - 1]);
}

double dlvp_bundle::psi_slope(double y) const {
    check_range(y);
    if (y < static_cast<double>(c_.front())) return 0.0;
    auto it = std::upper_bound(c_.begin(), c_.end(), y, [](double v, long c) { return v < static_cast<double>(c); });
    size_t n = static_cast<size_t>(it - c_.begin());
    if (n == c_.size()) return 1.0;
    return 1.0 / static_cast<double>(c_[n] - c_[n - 1]);
}

double dlvp_bundle::Psi(double y) const {
    check_range(y);
    double c1 = static_cast<double>(c_.front());
    if (y <= c1) return 0.0;
    auto it = std::upper_bound(c_.begin(), c_.end(), y, [](double v, long c) { return v < static_cast<double>(c); });
    size_t n = static_cast<size_t>(it - c_.begin());
    double base = static_cast<double>(c_[n - 1]);
    double d = y - base;
    double at = static_cast<double>(n - 1);
    return Psi_at_[n - 1] + d * (at + psi(y)) / 2.0;
}

double dlvp_bundle::F(double y) const {
    if (!(y >= 0)) throw domain_error("argument must be non-negative, got " + std::to_string(y));
    return Psi(std::log1p(y));
}

double dlvp_bundle::dF(double y) const {
    if (!(y >= 0)) throw domain_error("argument must be non-negative, got " + std::to_string(y));
    return psi(std::log1p(y)) / (1.0 + y);
}

void dlvp_bundle::locate_constants(const dlvp_config& cfg) {
    // psi reaches 1 at the second threshold; F' decreases from there on
    double u1 = c_.size() >= 2 ? static_cast<double>(c_[1]) : static_cast<double>(c_[0] + 1);
    double horizon = std::max(20.0, 4.0 * std::expm1(u1));
    if (!complete_) horizon = std::min(horizon, std::expm1(covered_to()));
    step_ = cfg.grid_step;
    if (horizon / step_ > static_cast<double>(cfg.max_grid_points)) step_ = horizon / static_cast<double>(cfg.max_grid_points);
    const long last = static_cast<long>(std::floor(horizon / step_));
    long onset_idx = last;
    double d_next = dF(static_cast<double>(last) * step_);
    for (long j = last - 1; j >= 0; --j) {
        double d = dF(static_cast<double>(j) * step_);
        if (d < d_next - 1e-12 * d_next) break;
        onset_idx = j;
        d_next = d;
    }
    onset_ = static_cast<double>(onset_idx) * step_;
    const double reach = onset_ + 10.0;
    M1_ = 0;
    for (long j = 0; static_cast<double>(j) * step_ <= reach; ++j) M1_ = std::max(M1_, dF(static_cast<double>(j) * step_));
    for (long c : c_) {
        double y = std::expm1(static_cast<double>(c));
        if (y <= reach) M1_ = std::max(M1_, dF(y));
    }
    M_ = std::max(1.0, 2.0 * onset_ * M1_ - F(onset_));
}

nlohmann::json dlvp_bundle::to_json() const {
    nlohmann::json slopes = nlohmann::json::array(), tails = nlohmann::json::array();
    for (size_t i = 0; i + 1 < c_.size(); ++i) slopes.push_back(1.0 / static_cast<double>(c_[i + 1] - c_[i]));
    if (complete_) slopes.push_back(1.0);
    for (long c : c_) tails.push_back(tail(static_cast<double>(c)));
    return {{"thresholds", c_},
            {"slopes", slopes},
            {"Psi_at_thresholds", Psi_at_},
            {"tails", tails},
            {"complete", complete_},
            {"covered_to", complete_ ? nlohmann::json(nullptr) : nlohmann::json(c_.back())},
            {"uncertified_tail", declared_},
            {"onset", onset_},
            {"M1", M1_},
            {"M", M_},
            {"grid_step", step_}};
}

double theta(const dlvp_bundle& b, long length) { return b.F(static_cast<double>(length)) + b.M(); }

grid_violation check_weak_subadditivity(const dlvp_bundle& b, int grid) {
    if (grid < 0) throw config_error("grid size must be non-negative");
    grid_violation out;
    for (int i = 0; i <= grid; ++i)
        for (int j = 0; j <= grid; ++j) {
            double v = b.F(i + j) - b.F(i) - b.F(j);
            if (v > out.worst) {
                out.worst = v;
                out.y = i;
                out.y2 = j;
            }
        }
    out.within_M = out.worst <= b.M() + 1e-12;
    return out;
}

lipschitz_report check_psi(const dlvp_bundle& b, double y_max, double step) {
    if (!(step > 0)) throw config_error("step must be positive");
    lipschitz_report r;
    y_max = std::min(y_max, b.covered_to());
    double prev = b.psi(0);
    for (double y = step; y <= y_max; y += step) {
        double v = b.psi(y);
        double slope = (v - prev) / step;
        r.max_slope = std::max(r.max_slope, slope);
        if (v < prev - 1e-15) r.monotone = false;
        if (slope > 1.0 + 1e-9) r.lipschitz = false;
        if (v > b.phi(y) + 1e-12) r.dominated_by_phi = false;
        prev = v;
    }
    for (size_t n = 0; n < b.thresholds().size(); ++n)
        if (b.psi(static_cast<double>(b.thresholds()[n])) != static_cast<double>(n)) r.knots_exact = false;
    return r;
}

bool check_lambda_decreasing(const dlvp_bundle& b, double u_max, double step) {
    const auto& c = b.thresholds();
    double start = c.size() >= 2 ? static_cast<double>(c[1]) : static_cast<double>(c[0] + 1);
    u_max = std::min(u_max, b.covered_to());
    double prev = b.psi(start) * std::exp(-start);
    for (double u = start + step; u <= u_max; u += step) {
        double v = b.psi(u) * std::exp(-u);
        if (v > prev * (1 + 1e-12)) return false;
        prev = v;
    }
    return true;
}

integrability_report integrability_partial_sums(const sparse_measure& mu, const element_function& f, const dlvp_bundle& b) {
    integrability_report r;
    std::map<long, double> by_length;
    const group& g = mu.grp();
    for (const auto& a : mu.atoms()) by_length[g.length(a.elem)] += a.mass * b.Psi(f(a.elem));
    long top = by_length.empty() ? 0 : by_length.rbegin()->first;
    kahan_sum s;
    double prev = -1;
    for (long R = 0; R <= top; ++R) {
        auto it = by_length.find(R);
        if (it != by_length.end()) s.add(it->second);
        r.partial.push(static_cast<double>(R), s.value());
        if (s.value() < prev) r.increasing = false;
        prev = s.value();
    }
    r.bounded = s.value() <= r.bound;
    return r;
}

vanishing_report vanishing_chain(const sparse_measure& mu, const dlvp_bundle& b, double eps, int n_max,
                                 power_policy policy, const conv_limits& lim) {
    if (!(eps > 0)) throw config_error("eps must be positive");
    if (n_max < 1) throw config_error("n_max must be >= 1");
    vanishing_report r;
    r.eps = eps;
    // Psi(u)/u is non-decreasing, so {u : u <= eps Psi(u)} is a half line [u*, inf)
    auto good = [&](double u) { return u <= eps * b.Psi(u); };
    double hi = 1.0;
    while (!good(hi)) {
        hi *= 2;
        if (hi > b.covered_to() || hi > 1e12) throw domain_error("log(1+L) is not dominated by eps F on the certified range");
    }
    double lo = hi / 2 < 1 ? 0.0 : hi / 2;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (good(mid) ? hi : lo) = mid;
    }
    r.u_eps = hi;
    const group& g = mu.grp();
    {
        kahan_sum s;
        for (const auto& a : mu.atoms()) s.add(a.mass * theta(b, g.length(a.elem)));
        r.theta_step_mean = s.value();
    }
    walk_powers wp(mu, policy, lim);
    for (int n = 1; n <= n_max; ++n) {
        wp.advance();
        kahan_sum A, B;
        auto visit = [&](long len, double m) {
            A.add(m * std::log1p(static_cast<double>(len)));
            B.add(m * b.F(static_cast<double>(len)));
        };
        if (wp.radial())
            wp.for_each_sphere([&](long rr, double m, double) { visit(rr, m); });
        else
            wp.for_each_atom([&](const element& e, double m) { visit(g.length(e), m); });
        double lhs = A.value() / n, rhs = (eps * B.value() + r.u_eps) / n, th = (B.value() + b.M()) / n;
        r.log_length.push(n, lhs);
        r.bound.push(n, rhs);
        r.theta_avg.push(n, th);
        if (lhs > rhs + 1e-12) r.chain_holds = false;
        if (th > r.theta_step_mean * (1 + 1e-12)) r.theta_bounded = false;
    }
    return r;
}

}  // namespace rwlab
