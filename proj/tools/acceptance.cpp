// Acceptance run: one line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rwlab/boundary.hpp"
#include "rwlab/dlvp.hpp"
#include "rwlab/estimators.hpp"
#include "rwlab/numeric.hpp"
#include "rwlab/spectra.hpp"
#include "rwlab/weights.hpp"

using namespace rwlab;

namespace {

const double half_log3 = 0.5 * std::log(3.0);

struct outcome {
    bool pass = false;
    std::string detail;
};

class detail_log {
public:
    template <class T>
    detail_log& operator()(const std::string& key, T v) {
        if (!first_) s_ << ", ";
        first_ = false;
        s_ << key << "=" << v;
        return *this;
    }
    std::string str() const { return s_.str(); }

private:
    std::ostringstream s_;
    bool first_ = true;
};

estimator_config with_n(int n) {
    estimator_config c;
    c.n_max = n;
    return c;
}

element random_word(const group& g, std::mt19937_64& rng, int max_steps) {
    element w = g.identity();
    int steps = static_cast<int>(rng() % (max_steps + 1));
    for (int i = 0; i < steps; ++i) g.right_multiply(w, g.generators()[rng() % g.generators().size()]);
    return w;
}

sparse_measure random_prob(const group& g, std::mt19937_64& rng, int atoms, int steps) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<atom> a;
    double tot = 0;
    for (int i = 0; i < atoms; ++i) {
        element w = g.identity();
        int len = 1 + static_cast<int>(rng() % steps);
        for (int j = 0; j < len; ++j) g.right_multiply(w, g.generators()[rng() % g.generators().size()]);
        double m = u(rng);
        tot += m;
        a.push_back({w, m});
    }
    for (auto& x : a) x.mass /= tot;
    return sparse_measure::from_atoms(g, a, false);
}

weight random_weight(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    switch (rng() % 3) {
        case 0: return weight::polynomial(3.0 * u(rng));
        case 1: return weight::exponential(1.0 + 2.0 * u(rng));
        default: return weight::product(weight::polynomial(1.0 + u(rng)), weight::exponential(1.0 + u(rng)));
    }
}

std::vector<element> ball(const group& g, int radius) {
    std::set<element> seen{g.identity()};
    std::vector<element> frontier{g.identity()};
    for (int r = 0; r < radius; ++r) {
        std::vector<element> next;
        for (const auto& w : frontier)
            for (const auto& s : g.generators()) {
                auto x = g.multiply(w, s);
                if (seen.insert(x).second) next.push_back(x);
            }
        frontier = std::move(next);
    }
    return {seen.begin(), seen.end()};
}

// 1: exact boundary identities
outcome boundary_identities() {
    auto f2 = group::free(2);
    auto mu = sparse_measure::srw(f2);
    bool stationary = true;
    for (int d = 1; d <= 4; ++d) stationary = stationary && is_stationary(mu, cylinder_measure::harmonic(2, d));
    auto nu = cylinder_measure::harmonic(2, 3);
    auto words = ball(f2, 3);
    long bad_integral = 0;
    for (const auto& s : words) bad_integral += integrate(rn_derivative(s, nu), nu) != rational(1);
    std::mt19937_64 rng(1);
    long mismatches = 0;
    for (int t = 0; t < 1000; ++t) {
        auto s = random_word(f2, rng, 3), u = random_word(f2, rng, 3);
        mismatches += cocycle_mismatches(2, s, u);
    }
    auto fe = furstenberg_entropy(mu, nu);
    detail_log d;
    d("stationary_depth_1_4", stationary)("integral_words", words.size())("integral_failures", bad_integral)(
        "cocycle_mismatches", mismatches)("log_q_coefficient", fe.log_q_coefficient.str());
    return {stationary && bad_integral == 0 && words.size() == 53 && mismatches == 0 &&
                fe.log_q_coefficient == rational(1, 2),
            d.str()};
}

// 2: spectral radius dichotomy
outcome kesten() {
    spectra_config c;
    c.n_max = 2000;
    double f2 = radius_pf2_symmetric(sparse_measure::srw(group::free(2)), c).value;
    bool ok = f2 >= 0.8650 && f2 <= 0.8675;
    detail_log d;
    d("free:2", f2);
    for (const auto& g : {group::abelian(1), group::abelian(2), group::cyclic(6), group::lamplighter(1)}) {
        double v = radius_pf2_symmetric(sparse_measure::srw(g), c).value;
        ok = ok && v >= 0.99;
        d(g.spec(), v);
    }
    return {ok, d.str()};
}

// shared with criterion 4
double entropy_estimate = 0;

// 3: Avez entropy with exact and Monte Carlo cross-checks
outcome avez() {
    auto mu = sparse_measure::srw(group::free(2));
    mc_config mc;
    mc.enabled = true;
    mc.paths = 100000;
    mc.n = 1000;
    mc.seed = 20240601;
    auto r = avez_entropy(mu, with_n(1000), mc);
    entropy_estimate = r.estimate;
    double kv = r.diagnostics["monte_carlo"]["kv_entropy"].get<double>();

    auto radial = avez_entropy(mu, with_n(12));
    auto c = with_n(12);
    c.policy = power_policy::exact;
    auto exact = avez_entropy(mu, c);
    double worst = 0;
    for (size_t i = 0; i < 12; ++i)
        worst = std::max(worst, std::fabs(radial.sequence("difference")[i].value - exact.sequence("difference")[i].value));

    double oracle = 0.549306;
    bool ok = std::fabs(r.estimate - oracle) <= 0.05 * oracle && std::fabs(kv - oracle) <= 0.05 * oracle &&
              !r.flagged("mc_disagreement") && worst <= 1e-10;
    detail_log d;
    d("h", r.estimate)("mc_kv", kv)("exact_vs_radial_max_diff", worst);
    return {ok, d.str()};
}

// 4: convolution entropy
outcome conv_entropy() {
    auto mu = sparse_measure::srw(group::free(2));
    bool ok = entropy_estimate > 0;
    detail_log d;
    d("h", entropy_estimate);
    for (double deg : {2.0, 3.0}) {
        conv_entropy_config cc;
        cc.rd_degree = deg;
        cc.entropy_reference = entropy_estimate;
        auto r = convolution_entropy(mu, with_n(2000), cc);
        bool mono = r.sequences.front().non_decreasing(1e-9);
        ok = ok && mono && std::fabs(r.estimate - entropy_estimate) <= 0.1 * entropy_estimate;
        d("c_d" + std::to_string(static_cast<int>(deg)), r.estimate)("monotone_d" + std::to_string(static_cast<int>(deg)), mono);
    }
    auto z2 = convolution_entropy(sparse_measure::srw(group::abelian(2)), with_n(60));
    ok = ok && z2.estimate <= 0.02;
    d("c_abelian:2", z2.estimate);
    return {ok, d.str()};
}

// 5: Lyapunov exponent of 1+L vanishes
outcome lyapunov_vanishing() {
    auto r = lyapunov_direct(sparse_measure::srw(group::free(2)), weight::polynomial(1), with_n(2000));
    double last = r.sequence("per_n").back().value;
    bool down = r.diagnostics["tail_non_increasing"].get<bool>();
    detail_log d;
    d("per_n_2000", last)("tail_non_increasing", down)("path", r.params["path"].get<std::string>());
    return {last <= 0.01 && down && r.params["path"] == "radial", d.str()};
}

// 6: direct and radius routes agree
outcome lyapunov_routes() {
    auto mu = sparse_measure::srw(group::free(2));
    auto c = with_n(1000);
    auto w = weight::exponential(std::exp(1.0));
    double direct = lyapunov_direct(mu, w, c).estimate;
    double via = lyapunov_via_radius(mu, w, c).estimate;
    double zd = lyapunov_direct(mu, weight::constant(1), c).estimate;
    double zv = lyapunov_via_radius(mu, weight::constant(1), c).estimate;
    detail_log d;
    d("direct", direct)("via_radius", via)("constant_direct", zd)("constant_via_radius", zv);
    return {std::fabs(direct - via) <= 0.02 && std::fabs(direct - 0.5) <= 0.02 && zd == 0.0 && zv == 0.0, d.str()};
}

// 7: weighted entropy identities on a seeded ensemble
outcome weighted_identities() {
    std::mt19937_64 rng(77);
    auto c = with_n(6);
    c.p_grid = {16, 32, 64, 128, 256, 512, 1024, 2048, 4096};
    double id_worst = 0, lim_worst = 0;
    for (int t = 0; t < 20; ++t) {
        auto g = t % 3 == 0 ? group::abelian(2) : group::free(2);
        auto mu = random_prob(g, rng, 4, 2);
        auto w = random_weight(rng);
        id_worst = std::max(id_worst, weighted_avez_entropy(mu, w, c).diagnostics["identity_max_error"].get<double>());
        lim_worst = std::max(lim_worst, weighted_shannon_limit(mu, w, c).diagnostics["error"].get<double>());
    }
    detail_log d;
    d("pairs", 20)("identity_max_error", id_worst)("shannon_limit_max_error", lim_worst);
    return {id_worst <= 1e-9 && lim_worst <= 1e-3, d.str()};
}

// 8: the inverse-series weight
outcome inverse_series() {
    bool ok = true;
    detail_log d;
    for (const auto& g : {group::abelian(1), group::free(2)}) {
        auto mu = sparse_measure::srw(g);
        auto dom = verify_convolution_domination(mu, 8);
        ok = ok && dom.max_ratio <= 8 * zeta3() + 0.01;

        const int n = 2000;
        auto c = with_n(n);
        auto h = avez_entropy(mu, c);
        double Hn = h.sequence("entropy").back().value;
        std::vector<weight> samples = g.fam() == family::free
                                          ? std::vector<weight>{weight::exponential(4), weight::product(weight::exponential(3), weight::polynomial(2))}
                                          : std::vector<weight>{weight::exponential(2), weight::polynomial(2)};
        double min_ly = INFINITY;
        for (const auto& w : samples) min_ly = std::min(min_ly, lyapunov_direct(mu, w, c).estimate);

        auto wb = build_inverse_series_weight(mu, n);
        double Sn = lyapunov_direct(mu, wb, c).sequence("sum").back().value;
        double band = 3 * std::log(n) / n;
        double gibbs = Sn - (Hn - std::log(wb.series()->partial_sum));
        bool line = min_ly >= h.estimate - 0.05 && Sn / n <= Hn / n + band && gibbs >= -1e-9;
        ok = ok && line;
        d(g.spec() + ".domination", dom.max_ratio)(g.spec() + ".min_ly_sample", min_ly)(g.spec() + ".h", h.estimate)(
            g.spec() + ".ly_bar_per_n", Sn / n)(g.spec() + ".entropy_per_n_plus_band", Hn / n + band)(
            g.spec() + ".margin_vs_h_plus_band", h.estimate + band - Sn / n)(g.spec() + ".gibbs_gap", gibbs);
    }
    return {ok, d.str()};
}

// 9: Koopman pairing and Xi limits
outcome limit_chain() {
    auto mu = sparse_measure::srw(group::free(2));
    auto nu = cylinder_measure::harmonic(2, 2);
    double worst = 0;
    for (double p : {2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) {
        double closed = 0.25 * std::pow(3.0, 1.0 / p) + 0.75 * std::pow(3.0, -1.0 / p);
        worst = std::max(worst, std::fabs(koopman_pairing(mu, nu, p) - closed) / closed);
    }
    auto lim = koopman_limit(mu, nu);
    bool mono = !lim.flagged("non_monotone");
    auto xi = xi_entropy_limit(mu, 2000);
    detail_log d;
    d("closed_form_rel_error", worst)("koopman_monotone", mono)("koopman_limit", lim.estimate)("xi_limit", xi.estimate);
    return {worst <= 1e-12 && mono && std::fabs(lim.estimate - half_log3) <= 1e-3 &&
                std::fabs(xi.estimate - half_log3) <= 0.02 * half_log3,
            d.str()};
}

// 10: the subadditive majorant
outcome majorant_checks() {
    auto f2 = group::free(2);
    auto f = named_function(f2, "log1pL");
    bool ok = true;
    detail_log d;
    std::mt19937_64 rng(10);
    for (int power : {1, 6}) {
        auto mu = convolution_power(sparse_measure::srw(f2), power);
        auto b = dlvp_bundle::build(mu, f);
        double y_max = std::max(40.0, static_cast<double>(b.thresholds().back()) + 10.0);
        auto lip = check_psi(b, y_max, 1e-3);
        auto grid = check_weak_subadditivity(b, 50);
        long bad = 0;
        for (int t = 0; t < 1000; ++t) {
            auto s = random_word(f2, rng, 12), u = random_word(f2, rng, 12);
            bad += theta(b, f2.length(f2.multiply(s, u))) > theta(b, f2.length(s)) + theta(b, f2.length(u)) + 1e-12;
        }
        auto ir = integrability_partial_sums(mu, f, b);
        ok = ok && lip.monotone && lip.lipschitz && lip.knots_exact && grid.within_M && bad == 0 && ir.bounded;
        std::string tag = "srw^" + std::to_string(power);
        d(tag + ".max_slope", lip.max_slope)(tag + ".grid_worst", grid.worst)(tag + ".M", b.M())(tag + ".theta_violations", bad)(
            tag + ".partial_sum", ir.partial.back().value);
    }
    return {ok, d.str()};
}

// 11: strict gap on a lamplighter
outcome strict_gap() {
    auto mu = sparse_measure::srw(group::lamplighter(3));
    auto c = with_n(3);
    double h = avez_entropy(mu, c).estimate;
    double ce = convolution_entropy(mu, c).estimate;
    detail_log d;
    d("c", ce)("h", h);
    return {ce <= 0.02 && h >= 0.05, d.str()};
}

struct criterion {
    int id;
    std::string title;
    double budget;
    std::function<outcome()> run;
};

}  // namespace

int main() {
    std::vector<criterion> all{
        {1, "exact boundary identities", 10, boundary_identities},
        {2, "spectral radius dichotomy", 60, kesten},
        {3, "Avez entropy of F_2", 120, avez},
        {4, "convolution entropy", 120, conv_entropy},
        {5, "Lyapunov exponent of 1+L vanishes", 30, lyapunov_vanishing},
        {6, "Lyapunov route agreement", 60, lyapunov_routes},
        {7, "weighted entropy identities", 30, weighted_identities},
        {8, "inverse-series weight", 60, inverse_series},
        {9, "Koopman and Xi limits", 30, limit_chain},
        {10, "subadditive majorant", 20, majorant_checks},
        {11, "strict gap on Lamplighter(3)", 120, strict_gap},
    };
    int failed = 0;
    for (const auto& c : all) {
        auto t0 = std::chrono::steady_clock::now();
        outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool pass = o.pass && secs < c.budget;
        failed += !pass;
        std::printf("[%s] %2d %s (%.2f s, budget %.0f s): %s\n", pass ? "PASS" : "FAIL", c.id, c.title.c_str(), secs,
                    c.budget, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
    return failed == 0 ? 0 : 1;
}
