#include "rwlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "rwlab/boundary.hpp"
#include "rwlab/dlvp.hpp"
#include "rwlab/errors.hpp"
#include "rwlab/estimators.hpp"
#include "rwlab/numeric.hpp"
#include "rwlab/spectra.hpp"
#include "rwlab/weights.hpp"

namespace rwlab {

namespace {

class recorder {
public:
    recorder(std::string suite, std::vector<check_result>& out) : suite_(std::move(suite)), out_(out) {}

    void add(const std::string& name, bool pass, const std::string& detail = "") {
        out_.push_back({suite_, name, pass, detail});
    }

    // runs fn; any exception is a failed check carrying the message
    template <class Fn>
    void guard(const std::string& name, Fn fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            add(name, false, std::string("threw: ") + e.what());
        }
    }

private:
    std::string suite_;
    std::vector<check_result>& out_;
};

std::string num(double v) {
    std::ostringstream s;
    s.precision(10);
    s << v;
    return s.str();
}

element random_word(const group& g, std::mt19937_64& rng, int steps) {
    element w = g.identity();
    const auto& gens = g.generators();
    for (int i = 0; i < steps; ++i) g.right_multiply(w, gens[rng() % gens.size()]);
    return w;
}

sparse_measure random_prob(const group& g, std::mt19937_64& rng, int atoms, int steps) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<atom> a;
    double tot = 0;
    for (int i = 0; i < atoms; ++i) {
        double m = u(rng);
        tot += m;
        a.push_back({random_word(g, rng, 1 + static_cast<int>(rng() % steps)), m});
    }
    for (auto& x : a) x.mass /= tot;
    return sparse_measure::from_atoms(g, a, false);
}

double conj(double p) { return p / (p - 1.0); }

void groups_suite(recorder& r, std::mt19937_64& rng) {
    for (const auto& g : {group::free(2), group::abelian(2), group::cyclic(6), group::lamplighter(1)}) {
        r.guard("axioms " + g.spec(), [&] {
            long bad = 0;
            int steps = g.fam() == family::lamplighter ? 3 : 6;
            for (int t = 0; t < 300; ++t) {
                auto a = random_word(g, rng, steps), b = random_word(g, rng, steps), c = random_word(g, rng, steps);
                bad += g.multiply(g.multiply(a, b), c) != g.multiply(a, g.multiply(b, c));
                bad += !g.is_identity(g.multiply(a, g.inverse(a)));
                bad += g.length(g.multiply(a, b)) > g.length(a) + g.length(b);
                bad += g.length(g.inverse(a)) != g.length(a);
                bad += g.parse(g.format(a)) != a;
            }
            r.add("axioms " + g.spec(), bad == 0, std::to_string(bad) + " violations in 300 triples");
        });
    }
}

void measures_suite(recorder& r, std::mt19937_64& rng) {
    for (const auto& g : {group::free(2), group::abelian(2), group::lamplighter(1)}) {
        r.guard("convolution " + g.spec(), [&] {
            double worst = 0;
            for (int t = 0; t < 3; ++t) {
                auto a = random_prob(g, rng, 10, 3), b = random_prob(g, rng, 10, 3), c = random_prob(g, rng, 10, 3);
                auto lhs = convolve(convolve(a, b), c), rhs = convolve(a, convolve(b, c));
                if (lhs.size() != rhs.size()) {
                    worst = INFINITY;
                    break;
                }
                for (size_t i = 0; i < lhs.size(); ++i) worst = std::max(worst, std::fabs(lhs.atoms()[i].mass - rhs.atoms()[i].mass));
                worst = std::max(worst, std::fabs(convolve(a, b).total() - 1.0));
            }
            r.add("convolution " + g.spec(), worst <= 1e-10, "max defect " + num(worst));
        });
    }
    r.guard("entropy subadditive", [&] {
        auto mu = sparse_measure::srw(group::free(2));
        walk_powers wp(mu);
        std::vector<double> h{0};
        for (int n = 1; n <= 30; ++n) {
            wp.advance();
            h.push_back(wp.entropy());
        }
        bool ok = true;
        for (int m = 1; m <= 15; ++m)
            for (int n = 1; n + m <= 30; ++n) ok = ok && h[n + m] <= h[n] + h[m] + 1e-9;
        r.add("entropy subadditive", ok, "H(n+m) <= H(n)+H(m) for n+m <= 30");
    });
}

void weights_suite(recorder& r, std::mt19937_64& rng) {
    r.guard("interpolation", [&] {
        std::uniform_real_distribution<double> pu(1.0, 4.0), pp(1.0, 8.0);
        auto f2 = group::free(2);
        double worst = -INFINITY;
        for (int t = 0; t < 100; ++t) {
            auto mu = random_prob(f2, rng, 10, 4);
            weight w = t % 2 ? weight::exponential(1.0 + 3 * pu(rng) / 4) : weight::polynomial(pu(rng));
            double u = pu(rng), p = u * pp(rng), th = u / p;
            double one = weighted_l1_norm(mu, weight::constant(1));
            worst = std::max(worst, weighted_l1_norm(mu, w, p) -
                                        std::pow(one, 1 - th) * std::pow(weighted_l1_norm(mu, w, u), th));
            double p0 = 1.0 + pu(rng), p1 = p0 * pp(rng) + 1e-3, th2 = p0 / p1;
            worst = std::max(worst, weighted_lq_norm(mu, conj(p1), w, p1) -
                                        std::pow(one, 1 - th2) * std::pow(weighted_lq_norm(mu, conj(p0), w, p0), th2));
        }
        r.add("interpolation", worst <= 1e-10, "max excess " + num(worst));
    });
    r.guard("p-monotonicity", [&] {
        auto f2 = group::free(2);
        bool ok = true;
        for (int t = 0; t < 30; ++t) {
            auto mu = random_prob(f2, rng, 10, 4);
            auto w = weight::polynomial(1.0 + t % 3);
            double prev = -INFINITY;
            for (double p : {1.5, 2.0, 4.0, 8.0, 16.0, 64.0}) {
                double v = -p * std::log(weighted_lq_norm(mu, conj(p), w, p));
                ok = ok && v >= prev - 1e-9;
                prev = v;
            }
        }
        r.add("p-monotonicity", ok, "-p log norm non-decreasing on 30 measures");
    });
    r.guard("growth rates", [&] {
        auto f2 = group::free(2);
        double e = growth_rate(weight::exponential(std::exp(1.0)), f2, 20).estimate;
        double poly = growth_rate(weight::polynomial(3), f2, 60).estimate;
        r.add("growth rates", std::fabs(e - std::exp(1.0)) <= 1e-9 && std::fabs(poly - 1.0) <= 0.1,
              "exp " + num(e) + ", poly " + num(poly));
    });
    for (const auto& g : {group::abelian(1), group::free(2)}) {
        r.guard("domination " + g.spec(), [&] {
            auto d = verify_convolution_domination(sparse_measure::srw(g), 8);
            r.add("domination " + g.spec(), d.max_ratio <= 8 * zeta3() + 0.01, "max ratio " + num(d.max_ratio));
        });
    }
    r.guard("submultiplicativity", [&] {
        double worst = 0;
        for (const auto& w : {weight::polynomial(2), weight::exponential(1.7)})
            worst = std::max(worst, estimate_submult_constant(w, group::free(2), 200, rng(), 8).constant);
        r.add("submultiplicativity", worst <= 1.0 + 1e-12, "max constant " + num(worst));
    });
}

void spectra_suite(recorder& r, std::mt19937_64& rng) {
    spectra_config c;
    c.n_max = 2000;
    r.guard("kesten", [&] {
        double f2 = radius_pf2_symmetric(sparse_measure::srw(group::free(2)), c).value;
        double z = radius_pf2_symmetric(sparse_measure::srw(group::abelian(1)), c).value;
        double c6 = radius_pf2_symmetric(sparse_measure::srw(group::cyclic(6)), c).value;
        r.add("kesten", f2 <= 0.88 && z >= 0.99 && c6 >= 0.99, "F2 " + num(f2) + ", Z " + num(z) + ", C6 " + num(c6));
    });
    r.guard("sandwich", [&] {
        bool ok = true;
        double gap = -INFINITY;
        for (int t = 0; t < 2; ++t) {
            auto g = t ? group::free(2) : group::abelian(1);
            auto base = random_prob(g, rng, 3, 2);
            std::vector<atom> sym;
            for (const auto& a : base.atoms()) {
                sym.push_back({a.elem, a.mass / 2});
                sym.push_back({g.inverse(a.elem), a.mass / 2});
            }
            auto mu = sparse_measure::from_atoms(g, sym, false);
            spectra_config cc;
            cc.n_max = t ? 6 : 300;
            for (double q : {1.5, 2.0, 4.0}) {
                auto lo = radius_pfq_lower(mu, q, cc).value, up = radius_pfq_upper_rd(mu, q, 2.0, cc).value;
                ok = ok && lo > 0 && lo <= 1.0;
                gap = std::max(gap, lo - up);
            }
        }
        r.add("sandwich", ok && gap <= 0.02, "max lower-upper " + num(gap));
    });
    r.guard("constant weight radius", [&] {
        spectra_config cc;
        cc.n_max = 20;
        double v = radius_l1_weighted(sparse_measure::srw(group::free(2)), weight::constant(1), 1.0, cc).value;
        r.add("constant weight radius", v == 1.0, "radius " + num(v));
    });
}

void estimators_suite(recorder& r, std::mt19937_64& rng) {
    auto f2 = group::free(2);
    auto mu = sparse_measure::srw(f2);
    r.guard("avez entropy", [&] {
        estimator_config c;
        c.n_max = 400;
        double h = avez_entropy(mu, c).estimate;
        r.add("avez entropy", std::fabs(h - 0.5 * std::log(3.0)) <= 0.05 * 0.5 * std::log(3.0), "h " + num(h));
    });
    r.guard("weighted identity", [&] {
        estimator_config c;
        c.n_max = 6;
        double worst = 0;
        for (int t = 0; t < 5; ++t) {
            auto m = random_prob(f2, rng, 4, 2);
            auto w = t % 2 ? weight::polynomial(1.5) : weight::exponential(1.5);
            worst = std::max(worst, weighted_avez_entropy(m, w, c).diagnostics["identity_max_error"].get<double>());
        }
        r.add("weighted identity", worst <= 1e-9, "max error " + num(worst));
    });
    r.guard("lyapunov routes", [&] {
        estimator_config c;
        c.n_max = 1000;
        auto w = weight::exponential(std::exp(1.0));
        double d = lyapunov_direct(mu, w, c).estimate, v = lyapunov_via_radius(mu, w, c).estimate;
        double zero = lyapunov_via_radius(mu, weight::constant(1), c).estimate;
        r.add("lyapunov routes", std::fabs(d - v) <= 0.02 && zero == 0.0,
              "direct " + num(d) + ", radius " + num(v) + ", constant " + num(zero));
    });
    r.guard("convolution entropy", [&] {
        estimator_config c;
        c.n_max = 60;
        auto ce = convolution_entropy(sparse_measure::srw(group::abelian(2)), c);
        r.add("convolution entropy", ce.estimate <= 0.02 && !ce.flagged("non_monotone"), "Z2 c " + num(ce.estimate));
    });
    r.guard("fundamental inequality", [&] {
        estimator_config c;
        c.n_max = 300;
        auto fi = fundamental_inequality_report(mu, {weight::exponential(std::exp(1.0))}, c);
        r.add("fundamental inequality", fi.holds, "slack " + num(fi.slack));
    });
}

void boundary_suite(recorder& r, std::mt19937_64& rng) {
    auto f2 = group::free(2);
    auto mu = sparse_measure::srw(f2);
    r.guard("stationarity", [&] {
        bool ok = true;
        for (int d = 1; d <= 4; ++d) ok = ok && is_stationary(mu, cylinder_measure::harmonic(2, d));
        r.add("stationarity", ok, "depths 1..4");
    });
    r.guard("cocycle", [&] {
        long bad = 0;
        for (int t = 0; t < 200; ++t) {
            auto s = random_word(f2, rng, static_cast<int>(rng() % 3)), u = random_word(f2, rng, static_cast<int>(rng() % 3));
            bad += cocycle_mismatches(2, s, u);
        }
        auto nu = cylinder_measure::harmonic(2, 3);
        for (int t = 0; t < 30; ++t) bad += integrate(rn_derivative(random_word(f2, rng, static_cast<int>(rng() % 4)), nu), nu) != 1;
        r.add("cocycle", bad == 0, std::to_string(bad) + " mismatches");
    });
    r.guard("furstenberg", [&] {
        auto fe = furstenberg_entropy(mu, cylinder_measure::harmonic(2, 3));
        r.add("furstenberg", fe.log_q_coefficient == rational(1, 2), "coefficient " + fe.log_q_coefficient.str());
    });
    r.guard("koopman limit", [&] {
        auto lim = koopman_limit(mu, cylinder_measure::harmonic(2, 2));
        r.add("koopman limit", !lim.flagged("non_monotone") && std::fabs(lim.estimate - 0.5 * std::log(3.0)) <= 1e-3,
              "limit " + num(lim.estimate));
    });
}

void dlvp_suite(recorder& r, std::mt19937_64& rng) {
    auto f2 = group::free(2);
    auto f = named_function(f2, "log1pL");
    auto mu6 = convolution_power(sparse_measure::srw(f2), 6);
    auto b = dlvp_bundle::build(mu6, f);
    r.guard("psi", [&] {
        auto lip = check_psi(b, 40.0, 1e-3);
        r.add("psi", lip.monotone && lip.lipschitz && lip.knots_exact, "max slope " + num(lip.max_slope));
    });
    r.guard("weak subadditivity", [&] {
        auto g = check_weak_subadditivity(b, 50);
        r.add("weak subadditivity", g.within_M, "worst " + num(g.worst) + " vs M " + num(b.M()));
    });
    r.guard("theta", [&] {
        long bad = 0;
        for (int t = 0; t < 500; ++t) {
            auto s = random_word(f2, rng, 8), u = random_word(f2, rng, 8);
            bad += theta(b, f2.length(f2.multiply(s, u))) > theta(b, f2.length(s)) + theta(b, f2.length(u)) + 1e-12;
        }
        r.add("theta", bad == 0, std::to_string(bad) + " violations");
    });
    r.guard("integrability", [&] {
        auto ir = integrability_partial_sums(mu6, f, b);
        r.add("integrability", ir.bounded && ir.increasing, "last partial sum " + num(ir.partial.back().value));
    });
}

}  // namespace

const std::vector<std::string>& verify_suite_names() {
    static const std::vector<std::string> names{"groups", "measures", "weights", "spectra", "estimators", "boundary", "dlvp"};
    return names;
}

std::vector<check_result> run_suite(const std::string& suite, const verify_config& cfg) {
    std::vector<check_result> out;
    if (suite == "all") {
        for (const auto& s : verify_suite_names()) {
            auto part = run_suite(s, cfg);
            out.insert(out.end(), part.begin(), part.end());
        }
        return out;
    }
    // each suite gets its own stream so results do not depend on which suites ran before
    const auto& names = verify_suite_names();
    auto idx = static_cast<uint64_t>(std::find(names.begin(), names.end(), suite) - names.begin());
    std::seed_seq seq{static_cast<uint32_t>(cfg.seed), static_cast<uint32_t>(cfg.seed >> 32), static_cast<uint32_t>(idx)};
    std::mt19937_64 rng(seq);
    recorder r(suite, out);
    if (suite == "groups")
        groups_suite(r, rng);
    else if (suite == "measures")
        measures_suite(r, rng);
    else if (suite == "weights")
        weights_suite(r, rng);
    else if (suite == "spectra")
        spectra_suite(r, rng);
    else if (suite == "estimators")
        estimators_suite(r, rng);
    else if (suite == "boundary")
        boundary_suite(r, rng);
    else if (suite == "dlvp")
        dlvp_suite(r, rng);
    else
        throw config_error("unknown verify suite '" + suite + "'");
    return out;
}

}  // namespace rwlab
