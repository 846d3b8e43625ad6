#include <doctest.h>

#include <cmath>
#include <random>

#include "rwlab/errors.hpp"
#include "rwlab/numeric.hpp"
#include "rwlab/weights.hpp"
#include "support.hpp"

using namespace rwlab;
using rwlab::testing::random_prob;

namespace {

double conj(double p) { return p / (p - 1.0); }

}  // namespace

TEST_CASE("weighted norms on small examples") {
    auto f2 = group::free(2);
    auto mu = sparse_measure::srw(f2);
    CHECK(weighted_l1_norm(mu, weight::polynomial(2)) == doctest::Approx(4.0));
    CHECK(weighted_l1_norm(mu, weight::constant(1)) == doctest::Approx(1.0));
    auto z = group::abelian(1);
    auto nu = sparse_measure::srw(z);
    CHECK(weighted_lq_norm(nu, 2.0, weight::exponential(std::exp(1.0)), 2.0) ==
          doctest::Approx(std::sqrt(std::exp(1.0) / 2)).epsilon(1e-12));
    CHECK(weighted_lq_norm(nu, 2.0, weight::exponential(std::exp(1.0)), 2.0) == doctest::Approx(1.16582).epsilon(1e-5));
    CHECK_THROWS_AS(weighted_lq_norm(nu, 1.0, weight::constant(1)), domain_error);
}

TEST_CASE("log moments") {
    auto f2 = group::free(2);
    auto mu = sparse_measure::srw(f2);
    CHECK(log_weight_moment(mu, weight::polynomial(1)) == doctest::Approx(std::log(2.0)));
    CHECK(log_weight_moment(mu, weight::constant(1)) == 0.0);
    auto z = group::abelian(1);
    CHECK(log_weight_moment(sparse_measure::srw(z), weight::exponential(std::exp(1.0))) == doctest::Approx(1.0));
    CHECK(weighted_shannon_entropy(mu, weight::polynomial(1)) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("growth rates") {
    auto f2 = group::free(2);
    auto e = growth_rate(weight::exponential(std::exp(1.0)), f2, 20);
    CHECK(e.estimate == doctest::Approx(std::exp(1.0)));
    CHECK(e.samples.back().value == doctest::Approx(std::exp(1.0)));
    auto p = growth_rate(weight::polynomial(3), f2, 60);
    CHECK(p.estimate == 1.0);
    CHECK(p.samples.non_increasing(1e-12));
    CHECK(p.samples.back().value == doctest::Approx(std::pow(61.0, 3.0 / 60)));
    CHECK(growth_rate(weight::constant(5), f2, 10).estimate == 1.0);
    // equivalent weights, equal limits
    auto q = growth_rate(weight::product(weight::constant(7), weight::polynomial(3)), f2, 10);
    CHECK(q.estimate == p.estimate);
    // table weights fall back to the sampled infimum
    auto t = weight::radial_table({0.0, 1.0, 2.0, 3.0, 4.0, 5.0}, 0.0, "lin");
    CHECK(growth_rate(t, f2, 5).estimate == doctest::Approx(std::exp(1.0)));
}

TEST_CASE("inverse series weight") {
    auto z = group::abelian(1);
    auto mu = sparse_measure::srw(z);
    auto w = build_inverse_series_weight(mu, 3);
    CHECK(w.eval(z, {0}) == doctest::Approx(16.0));
    CHECK(1.0 / w.eval(z, {1}) == doctest::Approx(0.513889).epsilon(1e-6));
    CHECK(std::isinf(w.log_eval(z, {7})));
    REQUIRE(w.series());
    CHECK(w.series()->tail_bound == doctest::Approx(zeta3() - 1 - 1.0 / 8 - 1.0 / 27));
    auto f2 = group::free(2);
    auto nu = sparse_measure::srw(f2);
    auto w1 = build_inverse_series_weight(nu, 1);
    CHECK(1.0 / w1.eval(f2, f2.parse("a")) == doctest::Approx(0.25));
    CHECK(std::isinf(w1.log_eval(f2, f2.identity())));
    // radial and generic constructions agree
    auto wr = build_inverse_series_weight(nu, 5, 3.0, power_policy::radial);
    auto wg = build_inverse_series_weight(nu, 5, 3.0, power_policy::exact);
    for (const char* s : {"", "a", "ab", "aab", "abAB", "bbbbb"})
        CHECK(wr.log_eval(f2, f2.parse(s)) == doctest::Approx(wg.log_eval(f2, f2.parse(s))).epsilon(1e-12));
}

TEST_CASE("log-moment of an infinite table value is a domain error") {
    auto z = group::abelian(1);
    auto mu = sparse_measure::srw(z);
    auto w = build_inverse_series_weight(mu, 1);
    walk_powers wp(mu);
    wp.advance_to(2);
    CHECK_THROWS_AS(log_weight_moment(wp, w), domain_error);
}

TEST_CASE("convolution domination") {
    auto z = group::abelian(1);
    auto rz = verify_convolution_domination(sparse_measure::srw(z), 8);
    CHECK(rz.max_ratio <= 9.62);
    CHECK(rz.within_bound);
    auto f2 = group::free(2);
    auto rf = verify_convolution_domination(sparse_measure::srw(f2), 6);
    CHECK(rf.max_ratio <= 9.62);
    auto rfe = verify_convolution_domination(sparse_measure::srw(f2), 6, power_policy::exact);
    CHECK(rfe.max_ratio == doctest::Approx(rf.max_ratio).epsilon(1e-10));
    auto rd = verify_convolution_domination(sparse_measure::dirac(f2), 5);
    CHECK(rd.max_ratio == doctest::Approx(zeta_partial(5)));
}

TEST_CASE("submultiplicativity of standard weights") {
    for (const auto& g : {group::free(2), group::abelian(2), group::lamplighter(1)}) {
        for (const auto& w : {weight::polynomial(2), weight::exponential(1.7), weight::constant(3)}) {
            auto rep = estimate_submult_constant(w, g, 300, 5, g.fam() == family::lamplighter ? 3 : 8);
            CHECK(rep.pairs == 300);
            CHECK(rep.constant <= std::max(1.0, 1.0 / 3.0) + 1e-12);
        }
    }
}

TEST_CASE("interpolation inequalities on random measures") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> pu(1.0, 4.0), pp(1.0, 8.0);
    auto f2 = group::free(2);
    for (int t = 0; t < 200; ++t) {
        auto mu = random_prob(f2, rng, 12, 5);
        weight w = (t % 2) ? weight::exponential(1.0 + 3 * pu(rng) / 4) : weight::polynomial(pu(rng));
        double u = pu(rng), p = u * pp(rng);
        double th = u / p;
        double lhs = weighted_l1_norm(mu, w, p);
        double rhs = std::pow(weighted_l1_norm(mu, weight::constant(1)), 1 - th) * std::pow(weighted_l1_norm(mu, w, u), th);
        REQUIRE(lhs <= rhs + 1e-10);
        // weighted lq version with conjugate exponents
        double p0 = 1.0 + pu(rng), p1 = p0 * pp(rng) + 1e-3;
        double th2 = p0 / p1;
        double l2 = weighted_lq_norm(mu, conj(p1), w, p1);
        double r2 = std::pow(weighted_l1_norm(mu, weight::constant(1)), 1 - th2) *
                    std::pow(weighted_lq_norm(mu, conj(p0), w, p0), th2);
        REQUIRE(l2 <= r2 + 1e-10);
    }
}

TEST_CASE("p -> -p log ||f||_{q, w^(1/p)} is non-decreasing") {
    std::mt19937_64 rng(32);
    auto f2 = group::free(2);
    std::vector<double> grid{1.5, 2, 3, 4, 8, 16, 32, 64};
    for (int t = 0; t < 50; ++t) {
        auto mu = random_prob(f2, rng, 15, 4);
        auto w = weight::polynomial(1.0 + (t % 3));
        double prev = -1e300;
        for (double p : grid) {
            double v = -p * std::log(weighted_lq_norm(mu, conj(p), w, p));
            REQUIRE(v >= prev - 1e-9);
            prev = v;
        }
    }
}

TEST_CASE("constant multiples shift per-n Lyapunov sums by log c") {
    auto f2 = group::free(2);
    auto mu = sparse_measure::srw(f2);
    walk_powers wp(mu);
    auto w = weight::polynomial(2);
    auto cw = weight::product(weight::constant(5), w);
    for (int n = 1; n <= 40; ++n) {
        wp.advance();
        double a = log_weight_moment(wp, w) / n, b = log_weight_moment(wp, cw) / n;
        CHECK(std::fabs(a - b) <= std::log(5.0) / n + 1e-12);
    }
}
