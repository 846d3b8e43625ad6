#include <doctest.h>

#include <cmath>
#include <random>

#include "rwlab/errors.hpp"
#include "rwlab/estimators.hpp"
#include "support.hpp"

using namespace rwlab;
using rwlab::testing::random_prob;

namespace {

const double half_log3 = 0.5 * std::log(3.0);

estimator_config with_n(int n) {
    estimator_config c;
    c.n_max = n;
    return c;
}

weight random_weight(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    switch (rng() % 3) {
        case 0: return weight::polynomial(3.0 * u(rng));
        case 1: return weight::exponential(1.0 + 2.0 * u(rng));
        default: return weight::product(weight::polynomial(1.0 + u(rng)), weight::exponential(1.0 + u(rng)));
    }
}

}  // namespace

TEST_CASE("Avez entropy") {
    SUBCASE("identity is exactly zero") {
        auto r = avez_entropy(sparse_measure::dirac(group::free(2)), with_n(20));
        CHECK(r.estimate == 0.0);
    }
    SUBCASE("Z is entropy-free") {
        auto r = avez_entropy(sparse_measure::srw(group::abelian(1)), with_n(200));
        CHECK(r.estimate <= 0.02);
        CHECK(r.params["path"] == "lattice");
    }
    SUBCASE("F_2 with a Monte Carlo check") {
        mc_config mc;
        mc.enabled = true;
        mc.paths = 4000;
        mc.n = 200;
        auto r = avez_entropy(sparse_measure::srw(group::free(2)), with_n(200), mc);
        CHECK(r.estimate == doctest::Approx(half_log3).epsilon(0.05));
        CHECK(r.diagnostics["monte_carlo"]["kv_entropy"].get<double>() == doctest::Approx(half_log3).epsilon(0.05));
        CHECK(!r.flagged("mc_disagreement"));
        REQUIRE(r.upper);
        CHECK(r.estimate <= *r.upper);
        CHECK(*r.lower <= r.estimate);
        CHECK(r.sequences.front().name() == "difference");
    }
    SUBCASE("exact differences for small n agree with the radial path") {
        auto mu = sparse_measure::srw(group::free(2));
        auto a = avez_entropy(mu, with_n(8));
        estimator_config c = with_n(8);
        c.policy = power_policy::exact;
        auto b = avez_entropy(mu, c);
        for (size_t i = 0; i < 8; ++i)
            CHECK(a.sequence("entropy")[i].value == doctest::Approx(b.sequence("entropy")[i].value).epsilon(1e-10));
    }
}

TEST_CASE("Lyapunov exponent, direct route") {
    auto f2 = group::free(2);
    auto mu = sparse_measure::srw(f2);
    SUBCASE("constant weight") {
        auto r = lyapunov_direct(mu, weight::constant(1), with_n(50));
        CHECK(r.estimate == 0.0);
    }
    SUBCASE("exponential weight gives the speed") {
        auto r = lyapunov_direct(mu, weight::exponential(std::exp(1.0)), with_n(2000));
        CHECK(r.estimate == doctest::Approx(0.5).epsilon(0.02));
        CHECK(r.params["path"] == "radial");
    }
    SUBCASE("log-length weight vanishes") {
        auto r = lyapunov_direct(mu, weight::polynomial(1), with_n(2000));
        CHECK(r.sequence("per_n").back().value <= 0.01);
        CHECK(r.diagnostics["tail_non_increasing"].get<bool>());
        CHECK(r.estimate >= 0);
    }
    SUBCASE("infinite weight is a domain error") {
        auto w = weight::element_table({{f2.identity(), 0.0}}, std::numeric_limits<double>::infinity(), "finite-at-e");
        CHECK_THROWS_AS(lyapunov_direct(mu, w, with_n(3)), domain_error);
    }
}

TEST_CASE("Lyapunov exponent, radius route") {
    SUBCASE("constant weight") {
        auto r = lyapunov_via_radius(sparse_measure::srw(group::free(2)), weight::constant(1), with_n(50));
        CHECK(r.estimate == 0.0);
        for (const auto& t : r.sequences.front().terms()) CHECK(t.value == 0.0);
    }
    SUBCASE("Z with exponential weight") {
        auto c = with_n(3000);
        c.p_grid = {1, 2, 4, 8, 16};
        auto r = lyapunov_via_radius(sparse_measure::srw(group::abelian(1)), weight::exponential(std::exp(1.0)), c);
        for (const auto& t : r.sequences.front().terms())
            CHECK(t.value == doctest::Approx(t.index * std::log(std::cosh(1.0 / t.index))).epsilon(0.03));
        CHECK(std::fabs(r.estimate) <= 0.01);
        CHECK(!r.flagged("non_monotone"));
    }
    SUBCASE("F_2 routes agree") {
        auto mu = sparse_measure::srw(group::free(2));
        auto w = weight::exponential(std::exp(1.0));
        auto a = lyapunov_direct(mu, w, with_n(2000));
        auto b = lyapunov_via_radius(mu, w, with_n(2000));
        CHECK(b.estimate == doctest::Approx(0.5).epsilon(0.04));
        CHECK(std::fabs(a.estimate - b.estimate) <= 0.02);
    }
}

TEST_CASE("weighted Shannon limit") {
    auto f2 = group::free(2);
    auto mu = sparse_measure::srw(f2);
    estimator_config c;
    auto one = weighted_shannon_limit(mu, weight::constant(1), c);
    CHECK(one.estimate == doctest::Approx(std::log(4.0)).epsilon(1e-9));
    auto lin = weighted_shannon_limit(mu, weight::polynomial(1), c);
    CHECK(lin.estimate == doctest::Approx(std::log(2.0)).epsilon(1e-9));
    auto e = weighted_shannon_limit(sparse_measure::dirac(f2), weight::polynomial(3), c);
    CHECK(std::fabs(e.estimate) <= 1e-12);
    c.p_grid = {1.0, 2.0};
    CHECK_THROWS_AS(weighted_shannon_limit(mu, weight::constant(1), c), config_error);
}

TEST_CASE("weighted Avez entropy") {
    auto mu = sparse_measure::srw(group::free(2));
    auto c = with_n(400);
    auto h = avez_entropy(mu, c).estimate;
    auto one = weighted_avez_entropy(mu, weight::constant(1), c);
    CHECK(one.estimate == doctest::Approx(h).epsilon(1e-12));
    auto neg = weighted_avez_entropy(mu, weight::exponential(std::exp(2.0)), c);
    CHECK(neg.estimate == doctest::Approx(h - 1.0).epsilon(0.01));
    CHECK(neg.estimate < 0);
    auto lin = weighted_avez_entropy(mu, weight::polynomial(1), c);
    CHECK(std::fabs(lin.estimate - h) <= 0.01);
    CHECK(lin.diagnostics["identity_holds"].get<bool>());
}

TEST_CASE("convolution entropy") {
    SUBCASE("F_2 matches the Avez entropy") {
        auto mu = sparse_measure::srw(group::free(2));
        auto h = avez_entropy(mu, with_n(1000)).estimate;
        conv_entropy_config cc;
        cc.entropy_reference = h;
        auto r = convolution_entropy(mu, with_n(2000), cc);
        CHECK(r.sequences.front()[0].value == doctest::Approx(std::log(4.0 / 3.0)).epsilon(2e-3));
        CHECK(std::fabs(r.estimate - h) <= 0.1 * h);
        CHECK(r.diagnostics["c_le_h"].get<bool>());
        CHECK(!r.flagged("non_monotone"));
        REQUIRE(r.lower);
        CHECK(*r.lower <= r.estimate);
    }
    SUBCASE("Z^2 is amenable") {
        auto r = convolution_entropy(sparse_measure::srw(group::abelian(2)), with_n(60));
        CHECK(r.estimate <= 0.02);
        CHECK(!r.flagged("non_monotone"));
    }
    SUBCASE("identity") {
        CHECK(convolution_entropy(sparse_measure::dirac(group::free(2)), with_n(5)).estimate == 0.0);
    }
}

TEST_CASE("fundamental inequality") {
    auto c = with_n(600);
    auto f2 = fundamental_inequality_report(sparse_measure::srw(group::free(2)),
                                            {weight::exponential(std::exp(1.0)), weight::polynomial(2)}, c);
    CHECK(f2.h == doctest::Approx(half_log3).epsilon(0.02));
    CHECK(f2.volume_growth * f2.speed == doctest::Approx(half_log3).epsilon(0.01));
    CHECK(std::fabs(f2.slack) <= 0.02);
    CHECK(f2.holds);
    for (const auto& w : f2.weights) CHECK(w.holds);

    auto z = fundamental_inequality_report(sparse_measure::srw(group::abelian(1)), {}, with_n(200));
    CHECK(z.holds);
    CHECK(z.h <= 0.02);
    auto e = fundamental_inequality_report(sparse_measure::dirac(group::free(2)), {weight::polynomial(1)}, with_n(5));
    CHECK(e.h == 0.0);
    CHECK(e.speed == 0.0);
    CHECK(e.holds);
}

TEST_CASE("monotonicity suites on seeded random measures") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 6; ++trial) {
        auto g = trial % 2 ? group::free(2) : group::abelian(1);
        auto mu = random_prob(g, rng, 3, 2);
        auto w = random_weight(rng);
        auto c = with_n(g.fam() == family::free ? 6 : 150);
        auto ws = weighted_shannon_limit(mu, w, c);
        CHECK(ws.sequences.front().non_decreasing(1e-9));
        auto lr = lyapunov_via_radius(mu, w, c);
        CHECK(!lr.flagged("non_monotone"));
        auto ld = lyapunov_direct(mu, w, c);
        CHECK(ld.estimate >= -1e-9);
        auto ce = convolution_entropy(mu, c);
        CHECK(ce.sequences.front().non_decreasing(1e-9));
    }
}

TEST_CASE("weighted entropy identities on a random ensemble") {
    std::mt19937_64 rng(77);
    estimator_config c = with_n(6);
    c.p_grid = {16, 32, 64, 128, 256, 512, 1024, 2048, 4096};
    for (int trial = 0; trial < 20; ++trial) {
        auto g = trial % 3 == 0 ? group::abelian(2) : group::free(2);
        auto mu = random_prob(g, rng, 4, 2);
        auto w = random_weight(rng);
        auto wa = weighted_avez_entropy(mu, w, c);
        CHECK(wa.diagnostics["identity_max_error"].get<double>() <= 1e-9);
        auto ws = weighted_shannon_limit(mu, w, c);
        CHECK(ws.diagnostics["error"].get<double>() <= 1e-3);
    }
}

TEST_CASE("strict gap without rapid decay") {
    auto mu = sparse_measure::srw(group::lamplighter(3));
    auto c = with_n(3);
    auto h = avez_entropy(mu, c);
    auto ce = convolution_entropy(mu, c);
    CHECK(ce.estimate <= 0.02);
    CHECK(h.estimate >= 0.05);
}
