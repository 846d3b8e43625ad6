#include <doctest.h>

#include <cmath>
#include <random>

#include "rwlab/errors.hpp"
#include "rwlab/spectra.hpp"
#include "support.hpp"

using namespace rwlab;

namespace {

spectra_config with_n(int n) {
    spectra_config c;
    c.n_max = n;
    return c;
}

}  // namespace

TEST_CASE("l1 weighted radius") {
    auto z = group::abelian(1);
    auto mu = sparse_measure::srw(z);
    SUBCASE("constant weight gives exactly one") {
        auto r = radius_l1_weighted(mu, weight::constant(1), 1.0, with_n(50));
        CHECK(r.value == 1.0);
        CHECK(r.method == "constant-weight");
    }
    SUBCASE("exponential weight on Z is cosh(1)") {
        auto r = radius_l1_weighted(mu, weight::exponential(std::exp(1.0)), 1.0, with_n(200));
        CHECK(r.value == doctest::Approx(std::cosh(1.0)).epsilon(1e-4));
        // cosh^n <= sum mu^n(x) e^|x| <= 2 cosh^n
        for (const auto& t : r.root.terms()) {
            CHECK(t.value >= std::cosh(1.0) * (1 - 1e-12));
            CHECK(t.value <= std::cosh(1.0) * std::pow(2.0, 1.0 / t.index) * (1 + 1e-12));
        }
        CHECK(r.lower <= r.value);
        CHECK(r.value <= r.upper + 1e-12);
    }
    SUBCASE("p log radius on F_2 approaches the speed") {
        auto f2 = group::free(2);
        auto r = radius_l1_weighted(sparse_measure::srw(f2), weight::exponential(std::exp(1.0)), 64.0, with_n(2000));
        CHECK(64.0 * std::log(r.value) == doctest::Approx(0.5).epsilon(0.02));
    }
}

TEST_CASE("Kesten radius from return probabilities") {
    SUBCASE("F_2") {
        auto r = radius_pf2_symmetric(sparse_measure::srw(group::free(2)), with_n(2000));
        CHECK(std::fabs(r.value - std::sqrt(3.0) / 2) <= 1e-3);
        CHECK(r.lower <= r.value);
        CHECK(r.value <= r.upper);
    }
    SUBCASE("Z at n=500") {
        auto r = radius_pf2_symmetric(sparse_measure::srw(group::abelian(1)), with_n(500));
        CHECK(r.value >= 0.996);
    }
    SUBCASE("identity") {
        auto r = radius_pf2_symmetric(sparse_measure::dirac(group::free(2)), with_n(10));
        CHECK(r.value == 1.0);
    }
    SUBCASE("non-symmetric rejected") {
        auto z = group::abelian(1);
        auto mu = sparse_measure::from_atoms(z, {{{1}, 0.7}, {{-1}, 0.3}});
        CHECK_THROWS_AS(radius_pf2_symmetric(mu, with_n(10)), domain_error);
    }
}

TEST_CASE("return probability paths agree with direct convolution") {
    spectra_config c = with_n(12);
    SUBCASE("lamplighter trace formula") {
        auto g = group::lamplighter(1);
        auto mu = sparse_measure::srw(g);
        std::string path;
        auto fast = log_return_probabilities(mu, c, &path);
        CHECK(path == "range-trace");
        walk_powers wp(mu, power_policy::exact);
        for (const auto& t : fast.terms()) {
            wp.advance_to(static_cast<int>(t.index));
            CHECK(t.value == doctest::Approx(std::log(wp.identity_mass())).epsilon(1e-10));
        }
    }
    SUBCASE("Z^2 Fourier path") {
        auto mu = sparse_measure::srw(group::abelian(2));
        std::string path;
        auto fast = log_return_probabilities(mu, c, &path);
        CHECK(path == "fourier");
        walk_powers wp(mu, power_policy::lattice);
        for (const auto& t : fast.terms()) {
            wp.advance_to(static_cast<int>(t.index));
            CHECK(t.value == doctest::Approx(std::log(wp.identity_mass())).epsilon(1e-10));
        }
    }
}

TEST_CASE("PF_q lower and upper radii") {
    auto f2 = group::free(2);
    auto mu = sparse_measure::srw(f2);
    auto lo = radius_pfq_lower(mu, 2.0, with_n(2000));
    CHECK(std::fabs(lo.value - std::sqrt(3.0) / 2) <= 2e-3);
    auto up = radius_pfq_upper_rd(mu, 2.0, 2.0, with_n(2000));
    CHECK(std::fabs(up.value - std::sqrt(3.0) / 2) <= 0.02);
    CHECK(lo.value <= up.value + 0.02);

    auto z = sparse_measure::srw(group::abelian(1));
    CHECK(radius_pfq_lower(z, 2.0, with_n(2000)).value >= 0.995);
    CHECK(radius_pfq_upper_rd(z, 2.0, 2.0, with_n(2000)).value == doctest::Approx(1.0).epsilon(0.01));

    auto e = sparse_measure::dirac(f2);
    CHECK(radius_pfq_lower(e, 3.0, with_n(10)).value == 1.0);
    CHECK(radius_pfq_upper_rd(e, 2.0, 2.0, with_n(10)).value == doctest::Approx(1.0));

    CHECK_THROWS_AS(radius_pfq_upper_rd(sparse_measure::srw(group::lamplighter(1)), 2.0, 2.0, with_n(4)), domain_error);
}

TEST_CASE("sandwich and interpolation on random measures") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 4; ++trial) {
        auto g = trial % 2 ? group::free(2) : group::abelian(1);
        auto mu = rwlab::testing::random_symmetric(g, rng, 3, 2);
        auto cfg = with_n(g.fam() == family::free ? 6 : 300);
        for (double q : {1.5, 2.0, 4.0}) {
            auto lo = radius_pfq_lower(mu, q, cfg);
            auto up = radius_pfq_upper_rd(mu, q, 2.0, cfg);
            CHECK(lo.value > 0);
            CHECK(lo.value <= 1.0);
            CHECK(lo.value <= up.value + 0.02);
        }
        // lower(u) <= upper(p)^(u/p), u < p
        double u = 2.0, p = 4.0;
        auto lo_u = radius_pfq_lower(mu, u, cfg);
        auto up_p = radius_pfq_upper_rd(mu, p, 2.0, cfg);
        CHECK(lo_u.value <= std::pow(up_p.value, u / p) + 0.02);
    }
}

TEST_CASE("Kesten dichotomy across families") {
    auto cfg = with_n(2000);
    CHECK(radius_pf2_symmetric(sparse_measure::srw(group::free(2)), cfg).value <= 0.88);
    CHECK(radius_pf2_symmetric(sparse_measure::srw(group::cyclic(6)), cfg).value >= 0.99);
    CHECK(radius_pf2_symmetric(sparse_measure::srw(group::lamplighter(1)), cfg).value >= 0.99);
}

TEST_CASE("box test function bound") {
    auto z2 = sparse_measure::srw(group::abelian(2));
    auto b = folner_lower(z2, 64);
    REQUIRE(b.has_value());
    CHECK(b->lambda == doctest::Approx(std::cos(M_PI / 65)).epsilon(1e-12));
    CHECK(!folner_lower(sparse_measure::srw(group::free(2)), 64).has_value());
    auto c6 = folner_lower(sparse_measure::srw(group::cyclic(6)), 8);
    REQUIRE(c6.has_value());
    CHECK(c6->lambda == 1.0);
}
