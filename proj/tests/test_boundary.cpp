#include <doctest.h>

#include <cmath>
#include <random>

#include "rwlab/boundary.hpp"
#include "rwlab/errors.hpp"

using namespace rwlab;

namespace {

const double half_log3 = 0.5 * std::log(3.0);

element random_word(std::mt19937_64& rng, int k, int max_len) {
    element w;
    int len = static_cast<int>(rng() % (max_len + 1));
    while (static_cast<int>(w.size()) < len) {
        int x = static_cast<int>(rng() % k) + 1;
        if (rng() % 2) x = -x;
        if (!w.empty() && w.back() == -x) continue;
        w.push_back(x);
    }
    return w;
}

}  // namespace

TEST_CASE("harmonic cylinder measure") {
    auto m1 = cylinder_measure::harmonic(2, 1);
    CHECK(m1.size() == 4);
    for (const auto& m : m1.masses()) CHECK(m == rational(1, 4));
    auto m2 = cylinder_measure::harmonic(2, 2);
    CHECK(m2.size() == 12);
    for (const auto& m : m2.masses()) CHECK(m == rational(1, 12));
    for (int d = 1; d <= 4; ++d) {
        auto nu = cylinder_measure::harmonic(2, d);
        CHECK(total_mass(nu) == 1);
        CHECK(refinement_consistent(nu));
    }
    CHECK(total_mass(cylinder_measure::harmonic(3, 3)) == 1);
    CHECK_THROWS_AS(cylinder_measure::harmonic(2, 13), resource_error);
    CHECK_THROWS_AS(cylinder_measure::harmonic(1, 2), domain_error);
}

TEST_CASE("stationarity is exact") {
    auto f2 = group::free(2);
    auto mu = sparse_measure::srw(f2);
    for (int d = 1; d <= 4; ++d) CHECK(is_stationary(mu, cylinder_measure::harmonic(2, d)));
    // a non-uniform step distribution is not stationary for the uniform measure
    auto skew = sparse_measure::from_atoms(f2, {{{1}, 0.5}, {{-1}, 0.5}});
    CHECK(!is_stationary(skew, cylinder_measure::harmonic(2, 2)));
    CHECK(is_stationary(sparse_measure::srw(group::free(3)), cylinder_measure::harmonic(3, 2)));
}

TEST_CASE("Radon-Nikodym cocycle") {
    auto nu = cylinder_measure::harmonic(2, 1);
    auto rho = rn_derivative({1}, nu);
    for (size_t i = 0; i < nu.size(); ++i) {
        if (nu.words()[i] == element{-1})
            CHECK(rho.value[i] == 3);
        else
            CHECK(rho.value[i] == rational(1, 3));
    }
    CHECK(integrate(rho, nu) == 1);
    auto id = rn_derivative({}, nu);
    for (const auto& v : id.value) CHECK(v == 1);
    CHECK_THROWS_AS(rn_derivative({1, 2}, nu), domain_error);

    std::mt19937_64 rng(5);
    for (int i = 0; i < 60; ++i) {
        auto s = random_word(rng, 2, 3);
        auto deep = cylinder_measure::harmonic(2, 3);
        CHECK(integrate(rn_derivative(s, deep), deep) == 1);
    }
    CHECK(cocycle_mismatches(2, {1}, {2}) == 0);
    for (int i = 0; i < 100; ++i) {
        auto s = random_word(rng, 2, 2), t = random_word(rng, 2, 2);
        CHECK(cocycle_mismatches(2, s, t) == 0);
    }
}

TEST_CASE("Harish-Chandra function") {
    auto nu1 = cylinder_measure::harmonic(2, 1);
    auto nu3 = cylinder_measure::harmonic(2, 3);
    CHECK(harish_chandra_xi({1}, nu1) == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-15));
    CHECK(harish_chandra_xi({}, nu1) == 1.0);
    CHECK(std::fabs(harish_chandra_xi({2}, nu1) - harish_chandra_xi({2}, nu3)) <= 1e-15);
    CHECK(harish_chandra_xi({1, 2, 2}, nu3) == harish_chandra_xi({-2, -2, -1}, nu3));
    for (long r = 0; r <= 3; ++r) {
        element s;
        for (long i = 0; i < r; ++i) s.push_back(1);
        CHECK(rho_exponent_law(s, nu3) == radial_exponent_law(2, r));
        CHECK(std::log(harish_chandra_xi(s, nu3)) == doctest::Approx(log_xi_radial(2, r)).epsilon(1e-13));
    }
    for (long r = 4; r <= 30; ++r)
        CHECK(std::log(law_moment(radial_exponent_law(2, r), 3, 0.5)) == doctest::Approx(log_xi_radial(2, r)).epsilon(1e-12));
}

TEST_CASE("Furstenberg entropy") {
    auto f2 = group::free(2);
    auto fe = furstenberg_entropy(sparse_measure::srw(f2), cylinder_measure::harmonic(2, 1));
    CHECK(fe.log_q_coefficient == rational(1, 2));
    CHECK(fe.value == doctest::Approx(half_log3).epsilon(1e-15));
    CHECK(furstenberg_entropy(sparse_measure::srw(f2), cylinder_measure::harmonic(2, 4)).log_q_coefficient == rational(1, 2));
    CHECK(furstenberg_entropy(sparse_measure::dirac(f2), cylinder_measure::harmonic(2, 1)).value == 0.0);

    auto c6 = group::cyclic(6);
    auto x = cyclic_self_space(6);
    auto mu = sparse_measure::srw(c6);
    CHECK(is_stationary(mu, x));
    CHECK(furstenberg_entropy(mu, x) == 0.0);
}

TEST_CASE("Koopman pairing") {
    auto f2 = group::free(2);
    auto mu = sparse_measure::srw(f2);
    auto nu = cylinder_measure::harmonic(2, 2);
    CHECK(koopman_pairing(mu, nu, 2.0) == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-14));
    for (double p : {2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) {
        double closed = 0.25 * std::pow(3.0, 1.0 / p) + 0.75 * std::pow(3.0, -1.0 / p);
        CHECK(koopman_pairing(mu, nu, p) == doctest::Approx(closed).epsilon(1e-14));
    }
    auto lim = koopman_limit(mu, nu);
    CHECK(std::fabs(lim.estimate - half_log3) <= 1e-3);
    CHECK(!lim.flagged("non_monotone"));
    CHECK(koopman_pairing(sparse_measure::dirac(f2), nu, 3.0) == 1.0);
}

TEST_CASE("Xi entropy limit") {
    auto f2 = group::free(2);
    auto r1 = xi_entropy_limit(sparse_measure::srw(f2), 1);
    CHECK(r1.sequences.front()[0].value == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-12));
    auto r = xi_entropy_limit(sparse_measure::srw(f2), 2000);
    CHECK(r.estimate == doctest::Approx(half_log3).epsilon(0.02));
    CHECK(xi_entropy_limit(sparse_measure::dirac(f2), 10).estimate == 0.0);
    CHECK_THROWS_AS(xi_entropy_limit(sparse_measure::srw(group::abelian(1)), 3), domain_error);
}

TEST_CASE("Koopman truncation bounds") {
    auto f2 = group::free(2);
    auto mu = sparse_measure::srw(f2);
    auto b1 = koopman_norm_lower(mu, cylinder_measure::harmonic(2, 1), 2.0);
    CHECK(b1.bound >= std::sqrt(3.0) / 2 - 1e-12);
    CHECK(b1.pairing == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-12));
    auto b3 = koopman_norm_lower(mu, cylinder_measure::harmonic(2, 3), 2.0);
    CHECK(b3.bound >= b1.bound - 1e-12);
    auto bq = koopman_norm_lower(mu, cylinder_measure::harmonic(2, 2), 3.0);
    CHECK(bq.pairing == doctest::Approx(koopman_pairing(mu, cylinder_measure::harmonic(2, 2), 1.5)).epsilon(1e-12));
    CHECK(koopman_norm_lower(sparse_measure::dirac(f2), cylinder_measure::harmonic(2, 2), 2.0).bound == 1.0);
}
