#include <doctest.h>

#include <cmath>
#include <random>

#include "rwlab/errors.hpp"
#include "rwlab/measures.hpp"

using namespace rwlab;

namespace {

sparse_measure random_measure(const group& g, std::mt19937_64& rng, int atoms, int steps) {
    std::uniform_int_distribution<size_t> pick(0, g.generators().size() - 1);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    std::vector<atom> a;
    double tot = 0;
    for (int i = 0; i < atoms; ++i) {
        element w = g.identity();
        int len = static_cast<int>(rng() % (steps + 1));
        for (int j = 0; j < len; ++j) g.right_multiply(w, g.generators()[pick(rng)]);
        double m = u(rng);
        tot += m;
        a.push_back({w, m});
    }
    for (auto& x : a) x.mass /= tot;
    return sparse_measure::from_atoms(g, a, false);
}

}  // namespace

TEST_CASE("integer walk convolution") {
    auto z = group::abelian(1);
    auto mu = sparse_measure::srw(z);
    auto m2 = convolve(mu, mu);
    CHECK(m2.size() == 3);
    CHECK(m2.mass({-2}) == doctest::Approx(0.25));
    CHECK(m2.mass({0}) == doctest::Approx(0.5));
    CHECK(m2.mass({2}) == doctest::Approx(0.25));
    auto m4 = convolution_power(mu, 4);
    CHECK(m4.mass({0}) == doctest::Approx(0.375));
    CHECK(lq_norm(mu, 2.0) == doctest::Approx(std::sqrt(0.5)));
    CHECK_THROWS_AS(lq_norm(mu, 1.0), domain_error);
}

TEST_CASE("free group second power") {
    auto f2 = group::free(2);
    auto mu = sparse_measure::srw(f2);
    auto m2 = convolution_power(mu, 2);
    CHECK(m2.mass(f2.identity()) == doctest::Approx(0.25));
    CHECK(m2.size() == 13);
    CHECK(m2.mass(f2.parse("ab")) == doctest::Approx(1.0 / 16));
    REQUIRE(m2.has_exact());
    CHECK(m2.exact()[0] == rational(1, 4));
    CHECK(shannon_entropy(mu) == doctest::Approx(std::log(4.0)));
    CHECK(shannon_entropy(m2) == doctest::Approx(2.426015).epsilon(1e-6));
    CHECK(alpha_moment(mu, 1.0) == doctest::Approx(1.0));
    CHECK(speed_term(m2) == doctest::Approx(1.5));
}

TEST_CASE("identity of the algebra") {
    std::mt19937_64 rng(21);
    auto g = group::free(2);
    auto mu = random_measure(g, rng, 20, 4);
    auto d = sparse_measure::dirac(g);
    auto r = convolve(mu, d);
    REQUIRE(r.size() == mu.size());
    for (size_t i = 0; i < r.size(); ++i) CHECK(r.atoms()[i].mass == mu.atoms()[i].mass);
    CHECK(convolution_power(mu, 0).is_dirac_identity());
    CHECK(shannon_entropy(d) == 0.0);
}

TEST_CASE("construction validation") {
    auto g = group::free(2);
    CHECK_THROWS_AS(sparse_measure::from_atoms(g, {{g.parse("a"), 0.5}}), domain_error);
    CHECK_THROWS_AS(sparse_measure::from_atoms(g, {{g.parse("a"), -1.0}, {g.parse("b"), 2.0}}), domain_error);
    auto m = sparse_measure::from_atoms(g, {{g.parse("a"), 0.5}, {g.parse("a"), 0.5}});
    CHECK(m.size() == 1);
}

TEST_CASE("associativity and mass conservation on random measures") {
    std::mt19937_64 rng(22);
    for (const auto& g : {group::free(2), group::abelian(2), group::lamplighter(1), group::cyclic(7)}) {
        for (int t = 0; t < 5; ++t) {
            auto a = random_measure(g, rng, 30, 3);
            auto b = random_measure(g, rng, 30, 3);
            auto c = random_measure(g, rng, 30, 3);
            auto l = convolve(convolve(a, b), c);
            auto r = convolve(a, convolve(b, c));
            REQUIRE(l.size() == r.size());
            for (size_t i = 0; i < l.size(); ++i) {
                REQUIRE(l.atoms()[i].elem == r.atoms()[i].elem);
                REQUIRE(std::fabs(l.atoms()[i].mass - r.atoms()[i].mass) <= 1e-10);
            }
            CHECK(std::fabs(convolve(a, b).total() - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("radial path agrees with the generic path") {
    for (int k = 2; k <= 3; ++k) {
        auto g = group::free(k);
        auto mu = sparse_measure::srw(g);
        walk_powers rad(mu, power_policy::radial);
        walk_powers gen(mu, power_policy::exact);
        for (int n = 1; n <= (k == 2 ? 6 : 5); ++n) {
            rad.advance();
            gen.advance();
            const auto& s = *gen.sparse();
            for (const auto& a : s.atoms())
                REQUIRE(std::fabs(std::exp(rad.log_mass_at(a.elem)) - a.mass) <= 1e-12);
            CHECK(rad.entropy() == doctest::Approx(gen.entropy()).epsilon(1e-12));
            CHECK(rad.speed_term() == doctest::Approx(gen.speed_term()).epsilon(1e-12));
        }
    }
}

TEST_CASE("lattice path agrees with the generic path") {
    for (const auto& g : {group::abelian(1), group::abelian(2), group::cyclic(6)}) {
        auto mu = sparse_measure::lazy_srw(g, 0.25);
        walk_powers lat(mu, power_policy::lattice);
        walk_powers gen(mu, power_policy::exact);
        for (int n = 1; n <= 6; ++n) {
            lat.advance();
            gen.advance();
            for (const auto& a : gen.sparse()->atoms())
                REQUIRE(std::fabs(std::exp(lat.log_mass_at(a.elem)) - a.mass) <= 1e-13);
            CHECK(lat.entropy() == doctest::Approx(gen.entropy()).epsilon(1e-12));
            CHECK(lat.identity_mass() == doctest::Approx(gen.identity_mass()));
        }
    }
}

TEST_CASE("entropy is subadditive along powers") {
    for (const auto& g : {group::free(2), group::abelian(2), group::lamplighter(1)}) {
        auto mu = sparse_measure::srw(g);
        walk_powers w(mu, power_policy::exact);
        std::vector<double> H{0.0};
        for (int n = 1; n <= 6; ++n) {
            w.advance();
            H.push_back(w.entropy());
        }
        for (int m = 1; m <= 6; ++m)
            for (int n = 1; m + n <= 6; ++n) CHECK(H[m + n] <= H[m] + H[n] + 1e-9);
    }
}

TEST_CASE("path sampling") {
    auto f2 = group::free(2);
    auto mu = sparse_measure::srw(f2);
    auto st = sample_paths(mu, 1000, 10000, 5);
    CHECK(std::fabs(st.speed - 0.5) <= 0.01);
    auto st2 = sample_paths(mu, 1000, 10000, 5, nullptr, 3);
    CHECK(st2.speed == st.speed);
    auto z = group::abelian(1);
    auto sz = sample_paths(sparse_measure::srw(z), 10000, 400, 9);
    CHECK(std::fabs(sz.speed) <= 0.02);
    auto sd = sample_paths(sparse_measure::dirac(f2), 50, 10, 1);
    CHECK(sd.speed == 0.0);
    CHECK(sd.return_fraction == 1.0);
}
