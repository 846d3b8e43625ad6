#pragma once

#include <random>
#include <vector>

#include "rwlab/measures.hpp"

namespace rwlab::testing {

// random probability measure whose atoms are short random words
inline sparse_measure random_prob(const group& g, std::mt19937_64& rng, int atoms, int steps) {
    std::uniform_int_distribution<size_t> pick(0, g.generators().size() - 1);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<atom> a;
    double tot = 0;
    for (int i = 0; i < atoms; ++i) {
        element w = g.identity();
        int len = 1 + static_cast<int>(rng() % steps);
        for (int j = 0; j < len; ++j) g.right_multiply(w, g.generators()[pick(rng)]);
        double m = u(rng);
        tot += m;
        a.push_back({w, m});
    }
    for (auto& x : a) x.mass /= tot;
    return sparse_measure::from_atoms(g, a, false);
}

// symmetrized version: mass split evenly between x and x^-1
inline sparse_measure random_symmetric(const group& g, std::mt19937_64& rng, int atoms, int steps) {
    auto base = random_prob(g, rng, atoms, steps);
    std::vector<atom> a;
    for (const auto& x : base.atoms()) {
        a.push_back({x.elem, x.mass / 2});
        a.push_back({g.inverse(x.elem), x.mass / 2});
    }
    return sparse_measure::from_atoms(g, a, false);
}

}  // namespace rwlab::testing
