#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rwlab/measures.hpp"
#include "rwlab/sequence.hpp"
#include "rwlab/weights.hpp"

namespace rwlab {

struct radius_estimate {
    double value = 1.0;
    double lower = 0.0;
    double upper = 1.0;
    std::string method;     // root | ratio | return-prob | rd-upper | lq-lower | folner-lower | constant-weight
    std::string path;       // computation path used
    asymptotic_sequence root{"root", index_kind::step};
    asymptotic_sequence ratio{"ratio", index_kind::step};
    std::vector<std::pair<std::string, double>> diagnostics;
    int n_used = 0;
};

struct spectra_config {
    int n_max = 2000;
    power_policy policy = power_policy::automatic;
    conv_limits limits;
    size_t cauchy_terms = 5;
    double cauchy_tol = 1e-4;
};

// log ||mu^{*n}||_{q, w^{1/p}} for n = 1..n_max, several requests sharing one walk; q = 1 is the l1 norm
struct norm_request {
    double q = 1.0;
    weight w = weight::constant(1.0);
    double p = 1.0;
};
std::vector<asymptotic_sequence> power_norm_sequences(const sparse_measure& mu, const std::vector<norm_request>& reqs,
                                                      const spectra_config& cfg, std::string* path_used = nullptr);

// root exp(log a_n / n) and ratio exp((log a_n - log a_m)/(n - m)) estimators from log a_n
radius_estimate estimate_from_log_terms(const asymptotic_sequence& log_terms, const spectra_config& cfg);

radius_estimate radius_l1_weighted(const sparse_measure& mu, const weight& w, double p, const spectra_config& cfg);
radius_estimate radius_pf2_symmetric(const sparse_measure& mu, const spectra_config& cfg);
radius_estimate radius_pfq_lower(const sparse_measure& mu, double q, const spectra_config& cfg);
radius_estimate radius_pfq_upper_rd(const sparse_measure& mu, double q, double d, const spectra_config& cfg);

// log mu^{*n}(e) for even n <= n_max
asymptotic_sequence log_return_probabilities(const sparse_measure& mu, const spectra_config& cfg,
                                             std::string* path_used = nullptr);

// Collatz-Wielandt bound from a box test function on the cursor lattice; nullopt if the
// measure does not have the required nearest-neighbour shape.
struct folner_bound {
    double lambda = 0;
    long side = 0;
};
std::optional<folner_bound> folner_lower(const sparse_measure& mu, long side);

}  // namespace rwlab
