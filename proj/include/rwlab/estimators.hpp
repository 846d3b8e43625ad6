#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "rwlab/measures.hpp"
#include "rwlab/sequence.hpp"
#include "rwlab/spectra.hpp"
#include "rwlab/weights.hpp"

namespace rwlab {

struct estimate_report {
    std::string quantity;
    double estimate = 0;
    std::optional<double> lower;
    std::optional<double> upper;
    std::string method;
    // the first sequence is the headline one
    std::vector<asymptotic_sequence> sequences;
    nlohmann::json params = nlohmann::json::object();
    nlohmann::json diagnostics = nlohmann::json::object();
    std::optional<uint64_t> seed;
    std::vector<std::string> flags;

    const asymptotic_sequence& sequence(const std::string& name) const;
    bool flagged(const std::string& f) const;
};

struct mc_config {
    bool enabled = false;
    long paths = 10000;
    long n = 1000;
    uint64_t seed = 7;
    int threads = 1;
};

struct estimator_config {
    int n_max = 200;
    power_policy policy = power_policy::automatic;
    conv_limits limits;
    std::vector<double> p_grid{2, 4, 8, 16, 32, 64};
    double fit_fraction = 0.5;
    double monotone_slack = 1e-9;
    double mc_flag_tol = 0.10;
    double identity_tol = 1e-9;
    size_t cauchy_terms = 5;
    double cauchy_tol = 1e-4;

    spectra_config spectra() const;
};

estimate_report avez_entropy(const sparse_measure& mu, const estimator_config& cfg, const mc_config& mc = {});

estimate_report lyapunov_direct(const sparse_measure& mu, const weight& w, const estimator_config& cfg);
estimate_report lyapunov_via_radius(const sparse_measure& mu, const weight& w, const estimator_config& cfg);

// -p log ||mu||_{q, w^{1/p}} over the p grid, extrapolated; closed form H(mu) - sum mu log w
estimate_report weighted_shannon_limit(const sparse_measure& mu, const weight& w, const estimator_config& cfg);

estimate_report weighted_avez_entropy(const sparse_measure& mu, const weight& w, const estimator_config& cfg);

struct conv_entropy_config {
    double rd_degree = 2.0;
    double box_side_scale = 64;  // box test function side is scale * sqrt(p)
    std::optional<double> entropy_reference;  // h, for the c <= h check
    double le_h_slack = 0.01;
};

estimate_report convolution_entropy(const sparse_measure& mu, const estimator_config& cfg,
                                    const conv_entropy_config& cc = {});

struct inequality_report {
    double h = 0;
    double volume_growth = 0;
    double speed = 0;
    double slack = 0;  // v*l - h
    bool holds = false;
    struct weight_line {
        std::string weight;
        double lyapunov = 0;
        double log_growth = 0;
        double bound = 0;  // log(growth) * speed
        bool holds = false;
    };
    std::vector<weight_line> weights;
    estimate_report entropy;
    double tolerance = 0.01;
};

double volume_growth_estimate(const group& g, std::string* method = nullptr);

inequality_report fundamental_inequality_report(const sparse_measure& mu, const std::vector<weight>& weights,
                                                const estimator_config& cfg, double tolerance = 0.01);

}  // namespace rwlab
