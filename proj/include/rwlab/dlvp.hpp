#pragma once

#include <functional>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "rwlab/measures.hpp"
#include "rwlab/sequence.hpp"

namespace rwlab {

using element_function = std::function<double(const element&)>;

// named test functions: "log1pL" = log(1+|s|), "L" = |s|, "zero"
element_function named_function(const group& g, const std::string& name);

struct dlvp_config {
    int max_thresholds = 64;
    // bound on the integral of f over mass missing from a truncated measure; required when the mass is short of 1
    std::optional<double> declared_tail;
    double grid_step = 1e-3;
    size_t max_grid_points = 20'000'000;
};

// thresholds c_n, the piecewise-linear psi through (c_n, n-1), its antiderivative Psi,
// F(y) = Psi(log(1+y)), and the constants of the weak subadditivity bound for F
class dlvp_bundle {
public:
    static dlvp_bundle build(const sparse_measure& mu, const element_function& f, const dlvp_config& cfg = {});
    // (mass, value) pairs; total mass may be below 1 for a truncated series
    static dlvp_bundle from_values(std::vector<std::pair<double, double>> mass_value, const dlvp_config& cfg = {});

    const std::vector<long>& thresholds() const { return c_; }
    // tail of f beyond the last threshold is zero, so unit steps continue forever
    bool complete() const { return complete_; }
    double covered_to() const;
    double tail(double c) const;
    double uncertified_tail() const { return declared_; }

    double phi(double y) const;
    double psi(double y) const;
    double psi_slope(double y) const;  // right derivative
    double Psi(double y) const;
    double F(double y) const;
    double dF(double y) const;

    double onset() const { return onset_; }
    double M1() const { return M1_; }
    double M() const { return M_; }
    double grid_step_used() const { return step_; }

    nlohmann::json to_json() const;

private:
    void check_range(double y) const;
    void locate_constants(const dlvp_config& cfg);

    std::vector<std::pair<double, double>> atoms_;  // sorted by value, descending
    double declared_ = 0;
    std::vector<long> c_;
    std::vector<double> Psi_at_;  // Psi at each threshold
    bool complete_ = false;
    double onset_ = 0, M1_ = 0, M_ = 1, step_ = 0;
};

// Theta(s) = F(|s|) + M
double theta(const dlvp_bundle& b, long length);

struct grid_violation {
    double worst = -1e300;  // max of F(y+y') - F(y) - F(y')
    double y = 0, y2 = 0;
    bool within_M = false;
};
grid_violation check_weak_subadditivity(const dlvp_bundle& b, int grid);

struct lipschitz_report {
    double max_slope = 0;
    bool monotone = true;
    bool lipschitz = true;
    bool knots_exact = true;
    bool dominated_by_phi = true;
};
lipschitz_report check_psi(const dlvp_bundle& b, double y_max, double step);

// psi(u) e^-u is non-increasing once psi(u) >= 1
bool check_lambda_decreasing(const dlvp_bundle& b, double u_max, double step);

// sum over |s| <= R of mu(s) Psi(f(s)), R = 0..max length
struct integrability_report {
    asymptotic_sequence partial{"partial_sum"};
    double bound = 1.0;
    bool bounded = true;
    bool increasing = true;
};
integrability_report integrability_partial_sums(const sparse_measure& mu, const element_function& f, const dlvp_bundle& b);

// log(1+L) <= eps F(L) + u_eps pointwise, averaged along mu^{*n}
struct vanishing_report {
    double eps = 0.1;
    double u_eps = 0;  // log(1+N) in the chain
    asymptotic_sequence log_length{"log_length_per_n"};
    asymptotic_sequence bound{"bound_per_n"};
    asymptotic_sequence theta_avg{"theta_per_n"};
    double theta_step_mean = 0;  // sum mu Theta, bounds theta_avg by subadditivity
    bool chain_holds = true;
    bool theta_bounded = true;
};
vanishing_report vanishing_chain(const sparse_measure& mu, const dlvp_bundle& b, double eps, int n_max,
                                 power_policy policy = power_policy::automatic, const conv_limits& lim = {});

}  // namespace rwlab
