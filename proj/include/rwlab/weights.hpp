#pragma once

#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rwlab/measures.hpp"
#include "rwlab/sequence.hpp"

namespace rwlab {

enum class weight_kind { constant, polynomial, exponential, table, inverse_series, product };

const char* weight_kind_name(weight_kind k);

struct series_info {
    int terms = 0;          // N
    double exponent = 3.0;  // cube exponent by default
    double tail_bound = 0;  // sum_{n>N} n^{-exponent}
    double partial_sum = 0; // sum_{n<=N} n^{-exponent} = ||w^{-1}||_1
};

// Positive weight on a group, evaluated in the log domain. Table and series weights
// return +inf outside their support.
class weight {
public:
    static weight constant(double c);
    static weight polynomial(double d);   // (1+L)^d
    static weight exponential(double a);  // a^L
    // log values indexed by word length; lengths beyond the table are +inf
    static weight radial_table(std::vector<double> log_values, double log_lower, std::string label);
    static weight element_table(std::unordered_map<element, double, element_hash> log_values, double log_default,
                                std::string label);
    static weight product(const weight& a, const weight& b);

    weight_kind kind() const { return kind_; }
    double log_eval(const group& g, const element& s) const;
    double eval(const group& g, const element& s) const;
    // depends on the word length only
    bool length_based() const;
    double log_eval_length(long r) const;
    // log of the guaranteed lower bound a > 0
    double log_lower_bound() const;
    bool at_least_one() const { return log_lower_bound() >= 0.0; }
    // every value constant (so Ly is exactly zero)
    bool is_constant() const { return kind_ == weight_kind::constant; }
    std::string spec() const;

    // log growth rate when known in closed form
    std::optional<double> log_growth_closed_form() const;
    const std::optional<series_info>& series() const { return series_; }
    void set_series(series_info s) { series_ = s; kind_ = weight_kind::inverse_series; }

private:
    weight_kind kind_ = weight_kind::constant;
    double param_ = 1.0;
    std::shared_ptr<const std::vector<double>> radial_;
    std::shared_ptr<const std::unordered_map<element, double, element_hash>> table_;
    double log_default_ = 0.0;
    double log_lower_ = 0.0;
    std::string label_;
    std::shared_ptr<const weight> left_, right_;
    std::optional<series_info> series_;
};

// ||f||_{1, w^{1/p}} = sum |f| w^{1/p}
double weighted_l1_norm(const sparse_measure& f, const weight& w, double p = 1.0);
// ||f||_{q, w^{1/p}} = (sum |f w^{1/p}|^q)^{1/q}, q > 1
double weighted_lq_norm(const sparse_measure& f, double q, const weight& w, double p = 1.0);

// the same on the current power of a walk, in the log domain
double log_weighted_l1(const walk_powers& wp, const weight& w, double p = 1.0);
double log_weighted_lq(const walk_powers& wp, double q, const weight& w, double p = 1.0);
// sum mu^{*n}(s) log w(s); domain error on +inf values
double log_weight_moment(const walk_powers& wp, const weight& w);
double log_weight_moment(const sparse_measure& mu, const weight& w);

// -sum mu log(mu w)
double weighted_shannon_entropy(const sparse_measure& mu, const weight& w);

struct growth_report {
    asymptotic_sequence samples{"sup_ball_root", index_kind::step};  // sup_{|s|<=n} w(s)^{1/n}
    double estimate = 1.0;
    std::string method;
};

growth_report growth_rate(const weight& w, const group& g, int r_max);

// w^{-1} = sum_{n<=N} mu^{*n}/n^exponent
weight build_inverse_series_weight(const sparse_measure& mu, int N, double exponent = 3.0,
                                   power_policy policy = power_policy::automatic, const conv_limits& lim = {});

struct domination_report {
    double max_ratio = 0;
    std::string argmax;
    double bound = 0;          // 8 * zeta(3)
    double truncated_bound = 0; // 8 * sum_{n<=N} n^-3
    int terms = 0;
    size_t support = 0;
    bool within_bound = false;
};

// max over supp w^{-1} of (w^{-1} * w^{-1})(s) / w^{-1}(s) with the truncated series
domination_report verify_convolution_domination(const sparse_measure& mu, int N,
                                                power_policy policy = power_policy::automatic,
                                                const conv_limits& lim = {});

struct submult_report {
    double constant = 0;  // max w(st)/(w(s)w(t)) seen
    double log_min = 0;   // min log w seen
    long pairs = 0;
    long skipped = 0;     // pairs outside a table's support
};

// seeded pairs of random words of length <= radius
submult_report estimate_submult_constant(const weight& w, const group& g, long pairs, uint64_t seed, int radius);

}  // namespace rwlab
