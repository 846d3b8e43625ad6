#pragma once

#include <functional>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "rwlab/estimators.hpp"
#include "rwlab/groups.hpp"
#include "rwlab/measures.hpp"

namespace rwlab {

// Uniform hitting measure of the simple random walk on the boundary of F_k,
// restricted to the cylinders C_w of one depth. Cylinders are keyed by reduced words.
class cylinder_measure {
public:
    static cylinder_measure harmonic(int k, int depth, int depth_cap = 12);

    int k() const { return g_.rank(); }
    int depth() const { return depth_; }
    long q() const { return 2L * g_.rank() - 1; }
    const group& grp() const { return g_; }
    const std::vector<element>& words() const { return words_; }
    const std::vector<rational>& masses() const { return masses_; }
    size_t size() const { return words_.size(); }
    std::optional<size_t> index_of(const element& w) const;

    // mass of any cylinder, any depth; the empty word is the whole boundary
    rational mass(const element& w) const;
    // cylinders whose disjoint union is s C_w; needs |s| <= |w|
    std::vector<element> image_cylinders(const element& s, const element& w) const;
    rational image_mass(const element& s, const element& w) const;

    cylinder_measure refine() const;

private:
    explicit cylinder_measure(group g) : g_(std::move(g)) {}
    group g_;
    int depth_ = 0;
    std::vector<element> words_;
    std::vector<rational> masses_;
    std::unordered_map<element, size_t, element_hash> index_;
};

rational total_mass(const cylinder_measure& nu);
// mass(w) equals the sum over its children, for every cylinder
bool refinement_consistent(const cylinder_measure& nu);
// (mu * nu)(C_w) - nu(C_w) per cylinder, exact; needs depth >= max |s| over supp mu
std::vector<rational> stationarity_defect(const sparse_measure& mu, const cylinder_measure& nu);
bool is_stationary(const sparse_measure& mu, const cylinder_measure& nu);

// number of letters of s cancelled against the front of w
int cancellation(const element& s, const element& w);

// rho(s, x) = d(s^-1 nu)/d nu on the cylinders of nu; every value is q^exponent
struct rn_cocycle {
    element s;
    int depth = 0;
    long q = 3;
    std::vector<rational> value;
    std::vector<int> q_exponent;
};

rn_cocycle rn_derivative(const element& s, const cylinder_measure& nu);
// value on one cylinder with |w| >= |s|, from the measure ratio
rational rho_on(const cylinder_measure& nu, const element& s, const element& w);
rational integrate(const rn_cocycle& rho, const cylinder_measure& nu);
// cylinders at depth max(1, |s|+|t|) where rho(st,x) != rho(s,tx) rho(t,x)
long cocycle_mismatches(int k, const element& s, const element& t);

// law of the exponent e in rho(s, .) = q^e under nu: exponent -> exact mass
using exponent_law = std::map<int, rational>;
exponent_law rho_exponent_law(const element& s, const cylinder_measure& nu);
// same law from the cancellation-length distribution, any radius
exponent_law radial_exponent_law(int k, long r);
// sum over the law of mass * q^(e * t)
double law_moment(const exponent_law& law, long q, double t);

double harish_chandra_xi(const element& s, const cylinder_measure& nu);
// log Xi at radius r, closed sum of the radial law
double log_xi_radial(int k, long r);

struct furstenberg_value {
    rational log_q_coefficient;  // entropy = coefficient * log q
    long q = 3;
    double value = 0;
};
furstenberg_value furstenberg_entropy(const sparse_measure& mu, const cylinder_measure& nu);

// finite stationary space: points 0..N-1, measure xi, action s.x
struct finite_space {
    std::vector<rational> xi;
    std::function<size_t(const element&, size_t)> act;
};
finite_space cyclic_self_space(int n);
bool is_stationary(const sparse_measure& mu, const finite_space& x);
double furstenberg_entropy(const sparse_measure& mu, const finite_space& x);

// <pi_q(mu) 1, 1> = sum_s mu(s) int rho(s,x)^(1/p) dnu, q conjugate to p
double koopman_pairing(const sparse_measure& mu, const cylinder_measure& nu, double p);

struct pairing_config {
    std::vector<double> p_grid{2, 4, 8, 16, 32, 64};
    double fit_fraction = 0.5;
    double monotone_slack = 1e-12;
};
// -p log pairing over the grid, extrapolated in 1/p
estimate_report koopman_limit(const sparse_measure& mu, const cylinder_measure& nu, const pairing_config& cfg = {});

// -(2/n) sum mu^{*n}(s) log Xi(s), Xi taken from the radial table
estimate_report xi_entropy_limit(const sparse_measure& mu, int n_max, power_policy policy = power_policy::automatic,
                                 const conv_limits& lim = {});

struct koopman_bound {
    double bound = 0;        // lower bound for the operator norm on L^q
    double pairing = 0;      // value at the constant function
    double norm_ratio = 0;   // best ||Tf||_q / ||f||_q seen
    double cw_ratio = 0;     // Collatz-Wielandt min ratio
    int iterations = 0;
    size_t dimension = 0;
};
// compression of pi_q(mu) to functions constant on the cylinders of nu
koopman_bound koopman_norm_lower(const sparse_measure& mu, const cylinder_measure& nu, double q, int iters = 200,
                                 size_t dim_cap = 6000);

}  // namespace rwlab
