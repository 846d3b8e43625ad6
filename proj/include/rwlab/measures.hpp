#pragma once

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rwlab/groups.hpp"

namespace rwlab {

using rational = boost::multiprecision::cpp_rational;

struct atom {
    element elem;
    double mass;
};

struct conv_limits {
    long long support_cap = 5'000'000;
    double work_cap = 4.0e9;  // |supp mu| * |supp nu|
    size_t exact_shadow_cap = 10'000;
};

// Finitely supported measure, atoms sorted by canonical form.
class sparse_measure {
public:
    explicit sparse_measure(group g) : g_(std::move(g)) {}

    // Deduplicates, drops nothing; throws if masses are not positive or (when
    // probability is set) do not sum to one within 1e-12.
    static sparse_measure from_atoms(const group& g, std::vector<atom> atoms, bool probability = true);
    static sparse_measure dirac(const group& g);
    static sparse_measure dirac(const group& g, const element& x);
    static sparse_measure srw(const group& g);
    static sparse_measure lazy_srw(const group& g, double hold);

    const group& grp() const { return g_; }
    const std::vector<atom>& atoms() const { return atoms_; }
    size_t size() const { return atoms_.size(); }
    double mass(const element& x) const;
    double total() const;
    bool is_symmetric(double tol = 1e-12) const;
    bool is_dirac_identity() const;
    long max_length() const;

    bool has_exact() const { return exact_.has_value(); }
    const std::vector<rational>& exact() const { return *exact_; }
    void set_exact(std::vector<rational> masses);

private:
    group g_;
    std::vector<atom> atoms_;
    std::optional<std::vector<rational>> exact_;
    friend sparse_measure convolve(const sparse_measure&, const sparse_measure&, const conv_limits&);
    friend sparse_measure normalize_into(const group&, std::vector<atom>&&, bool);
};

sparse_measure convolve(const sparse_measure& mu, const sparse_measure& nu, const conv_limits& lim = {});

// Measure on F_k constant on spheres: mass(r) spread uniformly over sphere(r).
struct radial_measure {
    int k = 2;
    Eigen::VectorXd sphere_mass;

    static std::optional<radial_measure> from_sparse(const sparse_measure& mu, double tol = 1e-12);
    sparse_measure to_sparse(const group& g) const;
    double log_sphere_size(long r) const;
    // log of the mass of a single atom at radius r (-inf if zero)
    double log_atom_mass(long r) const;
    long radius() const { return static_cast<long>(sphere_mass.size()) - 1; }
};

// Distance distribution of a product of independent radial elements.
radial_measure radial_convolve(const radial_measure& a, const radial_measure& b);

// Dense array on a box of Z^d, or on Z/n.
struct lattice_measure {
    int d = 1;
    bool periodic = false;
    int period = 0;
    std::vector<long> lo;
    std::vector<long> ext;
    std::vector<double> mass;

    static lattice_measure from_sparse(const sparse_measure& mu);
    element cell_element(size_t idx) const;
    std::optional<size_t> index_of(const element& x) const;
    double at(const element& x) const;
};

lattice_measure lattice_convolve(const lattice_measure& a, const sparse_measure& step, const conv_limits& lim = {});

enum class power_policy { automatic, exact, radial, lattice };
enum class power_path { sparse, radial, lattice };

const char* path_name(power_path p);
power_policy parse_policy(const std::string& s);

// Successive convolution powers mu^{*n}, kept in the cheapest exact representation.
class walk_powers {
public:
    explicit walk_powers(const sparse_measure& mu, power_policy policy = power_policy::automatic,
                         const conv_limits& lim = {});

    int n() const { return n_; }
    void advance();
    void advance_to(int n);
    power_path path() const { return path_; }
    const group& grp() const { return base_.grp(); }
    const sparse_measure& base() const { return base_; }

    double entropy() const;
    double log_lq_norm(double q) const;
    double identity_mass() const;
    double log_mass_at(const element& x) const;
    double speed_term() const;
    // sum mu^{*n}(s) f(|s|)
    double length_moment(const std::function<double(long)>& f) const;
    size_t support_size() const;

    // visitors; radial visits spheres (r, sphere mass, log sphere size)
    void for_each_atom(const std::function<void(const element&, double)>& fn) const;
    void for_each_sphere(const std::function<void(long, double, double)>& fn) const;

    const sparse_measure* sparse() const { return std::get_if<sparse_measure>(&state_); }
    const radial_measure* radial() const { return std::get_if<radial_measure>(&state_); }
    const lattice_measure* lattice() const { return std::get_if<lattice_measure>(&state_); }

private:
    sparse_measure base_;
    conv_limits lim_;
    power_path path_;
    int n_ = 0;
    std::optional<radial_measure> radial_step_;
    std::variant<sparse_measure, radial_measure, lattice_measure> state_;
};

// convenience: mu^{*n} as a sparse measure (exact policy unless radial/lattice requested)
sparse_measure convolution_power(const sparse_measure& mu, int n, power_policy policy = power_policy::exact,
                                 const conv_limits& lim = {});

double shannon_entropy(const sparse_measure& mu);
double lq_norm(const sparse_measure& mu, double q);
double log_moment(const sparse_measure& mu, const std::function<double(const element&)>& f);
double alpha_moment(const sparse_measure& mu, double alpha);
double speed_term(const sparse_measure& mu);

struct path_stats {
    long n = 0;
    long count = 0;
    uint64_t seed = 0;
    double speed = 0;  // mean |W_n| / n
    double speed_stderr = 0;
    bool has_kv = false;
    double kv_entropy = 0;  // mean of -log mu^{*n}(W_n) / n
    double kv_stderr = 0;
    double return_fraction = 0;
    bool has_speed = true;
};

// Monte Carlo paths; log_mass (optional) gives log mu^{*n}(x) for the entropy estimate.
path_stats sample_paths(const sparse_measure& mu, long n, long count, uint64_t seed,
                        const std::function<double(const element&)>& log_mass = nullptr, int threads = 1);

}  // namespace rwlab
