#pragma once

#include <string>
#include <vector>

namespace rwlab {

enum class index_kind { step, exponent };

struct term {
    double index;
    double value;
};

struct linear_fit {
    double c0 = 0;  // intercept, the extrapolated limit
    double c1 = 0;
    double c2 = 0;  // only set by the quadratic fit
    double residual = 0;  // rms
    int points = 0;
};

// Ordered (index, value) pairs; indices strictly increasing.
class asymptotic_sequence {
public:
    explicit asymptotic_sequence(std::string name = "", index_kind kind = index_kind::step)
        : name_(std::move(name)), kind_(kind) {}

    void push(double index, double value);

    const std::string& name() const { return name_; }
    index_kind kind() const { return kind_; }
    const std::vector<term>& terms() const { return terms_; }
    size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }
    const term& back() const { return terms_.back(); }
    const term& operator[](size_t i) const { return terms_[i]; }

    // min value/index over positive indices
    double fekete_inf() const;
    double last_difference() const;
    // least squares v = c0 + c1/index over the last ceil(fraction*size) terms (at least 2)
    linear_fit fit_inverse_index(double fraction = 0.5) const;
    // v = c0 + c1/index + c2/index^2, same window, at least 3 terms
    linear_fit fit_inverse_quadratic(double fraction = 0.5) const;

    bool non_decreasing(double slack) const;
    bool non_increasing(double slack) const;
    // last `count` terms pairwise within tol
    bool cauchy_tail(size_t count, double tol) const;
    double min_value() const;
    double max_value() const;

private:
    std::string name_;
    index_kind kind_;
    std::vector<term> terms_;
};

}  // namespace rwlab
