#include "rwlab/sequence.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "rwlab/errors.hpp"

namespace rwlab {

void asymptotic_sequence::push(double index, double value) {
    if (!terms_.empty() && !(index > terms_.back().index))
        throw domain_error("sequence '" + name_ + "': indices must increase strictly");
    terms_.push_back({index, value});
}

double asymptotic_sequence::fekete_inf() const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& t : terms_)
        if (t.index > 0) best = std::min(best, t.value / t.index);
    return best;
}

double asymptotic_sequence::last_difference() const {
    if (terms_.size() < 2) throw domain_error("sequence '" + name_ + "' too short for a difference");
    const auto& a = terms_[terms_.size() - 2];
    const auto& b = terms_.back();
    return (b.value - a.value) / (b.index - a.index);
}

linear_fit asymptotic_sequence::fit_inverse_quadratic(double fraction) const {
    if (terms_.size() < 3) throw domain_error("sequence '" + name_ + "' too short for a quadratic 1/index fit");
    size_t m = static_cast<size_t>(std::ceil(fraction * static_cast<double>(terms_.size())));
    m = std::min(std::max<size_t>(m, 3), terms_.size());
    size_t first = terms_.size() - m;
    Eigen::MatrixXd A(m, 3);
    Eigen::VectorXd b(m);
    for (size_t i = 0; i < m; ++i) {
        double x = 1.0 / terms_[first + i].index;
        A(i, 0) = 1.0;
        A(i, 1) = x;
        A(i, 2) = x * x;
        b(i) = terms_[first + i].value;
    }
    Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    linear_fit f;
    f.c0 = c(0);
    f.c1 = c(1);
    f.c2 = c(2);
    f.points = static_cast<int>(m);
    f.residual = std::sqrt((A * c - b).squaredNorm() / static_cast<double>(m));
    return f;
}

linear_fit asymptotic_sequence::fit_inverse_index(double fraction) const {
    size_t m = static_cast<size_t>(std::ceil(fraction * static_cast<double>(terms_.size())));
    m = std::max<size_t>(m, 2);
    if (terms_.size() < 2) throw domain_error("sequence '" + name_ + "' too short for a 1/index fit");
    m = std::min(m, terms_.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    size_t first = terms_.size() - m;
    for (size_t i = first; i < terms_.size(); ++i) {
        double x = 1.0 / terms_[i].index, y = terms_[i].value;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double n = static_cast<double>(m);
    double det = n * sxx - sx * sx;
    linear_fit f;
    f.points = static_cast<int>(m);
    if (std::fabs(det) < 1e-300) {
        f.c0 = sy / n;
    } else {
        f.c1 = (n * sxy - sx * sy) / det;
        f.c0 = (sy - f.c1 * sx) / n;
    }
    double ss = 0;
    for (size_t i = first; i < terms_.size(); ++i) {
        double r = terms_[i].value - (f.c0 + f.c1 / terms_[i].index);
        ss += r * r;
    }
    f.residual = std::sqrt(ss / n);
    return f;
}

bool asymptotic_sequence::non_decreasing(double slack) const {
    for (size_t i = 1; i < terms_.size(); ++i)
        if (terms_[i].value < terms_[i - 1].value - slack) return false;
    return true;
}

bool asymptotic_sequence::non_increasing(double slack) const {
    for (size_t i = 1; i < terms_.size(); ++i)
        if (terms_[i].value > terms_[i - 1].value + slack) return false;
    return true;
}

bool asymptotic_sequence::cauchy_tail(size_t count, double tol) const {
    if (terms_.size() < count || count == 0) return false;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (size_t i = terms_.size() - count; i < terms_.size(); ++i) {
        lo = std::min(lo, terms_[i].value);
        hi = std::max(hi, terms_[i].value);
    }
    return hi - lo <= tol;
}

double asymptotic_sequence::min_value() const {
    double v = std::numeric_limits<double>::infinity();
    for (const auto& t : terms_) v = std::min(v, t.value);
    return v;
}

double asymptotic_sequence::max_value() const {
    double v = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms_) v = std::max(v, t.value);
    return v;
}

}  // namespace rwlab
