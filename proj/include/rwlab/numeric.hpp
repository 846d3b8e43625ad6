#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace rwlab {

// compensated accumulator
class kahan_sum {
public:
    void add(double x) {
        double y = x - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// streaming log(sum exp(x_i)); -inf terms are ignored
class log_sum_exp {
public:
    void add(double x) {
        if (x == -std::numeric_limits<double>::infinity()) return;
        if (x == std::numeric_limits<double>::infinity()) {
            max_ = x;
            return;
        }
        if (x <= max_) {
            acc_.add(std::exp(x - max_));
        } else {
            double scaled = acc_.value() * std::exp(max_ - x);
            acc_ = kahan_sum{};
            acc_.add(scaled);
            acc_.add(1.0);
            max_ = x;
        }
    }
    double value() const {
        if (max_ == -std::numeric_limits<double>::infinity()) return max_;
        if (max_ == std::numeric_limits<double>::infinity()) return max_;
        return max_ + std::log(acc_.value());
    }

private:
    double max_ = -std::numeric_limits<double>::infinity();
    kahan_sum acc_;
};

inline double zeta3() { return 1.2020569031595942854; }

// partial sum of 1/n^s for n <= N
inline double zeta_partial(int N, double s = 3.0) {
    kahan_sum k;
    for (int n = N; n >= 1; --n) k.add(std::pow(static_cast<double>(n), -s));
    return k.value();
}

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// per-stream seed derived from (seed, stream index)
inline uint64_t stream_seed(uint64_t seed, uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

}  // namespace rwlab
