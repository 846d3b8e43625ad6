#include "rwlab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "rwlab/errors.hpp"
#include "rwlab/numeric.hpp"

namespace rwlab {

namespace {
constexpr double pos_inf = std::numeric_limits<double>::infinity();

std::string num(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}
}  // namespace

const char* weight_kind_name(weight_kind k) {
    switch (k) {
        case weight_kind::constant: return "constant";
        case weight_kind::polynomial: return "polynomial";
        case weight_kind::exponential: return "exponential";
        case weight_kind::table: return "table";
        case weight_kind::inverse_series: return "inverse-series";
        case weight_kind::product: return "product";
    }
    return "?";
}

weight weight::constant(double c) {
    if (!(c > 0) || !std::isfinite(c)) throw config_error("constant weight needs c > 0");
    weight w;
    w.kind_ = weight_kind::constant;
    w.param_ = c;
    w.log_lower_ = std::log(c);
    return w;
}

weight weight::polynomial(double d) {
    if (!(d >= 0) || !std::isfinite(d)) throw config_error("polynomial weight needs degree d >= 0");
    weight w;
    w.kind_ = weight_kind::polynomial;
    w.param_ = d;
    return w;
}

weight weight::exponential(double a) {
    if (!(a >= 1) || !std::isfinite(a)) throw config_error("exponential weight needs base a >= 1");
    weight w;
    w.kind_ = weight_kind::exponential;
    w.param_ = a;
    return w;
}

weight weight::radial_table(std::vector<double> log_values, double log_lower, std::string label) {
    weight w;
    w.kind_ = weight_kind::table;
    w.radial_ = std::make_shared<const std::vector<double>>(std::move(log_values));
    w.log_lower_ = log_lower;
    w.label_ = std::move(label);
    return w;
}

weight weight::element_table(std::unordered_map<element, double, element_hash> log_values, double log_default,
                             std::string label) {
    weight w;
    w.kind_ = weight_kind::table;
    double lo = log_default;
    for (const auto& kv : log_values) lo = std::min(lo, kv.second);
    w.table_ = std::make_shared<const std::unordered_map<element, double, element_hash>>(std::move(log_values));
    w.log_default_ = log_default;
    w.log_lower_ = lo;
    w.label_ = std::move(label);
    return w;
}

weight weight::product(const weight& a, const weight& b) {
    weight w;
    w.kind_ = weight_kind::product;
    w.left_ = std::make_shared<const weight>(a);
    w.right_ = std::make_shared<const weight>(b);
    w.log_lower_ = a.log_lower_bound() + b.log_lower_bound();
    return w;
}

bool weight::length_based() const {
    switch (kind_) {
        case weight_kind::constant:
        case weight_kind::polynomial:
        case weight_kind::exponential: return true;
        case weight_kind::table:
        case weight_kind::inverse_series: return static_cast<bool>(radial_);
        case weight_kind::product: return left_->length_based() && right_->length_based();
    }
    return false;
}

double weight::log_eval_length(long r) const {
    switch (kind_) {
        case weight_kind::constant: return std::log(param_);
        case weight_kind::polynomial: return param_ == 0 ? 0.0 : param_ * std::log1p(static_cast<double>(r));
        case weight_kind::exponential: return static_cast<double>(r) * std::log(param_);
        case weight_kind::table:
        case weight_kind::inverse_series:
            if (!radial_) throw domain_error("weight " + spec() + " is not a function of length");
            return r >= 0 && r < static_cast<long>(radial_->size()) ? (*radial_)[r] : pos_inf;
        case weight_kind::product: return left_->log_eval_length(r) + right_->log_eval_length(r);
    }
    return pos_inf;
}

double weight::log_eval(const group& g, const element& s) const {
    switch (kind_) {
        case weight_kind::constant: return std::log(param_);
        case weight_kind::polynomial:
        case weight_kind::exponential: return log_eval_length(g.length(s));
        case weight_kind::table:
        case weight_kind::inverse_series:
            if (radial_) return log_eval_length(g.length(s));
            {
                auto it = table_->find(s);
                return it == table_->end() ? log_default_ : it->second;
            }
        case weight_kind::product: return left_->log_eval(g, s) + right_->log_eval(g, s);
    }
    return pos_inf;
}

double weight::eval(const group& g, const element& s) const { return std::exp(log_eval(g, s)); }

double weight::log_lower_bound() const {
    switch (kind_) {
        case weight_kind::polynomial:
        case weight_kind::exponential: return 0.0;
        default: return log_lower_;
    }
}

std::string weight::spec() const {
    switch (kind_) {
        case weight_kind::constant: return "const:" + num(param_);
        case weight_kind::polynomial: return "poly:d=" + num(param_);
        case weight_kind::exponential: return "exp:a=" + num(param_);
        case weight_kind::table: return "table:" + label_;
        case weight_kind::inverse_series: return "invseries:N=" + std::to_string(series_ ? series_->terms : 0);
        case weight_kind::product: return left_->spec() + "*" + right_->spec();
    }
    return "?";
}

std::optional<double> weight::log_growth_closed_form() const {
    switch (kind_) {
        case weight_kind::constant:
        case weight_kind::polynomial: return 0.0;
        case weight_kind::exponential: return std::log(param_);
        case weight_kind::product: {
            auto a = left_->log_growth_closed_form(), b = right_->log_growth_closed_form();
            if (a && b) return *a + *b;
            return std::nullopt;
        }
        default: return std::nullopt;
    }
}

// ---------------------------------------------------------------- norms

double weighted_l1_norm(const sparse_measure& f, const weight& w, double p) {
    if (!(p > 0)) throw domain_error("weight exponent p must be positive");
    kahan_sum k;
    for (const auto& a : f.atoms()) k.add(std::fabs(a.mass) * std::exp(w.log_eval(f.grp(), a.elem) / p));
    return k.value();
}

double weighted_lq_norm(const sparse_measure& f, double q, const weight& w, double p) {
    if (!(q > 1.0)) throw domain_error("weighted lq norm needs q > 1");
    if (!(p > 0)) throw domain_error("weight exponent p must be positive");
    log_sum_exp acc;
    for (const auto& a : f.atoms()) acc.add(q * (std::log(std::fabs(a.mass)) + w.log_eval(f.grp(), a.elem) / p));
    return std::exp(acc.value() / q);
}

double log_weighted_l1(const walk_powers& wp, const weight& w, double p) {
    log_sum_exp acc;
    if (wp.radial() && w.length_based()) {
        wp.for_each_sphere([&](long r, double m, double) { acc.add(std::log(m) + w.log_eval_length(r) / p); });
    } else {
        const group& g = wp.grp();
        wp.for_each_atom([&](const element& e, double m) { acc.add(std::log(m) + w.log_eval(g, e) / p); });
    }
    return acc.value();
}

double log_weighted_lq(const walk_powers& wp, double q, const weight& w, double p) {
    if (!(q >= 1.0)) throw domain_error("weighted lq norm needs q >= 1");
    log_sum_exp acc;
    if (wp.radial() && w.length_based()) {
        wp.for_each_sphere([&](long r, double m, double ls) {
            acc.add(ls + q * (std::log(m) - ls + w.log_eval_length(r) / p));
        });
    } else {
        const group& g = wp.grp();
        wp.for_each_atom([&](const element& e, double m) { acc.add(q * (std::log(m) + w.log_eval(g, e) / p)); });
    }
    return acc.value() / q;
}

double log_weight_moment(const walk_powers& wp, const weight& w) {
    if (w.is_constant()) return w.log_lower_bound();
    kahan_sum k;
    if (wp.radial() && w.length_based()) {
        wp.for_each_sphere([&](long r, double m, double) {
            double lw = w.log_eval_length(r);
            if (std::isinf(lw))
                throw domain_error("weight " + w.spec() + " is infinite at an element of length " + std::to_string(r));
            k.add(m * lw);
        });
    } else {
        const group& g = wp.grp();
        wp.for_each_atom([&](const element& e, double m) {
            double lw = w.log_eval(g, e);
            if (std::isinf(lw)) throw domain_error("weight " + w.spec() + " is infinite at " + g.format(e));
            k.add(m * lw);
        });
    }
    return k.value();
}

double log_weight_moment(const sparse_measure& mu, const weight& w) {
    kahan_sum k;
    for (const auto& a : mu.atoms()) {
        double lw = w.log_eval(mu.grp(), a.elem);
        if (std::isinf(lw)) throw domain_error("weight " + w.spec() + " is infinite at " + mu.grp().format(a.elem));
        k.add(a.mass * lw);
    }
    return k.value();
}

double weighted_shannon_entropy(const sparse_measure& mu, const weight& w) {
    return shannon_entropy(mu) - log_weight_moment(mu, w);
}

// ---------------------------------------------------------------- growth

growth_report growth_rate(const weight& w, const group& g, int r_max) {
    if (r_max < 1) throw config_error("growth rate needs r_max >= 1");
    growth_report rep;
    double best = -pos_inf;
    for (long r = 0; r <= r_max; ++r) {
        if (w.length_based()) {
            best = std::max(best, w.log_eval_length(r));
        } else {
            for (const auto& s : g.sphere(r)) best = std::max(best, w.log_eval(g, s));
        }
        if (r >= 1) rep.samples.push(static_cast<double>(r), std::exp(best / static_cast<double>(r)));
    }
    if (auto c = w.log_growth_closed_form()) {
        rep.estimate = std::exp(*c);
        rep.method = "closed-form";
    } else {
        rep.estimate = rep.samples.min_value();
        rep.method = "sample-inf";
    }
    return rep;
}

// ---------------------------------------------------------------- inverse series

namespace {

series_info make_series(int N, double exponent) {
    series_info s;
    s.terms = N;
    s.exponent = exponent;
    s.partial_sum = zeta_partial(N, exponent);
    if (exponent == 3.0)
        s.tail_bound = std::max(0.0, zeta3() - s.partial_sum);
    else
        s.tail_bound = std::pow(static_cast<double>(N), 1.0 - exponent) / (exponent - 1.0);
    return s;
}

}  // namespace

weight build_inverse_series_weight(const sparse_measure& mu, int N, double exponent, power_policy policy,
                                   const conv_limits& lim) {
    if (N < 1) throw config_error("inverse series needs N >= 1");
    if (!(exponent > 2.0)) throw config_error("inverse series exponent must exceed 2");
    walk_powers wp(mu, policy, lim);
    series_info info = make_series(N, exponent);
    double log_lower = -std::log(info.partial_sum);
    std::string label = "invseries:N=" + std::to_string(N);
    if (wp.path() == power_path::radial) {
        std::vector<log_sum_exp> acc;
        for (int m = 1; m <= N; ++m) {
            wp.advance();
            double shift = exponent * std::log(static_cast<double>(m));
            wp.for_each_sphere([&](long r, double mass, double ls) {
                if (static_cast<long>(acc.size()) <= r) acc.resize(r + 1);
                acc[r].add(std::log(mass) - ls - shift);
            });
        }
        std::vector<double> logw(acc.size());
        for (size_t r = 0; r < acc.size(); ++r) logw[r] = -acc[r].value();
        auto w = weight::radial_table(std::move(logw), log_lower, label);
        w.set_series(info);
        return w;
    }
    std::unordered_map<element, log_sum_exp, element_hash> acc;
    for (int m = 1; m <= N; ++m) {
        wp.advance();
        double shift = exponent * std::log(static_cast<double>(m));
        wp.for_each_atom([&](const element& e, double mass) { acc[e].add(std::log(mass) - shift); });
    }
    std::unordered_map<element, double, element_hash> logw;
    logw.reserve(acc.size());
    for (auto& [e, v] : acc) logw.emplace(e, -v.value());
    auto w = weight::element_table(std::move(logw), pos_inf, label);
    w.set_series(info);
    return w;
}

domination_report verify_convolution_domination(const sparse_measure& mu, int N, power_policy policy,
                                                const conv_limits& lim) {
    if (N < 1) throw config_error("domination check needs N >= 1");
    const double e3 = 3.0;
    std::vector<double> wj(2 * N + 1, 0.0);
    for (int m = 1; m <= N; ++m)
        for (int n = 1; n <= N; ++n) wj[m + n] += std::pow(static_cast<double>(m) * n, -e3);
    domination_report rep;
    rep.terms = N;
    rep.bound = 8.0 * zeta3();
    rep.truncated_bound = 8.0 * zeta_partial(N, e3);
    walk_powers wp(mu, policy, lim);
    const group& g = mu.grp();
    if (wp.path() == power_path::radial) {
        // the sphere size cancels in the ratio
        std::vector<double> den, numer;
        for (int j = 1; j <= 2 * N; ++j) {
            wp.advance();
            wp.for_each_sphere([&](long r, double m, double) {
                if (j <= N) {
                    if (static_cast<long>(den.size()) <= r) {
                        den.resize(r + 1, 0.0);
                        numer.resize(r + 1, 0.0);
                    }
                    den[r] += m * std::pow(static_cast<double>(j), -e3);
                }
                if (r < static_cast<long>(numer.size())) numer[r] += m * wj[j];
            });
        }
        for (size_t r = 0; r < den.size(); ++r) {
            if (den[r] <= 0) continue;
            ++rep.support;
            double ratio = numer[r] / den[r];
            if (ratio > rep.max_ratio) {
                rep.max_ratio = ratio;
                rep.argmax = "|s|=" + std::to_string(r);
            }
        }
    } else {
        std::unordered_map<element, std::pair<double, double>, element_hash> acc;
        for (int j = 1; j <= 2 * N; ++j) {
            wp.advance();
            wp.for_each_atom([&](const element& e, double m) {
                if (j <= N) {
                    auto& v = acc[e];
                    v.first += m * std::pow(static_cast<double>(j), -e3);
                    v.second += m * wj[j];
                } else {
                    auto it = acc.find(e);
                    if (it != acc.end()) it->second.second += m * wj[j];
                }
            });
        }
        rep.support = acc.size();
        std::vector<std::pair<element, double>> ratios;
        for (auto& [e, v] : acc) ratios.push_back({e, v.second / v.first});
        std::sort(ratios.begin(), ratios.end());  // deterministic argmax
        for (auto& [e, r] : ratios)
            if (r > rep.max_ratio) {
                rep.max_ratio = r;
                rep.argmax = g.format(e);
            }
    }
    rep.within_bound = rep.max_ratio <= rep.bound;
    return rep;
}

submult_report estimate_submult_constant(const weight& w, const group& g, long pairs, uint64_t seed, int radius) {
    submult_report rep;
    rep.log_min = pos_inf;
    std::mt19937_64 rng(stream_seed(seed, 0));
    std::uniform_int_distribution<size_t> pick(0, g.generators().size() - 1);
    std::uniform_int_distribution<int> len(0, std::max(0, radius));
    auto draw = [&] {
        element x = g.identity();
        int l = len(rng);
        for (int i = 0; i < l; ++i) g.right_multiply(x, g.generators()[pick(rng)]);
        return x;
    };
    double worst = -pos_inf;
    for (long i = 0; i < pairs; ++i) {
        element s = draw(), t = draw();
        double ls = w.log_eval(g, s), lt = w.log_eval(g, t), lst = w.log_eval(g, g.multiply(s, t));
        if (std::isinf(ls) || std::isinf(lt) || std::isinf(lst)) {
            ++rep.skipped;
            continue;
        }
        ++rep.pairs;
        worst = std::max(worst, lst - ls - lt);
        rep.log_min = std::min({rep.log_min, ls, lt, lst});
    }
    rep.constant = rep.pairs ? std::exp(worst) : 0.0;
    return rep;
}

}  // namespace rwlab
