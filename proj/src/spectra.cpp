#include "rwlab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rwlab/errors.hpp"
#include "rwlab/numeric.hpp"

namespace rwlab {

namespace {

constexpr double pi = 3.14159265358979323846;
constexpr double pos_inf = std::numeric_limits<double>::infinity();

bool same_as_srw(const sparse_measure& mu) {
    auto s = sparse_measure::srw(mu.grp());
    if (s.size() != mu.size()) return false;
    for (size_t i = 0; i < s.size(); ++i)
        if (s.atoms()[i].elem != mu.atoms()[i].elem || std::fabs(s.atoms()[i].mass - mu.atoms()[i].mass) > 1e-15)
            return false;
    return true;
}

bool submultiplicative_by_kind(const weight& w) {
    return w.length_based() && w.kind() != weight_kind::table && w.kind() != weight_kind::inverse_series;
}

// trapezoid rule on the torus, exact while n*R < M
std::vector<double> fourier_returns(const sparse_measure& mu, int n_max) {
    const int d = mu.grp().rank();
    long R = 0;
    for (const auto& a : mu.atoms())
        for (int32_t x : a.elem) R = std::max<long>(R, std::labs(x));
    const long M = static_cast<long>(n_max) * std::max<long>(R, 1) + 1;
    double points = std::pow(static_cast<double>(M), d);
    if (points > 2.0e8) throw resource_error("fourier grid of " + std::to_string(points) + " points exceeds cap");
    std::vector<double> ctab(M);
    for (long t = 0; t < M; ++t) ctab[t] = std::cos(2.0 * pi * static_cast<double>(t) / static_cast<double>(M));
    std::vector<double> acc(n_max + 1, 0.0);
    std::vector<long> idx(d, 0);
    const auto& atoms = mu.atoms();
    const long total = static_cast<long>(points);
    for (long c = 0; c < total; ++c) {
        double phi = 0;
        for (const auto& a : atoms) {
            long long t = 0;
            for (int i = 0; i < d; ++i) t += static_cast<long long>(a.elem[i]) * idx[i];
            t %= M;
            if (t < 0) t += M;
            phi += a.mass * ctab[t];
        }
        double mag = std::fabs(phi);
        acc[0] += 1.0;
        if (mag > 1e-300) {
            int kmax = n_max;
            if (mag < 1.0) kmax = static_cast<int>(std::min<double>(n_max, std::floor(40.0 / -std::log(mag))));
            double v = 1.0;
            for (int k = 1; k <= kmax; ++k) {
                v *= phi;
                acc[k] += v;
            }
        }
        for (int i = d - 1; i >= 0; --i) {
            if (++idx[i] < M) break;
            idx[i] = 0;
        }
    }
    for (double& v : acc) v /= points;
    return acc;
}

// switch-walk-switch walk on Z_2 wr Z: P(return) = E[1{S_n=0} 2^{-|range|}], summed by parts over
// intervals into traces of the killed walk
double lamplighter_log_return(int n, const std::vector<std::vector<double>>& logcos, int Lmax) {
    log_sum_exp acc;
    const double l2 = std::log(2.0);
    for (int L = 1; L <= Lmax; ++L)
        for (double lc : logcos[L]) acc.add(-L * l2 + n * lc);
    return acc.value() - 2.0 * l2;
}

}  // namespace

std::vector<asymptotic_sequence> power_norm_sequences(const sparse_measure& mu, const std::vector<norm_request>& reqs,
                                                      const spectra_config& cfg, std::string* path_used) {
    if (cfg.n_max < 1) throw config_error("n_max must be >= 1");
    walk_powers wp(mu, cfg.policy, cfg.limits);
    if (path_used) *path_used = path_name(wp.path());
    std::vector<asymptotic_sequence> out;
    for (size_t i = 0; i < reqs.size(); ++i) out.emplace_back("log_norm", index_kind::step);
    for (int n = 1; n <= cfg.n_max; ++n) {
        wp.advance();
        for (size_t i = 0; i < reqs.size(); ++i) {
            const auto& r = reqs[i];
            double v = r.q == 1.0 ? log_weighted_l1(wp, r.w, r.p) : log_weighted_lq(wp, r.q, r.w, r.p);
            out[i].push(n, v);
        }
    }
    return out;
}

radius_estimate estimate_from_log_terms(const asymptotic_sequence& logs, const spectra_config& cfg) {
    radius_estimate est;
    for (size_t i = 0; i < logs.size(); ++i) {
        const auto& t = logs[i];
        if (std::isinf(t.value)) continue;
        est.root.push(t.index, std::exp(t.value / t.index));
        if (i > 0 && !std::isinf(logs[i - 1].value))
            est.ratio.push(t.index, std::exp((t.value - logs[i - 1].value) / (t.index - logs[i - 1].index)));
    }
    if (est.root.empty()) throw domain_error("no finite terms to estimate a radius from");
    est.n_used = static_cast<int>(est.root.back().index);
    if (est.ratio.size() >= cfg.cauchy_terms && est.ratio.cauchy_tail(cfg.cauchy_terms, cfg.cauchy_tol)) {
        est.value = est.ratio.back().value;
        est.method = "ratio";
    } else {
        est.value = est.root.back().value;
        est.method = "root";
    }
    est.diagnostics.push_back({"root_last", est.root.back().value});
    if (!est.ratio.empty()) est.diagnostics.push_back({"ratio_last", est.ratio.back().value});
    est.diagnostics.push_back({"ratio_cauchy", est.method == "ratio" ? 1.0 : 0.0});
    return est;
}

radius_estimate radius_l1_weighted(const sparse_measure& mu, const weight& w, double p, const spectra_config& cfg) {
    if (!(p >= 1.0)) throw config_error("weight exponent p must be >= 1");
    if (w.is_constant()) {
        // ||mu^{*n}||_{1,c^{1/p}} = c^{1/p} for every n
        radius_estimate est;
        double lc = w.log_lower_bound() / p;
        for (int n = 1; n <= cfg.n_max; ++n) {
            est.root.push(n, std::exp(lc / n));
            est.ratio.push(n, 1.0);
        }
        est.value = est.lower = est.upper = 1.0;
        est.method = "constant-weight";
        est.path = "closed-form";
        est.n_used = cfg.n_max;
        return est;
    }
    std::string path;
    auto seqs = power_norm_sequences(mu, {{1.0, w, p}}, cfg, &path);
    auto est = estimate_from_log_terms(seqs[0], cfg);
    est.path = path;
    est.lower = w.at_least_one() ? 1.0 : 0.0;
    est.upper = submultiplicative_by_kind(w) ? est.root.min_value() : pos_inf;
    if (est.value < est.lower || est.value > est.upper) {
        est.diagnostics.push_back({"clamped_from", est.value});
        est.value = std::clamp(est.value, est.lower, est.upper);
    }
    return est;
}

asymptotic_sequence log_return_probabilities(const sparse_measure& mu, const spectra_config& cfg,
                                             std::string* path_used) {
    const group& g = mu.grp();
    const int n_max = cfg.n_max;
    asymptotic_sequence out("log_return", index_kind::step);
    auto emit = [&](int n, double lp) {
        if (!std::isinf(lp)) out.push(n, lp);
    };
    bool automatic = cfg.policy == power_policy::automatic;
    if (automatic && g.fam() == family::abelian && g.rank() == 2 && mu.is_symmetric()) {
        if (path_used) *path_used = "fourier";
        auto p = fourier_returns(mu, n_max);
        for (int n = 2; n <= n_max; n += 2) emit(n, p[n] > 0 ? std::log(p[n]) : -pos_inf);
        return out;
    }
    if (automatic && g.fam() == family::lamplighter && g.rank() == 1 && same_as_srw(mu)) {
        if (path_used) *path_used = "range-trace";
        const int Lmax = 256;
        std::vector<std::vector<double>> logcos(Lmax + 1);
        for (int L = 1; L <= Lmax; ++L)
            for (int k = 1; k <= L; ++k) {
                double c = std::fabs(std::cos(k * pi / (L + 1)));
                logcos[L].push_back(c > 0 ? std::log(c) : -pos_inf);
            }
        for (int n = 2; n <= n_max; n += 2) emit(n, lamplighter_log_return(n, logcos, Lmax));
        return out;
    }
    walk_powers wp(mu, cfg.policy, cfg.limits);
    if (path_used) *path_used = path_name(wp.path());
    for (int n = 1; n <= n_max; ++n) {
        wp.advance();
        if (n % 2 == 0) {
            double m = wp.identity_mass();
            emit(n, m > 0 ? std::log(m) : -pos_inf);
        }
    }
    return out;
}

radius_estimate radius_pf2_symmetric(const sparse_measure& mu, const spectra_config& cfg) {
    if (!mu.is_symmetric(1e-12)) throw domain_error("pf2 return-probability radius needs a symmetric measure");
    if (cfg.n_max < 2) throw config_error("pf2 radius needs n_max >= 2");
    std::string path;
    auto logs = log_return_probabilities(mu, cfg, &path);
    auto est = estimate_from_log_terms(logs, cfg);
    est.path = path;
    est.method = "return-prob:" + est.method;
    // every root and ratio term is a lower bound for a self-adjoint contraction
    est.lower = std::max(est.root.max_value(), est.ratio.empty() ? 0.0 : est.ratio.max_value());
    est.upper = 1.0;
    est.value = std::clamp(std::max(est.value, est.lower), est.lower, est.upper);
    return est;
}

radius_estimate radius_pfq_lower(const sparse_measure& mu, double q, const spectra_config& cfg) {
    if (!(q > 1.0)) throw domain_error("pfq radius needs q > 1");
    radius_estimate est;
    if (mu.is_dirac_identity()) {
        for (int n = 1; n <= cfg.n_max; ++n) {
            est.root.push(n, 1.0);
            est.ratio.push(n, 1.0);
        }
        est.value = est.lower = est.upper = 1.0;
        est.method = "lq-lower";
        est.path = "closed-form";
        est.n_used = cfg.n_max;
        return est;
    }
    std::string path;
    auto seqs = power_norm_sequences(mu, {{q, weight::constant(1.0), 1.0}}, cfg, &path);
    est = estimate_from_log_terms(seqs[0], cfg);
    est.path = path;
    est.diagnostics.push_back({"headline_" + est.method, 1.0});
    est.method = "lq-lower";
    est.value = std::min(est.value, 1.0);
    est.lower = est.value;
    est.upper = 1.0;
    return est;
}

radius_estimate radius_pfq_upper_rd(const sparse_measure& mu, double q, double d, const spectra_config& cfg) {
    if (!(q > 1.0)) throw domain_error("pfq radius needs q > 1");
    if (!mu.grp().rd_capable())
        throw domain_error("rd upper bound is unavailable on the " + std::string(family_name(mu.grp().fam())) +
                           " family");
    if (!(d >= 0)) throw config_error("rd degree must be >= 0");
    radius_estimate est;
    if (mu.is_dirac_identity()) {
        for (int n = 1; n <= cfg.n_max; ++n) {
            est.root.push(n, 1.0);
            est.ratio.push(n, 1.0);
        }
        est.value = est.lower = est.upper = 1.0;
        est.method = "rd-upper";
        est.path = "closed-form";
        est.n_used = cfg.n_max;
        return est;
    }
    double p = q / (q - 1.0);
    std::string path;
    auto seqs = power_norm_sequences(mu, {{q, weight::polynomial(d), p}, {q, weight::constant(1.0), 1.0}}, cfg, &path);
    est = estimate_from_log_terms(seqs[0], cfg);
    auto low = estimate_from_log_terms(seqs[1], cfg);
    est.path = path;
    est.diagnostics.push_back({"headline_" + est.method, 1.0});
    est.method = "rd-upper";
    est.value = std::min(est.value, 1.0);
    est.upper = est.value;
    est.lower = std::min(low.value, est.value);
    est.diagnostics.push_back({"lower_estimate", low.value});
    est.diagnostics.push_back({"gap", est.value - low.value});
    return est;
}

std::optional<folner_bound> folner_lower(const sparse_measure& mu, long side) {
    if (side < 1) throw config_error("box side must be >= 1");
    const group& g = mu.grp();
    if (g.fam() == family::cyclic) return folner_bound{1.0, g.order()};  // constants on a finite group
    int d = 0;
    if (g.fam() == family::abelian || g.fam() == family::lamplighter)
        d = g.rank();
    else if (g.fam() == family::free && g.rank() == 1)
        d = 1;
    else
        return std::nullopt;
    double hold = 0;
    std::vector<double> plus(d, 0.0), minus(d, 0.0);
    for (const auto& a : mu.atoms()) {
        std::vector<int32_t> c(d, 0);
        if (g.fam() == family::lamplighter) {
            c = g.cursor(a.elem);
            // toggled lamps must sit at the old or the new cursor position
            for (size_t i = d; i < a.elem.size(); i += d) {
                bool at_zero = true, at_c = true;
                for (int j = 0; j < d; ++j) {
                    at_zero &= a.elem[i + j] == 0;
                    at_c &= a.elem[i + j] == c[j];
                }
                if (!at_zero && !at_c) return std::nullopt;
            }
        } else if (g.fam() == family::free) {
            c[0] = static_cast<int32_t>(a.elem.size()) * (a.elem.empty() ? 0 : (a.elem[0] > 0 ? 1 : -1));
        } else {
            c = a.elem;
        }
        int nz = -1, count = 0;
        for (int j = 0; j < d; ++j)
            if (c[j] != 0) {
                nz = j;
                ++count;
            }
        if (count == 0) {
            hold += a.mass;
        } else if (count == 1 && std::abs(c[nz]) == 1) {
            (c[nz] > 0 ? plus : minus)[nz] += a.mass;
        } else {
            return std::nullopt;
        }
    }
    double lam = hold;
    double cs = std::cos(pi / static_cast<double>(side + 1));
    for (int j = 0; j < d; ++j) {
        if (std::fabs(plus[j] - minus[j]) > 1e-12) return std::nullopt;
        lam += (plus[j] + minus[j]) * cs;
    }
    return folner_bound{lam, side};
}

}  // namespace rwlab
