#include "rwlab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rwlab/errors.hpp"
#include "rwlab/numeric.hpp"

namespace rwlab {

namespace {

using nlohmann::json;

json fit_json(const linear_fit& f) {
    return {{"c0", f.c0}, {"c1", f.c1}, {"c2", f.c2}, {"residual", f.residual}, {"points", f.points}};
}

json grid_json(const std::vector<double>& g) { return json(g); }

// limit of a(n) - a(n-1) for cumulative a, via the quadratic 1/n fit once three terms exist
double difference_limit(const asymptotic_sequence& cumulative, double fraction) {
    asymptotic_sequence d("difference");
    double prev = 0;
    for (const auto& t : cumulative.terms()) {
        d.push(t.index, t.value - prev);
        prev = t.value;
    }
    return d.size() >= 3 ? d.fit_inverse_quadratic(fraction).c0 : d.back().value;
}

void check_grid(const std::vector<double>& grid, bool allow_one = false) {
    if (grid.size() < 2) throw config_error("p grid needs at least two points");
    for (size_t i = 0; i < grid.size(); ++i) {
        if (allow_one ? !(grid[i] >= 1.0) : !(grid[i] > 1.0))
            throw config_error(allow_one ? "p grid values must be >= 1" : "p grid values must exceed 1");
        if (i && !(grid[i] > grid[i - 1])) throw config_error("p grid must increase strictly");
    }
}

// -sum m log(m w) in one pass, independent of the H - sum m log w route
double weighted_entropy_direct(const walk_powers& wp, const weight& w) {
    kahan_sum k;
    if (wp.radial() && w.length_based()) {
        wp.for_each_sphere([&](long r, double m, double ls) { k.add(-m * (std::log(m) - ls + w.log_eval_length(r))); });
    } else {
        const group& g = wp.grp();
        wp.for_each_atom([&](const element& e, double m) { k.add(-m * (std::log(m) + w.log_eval(g, e))); });
    }
    return k.value();
}

// one estimator kind across a grid: the ratio estimator only when every sequence passed its Cauchy test
std::vector<double> uniform_values(const std::vector<radius_estimate>& ests, std::string& kind) {
    bool all_ratio = std::all_of(ests.begin(), ests.end(), [](const radius_estimate& e) { return e.method == "ratio"; });
    kind = all_ratio ? "ratio" : "root";
    std::vector<double> out;
    for (const auto& e : ests) out.push_back(all_ratio ? e.value : e.root.back().value);
    return out;
}

json tolerances(const estimator_config& cfg) {
    return {{"monotone_slack", cfg.monotone_slack},
            {"mc_flag_tol", cfg.mc_flag_tol},
            {"identity_tol", cfg.identity_tol},
            {"cauchy_terms", cfg.cauchy_terms},
            {"cauchy_tol", cfg.cauchy_tol},
            {"fit_fraction", cfg.fit_fraction}};
}

json base_params(const sparse_measure& mu, const estimator_config& cfg) {
    return {{"group", mu.grp().spec()}, {"atoms", mu.size()}, {"n_max", cfg.n_max}, {"tolerances", tolerances(cfg)}};
}

}  // namespace

const asymptotic_sequence& estimate_report::sequence(const std::string& name) const {
    for (const auto& s : sequences)
        if (s.name() == name) return s;
    throw domain_error("report '" + quantity + "' has no sequence '" + name + "'");
}

bool estimate_report::flagged(const std::string& f) const {
    return std::find(flags.begin(), flags.end(), f) != flags.end();
}

spectra_config estimator_config::spectra() const {
    spectra_config s;
    s.n_max = n_max;
    s.policy = policy;
    s.limits = limits;
    s.cauchy_terms = cauchy_terms;
    s.cauchy_tol = cauchy_tol;
    return s;
}

// ---------------------------------------------------------------- entropy

estimate_report avez_entropy(const sparse_measure& mu, const estimator_config& cfg, const mc_config& mc) {
    if (cfg.n_max < 1) throw config_error("n_max must be >= 1");
    estimate_report rep;
    rep.quantity = "avez_entropy";
    rep.params = base_params(mu, cfg);
    walk_powers wp(mu, cfg.policy, cfg.limits);
    asymptotic_sequence diff("difference"), H("entropy"), quot("quotient");
    double prev = 0;
    for (int n = 1; n <= cfg.n_max; ++n) {
        wp.advance();
        double h = wp.entropy();
        H.push(n, h);
        quot.push(n, h / n);
        diff.push(n, h - prev);
        prev = h;
    }
    rep.params["path"] = path_name(wp.path());
    rep.upper = quot.min_value();
    rep.lower = 0.0;
    rep.method = "last-difference";
    rep.estimate = diff.back().value;
    rep.diagnostics["last_difference"] = diff.back().value;
    if (diff.size() >= 3) {
        // differences behave like h + a/n + b/n^2
        auto fit = diff.fit_inverse_quadratic(cfg.fit_fraction);
        rep.estimate = fit.c0;
        rep.method = "difference-fit";
        rep.diagnostics["fit"] = fit_json(fit);
    }
    if (mu.is_dirac_identity()) rep.estimate = 0.0;
    if (rep.estimate > *rep.upper) {
        rep.flags.push_back("clamped_to_fekete");
        rep.estimate = *rep.upper;
    }
    if (rep.estimate < 0) rep.estimate = 0;
    if (*rep.upper > 0 && (*rep.upper - rep.estimate) > cfg.mc_flag_tol * *rep.upper) rep.flags.push_back("fekete_gap");
    rep.diagnostics["fekete_upper"] = *rep.upper;
    if (mc.enabled) {
        rep.seed = mc.seed;
        json m = {{"n", mc.n}, {"paths", mc.paths}, {"seed", mc.seed}};
        try {
            walk_powers w2(mu, cfg.policy, cfg.limits);
            w2.advance_to(static_cast<int>(mc.n));
            auto st = sample_paths(mu, mc.n, mc.paths, mc.seed, [&](const element& x) { return w2.log_mass_at(x); },
                                   mc.threads);
            m["kv_entropy"] = st.kv_entropy;
            m["kv_stderr"] = st.kv_stderr;
            if (st.has_speed) {
                m["speed"] = st.speed;
                m["speed_stderr"] = st.speed_stderr;
            }
            m["return_fraction"] = st.return_fraction;
            double scale = std::max(std::fabs(rep.estimate), 1e-12);
            bool agree = std::fabs(st.kv_entropy - rep.estimate) <= cfg.mc_flag_tol * scale;
            m["agrees"] = agree;
            if (!agree) rep.flags.push_back("mc_disagreement");
            rep.method += "+monte-carlo-check";
        } catch (const resource_error& e) {
            m["unavailable"] = e.what();
        }
        rep.diagnostics["monte_carlo"] = m;
    }
    rep.sequences = {diff, quot, H};
    return rep;
}

// ---------------------------------------------------------------- lyapunov

estimate_report lyapunov_direct(const sparse_measure& mu, const weight& w, const estimator_config& cfg) {
    if (cfg.n_max < 1) throw config_error("n_max must be >= 1");
    estimate_report rep;
    rep.quantity = "lyapunov_direct";
    rep.params = base_params(mu, cfg);
    rep.params["weight"] = w.spec();
    asymptotic_sequence per_n("per_n"), sums("sum"), diff("difference");
    if (w.is_constant()) {
        double lc = w.log_lower_bound();
        for (int n = 1; n <= cfg.n_max; ++n) {
            per_n.push(n, lc / n);
            sums.push(n, lc);
            diff.push(n, n == 1 ? lc : 0.0);
        }
        rep.estimate = 0.0;
        rep.lower = rep.upper = 0.0;
        rep.method = "constant-weight";
        rep.sequences = {per_n, sums, diff};
        return rep;
    }
    walk_powers wp(mu, cfg.policy, cfg.limits);
    double prev = 0;
    for (int n = 1; n <= cfg.n_max; ++n) {
        wp.advance();
        double s = log_weight_moment(wp, w);
        sums.push(n, s);
        per_n.push(n, s / n);
        diff.push(n, s - prev);
        prev = s;
    }
    rep.params["path"] = path_name(wp.path());
    rep.estimate = diff.back().value;
    rep.method = "last-difference";
    if (w.at_least_one()) {
        rep.lower = 0.0;
        if (rep.estimate < -cfg.identity_tol) rep.flags.push_back("negative");
        rep.estimate = std::max(rep.estimate, 0.0);
    }
    bool submult = w.length_based() && w.kind() != weight_kind::table && w.kind() != weight_kind::inverse_series;
    if (submult) {
        rep.upper = per_n.min_value();
        if (rep.estimate > *rep.upper) {
            rep.flags.push_back("clamped_to_fekete");
            rep.estimate = *rep.upper;
        }
    }
    // tail trend over the last decade of n
    size_t tail = std::max<size_t>(2, per_n.size() / 10);
    asymptotic_sequence last("tail");
    for (size_t i = per_n.size() - std::min(tail, per_n.size()); i < per_n.size(); ++i) last.push(per_n[i].index, per_n[i].value);
    rep.diagnostics["tail_non_increasing"] = last.non_increasing(cfg.monotone_slack);
    rep.diagnostics["per_n_last"] = per_n.back().value;
    rep.sequences = {per_n, sums, diff};
    return rep;
}

estimate_report lyapunov_via_radius(const sparse_measure& mu, const weight& w, const estimator_config& cfg) {
    check_grid(cfg.p_grid, true);
    estimate_report rep;
    rep.quantity = "lyapunov_via_radius";
    rep.params = base_params(mu, cfg);
    rep.params["weight"] = w.spec();
    rep.params["p_grid"] = grid_json(cfg.p_grid);
    asymptotic_sequence vals("p_log_radius", index_kind::exponent);
    if (w.is_constant()) {
        for (double p : cfg.p_grid) vals.push(p, 0.0);
        rep.estimate = 0.0;
        rep.lower = rep.upper = 0.0;
        rep.method = "constant-weight";
        rep.sequences = {vals};
        return rep;
    }
    std::vector<norm_request> reqs;
    for (double p : cfg.p_grid) reqs.push_back({1.0, w, p});
    std::string path;
    auto seqs = power_norm_sequences(mu, reqs, cfg.spectra(), &path);
    rep.params["path"] = path;
    json per_p = json::array();
    std::vector<radius_estimate> ests;
    for (const auto& sq : seqs) ests.push_back(estimate_from_log_terms(sq, cfg.spectra()));
    std::string kind;
    auto radii = uniform_values(ests, kind);
    for (size_t i = 0; i < cfg.p_grid.size(); ++i) {
        double p = cfg.p_grid[i];
        double r = radii[i];
        if (w.at_least_one()) r = std::max(r, 1.0);
        vals.push(p, p * std::log(r));
        per_p.push_back({{"p", p}, {"radius", r}, {"ratio", ests[i].ratio.empty() ? r : ests[i].ratio.back().value},
                         {"root", ests[i].root.back().value}});
    }
    auto fit = vals.fit_inverse_index(cfg.fit_fraction);
    rep.estimate = fit.c0;
    rep.method = kind + " radius, 1/p fit";
    rep.upper = vals.min_value();
    if (w.at_least_one()) rep.lower = 0.0;
    if (rep.estimate > *rep.upper) {
        rep.flags.push_back("clamped_to_min");
        rep.estimate = *rep.upper;
    }
    if (rep.lower && rep.estimate < *rep.lower) rep.estimate = *rep.lower;
    bool mono = vals.non_increasing(cfg.monotone_slack);
    if (!mono) rep.flags.push_back("non_monotone");
    rep.diagnostics["fit"] = fit_json(fit);
    rep.diagnostics["monotone"] = mono;
    rep.diagnostics["per_p"] = per_p;
    rep.sequences = {vals};
    return rep;
}

// ---------------------------------------------------------------- weighted entropies

estimate_report weighted_shannon_limit(const sparse_measure& mu, const weight& w, const estimator_config& cfg) {
    check_grid(cfg.p_grid);
    estimate_report rep;
    rep.quantity = "weighted_shannon_limit";
    rep.params = base_params(mu, cfg);
    rep.params.erase("n_max");
    rep.params["weight"] = w.spec();
    rep.params["p_grid"] = grid_json(cfg.p_grid);
    double closed = shannon_entropy(mu) - log_weight_moment(mu, w);
    asymptotic_sequence vals("neg_p_log_norm", index_kind::exponent);
    for (double p : cfg.p_grid) {
        double q = p / (p - 1.0);
        log_sum_exp acc;
        for (const auto& a : mu.atoms()) acc.add(q * (std::log(a.mass) + w.log_eval(mu.grp(), a.elem) / p));
        vals.push(p, -p * acc.value() / q);
    }
    auto fit = vals.fit_inverse_index(cfg.fit_fraction);
    rep.estimate = fit.c0;
    rep.method = "1/p fit";
    rep.lower = vals.max_value();
    if (rep.estimate < *rep.lower) {
        rep.flags.push_back("clamped_to_max");
        rep.estimate = *rep.lower;
    }
    bool mono = vals.non_decreasing(cfg.monotone_slack);
    if (!mono) rep.flags.push_back("non_monotone");
    rep.diagnostics["closed_form"] = closed;
    rep.diagnostics["error"] = std::fabs(rep.estimate - closed);
    rep.diagnostics["fit"] = fit_json(fit);
    rep.diagnostics["monotone"] = mono;
    rep.sequences = {vals};
    return rep;
}

estimate_report weighted_avez_entropy(const sparse_measure& mu, const weight& w, const estimator_config& cfg) {
    if (cfg.n_max < 1) throw config_error("n_max must be >= 1");
    estimate_report rep;
    rep.quantity = "weighted_avez_entropy";
    rep.params = base_params(mu, cfg);
    rep.params["weight"] = w.spec();
    walk_powers wp(mu, cfg.policy, cfg.limits);
    asymptotic_sequence direct("direct_per_n"), route("difference_per_n"), Hw("weighted_entropy"), H("entropy"),
        S("log_moment");
    double worst = 0;
    for (int n = 1; n <= cfg.n_max; ++n) {
        wp.advance();
        double h = wp.entropy();
        double s = log_weight_moment(wp, w);
        double d = weighted_entropy_direct(wp, w);
        worst = std::max(worst, std::fabs(d - (h - s)) / std::max(1.0, std::fabs(h)));
        direct.push(n, d / n);
        route.push(n, (h - s) / n);
        Hw.push(n, d);
        H.push(n, h);
        S.push(n, s);
    }
    rep.params["path"] = path_name(wp.path());
    double h_est = difference_limit(H, cfg.fit_fraction);
    double ly_est = difference_limit(S, cfg.fit_fraction);
    rep.estimate = difference_limit(Hw, cfg.fit_fraction);
    if (w.is_constant()) rep.estimate = h_est;
    rep.method = "difference-fit";
    rep.diagnostics["identity_max_error"] = worst;
    rep.diagnostics["identity_holds"] = worst <= cfg.identity_tol;
    if (worst > cfg.identity_tol) rep.flags.push_back("identity_violation");
    rep.diagnostics["h_estimate"] = h_est;
    rep.diagnostics["lyapunov_estimate"] = ly_est;
    rep.diagnostics["h_minus_lyapunov"] = h_est - ly_est;
    rep.sequences = {direct, route, Hw, H, S};
    return rep;
}

// ---------------------------------------------------------------- convolution entropy

estimate_report convolution_entropy(const sparse_measure& mu, const estimator_config& cfg,
                                    const conv_entropy_config& cc) {
    check_grid(cfg.p_grid);
    estimate_report rep;
    rep.quantity = "convolution_entropy";
    rep.params = base_params(mu, cfg);
    rep.params["p_grid"] = grid_json(cfg.p_grid);
    rep.params["rd_degree"] = cc.rd_degree;
    rep.params["box_side_scale"] = cc.box_side_scale;
    asymptotic_sequence upper_vals("upper_value", index_kind::exponent), lower_vals("lower_value", index_kind::exponent);
    const bool rd = mu.grp().rd_capable();
    if (mu.is_dirac_identity()) {
        for (double p : cfg.p_grid) {
            upper_vals.push(p, 0.0);
            lower_vals.push(p, 0.0);
        }
        rep.estimate = 0;
        rep.lower = rep.upper = 0.0;
        rep.method = "identity";
        rep.sequences = {upper_vals, lower_vals};
        return rep;
    }
    std::vector<norm_request> reqs;
    for (double p : cfg.p_grid) {
        double q = p / (p - 1.0);
        reqs.push_back({q, weight::constant(1.0), 1.0});
        if (rd) reqs.push_back({q, weight::polynomial(cc.rd_degree), p});
    }
    std::string path;
    auto seqs = power_norm_sequences(mu, reqs, cfg.spectra(), &path);
    rep.params["path"] = path;
    json per_p = json::array();
    std::vector<radius_estimate> lq_est, rd_est;
    for (size_t j = 0; j < seqs.size(); ++j)
        ((rd && j % 2) ? rd_est : lq_est).push_back(estimate_from_log_terms(seqs[j], cfg.spectra()));
    std::string lq_kind, rd_kind;
    auto lq_vals = uniform_values(lq_est, lq_kind);
    std::vector<double> rd_vals = rd ? uniform_values(rd_est, rd_kind) : std::vector<double>{};
    bool used_box = false;
    for (size_t i = 0; i < cfg.p_grid.size(); ++i) {
        double p = cfg.p_grid[i];
        double q = p / (p - 1.0);
        double r_lo = std::min(lq_vals[i], 1.0);
        json line = {{"p", p}, {"q", q}, {"lq_radius", lq_vals[i]}, {"lq_method", lq_kind}};
        long side = std::lround(cc.box_side_scale * std::sqrt(p));
        if (auto fb = folner_lower(mu, side)) {
            line["box_radius"] = fb->lambda;
            line["box_side"] = fb->side;
            if (fb->lambda > r_lo) {
                r_lo = fb->lambda;
                used_box = true;
            }
        }
        double r_hi = 1.0;
        if (rd) {
            r_hi = std::clamp(rd_vals[i], r_lo, 1.0);
            line["rd_radius"] = rd_vals[i];
            line["rd_method"] = rd_kind;
        }
        upper_vals.push(p, -p * std::log(r_lo));
        lower_vals.push(p, -p * std::log(r_hi));
        per_p.push_back(line);
    }
    auto fit = upper_vals.fit_inverse_index(cfg.fit_fraction);
    rep.estimate = std::max(fit.c0, 0.0);
    rep.method = std::string(used_box ? "lq-lower+folner-lower" : "lq-lower") + " radius, 1/p fit";
    rep.lower = std::min(lower_vals.max_value(), rep.estimate);
    bool mono = upper_vals.non_decreasing(cfg.monotone_slack);
    if (!mono) rep.flags.push_back("non_monotone");
    rep.diagnostics["fit"] = fit_json(fit);
    rep.diagnostics["monotone"] = mono;
    rep.diagnostics["per_p"] = per_p;
    if (cc.entropy_reference) {
        bool ok = rep.estimate <= *cc.entropy_reference + cc.le_h_slack;
        rep.diagnostics["entropy_reference"] = *cc.entropy_reference;
        rep.diagnostics["c_le_h"] = ok;
        if (!ok) rep.flags.push_back("exceeds_entropy");
    }
    rep.sequences = {upper_vals, lower_vals};
    return rep;
}

// ---------------------------------------------------------------- inequalities

double volume_growth_estimate(const group& g, std::string* method) {
    switch (g.fam()) {
        case family::free:
            if (method) *method = "closed-form";
            return g.rank() == 1 ? 0.0 : std::log(2.0 * g.rank() - 1.0);
        case family::abelian:
        case family::cyclic:
            if (method) *method = "closed-form";
            return 0.0;
        case family::lamplighter: break;
    }
    // ball sizes are submultiplicative, so the infimum of log|B_r|/r bounds the limit from above
    double best = std::numeric_limits<double>::infinity();
    for (long r = 1; r <= g.limits().length_radius_cap; ++r) {
        try {
            best = std::min(best, std::log(static_cast<double>(g.ball_size(r))) / static_cast<double>(r));
        } catch (const resource_error&) {
            break;
        }
    }
    if (method) *method = "ball-fekete";
    return best;
}

inequality_report fundamental_inequality_report(const sparse_measure& mu, const std::vector<weight>& weights,
                                                const estimator_config& cfg, double tolerance) {
    inequality_report rep;
    rep.tolerance = tolerance;
    rep.entropy = avez_entropy(mu, cfg);
    rep.h = rep.entropy.estimate;
    rep.volume_growth = volume_growth_estimate(mu.grp());
    walk_powers wp(mu, cfg.policy, cfg.limits);
    double prev_speed = 0, speed = 0;
    std::vector<double> prev(weights.size(), 0.0), last(weights.size(), 0.0);
    for (int n = 1; n <= cfg.n_max; ++n) {
        wp.advance();
        double s = wp.speed_term();
        speed = s - prev_speed;
        prev_speed = s;
        for (size_t i = 0; i < weights.size(); ++i) {
            double m = log_weight_moment(wp, weights[i]);
            last[i] = m - prev[i];
            prev[i] = m;
        }
    }
    rep.speed = mu.is_dirac_identity() ? 0.0 : speed;
    double bound = rep.volume_growth * rep.speed;
    rep.slack = bound - rep.h;
    rep.holds = rep.h <= bound + tolerance;
    for (size_t i = 0; i < weights.size(); ++i) {
        inequality_report::weight_line line;
        line.weight = weights[i].spec();
        line.lyapunov = weights[i].is_constant() ? 0.0 : last[i];
        auto gr = weights[i].log_growth_closed_form();
        line.log_growth = gr ? *gr : std::log(growth_rate(weights[i], mu.grp(), 20).estimate);
        line.bound = line.log_growth * rep.speed;
        line.holds = line.lyapunov <= line.bound + tolerance;
        rep.weights.push_back(line);
    }
    return rep;
}

}  // namespace rwlab
