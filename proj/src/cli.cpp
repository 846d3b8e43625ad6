#include "rwlab/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>

#include "rwlab/boundary.hpp"
#include "rwlab/dlvp.hpp"
#include "rwlab/errors.hpp"
#include "rwlab/estimators.hpp"
#include "rwlab/report.hpp"
#include "rwlab/specs.hpp"
#include "rwlab/spectra.hpp"
#include "rwlab/verify.hpp"

namespace rwlab {

using nlohmann::json;

namespace {

struct options {
    std::string group = "free:2";
    std::string measure = "preset:srw";
    std::vector<std::string> weights;
    int n_max = 200;
    std::optional<uint64_t> seed;
    int threads = 1;
    std::string policy = "auto";
    long long support_cap = 5'000'000;
    std::string p_grid;
    std::string format = "json";
    std::string output;
    std::string sequence;
    std::string csv_dir;
    bool no_metadata = false;

    // subcommand specific
    long mc_paths = 0;
    long mc_n = 1000;
    std::string route = "direct";
    std::string limit = "avez";
    double rd_degree = 2.0;
    std::string space = "pf2";
    std::optional<double> q;
    double p = 1.0;
    int k = 2;
    int depth = 3;
    std::string quantity = "furstenberg";
    std::optional<double> boundary_p;
    std::string word;
    std::string f = "log1pL";
    int grid = 50;
    int power = 1;
    std::string emit;
    std::string eps = "0.1,0.01";
    std::string suite = "all";
    std::string input;
};

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            size_t used = 0;
            double v = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw config_error("bad number '" + item + "' in " + what);
        }
    }
    if (out.empty()) throw config_error(what + " is empty");
    return out;
}

struct context {
    group g = group::free(2);
    sparse_measure mu{group::free(2)};
    estimator_config cfg;
};

context make_context(const options& o) {
    context c;
    c.g = parse_group_spec(o.group);
    c.mu = parse_measure_spec(o.measure, c.g);
    if (c.mu.grp() != c.g) c.g = c.mu.grp();
    if (o.support_cap <= 0) throw config_error("support cap must be positive");
    c.cfg.n_max = o.n_max;
    c.cfg.policy = parse_policy(o.policy);
    c.cfg.limits.support_cap = o.support_cap;
    if (!o.p_grid.empty()) c.cfg.p_grid = parse_list(o.p_grid, "p grid");
    return c;
}

void stamp(estimate_report& r, const options& o, const context& c) {
    r.params["group"] = c.g.spec();
    r.params["measure"] = o.measure;
    if (o.seed && !r.seed) r.seed = *o.seed;
}

weight one_weight(const options& o, const sparse_measure& mu) {
    if (o.weights.size() != 1) throw config_error("exactly one --weight is required");
    return parse_weight_spec(o.weights.front(), &mu);
}

estimate_report cmd_entropy(const options& o) {
    auto c = make_context(o);
    mc_config mc;
    if (o.mc_paths > 0) {
        if (!o.seed) throw config_error("--seed is required when Monte Carlo paths are requested");
        mc.enabled = true;
        mc.paths = o.mc_paths;
        mc.n = o.mc_n;
        mc.seed = *o.seed;
        mc.threads = o.threads;
    }
    auto r = avez_entropy(c.mu, c.cfg, mc);
    stamp(r, o, c);
    return r;
}

estimate_report cmd_lyapunov(const options& o) {
    auto c = make_context(o);
    auto w = one_weight(o, c.mu);
    if (o.route == "direct" || o.route == "radius") {
        auto r = o.route == "direct" ? lyapunov_direct(c.mu, w, c.cfg) : lyapunov_via_radius(c.mu, w, c.cfg);
        r.params["weight"] = w.spec();
        stamp(r, o, c);
        return r;
    }
    auto d = lyapunov_direct(c.mu, w, c.cfg);
    auto v = lyapunov_via_radius(c.mu, w, c.cfg);
    for (const auto& s : v.sequences) d.sequences.push_back(s);
    for (const auto& f : v.flags) d.flags.push_back("radius_route:" + f);
    d.diagnostics["radius_route"] = {{"estimate", number_to_json(v.estimate)},
                                     {"upper", v.upper ? number_to_json(*v.upper) : json(nullptr)},
                                     {"diagnostics", v.diagnostics}};
    d.diagnostics["route_gap"] = number_to_json(std::fabs(d.estimate - v.estimate));
    d.method = d.method + "+" + v.method;
    d.params["route"] = "both";
    d.params["weight"] = w.spec();
    stamp(d, o, c);
    return d;
}

estimate_report cmd_weighted(const options& o) {
    auto c = make_context(o);
    auto w = one_weight(o, c.mu);
    auto r = o.limit == "shannon" ? weighted_shannon_limit(c.mu, w, c.cfg) : weighted_avez_entropy(c.mu, w, c.cfg);
    r.params["weight"] = w.spec();
    stamp(r, o, c);
    return r;
}

estimate_report cmd_conv(const options& o) {
    auto c = make_context(o);
    conv_entropy_config cc;
    cc.rd_degree = o.rd_degree;
    cc.entropy_reference = avez_entropy(c.mu, c.cfg).estimate;
    auto r = convolution_entropy(c.mu, c.cfg, cc);
    stamp(r, o, c);
    return r;
}

estimate_report from_radius(const radius_estimate& re, const std::string& space) {
    estimate_report r;
    r.quantity = "spectral_radius";
    r.estimate = re.value;
    r.lower = re.lower;
    r.upper = re.upper;
    r.method = re.method;
    const auto& first = re.method == "ratio" ? re.ratio : re.root;
    const auto& second = re.method == "ratio" ? re.root : re.ratio;
    r.sequences.push_back(first);
    if (!second.empty()) r.sequences.push_back(second);
    r.params["space"] = space;
    r.diagnostics["path"] = re.path;
    r.diagnostics["n_used"] = re.n_used;
    for (const auto& [k, v] : re.diagnostics) r.diagnostics[k] = number_to_json(v);
    return r;
}

estimate_report cmd_radius(const options& o) {
    auto c = make_context(o);
    auto sc = c.cfg.spectra();
    radius_estimate re;
    json extra;
    if (o.space == "l1w") {
        auto w = o.weights.empty() ? weight::constant(1) : one_weight(o, c.mu);
        if (!(o.p >= 1)) throw config_error("--p must be at least 1");
        re = radius_l1_weighted(c.mu, w, o.p, sc);
        extra["weight"] = w.spec();
        extra["p"] = o.p;
    } else if (o.space == "pf2") {
        re = radius_pf2_symmetric(c.mu, sc);
    } else {
        if (!o.q) throw config_error("--q is required for " + o.space);
        if (!(*o.q > 1)) throw config_error("--q must exceed 1");
        extra["q"] = *o.q;
        if (o.space == "pfq-lower") {
            re = radius_pfq_lower(c.mu, *o.q, sc);
        } else {
            re = radius_pfq_upper_rd(c.mu, *o.q, o.rd_degree, sc);
            extra["d"] = o.rd_degree;
        }
    }
    auto r = from_radius(re, o.space);
    r.params["n_max"] = o.n_max;
    for (const auto& [k, v] : extra.items()) r.params[k] = v;
    stamp(r, o, c);
    return r;
}

estimate_report cmd_inequalities(const options& o) {
    auto c = make_context(o);
    std::vector<weight> ws;
    for (const auto& s : o.weights) ws.push_back(parse_weight_spec(s, &c.mu));
    auto fi = fundamental_inequality_report(c.mu, ws, c.cfg);
    estimate_report r = fi.entropy;
    r.quantity = "fundamental_inequality";
    r.estimate = fi.slack;
    r.lower = std::nullopt;
    r.upper = std::nullopt;
    r.method = "volume_growth*speed-entropy";
    json lines = json::array();
    for (const auto& l : fi.weights)
        lines.push_back({{"weight", l.weight},
                         {"lyapunov", number_to_json(l.lyapunov)},
                         {"log_growth", number_to_json(l.log_growth)},
                         {"bound", number_to_json(l.bound)},
                         {"holds", l.holds}});
    r.diagnostics = {{"entropy", number_to_json(fi.h)},
                     {"volume_growth", number_to_json(fi.volume_growth)},
                     {"speed", number_to_json(fi.speed)},
                     {"slack", number_to_json(fi.slack)},
                     {"holds", fi.holds},
                     {"tolerance", fi.tolerance},
                     {"weights", lines},
                     {"entropy_report", fi.entropy.diagnostics}};
    if (!fi.holds) r.flags.push_back("inequality_violated");
    stamp(r, o, c);
    return r;
}

json law_json(const exponent_law& law) {
    json j = json::object();
    for (const auto& [e, m] : law) j[std::to_string(e)] = m.str();
    return j;
}

estimate_report cmd_boundary(const options& o) {
    if (o.k < 2) throw config_error("--k must be at least 2");
    auto g = group::free(o.k);
    auto mu = parse_measure_spec(o.measure, g);
    if (mu.grp() != g) throw config_error("boundary measures live on " + g.spec());
    auto nu = cylinder_measure::harmonic(o.k, o.depth);
    estimate_report r;
    if (o.quantity == "furstenberg") {
        r.quantity = "furstenberg_entropy";
        r.method = "exact-cocycle";
        asymptotic_sequence s("by_depth");
        furstenberg_value last;
        bool stationary = true;
        for (int d = 1; d <= o.depth; ++d) {
            auto nd = cylinder_measure::harmonic(o.k, d);
            last = furstenberg_entropy(mu, nd);
            s.push(d, last.value);
            if (d >= mu.max_length()) stationary = stationary && is_stationary(mu, nd);
        }
        r.estimate = last.value;
        r.sequences.push_back(s);
        r.diagnostics["log_q_coefficient"] = last.log_q_coefficient.str();
        r.diagnostics["q"] = last.q;
        r.diagnostics["stationary"] = stationary;
        if (!stationary) r.flags.push_back("not_stationary");
    } else if (o.quantity == "xi") {
        element w;
        if (o.word.empty())
            w.assign(o.depth, 1);
        else
            w = g.parse(o.word);
        if (static_cast<int>(w.size()) > o.depth) throw config_error("--word is longer than --depth");
        r.quantity = "harish_chandra_xi";
        r.method = "exact-cocycle";
        asymptotic_sequence s("prefix_value");
        for (size_t i = 0; i <= w.size(); ++i) s.push(static_cast<double>(i), harish_chandra_xi(element(w.begin(), w.begin() + i), nu));
        r.estimate = s.back().value;
        r.sequences.push_back(s);
        r.params["word"] = g.format(w);
        r.diagnostics["closed_form"] = number_to_json(std::exp(log_xi_radial(o.k, static_cast<long>(w.size()))));
        r.diagnostics["exponent_law"] = law_json(rho_exponent_law(w, nu));
    } else if (o.quantity == "xi-limit") {
        r = xi_entropy_limit(mu, o.n_max, parse_policy(o.policy));
    } else if (o.quantity == "koopman") {
        pairing_config pc;
        if (!o.p_grid.empty()) pc.p_grid = parse_list(o.p_grid, "p grid");
        r = koopman_limit(mu, nu, pc);
        if (o.boundary_p) {
            double p = *o.boundary_p;
            if (!(p > 1)) throw config_error("--p must exceed 1");
            auto b = koopman_norm_lower(mu, nu, p / (p - 1));
            r.diagnostics["at_p"] = {{"p", p},
                                     {"pairing", number_to_json(koopman_pairing(mu, nu, p))},
                                     {"norm_lower", number_to_json(b.bound)},
                                     {"cw_ratio", number_to_json(b.cw_ratio)},
                                     {"iterations", b.iterations},
                                     {"dimension", b.dimension}};
        }
    } else {
        throw config_error("unknown boundary quantity '" + o.quantity + "'");
    }
    r.params["k"] = o.k;
    r.params["depth"] = o.depth;
    r.params["measure"] = o.measure;
    return r;
}

estimate_report cmd_dlvp(const options& o) {
    auto c = make_context(o);
    if (o.power < 1) throw config_error("--power must be positive");
    auto mu = o.power == 1 ? c.mu : convolution_power(c.mu, o.power, c.cfg.policy, c.cfg.limits);
    auto f = named_function(c.g, o.f);
    auto b = dlvp_bundle::build(mu, f);
    auto grid = check_weak_subadditivity(b, o.grid);
    double y_max = b.complete() ? std::max(40.0, static_cast<double>(b.thresholds().back()) + 10.0) : b.covered_to();
    auto lip = check_psi(b, y_max, 1e-3);
    bool lambda = check_lambda_decreasing(b, 30.0, 1e-3);
    auto integ = integrability_partial_sums(mu, f, b);

    estimate_report r;
    r.quantity = "dlvp_constant";
    r.method = "thresholds+grid";
    r.estimate = b.M();
    asymptotic_sequence th("thresholds");
    for (size_t i = 0; i < b.thresholds().size(); ++i) th.push(static_cast<double>(i + 1), static_cast<double>(b.thresholds()[i]));
    r.sequences.push_back(th);
    r.sequences.push_back(integ.partial);
    json vanishing = json::array();
    for (double eps : parse_list(o.eps, "eps list")) {
        auto v = vanishing_chain(mu, b, eps, o.n_max, c.cfg.policy, c.cfg.limits);
        if (vanishing.empty()) {
            r.sequences.push_back(v.log_length);
            r.sequences.push_back(v.bound);
        }
        vanishing.push_back({{"eps", eps},
                             {"u_eps", number_to_json(v.u_eps)},
                             {"chain_holds", v.chain_holds},
                             {"theta_bounded", v.theta_bounded},
                             {"theta_step_mean", number_to_json(v.theta_step_mean)},
                             {"last_log_length", number_to_json(v.log_length.back().value)},
                             {"last_bound", number_to_json(v.bound.back().value)}});
        if (!v.chain_holds) r.flags.push_back("chain_fails");
    }
    json checks = {{"weak_subadditivity",
                    {{"worst", number_to_json(grid.worst)}, {"y", grid.y}, {"y2", grid.y2}, {"within_M", grid.within_M}, {"grid", o.grid}}},
                   {"psi",
                    {{"max_slope", number_to_json(lip.max_slope)},
                     {"monotone", lip.monotone},
                     {"lipschitz", lip.lipschitz},
                     {"knots_exact", lip.knots_exact},
                     {"dominated_by_phi", lip.dominated_by_phi}}},
                   {"lambda_decreasing", lambda},
                   {"integrability", {{"bound", integ.bound}, {"bounded", integ.bounded}, {"increasing", integ.increasing}}},
                   {"vanishing", vanishing}};
    r.diagnostics["bundle"] = b.to_json();
    r.diagnostics["checks"] = checks;
    if (!grid.within_M) r.flags.push_back("subadditivity_fails");
    if (!lip.lipschitz || !lip.monotone) r.flags.push_back("psi_fails");
    if (!integ.bounded) r.flags.push_back("integrability_fails");
    r.params["f"] = o.f;
    r.params["power"] = o.power;
    r.params["grid"] = o.grid;
    r.params["n_max"] = o.n_max;
    stamp(r, o, c);
    if (!o.emit.empty()) write_text_file(o.emit, json({{"bundle", b.to_json()}, {"checks", checks}}).dump(2) + "\n");
    return r;
}

estimate_report cmd_verify(const options& o, bool& all_pass) {
    if (!o.seed) throw config_error("--seed is required for verify");
    verify_config vc;
    vc.seed = *o.seed;
    vc.threads = o.threads;
    auto checks = run_suite(o.suite, vc);
    estimate_report r;
    r.quantity = "verify";
    r.method = "property-suites";
    r.seed = *o.seed;
    asymptotic_sequence s("check_passed");
    json list = json::array();
    long failures = 0;
    for (size_t i = 0; i < checks.size(); ++i) {
        const auto& ch = checks[i];
        s.push(static_cast<double>(i + 1), ch.pass ? 1.0 : 0.0);
        list.push_back({{"suite", ch.suite}, {"name", ch.name}, {"pass", ch.pass}, {"detail", ch.detail}});
        if (!ch.pass) {
            ++failures;
            r.flags.push_back("failed:" + ch.suite + "/" + ch.name);
        }
    }
    r.estimate = static_cast<double>(failures);
    r.sequences.push_back(s);
    r.params["suite"] = o.suite;
    r.diagnostics["checks"] = list;
    r.diagnostics["total"] = checks.size();
    all_pass = failures == 0;
    return r;
}

void emit(const estimate_report& r, const options& o, const json& metadata, std::ostream& out) {
    if (!o.csv_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(o.csv_dir, ec);
        if (ec) throw io_error("cannot create '" + o.csv_dir + "': " + ec.message());
        for (const auto& s : r.sequences) write_text_file((std::filesystem::path(o.csv_dir) / (s.name() + ".csv")).string(), sequence_csv(s));
    }
    std::string text;
    if (o.format == "csv") {
        if (r.sequences.empty()) throw domain_error("report has no sequences");
        text = sequence_csv(o.sequence.empty() ? r.sequences.front() : r.sequence(o.sequence));
    } else {
        text = emit_json(r, o.no_metadata ? json(nullptr) : metadata);
    }
    if (o.output.empty())
        out << text;
    else
        write_text_file(o.output, text);
}

void error_json(std::ostream& out, std::ostream& err, const std::string& category, const std::string& message, int code) {
    json j = {{"error", {{"category", category}, {"message", message}, {"exit_code", code}}}};
    out << j.dump(2) << "\n";
    err << "rwlab: " << category << " error: " << message << "\n";
}

void add_io(CLI::App* s, options& o) {
    s->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    s->add_option("--output,-o", o.output, "Write the report here instead of stdout");
    s->add_option("--sequence", o.sequence, "Sequence written in CSV mode (default: headline)");
    s->add_option("--csv-dir", o.csv_dir, "Also write every sequence as <dir>/<name>.csv");
    s->add_flag("--no-metadata", o.no_metadata, "Omit the metadata block (timestamp, version)");
    s->add_option("--threads", o.threads, "Parallelism degree")->check(CLI::PositiveNumber)->capture_default_str();
}

void add_walk(CLI::App* s, options& o) {
    s->add_option("--group", o.group, "Group spec, e.g. free:2 or JSON")->capture_default_str();
    s->add_option("--measure", o.measure, "Measure spec: preset:srw, preset:lazy-srw:hold=0.5, JSON or @file")
        ->capture_default_str();
    s->add_option("--nmax", o.n_max, "Largest convolution power")->check(CLI::PositiveNumber)->capture_default_str();
    s->add_option("--seed", o.seed, "Seed for stochastic paths");
    s->add_option("--policy", o.policy, "Convolution path")
        ->check(CLI::IsMember({"auto", "exact", "radial", "lattice"}))
        ->capture_default_str();
    s->add_option("--support-cap", o.support_cap, "Largest support kept during convolution")->capture_default_str();
    add_io(s, o);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    options o;
    CLI::App app{"rwlab: entropy, Lyapunov exponents and spectral radii of random walks on groups (nats)"};
    app.name("rwlab");
    app.require_subcommand(1);

    auto* entropy = app.add_subcommand("entropy", "Avez entropy h from entropy differences");
    add_walk(entropy, o);
    entropy->add_option("--mc-paths", o.mc_paths, "Monte Carlo paths for the cross-check (needs --seed)");
    entropy->add_option("--mc-n", o.mc_n, "Monte Carlo path length")->capture_default_str();

    auto* lyap = app.add_subcommand("lyapunov", "Lyapunov exponent of a weight, direct or via spectral radii");
    add_walk(lyap, o);
    lyap->add_option("--weight", o.weights, "Weight spec: const:1, poly:d=2, exp:a=1.5, invseries:N=12, A*B")->required();
    lyap->add_option("--route", o.route, "Estimation route")->check(CLI::IsMember({"direct", "radius", "both"}))->capture_default_str();
    lyap->add_option("--p-grid", o.p_grid, "Comma separated exponents p");

    auto* went = app.add_subcommand("weighted-entropy", "Weighted Avez entropy or the weighted Shannon limit");
    add_walk(went, o);
    went->add_option("--weight", o.weights, "Weight spec")->required();
    went->add_option("--limit", o.limit, "avez: h - Ly along powers; shannon: -p log norm as p grows")
        ->check(CLI::IsMember({"avez", "shannon"}))
        ->capture_default_str();
    went->add_option("--p-grid", o.p_grid, "Comma separated exponents p");

    auto* conv = app.add_subcommand("conv-entropy", "Convolution entropy c bracketed by PF_q radius bounds");
    add_walk(conv, o);
    conv->add_option("--d", o.rd_degree, "Degree of the (1+L)^d weight in the upper bound")->capture_default_str();
    conv->add_option("--p-grid", o.p_grid, "Comma separated exponents p");

    auto* rad = app.add_subcommand("spectral-radius", "Spectral radius in l1(w_p), PF_2 or PF_q bounds");
    add_walk(rad, o);
    rad->add_option("--space", o.space, "Algebra")->check(CLI::IsMember({"l1w", "pf2", "pfq-lower", "pfq-upper"}))->capture_default_str();
    rad->add_option("--q", o.q, "Exponent q for PF_q");
    rad->add_option("--weight", o.weights, "Weight spec for l1w");
    rad->add_option("--p", o.p, "Root p of the weight for l1w")->capture_default_str();
    rad->add_option("--d", o.rd_degree, "Degree for pfq-upper")->capture_default_str();

    auto* ineq = app.add_subcommand("inequalities", "Entropy, volume growth and speed with weighted Lyapunov bounds");
    add_walk(ineq, o);
    ineq->add_option("--weight", o.weights, "Weight specs to check (repeatable)");

    auto* bnd = app.add_subcommand("boundary", "Exact boundary quantities of the free group");
    bnd->add_option("--k", o.k, "Rank of the free group")->capture_default_str();
    bnd->add_option("--depth", o.depth, "Cylinder depth")->check(CLI::PositiveNumber)->capture_default_str();
    bnd->add_option("--quantity", o.quantity, "Quantity")
        ->check(CLI::IsMember({"xi", "furstenberg", "xi-limit", "koopman"}))
        ->capture_default_str();
    bnd->add_option("--p", o.boundary_p, "Exponent p for the Koopman pairing and norm bound");
    bnd->add_option("--p-grid", o.p_grid, "Comma separated exponents p for the Koopman limit");
    bnd->add_option("--word", o.word, "Group element for xi (default a^depth)");
    bnd->add_option("--measure", o.measure, "Step measure on the free group")->capture_default_str();
    bnd->add_option("--nmax", o.n_max, "Steps for xi-limit")->check(CLI::PositiveNumber)->capture_default_str();
    bnd->add_option("--policy", o.policy, "Convolution path")->check(CLI::IsMember({"auto", "exact", "radial", "lattice"}));
    add_io(bnd, o);

    auto* dl = app.add_subcommand("dlvp", "Threshold construction of a slowly growing subadditive majorant");
    add_walk(dl, o);
    dl->add_option("--f", o.f, "Test function")->check(CLI::IsMember({"log1pL", "L", "zero"}))->capture_default_str();
    dl->add_option("--grid", o.grid, "Side of the weak subadditivity grid")->check(CLI::PositiveNumber)->capture_default_str();
    dl->add_option("--power", o.power, "Use this convolution power of the measure")->capture_default_str();
    dl->add_option("--eps", o.eps, "Comma separated eps for the vanishing chain")->capture_default_str();
    dl->add_option("--emit", o.emit, "Write the bundle (knots, slopes, M, checks) as JSON");

    auto* ver = app.add_subcommand("verify", "Run the seeded property suites");
    ver->add_option("--suite", o.suite, "all, groups, measures, weights, spectra, estimators, boundary, dlvp")
        ->capture_default_str();
    ver->add_option("--seed", o.seed, "Seed for the random inputs")->required();
    add_io(ver, o);

    auto* rep = app.add_subcommand("report", "Validate a saved JSON report and re-emit it as JSON or CSV");
    rep->add_option("--input", o.input, "Report file")->required();
    add_io(rep, o);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        int code = exit_code(error_category::config);
        error_json(out, err, "config", e.what(), code);
        return code;
    }

    try {
        estimate_report r;
        json metadata = run_metadata(o.threads);
        int code = 0;
        if (*entropy)
            r = cmd_entropy(o);
        else if (*lyap)
            r = cmd_lyapunov(o);
        else if (*went)
            r = cmd_weighted(o);
        else if (*conv)
            r = cmd_conv(o);
        else if (*rad)
            r = cmd_radius(o);
        else if (*ineq)
            r = cmd_inequalities(o);
        else if (*bnd)
            r = cmd_boundary(o);
        else if (*dl)
            r = cmd_dlvp(o);
        else if (*ver) {
            bool pass = true;
            r = cmd_verify(o, pass);
            code = pass ? 0 : 1;
        } else {
            auto j = json::parse(read_text_file(o.input), nullptr, false);
            if (j.is_discarded()) throw config_error("'" + o.input + "' is not valid JSON");
            r = report_from_json(j);
            if (j.contains("metadata")) metadata = j["metadata"];
        }
        if (!*rep) metadata["command"] = app.get_subcommands().front()->get_name();
        emit(r, o, metadata, out);
        return code;
    } catch (const lab_error& e) {
        int code = exit_code(e.category());
        error_json(out, err, category_name(e.category()), e.what(), code);
        return code;
    } catch (const std::bad_alloc&) {
        int code = exit_code(error_category::resource);
        error_json(out, err, "resource", "out of memory", code);
        return code;
    } catch (const std::exception& e) {
        error_json(out, err, "internal", e.what(), 1);
        return 1;
    }
}

}  // namespace rwlab
