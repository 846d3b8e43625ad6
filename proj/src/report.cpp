#include "rwlab/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>

#include "rwlab/errors.hpp"

namespace rwlab {

using nlohmann::json;

namespace {

const char* kind_name(index_kind k) { return k == index_kind::step ? "step" : "exponent"; }

index_kind kind_from(const std::string& s) {
    if (s == "step") return index_kind::step;
    if (s == "exponent") return index_kind::exponent;
    throw config_error("unknown index kind '" + s + "'");
}

const json& need(const json& j, const char* key) {
    if (!j.contains(key)) throw config_error(std::string("report is missing \"") + key + "\"");
    return j[key];
}

std::optional<double> optional_number(const json& j) {
    if (j.is_null()) return std::nullopt;
    return number_from_json(j);
}

bool same_double(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

bool same_sequence(const asymptotic_sequence& a, const asymptotic_sequence& b) {
    if (a.name() != b.name() || a.kind() != b.kind() || a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (!same_double(a[i].index, b[i].index) || !same_double(a[i].value, b[i].value)) return false;
    return true;
}

bool same_optional(const std::optional<double>& a, const std::optional<double>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || same_double(*a, *b);
}

}  // namespace

json number_to_json(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double number_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        if (s == "inf") return INFINITY;
        if (s == "-inf") return -INFINITY;
        if (s == "nan") return NAN;
    }
    throw config_error("expected a number in report, got " + j.dump());
}

json sequence_to_json(const asymptotic_sequence& s) {
    json terms = json::array();
    for (const auto& t : s.terms()) terms.push_back({{"index", number_to_json(t.index)}, {"value", number_to_json(t.value)}});
    return {{"name", s.name()}, {"index_kind", kind_name(s.kind())}, {"terms", terms}};
}

asymptotic_sequence sequence_from_json(const json& j) {
    asymptotic_sequence s(need(j, "name").get<std::string>(), kind_from(need(j, "index_kind").get<std::string>()));
    for (const auto& t : need(j, "terms")) {
        try {
            s.push(number_from_json(need(t, "index")), number_from_json(need(t, "value")));
        } catch (const domain_error& e) {
            throw config_error(e.what());
        }
    }
    return s;
}

json report_to_json(const estimate_report& r) {
    json j;
    j["quantity"] = r.quantity;
    j["estimate"] = number_to_json(r.estimate);
    j["lower"] = r.lower ? number_to_json(*r.lower) : json(nullptr);
    j["upper"] = r.upper ? number_to_json(*r.upper) : json(nullptr);
    json headline = json::array();
    if (!r.sequences.empty())
        for (const auto& t : r.sequences.front().terms())
            headline.push_back({{"index", number_to_json(t.index)}, {"value", number_to_json(t.value)}});
    j["sequence"] = headline;
    json seqs = json::array();
    for (const auto& s : r.sequences) seqs.push_back(sequence_to_json(s));
    j["sequences"] = seqs;
    j["method"] = r.method;
    j["params"] = r.params;
    j["seed"] = r.seed ? json(*r.seed) : json(nullptr);
    j["flags"] = r.flags;
    j["diagnostics"] = r.diagnostics;
    return j;
}

estimate_report report_from_json(const json& j) {
    if (!j.is_object()) throw config_error("report must be a JSON object");
    estimate_report r;
    try {
        r.quantity = need(j, "quantity").get<std::string>();
        r.estimate = number_from_json(need(j, "estimate"));
        r.lower = optional_number(need(j, "lower"));
        r.upper = optional_number(need(j, "upper"));
        r.method = need(j, "method").get<std::string>();
        r.params = need(j, "params");
        r.diagnostics = need(j, "diagnostics");
        const auto& seed = need(j, "seed");
        if (!seed.is_null()) r.seed = seed.get<uint64_t>();
        r.flags = need(j, "flags").get<std::vector<std::string>>();
        for (const auto& s : need(j, "sequences")) r.sequences.push_back(sequence_from_json(s));
    } catch (const json::exception& e) {
        throw config_error(std::string("malformed report: ") + e.what());
    }
    // the headline copy must agree with the first full sequence
    const auto& head = need(j, "sequence");
    size_t n = r.sequences.empty() ? 0 : r.sequences.front().size();
    if (head.size() != n) throw config_error("headline sequence does not match sequences[0]");
    for (size_t i = 0; i < n; ++i)
        if (!same_double(number_from_json(need(head[i], "value")), r.sequences.front()[i].value))
            throw config_error("headline sequence does not match sequences[0]");
    return r;
}

bool same_report(const estimate_report& a, const estimate_report& b) {
    if (a.quantity != b.quantity || a.method != b.method || a.seed != b.seed || a.flags != b.flags) return false;
    if (!same_double(a.estimate, b.estimate) || !same_optional(a.lower, b.lower) || !same_optional(a.upper, b.upper))
        return false;
    if (a.params != b.params || a.diagnostics != b.diagnostics) return false;
    if (a.sequences.size() != b.sequences.size()) return false;
    for (size_t i = 0; i < a.sequences.size(); ++i)
        if (!same_sequence(a.sequences[i], b.sequences[i])) return false;
    return true;
}

json run_metadata(int threads) {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    json m;
    m["timestamp"] = buf;
    m["tool"] = "rwlab";
    m["version"] = "1.0.0";
    m["threads"] = threads;
    const char* cache = std::getenv("RWLAB_CACHE_DIR");
    m["cache_dir"] = cache ? json(cache) : json(nullptr);
    m["units"] = "nats";
    return m;
}

std::string emit_json(const estimate_report& r, const json& metadata) {
    json j = report_to_json(r);
    if (!metadata.is_null()) j["metadata"] = metadata;
    return j.dump(2) + "\n";
}

estimate_report parse_report_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("report is not valid JSON: ") + e.what());
    }
    return report_from_json(j);
}

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string sequence_csv(const asymptotic_sequence& s) {
    std::string out = "index,value\n";
    for (const auto& t : s.terms()) out += format_value(t.index) + "," + format_value(t.value) + "\n";
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    out << content;
    out.flush();
    if (!out) throw io_error("write failed for '" + path + "'");
}

}  // namespace rwlab
