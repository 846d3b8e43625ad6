#include "rwlab/specs.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "rwlab/errors.hpp"

namespace rwlab {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

long to_long(const std::string& text, const std::string& what) {
    try {
        size_t used = 0;
        long v = std::stol(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw config_error("expected an integer for " + what + ", got '" + text + "'");
    }
}

double to_double(const std::string& text, const std::string& what) {
    try {
        size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw config_error("expected a number for " + what + ", got '" + text + "'");
    }
}

json parse_json_text(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw config_error("malformed JSON in " + what + ": " + e.what());
    }
}

group make_group(const std::string& fam, long param) {
    if (param < 1 || param > 1'000'000) throw config_error("group parameter out of range: " + std::to_string(param));
    int p = static_cast<int>(param);
    if (fam == "free") return group::free(p);
    if (fam == "abelian") return group::abelian(p);
    if (fam == "cyclic") return group::cyclic(p);
    if (fam == "lamplighter") return group::lamplighter(p);
    throw config_error("unknown group family '" + fam + "'");
}

// "key=value,key=value" after the kind; a bare value binds to fallback_key
std::map<std::string, std::string> key_values(const std::string& body, const std::string& fallback_key) {
    std::map<std::string, std::string> out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        auto eq = item.find('=');
        std::string k = eq == std::string::npos ? fallback_key : trim(item.substr(0, eq));
        std::string v = eq == std::string::npos ? item : trim(item.substr(eq + 1));
        if (k.empty() || v.empty()) throw config_error("malformed parameter '" + item + "'");
        if (!out.emplace(k, v).second) throw config_error("parameter '" + k + "' given twice");
    }
    return out;
}

void reject_unknown(const std::map<std::string, std::string>& kv, std::initializer_list<const char*> known,
                    const std::string& where) {
    for (const auto& [k, v] : kv) {
        bool ok = false;
        for (const char* n : known) ok = ok || k == n;
        if (!ok) throw config_error("unknown parameter '" + k + "' in " + where);
    }
}

element element_from_json(const group& g, const json& j) {
    if (j.is_string()) return g.parse(j.get<std::string>());
    if (j.is_number_integer() && g.fam() == family::cyclic) return g.parse(std::to_string(j.get<long>()));
    if (j.is_array()) {
        element e;
        for (const auto& x : j) {
            if (!x.is_number_integer()) throw config_error("element arrays must hold integers");
            e.push_back(x.get<int32_t>());
        }
        try {
            g.validate(e);
        } catch (const lab_error& ex) {
            throw config_error(std::string("invalid element: ") + ex.what());
        }
        return e;
    }
    throw config_error("element must be a literal string or an integer array");
}

rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return rational(to_long(trim(s), "mass"));
    long p = to_long(trim(s.substr(0, slash)), "mass numerator");
    long q = to_long(trim(s.substr(slash + 1)), "mass denominator");
    if (q == 0) throw config_error("zero denominator in mass '" + s + "'");
    return rational(p, q);
}

}  // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw io_error("read failed for '" + path + "'");
    return ss.str();
}

group group_from_json(const json& j) {
    if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
        throw config_error("group spec needs a \"family\" string");
    for (const auto& [k, v] : j.items())
        if (k != "family" && k != "rank" && k != "order") throw config_error("unknown group spec key '" + k + "'");
    std::string fam = lower(j["family"].get<std::string>());
    const char* key = fam == "cyclic" ? "order" : "rank";
    if (!j.contains(key) || !j[key].is_number_integer())
        throw config_error("group family '" + fam + "' needs an integer \"" + key + "\"");
    return make_group(fam, j[key].get<long>());
}

group parse_group_spec(const std::string& text) {
    std::string t = trim(text);
    if (t.empty()) throw config_error("empty group spec");
    if (t.front() == '{') return group_from_json(parse_json_text(t, "group spec"));
    auto colon = t.find(':');
    if (colon == std::string::npos) throw config_error("group spec must look like family:param, got '" + t + "'");
    return make_group(lower(trim(t.substr(0, colon))), to_long(trim(t.substr(colon + 1)), "group parameter"));
}

json group_to_json(const group& g) {
    json j;
    j["family"] = family_name(g.fam());
    j[g.fam() == family::cyclic ? "order" : "rank"] = g.rank();
    return j;
}

sparse_measure measure_from_json(const json& j, const std::optional<group>& fallback) {
    if (!j.is_object()) throw config_error("measure spec must be a JSON object");
    for (const auto& [k, v] : j.items())
        if (k != "group" && k != "atoms" && k != "preset" && k != "hold")
            throw config_error("unknown measure spec key '" + k + "'");
    std::optional<group> g = fallback;
    if (j.contains("group")) {
        const auto& gj = j["group"];
        g = gj.is_string() ? parse_group_spec(gj.get<std::string>()) : group_from_json(gj);
    }
    if (!g) throw config_error("measure spec does not name a group");
    if (j.contains("preset") == j.contains("atoms")) throw config_error("measure spec needs exactly one of preset, atoms");
    if (j.contains("preset")) {
        std::string p = lower(j["preset"].get<std::string>());
        if (p != "lazy-srw" && j.contains("hold")) throw config_error("\"hold\" only applies to lazy-srw");
        if (p == "srw") return sparse_measure::srw(*g);
        if (p == "dirac") return sparse_measure::dirac(*g);
        if (p == "lazy-srw") {
            if (!j.contains("hold") || !j["hold"].is_number()) throw config_error("lazy-srw needs a numeric \"hold\"");
            return sparse_measure::lazy_srw(*g, j["hold"].get<double>());
        }
        throw config_error("unknown measure preset '" + p + "'");
    }
    if (j.contains("hold")) throw config_error("\"hold\" only applies to lazy-srw");
    const auto& arr = j["atoms"];
    if (!arr.is_array() || arr.empty()) throw config_error("\"atoms\" must be a non-empty array");
    std::vector<atom> atoms;
    std::vector<std::pair<element, rational>> exact;
    bool all_exact = true;
    for (const auto& a : arr) {
        if (!a.is_object() || !a.contains("elem") || !a.contains("mass"))
            throw config_error("each atom needs \"elem\" and \"mass\"");
        element e = element_from_json(*g, a["elem"]);
        const auto& m = a["mass"];
        double mass;
        if (m.is_string()) {
            rational r = parse_rational(m.get<std::string>());
            exact.push_back({e, r});
            mass = static_cast<double>(r);
        } else if (m.is_number()) {
            all_exact = false;
            mass = m.get<double>();
        } else {
            throw config_error("atom mass must be a number or a \"p/q\" string");
        }
        atoms.push_back({e, mass});
    }
    std::optional<sparse_measure> built;
    try {
        built = sparse_measure::from_atoms(*g, atoms);
    } catch (const domain_error& e) {
        throw config_error(e.what());
    }
    auto mu = std::move(*built);
    if (all_exact) {
        rational total = 0;
        std::map<element, rational> merged;
        for (const auto& [e, r] : exact) {
            merged[e] += r;
            total += r;
        }
        if (total != 1) throw config_error("exact masses must sum to 1");
        std::vector<rational> ordered;
        for (const auto& at : mu.atoms()) ordered.push_back(merged.at(at.elem));
        mu.set_exact(std::move(ordered));
    }
    return mu;
}

sparse_measure parse_measure_spec(const std::string& text, const std::optional<group>& fallback) {
    std::string t = trim(text);
    if (t.empty()) throw config_error("empty measure spec");
    if (t.front() == '@') return measure_from_json(parse_json_text(read_text_file(t.substr(1)), t.substr(1)), fallback);
    if (t.front() == '{') return measure_from_json(parse_json_text(t, "measure spec"), fallback);
    if (t.rfind("preset:", 0) != 0) throw config_error("measure spec must be preset:<name>, inline JSON or @file");
    std::string rest = t.substr(7);
    auto colon = rest.find(':');
    json j;
    j["preset"] = lower(trim(rest.substr(0, colon)));
    if (colon != std::string::npos) {
        auto kv = key_values(rest.substr(colon + 1), "hold");
        reject_unknown(kv, {"hold"}, "measure preset");
        j["hold"] = to_double(kv.at("hold"), "hold");
    } else if (j["preset"] == "lazy-srw") {
        j["hold"] = 0.5;
    }
    return measure_from_json(j, fallback);
}

json measure_to_json(const sparse_measure& mu) {
    json j;
    j["group"] = group_to_json(mu.grp());
    json atoms = json::array();
    for (size_t i = 0; i < mu.size(); ++i) {
        json a;
        a["elem"] = mu.grp().format(mu.atoms()[i].elem);
        if (mu.has_exact())
            a["mass"] = mu.exact()[i].str();
        else
            a["mass"] = mu.atoms()[i].mass;
        atoms.push_back(a);
    }
    j["atoms"] = atoms;
    return j;
}

weight parse_weight_spec(const std::string& text, const sparse_measure* mu) {
    std::string t = trim(text);
    if (t.empty()) throw config_error("empty weight spec");
    auto star = t.find('*');
    if (star != std::string::npos)
        return weight::product(parse_weight_spec(t.substr(0, star), mu), parse_weight_spec(t.substr(star + 1), mu));
    auto colon = t.find(':');
    std::string kind = lower(trim(t.substr(0, colon)));
    std::string body = colon == std::string::npos ? "" : t.substr(colon + 1);
    if (kind == "const") {
        auto kv = key_values(body.empty() ? "1" : body, "c");
        reject_unknown(kv, {"c"}, "const weight");
        return weight::constant(to_double(kv.at("c"), "const weight"));
    }
    if (kind == "poly") {
        auto kv = key_values(body, "d");
        reject_unknown(kv, {"d"}, "poly weight");
        if (!kv.count("d")) throw config_error("poly weight needs d=");
        return weight::polynomial(to_double(kv.at("d"), "poly degree"));
    }
    if (kind == "exp") {
        auto kv = key_values(body, "a");
        reject_unknown(kv, {"a"}, "exp weight");
        if (!kv.count("a")) throw config_error("exp weight needs a=");
        return weight::exponential(to_double(kv.at("a"), "exp base"));
    }
    if (kind == "invseries") {
        auto kv = key_values(body, "N");
        reject_unknown(kv, {"N", "exp"}, "invseries weight");
        if (!kv.count("N")) throw config_error("invseries weight needs N=");
        if (!mu) throw config_error("invseries weight needs a step measure");
        long n = to_long(kv.at("N"), "invseries N");
        if (n < 1 || n > 100000) throw config_error("invseries N out of range");
        double ex = kv.count("exp") ? to_double(kv.at("exp"), "invseries exponent") : 3.0;
        if (!(ex > 2.0)) throw config_error("invseries exponent must exceed 2");
        return build_inverse_series_weight(*mu, static_cast<int>(n), ex);
    }
    throw config_error("unknown weight kind '" + kind + "'");
}

}  // namespace rwlab
