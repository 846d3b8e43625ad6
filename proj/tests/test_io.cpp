#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <regex>

#include "rwlab/boundary.hpp"
#include "rwlab/errors.hpp"
#include "rwlab/report.hpp"
#include "rwlab/specs.hpp"

using namespace rwlab;

namespace {

size_t count_lines(const std::string& s) {
    size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

estimate_report sample_report() {
    estimate_report r;
    r.quantity = "avez_entropy";
    r.estimate = 0.5493061443340548;
    r.lower = 0.0;
    r.upper = std::log(4.0);
    r.method = "entropy-differences";
    asymptotic_sequence s("difference");
    for (int n = 1; n <= 5; ++n) s.push(n, 1.0 / (3.0 * n) + 0.1);
    r.sequences.push_back(s);
    asymptotic_sequence p("per_p", index_kind::exponent);
    p.push(2, INFINITY);
    p.push(4, -1e-300);
    r.sequences.push_back(p);
    r.params["n_max"] = 5;
    r.diagnostics["exact"] = "1/2";
    r.seed = 7;
    r.flags = {"fekete_gap"};
    return r;
}

}  // namespace

TEST_CASE("group specs") {
    CHECK(parse_group_spec("free:2") == group::free(2));
    CHECK(parse_group_spec("cyclic:6") == group::cyclic(6));
    CHECK(parse_group_spec(R"({"family":"abelian","rank":2})") == group::abelian(2));
    CHECK(parse_group_spec(R"({"family":"cyclic","order":6})") == group::cyclic(6));
    CHECK(parse_group_spec(R"({"family":"lamplighter","rank":1})") == group::lamplighter(1));
    for (const auto& g : {group::free(3), group::abelian(1), group::cyclic(5), group::lamplighter(2)})
        CHECK(group_from_json(group_to_json(g)) == g);
    CHECK_THROWS_AS(parse_group_spec("free"), config_error);
    CHECK_THROWS_AS(parse_group_spec("hyperbolic:2"), config_error);
    CHECK_THROWS_AS(parse_group_spec("free:0"), config_error);
    CHECK_THROWS_AS(parse_group_spec(R"({"family":"cyclic","rank":6})"), config_error);
    CHECK_THROWS_AS(parse_group_spec("{not json"), config_error);
}

TEST_CASE("measure specs") {
    auto f2 = group::free(2);
    auto srw = parse_measure_spec("preset:srw", f2);
    CHECK(srw.size() == 4);
    CHECK(srw.mass({1}) == 0.25);
    auto lazy = parse_measure_spec("preset:lazy-srw:hold=0.5", group::abelian(1));
    CHECK(lazy.mass({0}) == 0.5);
    auto inline_json = parse_measure_spec(
        R"({"group":{"family":"free","rank":2},"atoms":[{"elem":"a","mass":0.25},{"elem":"A","mass":0.75}]})");
    CHECK(inline_json.mass({-1}) == 0.75);
    auto lazy_json = parse_measure_spec(R"({"group":"cyclic:6","preset":"lazy-srw","hold":0.25})");
    CHECK(lazy_json.mass({0}) == 0.25);
    auto exact = parse_measure_spec(R"({"atoms":[{"elem":"ab","mass":"1/3"},{"elem":"1","mass":"2/3"}]})", f2);
    REQUIRE(exact.has_exact());
    CHECK(exact.mass({1, 2}) == doctest::Approx(1.0 / 3));

    // round trip through the JSON form, exact masses preserved
    auto back = measure_from_json(measure_to_json(exact));
    REQUIRE(back.has_exact());
    CHECK(back.exact() == exact.exact());
    CHECK(measure_from_json(measure_to_json(srw)).atoms().size() == 4);

    const char* path = "rwlab_test_measure.json";
    {
        std::ofstream out(path);
        out << R"({"group":"abelian:2","preset":"srw"})";
    }
    CHECK(parse_measure_spec(std::string("@") + path).size() == 4);
    std::remove(path);

    CHECK_THROWS_AS(parse_measure_spec("preset:srw"), config_error);  // no group
    CHECK_THROWS_AS(parse_measure_spec("preset:bogus", f2), config_error);
    CHECK_THROWS_AS(parse_measure_spec("preset:srw:hold=0.5", f2), config_error);
    CHECK_THROWS_AS(parse_measure_spec(R"({"atoms":[{"elem":"a","mass":0.5}]})", f2), config_error);
    CHECK_THROWS_AS(parse_measure_spec(R"({"atoms":[{"elem":"c","mass":1}]})", f2), config_error);
    CHECK_THROWS_AS(parse_measure_spec("@/nonexistent/rwlab.json", f2), io_error);
}

TEST_CASE("weight specs") {
    auto g = group::free(2);
    CHECK(parse_weight_spec("const:1").is_constant());
    CHECK(parse_weight_spec("poly:d=2").eval(g, {1}) == doctest::Approx(4.0));
    CHECK(parse_weight_spec("exp:a=1.5").eval(g, {1, 2}) == doctest::Approx(2.25));
    auto prod = parse_weight_spec("poly:d=1*exp:a=2");
    CHECK(prod.kind() == weight_kind::product);
    CHECK(prod.eval(g, {1}) == doctest::Approx(4.0));
    CHECK(parse_weight_spec("poly:d=2").spec() == "poly:d=2");

    auto z = group::abelian(1);
    auto mu = sparse_measure::srw(z);
    auto inv = parse_weight_spec("invseries:N=3", &mu);
    CHECK(inv.eval(z, {0}) == doctest::Approx(16.0));
    CHECK(1.0 / inv.eval(z, {1}) == doctest::Approx(0.513889).epsilon(1e-6));

    CHECK_THROWS_AS(parse_weight_spec("invseries:N=3"), config_error);
    CHECK_THROWS_AS(parse_weight_spec("poly:q=2"), config_error);
    CHECK_THROWS_AS(parse_weight_spec("exp:a=0.5"), config_error);
    CHECK_THROWS_AS(parse_weight_spec("gauss:1"), config_error);
}

TEST_CASE("report JSON round trip") {
    auto r = sample_report();
    auto text = emit_json(r, run_metadata(1));
    auto back = parse_report_text(text);
    CHECK(same_report(r, back));
    CHECK(emit_json(back) == emit_json(r));
    // the headline copy is checked against the first sequence
    auto j = nlohmann::json::parse(text);
    j["sequence"][0]["value"] = 42.0;
    CHECK_THROWS_AS(report_from_json(j), config_error);
    j.erase("sequence");
    CHECK_THROWS_AS(report_from_json(j), config_error);
}

TEST_CASE("report round trip on computed reports") {
    auto mu = sparse_measure::srw(group::free(2));
    estimator_config c;
    c.n_max = 12;
    for (const auto& r : {avez_entropy(mu, c), lyapunov_via_radius(mu, weight::exponential(std::exp(1.0)), c),
                          koopman_limit(mu, cylinder_measure::harmonic(2, 2))}) {
        CHECK(same_report(parse_report_text(emit_json(r)), r));
    }
}

TEST_CASE("CSV output") {
    auto r = sample_report();
    auto csv = sequence_csv(r.sequences.front());
    CHECK(count_lines(csv) == 6);
    CHECK(csv.rfind("index,value\n", 0) == 0);
    // every value survives a text round trip
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    size_t i = 0;
    while (std::getline(in, line)) {
        auto comma = line.find(',');
        CHECK(std::stod(line.substr(comma + 1)) == r.sequences.front()[i++].value);
    }
}

TEST_CASE("exact boundary values keep 15 significant digits") {
    auto fe = furstenberg_entropy(sparse_measure::srw(group::free(2)), cylinder_measure::harmonic(2, 3));
    estimate_report r;
    r.quantity = "furstenberg_entropy";
    r.estimate = fe.value;
    r.diagnostics["log_q_coefficient"] = fe.log_q_coefficient.str();
    asymptotic_sequence s("value");
    s.push(3, fe.value);
    r.sequences.push_back(s);
    auto text = emit_json(r);
    std::smatch m;
    REQUIRE(std::regex_search(text, m, std::regex("\"estimate\": ([0-9.eE+-]+)")));
    std::string digits;
    for (char ch : m[1].str())
        if (std::isdigit(static_cast<unsigned char>(ch))) digits += ch;
    digits.erase(0, digits.find_first_not_of('0'));
    CHECK(digits.size() >= 15);
    double exact = static_cast<double>(fe.log_q_coefficient) * std::log(3.0);
    CHECK(std::stod(m[1].str()) == exact);
    CHECK(parse_report_text(text).diagnostics["log_q_coefficient"] == "1/2");
    CHECK(format_value(exact).size() >= 17);
}
