#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <sstream>

#include "rwlab/cli.hpp"
#include "rwlab/report.hpp"
#include "rwlab/specs.hpp"

using namespace rwlab;
using nlohmann::json;

namespace {

struct run_result {
    int code;
    std::string out;
    std::string err;
};

run_result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

json strip_metadata(const std::string& text) {
    auto j = json::parse(text);
    j.erase("metadata");
    return j;
}

}  // namespace

TEST_CASE("entropy example") {
    auto r = run({"entropy", "--group", "free:2", "--measure", "preset:srw", "--nmax", "12", "--seed", "7"});
    REQUIRE(r.code == 0);
    auto j = json::parse(r.out);
    CHECK(j["estimate"].get<double>() == doctest::Approx(0.5493).epsilon(0.05));
    CHECK(j["sequence"].size() == 12);
    CHECK(j["seed"] == 7);
    CHECK(j["metadata"]["units"] == "nats");
    CHECK(j.contains("lower"));
    CHECK(j.contains("upper"));
}

TEST_CASE("boundary example") {
    auto r = run({"boundary", "--k", "2", "--quantity", "furstenberg", "--depth", "3"});
    REQUIRE(r.code == 0);
    auto j = json::parse(r.out);
    CHECK(j["estimate"].get<double>() == doctest::Approx(0.549306).epsilon(1e-6));
    CHECK(j["diagnostics"]["log_q_coefficient"] == "1/2");
}

TEST_CASE("verify example") {
    auto r = run({"verify", "--suite", "all", "--seed", "7"});
    CHECK(r.code == 0);
    auto j = json::parse(r.out);
    CHECK(j["estimate"].get<double>() == 0.0);
    CHECK(j["diagnostics"]["total"].get<int>() > 20);
    CHECK(run({"verify", "--suite", "all"}).code == 2);  // seed is mandatory
    CHECK(run({"verify", "--suite", "nonsense", "--seed", "1"}).code == 2);
}

TEST_CASE("identical config and seed give identical JSON") {
    std::vector<std::vector<std::string>> cmds{
        {"entropy", "--nmax", "40", "--mc-paths", "300", "--mc-n", "40", "--seed", "5"},
        {"lyapunov", "--weight", "exp:a=2", "--route", "both", "--nmax", "60"},
        {"conv-entropy", "--nmax", "40"},
        {"dlvp", "--power", "3"},
        {"verify", "--suite", "boundary", "--seed", "9"},
    };
    for (const auto& c : cmds) {
        auto a = run(c), b = run(c);
        REQUIRE(a.code == 0);
        CHECK(strip_metadata(a.out) == strip_metadata(b.out));
        auto na = c, nb = c;
        na.push_back("--no-metadata");
        CHECK(run(na).out == run(na).out);
    }
    // parallelism degree does not change the result
    auto one = run({"entropy", "--nmax", "30", "--mc-paths", "400", "--mc-n", "30", "--seed", "5", "--threads", "1", "--no-metadata"});
    auto two = run({"entropy", "--nmax", "30", "--mc-paths", "400", "--mc-n", "30", "--seed", "5", "--threads", "3", "--no-metadata"});
    CHECK(one.out == two.out);
}

TEST_CASE("errors are JSON with category exit codes") {
    auto unknown = run({"entropy", "--bogus"});
    CHECK(unknown.code == 2);
    CHECK(json::parse(unknown.out)["error"]["category"] == "config");
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"entropy", "--measure", "preset:nothing"}).code == 2);
    CHECK(run({"lyapunov", "--weight", "poly:d=-1"}).code == 2);
    CHECK(run({"entropy", "--mc-paths", "10"}).code == 2);
    // infinite series weight outside its support
    auto dom = run({"lyapunov", "--group", "abelian:1", "--weight", "invseries:N=2", "--nmax", "5"});
    CHECK(dom.code == 4);
    CHECK(json::parse(dom.out)["error"]["category"] == "domain");
    auto res = run({"boundary", "--k", "2", "--depth", "13"});
    CHECK(res.code == 3);
    CHECK(run({"report", "--input", "/nonexistent/report.json"}).code == 5);
    CHECK(run({"entropy", "--output", "/nonexistent/dir/out.json", "--nmax", "3"}).code == 5);
    CHECK(run({"spectral-radius", "--space", "pfq-upper", "--group", "lamplighter:1", "--q", "2", "--nmax", "4"}).code == 4);
}

TEST_CASE("every subcommand has help") {
    for (const char* sub : {"entropy", "lyapunov", "weighted-entropy", "conv-entropy", "spectral-radius", "inequalities",
                            "boundary", "dlvp", "verify", "report"}) {
        auto r = run({sub, "--help"});
        CHECK(r.code == 0);
        CHECK(r.out.find("Usage") != std::string::npos);
    }
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("CSV output and the report subcommand") {
    auto csv = run({"entropy", "--nmax", "5", "--format", "csv"});
    REQUIRE(csv.code == 0);
    CHECK(std::count(csv.out.begin(), csv.out.end(), '\n') == 6);
    CHECK(csv.out.rfind("index,value\n", 0) == 0);
    auto named = run({"entropy", "--nmax", "5", "--format", "csv", "--sequence", "quotient"});
    CHECK(named.out != csv.out);
    CHECK(run({"entropy", "--nmax", "5", "--format", "csv", "--sequence", "missing"}).code == 4);

    const std::string path = "rwlab_cli_report.json";
    auto saved = run({"lyapunov", "--weight", "poly:d=1", "--nmax", "50", "--output", path});
    REQUIRE(saved.code == 0);
    CHECK(saved.out.empty());
    auto again = run({"report", "--input", path});
    REQUIRE(again.code == 0);
    auto original = json::parse(read_text_file(path));
    CHECK(json::parse(again.out) == original);
    CHECK(same_report(parse_report_text(again.out), parse_report_text(read_text_file(path))));
    auto as_csv = run({"report", "--input", path, "--format", "csv"});
    CHECK(std::count(as_csv.out.begin(), as_csv.out.end(), '\n') == 51);
    write_text_file(path, "{\"quantity\": 1}");
    CHECK(run({"report", "--input", path}).code == 2);
    std::remove(path.c_str());
}

TEST_CASE("remaining subcommands produce reports") {
    std::vector<std::vector<std::string>> cmds{
        {"weighted-entropy", "--weight", "poly:d=1", "--nmax", "50"},
        {"weighted-entropy", "--weight", "const:2*exp:a=1.5", "--limit", "shannon"},
        {"spectral-radius", "--space", "pf2", "--nmax", "200"},
        {"spectral-radius", "--space", "pfq-lower", "--q", "3", "--nmax", "100"},
        {"spectral-radius", "--space", "l1w", "--weight", "exp:a=2", "--p", "2", "--group", "abelian:1", "--nmax", "50"},
        {"inequalities", "--weight", "exp:a=2", "--nmax", "100"},
        {"boundary", "--k", "3", "--quantity", "xi", "--depth", "3", "--word", "abC"},
        {"boundary", "--quantity", "koopman", "--p", "3", "--depth", "2"},
        {"boundary", "--quantity", "xi-limit", "--nmax", "100"},
        {"dlvp", "--group", "abelian:1", "--f", "L", "--grid", "20"},
    };
    for (const auto& c : cmds) {
        auto r = run(c);
        INFO(c.front());
        REQUIRE(r.code == 0);
        auto j = json::parse(r.out);
        CHECK(std::isfinite(number_from_json(j["estimate"])));
        CHECK(!j["sequences"].empty());
    }
}
