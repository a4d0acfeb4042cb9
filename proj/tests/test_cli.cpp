// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "convexity/cli.hpp"

using convexity::cli::run_cli;
using nlohmann::json;

namespace {

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

CliResult run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(std::move(args), out, err);
    return CliResult{code, out.str(), err.str()};
}

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("convexity_test_" + name);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count_data_rows(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::size_t rows = 0;
    bool seen_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!seen_header) {
            seen_header = true;
            continue;
        }
        ++rows;
    }
    return rows;
}

} // namespace

TEST_CASE("pointwise emits the report as JSON") {
    const CliResult r = run({"pointwise", "--builtin", "h_cos", "--at", "0,0"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["conv"].get<double>() == 1.0);
    CHECK(j["loc"].get<double>() == 0.0);
    CHECK(j["degenerate"].get<bool>() == false);
    CHECK(j["point"].size() == 2);
    CHECK(j["eigenvalues"].size() == 2);
    CHECK(j.size() == 6);  // exactly the documented keys
}

TEST_CASE("pointwise accepts expressions with inferred dimension") {
    const CliResult r = run({"pointwise", "--fn", "x^2+y^2+z^2", "--at", "1,2,3"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["conv"].get<double>() == 1.0);
}

TEST_CASE("psd reads the matrix CSV format") {
    const auto path = temp_path("m.csv");
    {
        std::ofstream f(path);
        f << "3,0\n0,-1\n";
    }
    const CliResult r = run({"psd", "--matrix", path.string()});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["lops"].get<double>() == Catch::Approx(1.0).margin(1e-12));
    CHECK(j["nlops"].get<double>() == Catch::Approx(0.25).margin(1e-12));
    CHECK(j["ps"].get<double>() == Catch::Approx(0.75).margin(1e-12));
    CHECK(r.err.empty());

    SECTION("zero tolerance coarsens tiny eigenvalues") {
        {
            std::ofstream f(path);
            f << "-1e-14,0\n0,1\n";
        }
        const CliResult strict = run({"psd", "--matrix", path.string()});
        CHECK(json::parse(strict.out)["lops"].get<double>() > 0.0);
        const CliResult coarse =
            run({"psd", "--matrix", path.string(), "--zero-tol", "1e-12"});
        CHECK(json::parse(coarse.out)["lops"].get<double>() == 0.0);
    }
    SECTION("asymmetric input warns on stderr") {
        {
            std::ofstream f(path);
            f << "1,0.5\n0,1\n";
        }
        const CliResult w = run({"psd", "--matrix", path.string()});
        CHECK(w.code == 0);
        CHECK(w.err.find("warning") != std::string::npos);
    }
    std::filesystem::remove(path);
}

TEST_CASE("global on a square and on a box agree") {
    const CliResult a = run({"global", "--builtin", "h_cos", "--center", "0,0", "--a", "1",
                             "--grid", "51", "--format", "json"});
    REQUIRE(a.code == 0);
    CHECK(json::parse(a.out)["conv"].get<double>() == 1.0);
    const CliResult b = run({"global", "--builtin", "h_cos", "--lo", "-1,-1", "--hi", "1,1",
                             "--grid", "51", "--format", "json"});
    REQUIRE(b.code == 0);
    // the config echoes differ (square vs box form), the results must not
    const json ja = json::parse(a.out), jb = json::parse(b.out);
    CHECK(ja["conv"] == jb["conv"]);
    CHECK(ja["degenerate"] == jb["degenerate"]);
    CHECK(ja["degenerate_fraction"] == jb["degenerate_fraction"]);
}

TEST_CASE("increase runs the 1-D index") {
    const CliResult r = run({"increase", "--fn", "x^3", "--interval=-1,1", "--grid", "1001",
                             "--format", "json"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["value"].get<double>() == Catch::Approx(0.5).margin(1e-6));
    CHECK(j["degenerate"].get<bool>() == false);
    CHECK(j["effective_interval"].size() == 2);
}

TEST_CASE("sweep CSV has the documented schema") {
    const CliResult r = run({"sweep", "--builtin", "h_cos", "--center", "0,0", "--amax", "1.0",
                             "--steps", "5", "--grid", "31"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("a,conv,degenerate_fraction\n") != std::string::npos);
    CHECK(r.out.find("# command=sweep") != std::string::npos);
    CHECK(r.out.find("# seed=42") != std::string::npos);
    CHECK(count_data_rows(r.out) == 5);
}

TEST_CASE("map CSV round-trips with grid^2 rows") {
    const CliResult r = run({"map", "--builtin", "h_cos", "--lo", "-4,-4", "--hi", "4,4",
                             "--grid", "9"});
    REQUIRE(r.code == 0);
    CHECK(count_data_rows(r.out) == 81);
    std::istringstream in(r.out);
    std::string line;
    std::string header;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#') {
            header = line;
            break;
        }
    }
    CHECK(header == "x,y,lambda1,lambda2,loc,nloc,conv");

    SECTION("JSON mirror carries the same keys") {
        const CliResult j = run({"map", "--builtin", "h_cos", "--lo", "-4,-4", "--hi", "4,4",
                                 "--grid", "3", "--format", "json"});
        REQUIRE(j.code == 0);
        const json doc = json::parse(j.out);
        REQUIRE(doc["rows"].size() == 9);
        const json& row = doc["rows"][0];
        for (const char* key : {"x", "y", "lambda1", "lambda2", "loc", "nloc", "conv"})
            CHECK(row.contains(key));
    }
}

TEST_CASE("verify reports pass counts and honors the dim limit") {
    const CliResult r = run({"verify", "--trials", "5", "--seed", "7", "--dim", "2"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("distance_oracle: 5/5 pass") != std::string::npos);
    CHECK(r.out.find("trace_bound: 5/5 pass") != std::string::npos);

    const CliResult bad = run({"verify", "--dim", "4"});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("--dim") != std::string::npos);
}

TEST_CASE("risk-demo emits the sweep schema") {
    const CliResult r = run({"risk-demo", "--beta", "2", "--center", "0.25,0.75", "--amax",
                             "0.2", "--steps", "4", "--grid", "31"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("a,conv,degenerate_fraction\n") != std::string::npos);
    CHECK(count_data_rows(r.out) == 4);
}

TEST_CASE("JSON numbers round-trip exactly through the 17-digit format") {
    const CliResult r = run({"pointwise", "--builtin", "h_cos", "--at", "0.1,0.2"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    const convexity::ConvexityReport report = convexity::pointwise_indices(
        convexity::builtin("h_cos"), std::vector<double>{0.1, 0.2});
    CHECK(j["loc"].get<double>() == report.loc);
    CHECK(j["conv"].get<double>() == report.conv);
    CHECK(j["eigenvalues"][0].get<double>() == report.eigenvalues[0]);
}

TEST_CASE("identical flags and seed produce byte-identical files") {
    const auto p1 = temp_path("sweep1.csv");
    const auto p2 = temp_path("sweep2.csv");
    const CliResult a = run({"sweep", "--builtin", "h_cos", "--center", "0,0", "--amax", "2",
                             "--steps", "3", "--grid", "31", "--threads", "1", "--out",
                             p1.string()});
    const CliResult b = run({"sweep", "--builtin", "h_cos", "--center", "0,0", "--amax", "2",
                             "--steps", "3", "--grid", "31", "--threads", "3", "--out",
                             p2.string()});
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    const std::string bytes1 = slurp(p1), bytes2 = slurp(p2);
    CHECK(!bytes1.empty());
    CHECK(bytes1 == bytes2);
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);

    const CliResult v1 = run({"verify", "--trials", "3", "--seed", "9"});
    const CliResult v2 = run({"verify", "--trials", "3", "--seed", "9"});
    CHECK(v1.out == v2.out);
}

TEST_CASE("usage and domain errors use distinct exit codes") {
    CHECK(run({"pointwise", "--builtin", "h_cos"}).code == 1);          // missing --at
    CHECK(run({"pointwise", "--at", "0,0"}).code == 1);                 // no field source
    CHECK(run({"pointwise", "--builtin", "h_cos", "--fn", "x", "--at", "0,0"}).code == 1);
    CHECK(run({"nonsense"}).code == 1);
    CHECK(run({"sweep", "--builtin", "h_cos", "--center", "0,0", "--amax", "1", "--grid",
               "30"}).code == 1);                                        // even grid
    CHECK(run({"pointwise", "--builtin", "h_cos", "--at", "0,0,0"}).code == 1);  // dim mismatch
    CHECK(run({"pointwise", "--fn", "x^(", "--at", "1"}).code == 1);     // expression syntax
    CHECK(run({"psd", "--matrix", "/nonexistent/m.csv"}).code == 1);

    CHECK(run({"pointwise", "--fn", "log(x)", "--at=-1"}).code == 2);    // eval domain error
    const CliResult escape = run({"sweep", "--builtin", "h_beta", "--beta", "2", "--center",
                                  "0.25,0.25", "--amax", "0.4", "--steps", "4", "--grid", "11"});
    CHECK(escape.code == 2);                                             // square escapes domain
}

TEST_CASE("help exits cleanly") {
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"sweep", "--help"}).code == 0);
}
