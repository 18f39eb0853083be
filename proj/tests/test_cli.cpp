#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "jetflow/cli.hpp"

using nlohmann::json;

namespace {

struct RunResult {
    int code = 0;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = jetflow::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

} // namespace

TEST_CASE("usage errors exit with code 2 and say why") {
    CHECK(run_cli({}).code == 2);
    CHECK(run_cli({"analyze"}).code == 2); // --at is required
    CHECK(run_cli({"no-such-command"}).code == 2);

    auto both = run_cli({"analyze", "kappa", "--ode", "u", "--at", "0,0.5"});
    CHECK(both.code == 2);
    CHECK(both.err.find("not both") != std::string::npos);

    auto k_misuse = run_cli({"analyze", "--ode", "u", "--K", "1", "--at", "0,0.5"});
    CHECK(k_misuse.code == 2);
    CHECK(k_misuse.err.find("builtin entries only") != std::string::npos);

    auto bad_tuple = run_cli({"analyze", "kappa", "--at", "0.5"});
    CHECK(bad_tuple.code == 2);

    auto two_modes = run_cli({"energy", "kappa", "--check", "--label", "0,0.6,0.5"});
    CHECK(two_modes.code == 2);
    CHECK(two_modes.err.find("exactly one") != std::string::npos);

    auto no_region = run_cli({"curvature-map", "--ode", "-(u)"});
    CHECK(no_region.code == 2);
    CHECK(no_region.err.find("--region") != std::string::npos);

    auto custom_verify = run_cli({"verify", "--ode", "-(u)"});
    CHECK(custom_verify.code == 2);
}

TEST_CASE("runtime failures exit with code 3") {
    auto unknown = run_cli({"analyze", "nonexistent", "--at", "0,0.5"});
    CHECK(unknown.code == 3);
    CHECK(unknown.err.find("unknown builtin entry") != std::string::npos);

    auto bad_param = run_cli({"analyze", "damped", "--param", "omega=3", "--at", "0,0.5"});
    CHECK(bad_param.code == 3);
    CHECK(bad_param.err.find("constraint") != std::string::npos);

    auto off_chart = run_cli({"analyze", "kappa", "--at", "0,1e-6", "--eps-u1", "0.001"});
    CHECK(off_chart.code == 3);
    CHECK(off_chart.err.find("outside chart") != std::string::npos);
}

TEST_CASE("eps-u1 falls back to the environment variable") {
    setenv("JETFLOW_EPS_U1", "0.001", 1);
    CHECK(run_cli({"analyze", "kappa", "--at", "0,1e-6"}).code == 3);
    setenv("JETFLOW_EPS_U1", "banana", 1);
    CHECK(run_cli({"analyze", "kappa", "--at", "0,0.5"}).code == 2);
    unsetenv("JETFLOW_EPS_U1");
    CHECK(run_cli({"analyze", "kappa", "--at", "0,1e-6"}).code == 0);
}

TEST_CASE("list prints the JSON catalog") {
    auto r = run_cli({"list"});
    REQUIRE(r.code == 0);
    const json catalog = json::parse(r.out);
    REQUIRE(catalog.is_array());
    REQUIRE(catalog.size() == 5);
    CHECK(catalog[0]["name"] == "kappa");
    CHECK(catalog[1]["name"] == "kzero");
    CHECK(catalog[2]["name"] == "damped");
    CHECK(catalog[3]["name"] == "gravity");
    CHECK(catalog[4]["name"] == "kfamily");
    for (const auto& entry : catalog) {
        CHECK(entry.contains("ode"));
        CHECK(entry.contains("documented_region"));
        CHECK(entry.contains("structural_region"));
        CHECK(entry.contains("initial_conditions"));
    }
}

TEST_CASE("analyze reports the pointwise geometry") {
    auto r = run_cli({"analyze", "kappa", "--at", "0,0.5"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);

    CHECK(j["source"]["name"] == "kappa");
    CHECK(std::abs(j["det_gap"].get<double>()) <= 1e-12);
    CHECK(j["positive_definite"].get<bool>());

    CHECK(j["curvatures"]["r1212"].get<double>() == doctest::Approx(1.25).epsilon(1e-12));
    CHECK(j["curvatures"]["r1313"].get<double>() == doctest::Approx(-8.75).epsilon(1e-12));
    CHECK(j["curvatures"]["r2323"].get<double>() == doctest::Approx(-43.75).epsilon(1e-12));
    CHECK(j["reference_curvatures"]["r1212"].get<double>() ==
          doctest::Approx(1.25).epsilon(1e-12));

    CHECK(j["leaf"]["mean_curvature"].get<double>() == 0.0);
    CHECK(j["leaf"]["k_ext"].get<double>() == -0.25);
    CHECK(j["leaf"]["k_int"].get<double>() == doctest::Approx(1.0).epsilon(1e-10));

    // parameter overrides shift the curvature profile
    auto r2 = run_cli({"analyze", "kappa", "--param", "kappa=2", "--at", "0,0.5"});
    REQUIRE(r2.code == 0);
    const json j2 = json::parse(r2.out);
    CHECK(j2["curvatures"]["r1212"].get<double>() == doctest::Approx(2.25).epsilon(1e-12));

    // a custom right side gets the same treatment
    auto r3 = run_cli({"analyze", "--ode", "-(u)", "--at", "0.5,1"});
    REQUIRE(r3.code == 0);
    const json j3 = json::parse(r3.out);
    CHECK(j3["source"]["name"] == "custom");
    CHECK(j3["curvatures"]["r1212"].get<double>() == doctest::Approx(1.25).epsilon(1e-12));
    CHECK(j3["curvatures"]["r1313"].get<double>() == doctest::Approx(-2.25).epsilon(1e-12));
    CHECK(j3["curvatures"]["r2323"].get<double>() == doctest::Approx(-1.25).epsilon(1e-12));
}

TEST_CASE("geodesic writes sampled curves as CSV") {
    auto r = run_cli({"geodesic", "kappa", "--from", "0,0.6", "--until", "0.2", "--samples",
                      "51"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("t,x,u,u1,tangent_x,tangent_u,tangent_u1,res_e1,res_e2,res_e3\n", 0) == 0);
    CHECK(count_lines(r.out) == 52); // header + samples

    auto g = run_cli({"geodesic", "kappa", "--kind", "geodesic", "--from", "0,0.6", "--until",
                      "0.2", "--samples", "21"});
    REQUIRE(g.code == 0);
    CHECK(count_lines(g.out) == 22);

    auto bad = run_cli({"geodesic", "kappa", "--kind", "spiral", "--from", "0,0.6", "--until",
                        "0.2"});
    CHECK(bad.code == 2);
}

TEST_CASE("energy label transports a leaf to the reference section") {
    auto r = run_cli({"energy", "kappa", "--label", "0,0.6,0.5"});
    REQUIRE(r.code == 0);
    const double label = std::strtod(r.out.c_str(), nullptr);
    CHECK(label == doctest::Approx(std::sqrt(0.91)).epsilon(1e-8));
}

TEST_CASE("energy check accepts conserved candidates") {
    auto builtin = run_cli({"energy", "damped", "--check"});
    REQUIRE(builtin.code == 0);
    const json jb = json::parse(builtin.out);
    CHECK(jb["max_scaled_residual"].get<double>() <= 1e-9);
    CHECK(jb["points"].get<int>() > 0);

    auto custom = run_cli({"energy", "--ode", "-(u)", "--check", "--expr", "u^2 + u1^2",
                           "--region", "-0.5,0.5,0.3,1"});
    REQUIRE(custom.code == 0);
    const json jc = json::parse(custom.out);
    CHECK(jc["max_scaled_residual"].get<double>() <= 1e-12);

    auto wrong = run_cli({"energy", "--ode", "-(u)", "--check", "--expr", "u + u1", "--region",
                          "-0.5,0.5,0.3,1"});
    REQUIRE(wrong.code == 0);
    CHECK(json::parse(wrong.out)["max_scaled_residual"].get<double>() > 0.1);
}

TEST_CASE("energy conserve reports drift along a trajectory") {
    auto r = run_cli({"energy", "kappa", "--conserve"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["max_relative_drift"].get<double>() <= 1e-8);
    CHECK(j["samples"].get<int>() > 100);
}

TEST_CASE("energy trace follows a leaf and tabulates the first integral") {
    auto r = run_cli({"energy", "kappa", "--trace", "0,0.6,0.5"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("u,u1,first_integral\n", 0) == 0);
    // final row ends at the target section
    const auto last_start = r.out.find_last_of('\n', r.out.size() - 2);
    const std::string last = r.out.substr(last_start + 1);
    const double u_final = std::strtod(last.c_str(), nullptr);
    CHECK(u_final == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("lagrangian modes: grid, along, exactness") {
    auto grid = run_cli({"lagrangian", "kappa", "--grid", "--nu", "4", "--nu1", "4"});
    REQUIRE(grid.code == 0);
    CHECK(grid.out.rfind("u,u1,L,L_u,L_u1,energy,el_residual\n", 0) == 0);
    CHECK(count_lines(grid.out) == 17);

    auto along = run_cli({"lagrangian", "kappa", "--along", "0,0.5", "--until", "0.3"});
    REQUIRE(along.code == 0);
    CHECK(along.out.rfind("t,u,u1,el_residual\n", 0) == 0);

    auto exact = run_cli({"lagrangian", "kappa", "--exactness"});
    REQUIRE(exact.code == 0);
    const json j = json::parse(exact.out);
    CHECK(j["max_gap"].get<double>() <= 1e-6);
    CHECK(j["min_abs_mu"].get<double>() > 0.1);

    // rebuilding from a user-provided energy expression needs a base point
    auto no_base = run_cli({"lagrangian", "--ode", "-(u)", "--exactness", "--E", "u^2 + u1^2",
                            "--region", "0.2,0.8,0.4,1"});
    CHECK(no_base.code == 2);
    auto from_e = run_cli({"lagrangian", "--ode", "-(u)", "--exactness", "--E", "u^2 + u1^2",
                           "--base", "0.4", "--region", "0.2,0.8,0.4,1"});
    REQUIRE(from_e.code == 0);
    CHECK(json::parse(from_e.out)["max_gap"].get<double>() <= 1e-6);

    auto degenerate = run_cli({"lagrangian", "--ode", "-(u)", "--exactness", "--L", "u1",
                               "--region", "0.2,0.8,0.4,1"});
    CHECK(degenerate.code == 3);
    CHECK(degenerate.err.find("degenerate") != std::string::npos);
}

TEST_CASE("curvature-map tabulates the curvature triple over a grid") {
    auto r = run_cli({"curvature-map", "kzero", "--nu", "3", "--nu1", "3"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("u,u1,r1212,r1313,r2323,k_int\n", 0) == 0);
    CHECK(count_lines(r.out) == 10);

    std::istringstream rows(r.out);
    std::string line;
    std::getline(rows, line); // header
    while (std::getline(rows, line)) {
        // third column is r1212, which vanishes identically for this entry
        std::size_t pos = 0;
        for (int i = 0; i < 2; ++i) pos = line.find(',', pos) + 1;
        CHECK(std::abs(std::strtod(line.c_str() + pos, nullptr)) <= 1e-10);
    }
}

TEST_CASE("verify runs the battery and repeats byte for byte") {
    auto first = run_cli({"verify", "kzero"});
    REQUIRE(first.code == 0);
    CHECK(first.out.rfind("PASS kzero/metric_identity", 0) == 0);
    CHECK(first.out.find("\nOK\n") != std::string::npos);

    auto second = run_cli({"verify", "kzero"});
    CHECK(second.code == 0);
    CHECK(first.out == second.out);
}
