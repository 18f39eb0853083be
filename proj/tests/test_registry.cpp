#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "json.hpp"

#include "jetflow/dynamics.hpp"
#include "jetflow/energy.hpp"
#include "jetflow/errors.hpp"
#include "jetflow/geometry.hpp"
#include "jetflow/registry.hpp"

using namespace jetflow;

namespace {

// Worst relative mismatch between an entry's recorded curvature profile and
// the values computed from the metric machinery, over the structural region.
double curvature_profile_gap(const RegistryEntry& e, int nu = 6, int nu1 = 6) {
    double worst = 0.0;
    for (const auto& [u, u1] : e.structural_region.grid(nu, nu1)) {
        const CurvTriple got = sectional_curvatures(e.ode, {0.0, u, u1});
        const CurvatureReference want = e.reference_curvatures(u, u1);
        const auto gap = [](double a, double b) {
            return std::abs(a - b) / std::max(1.0, std::abs(b));
        };
        if (want.r1212) worst = std::max(worst, gap(got.r1212, *want.r1212));
        if (want.r1313) worst = std::max(worst, gap(got.r1313, *want.r1313));
        if (want.r2323) worst = std::max(worst, gap(got.r2323, *want.r2323));
    }
    return worst;
}

double leaf_profile_gap(const RegistryEntry& e, int nu = 6, int nu1 = 6) {
    double worst = 0.0;
    for (const auto& [u, u1] : e.structural_region.grid(nu, nu1)) {
        const LeafGeometry lg = leaf_geometry(e.ode, {0.0, u, u1});
        const double want = e.reference_leaf_curvature(u, u1);
        worst = std::max(worst, std::abs(lg.k_int - want) / std::max(1.0, std::abs(want)));
    }
    return worst;
}

} // namespace

TEST_CASE("catalog lists the five families in order") {
    const auto& names = entry_names();
    REQUIRE(names.size() == 5);
    CHECK(names[0] == "kappa");
    CHECK(names[1] == "kzero");
    CHECK(names[2] == "damped");
    CHECK(names[3] == "gravity");
    CHECK(names[4] == "kfamily");
    for (const auto& n : names) CHECK(instantiate(n).name == n);
    CHECK_THROWS_AS(instantiate("nosuch"), UnknownEntry);
}

TEST_CASE("curvature profiles match the computed geometry") {
    CHECK(curvature_profile_gap(instantiate("kappa")) <= 1e-10);
    CHECK(curvature_profile_gap(instantiate("kappa", {{"kappa", 2.0}})) <= 1e-10);
    CHECK(curvature_profile_gap(instantiate("kappa", {{"kappa", -0.5}})) <= 1e-10);
    CHECK(curvature_profile_gap(instantiate("kzero")) <= 1e-10);
    CHECK(curvature_profile_gap(instantiate("damped")) <= 1e-10);
    CHECK(curvature_profile_gap(instantiate("gravity")) <= 1e-10);
    CHECK(curvature_profile_gap(instantiate("kfamily")) <= 1e-10);
}

TEST_CASE("leaf curvature profiles match the computed geometry") {
    CHECK(leaf_profile_gap(instantiate("kappa")) <= 1e-10);
    CHECK(leaf_profile_gap(instantiate("kzero")) <= 1e-10);
    CHECK(leaf_profile_gap(instantiate("damped")) <= 1e-10);
    CHECK(leaf_profile_gap(instantiate("gravity")) <= 1e-10);
    CHECK(leaf_profile_gap(instantiate("kfamily")) <= 1e-10);
}

TEST_CASE("frozen curvature values at reference points") {
    auto kappa = instantiate("kappa");
    const CurvatureReference k = kappa.reference_curvatures(0.0, 0.5);
    CHECK(*k.r1212 == doctest::Approx(1.25).epsilon(1e-14));
    CHECK(*k.r1313 == doctest::Approx(-8.75).epsilon(1e-14));
    CHECK(*k.r2323 == doctest::Approx(-43.75).epsilon(1e-14));

    // Default gravity parameters make the right side exactly -u.
    auto gravity = instantiate("gravity");
    CHECK(gravity.ode.phi(0.7, 1.0) == doctest::Approx(-0.7).epsilon(1e-12));
    const CurvatureReference g = gravity.reference_curvatures(0.5, 1.0);
    CHECK(*g.r1212 == doctest::Approx(1.25).epsilon(1e-12));
    CHECK(*g.r1313 == doctest::Approx(-2.25).epsilon(1e-12));
    CHECK(*g.r2323 == doctest::Approx(-1.25).epsilon(1e-12));
}

TEST_CASE("closed energies satisfy the invariance condition on their regions") {
    for (const std::string& name : entry_names()) {
        RegistryEntry e = instantiate(name);
        if (!e.energy) continue;
        auto report = check_energy_candidate(e.ode, *e.energy, e.documented_region);
        CHECK(report.max_scaled_residual <= 1e-9);
        CHECK(report.skipped == 0);
    }
    auto damped = instantiate("damped");
    REQUIRE(damped.energy_alt.has_value());
    auto report = check_energy_candidate(damped.ode, *damped.energy_alt, damped.documented_region);
    CHECK(report.max_scaled_residual <= 1e-9);
}

TEST_CASE("first integrals hold along integrated trajectories") {
    for (const std::string& name : entry_names()) {
        RegistryEntry e = instantiate(name);
        REQUIRE(e.first_integral);
        const JetPoint start = e.initial_conditions.front();
        Curve curve = integrate_solution(e.ode, start, e.horizon);
        auto report = conservation_report(e.first_integral, curve);
        CHECK(report.max_relative_drift <= 1e-9);
    }
}

TEST_CASE("parameter handling") {
    SUBCASE("kappa") {
        CHECK_THROWS_AS(instantiate("kappa", {{"kappa", 0.0}}), ConstraintViolation);
        CHECK_THROWS_AS(instantiate("kappa", {{"mu", 1.0}}), ConstraintViolation);
        auto e = instantiate("kappa", {{"kappa", 4.0}});
        // u1 window contracts as 1/sqrt(kappa)
        CHECK(e.structural_region.u1_max == doctest::Approx(0.425).epsilon(1e-12));
        CHECK(e.horizon == doctest::Approx(0.175).epsilon(1e-12));
    }
    SUBCASE("damped") {
        CHECK_THROWS_AS(instantiate("damped", {{"lambda", 0.0}}), ConstraintViolation);
        CHECK_THROWS_AS(instantiate("damped", {{"alpha", -0.1}}), ConstraintViolation);
        CHECK_THROWS_AS(instantiate("damped", {{"alpha", 3.0}}), ConstraintViolation);
        CHECK_THROWS_AS(instantiate("damped", {{"omega", 1.0}}), ConstraintViolation);
        auto e = instantiate("damped", {{"alpha", 0.4}, {"lambda", 2.0}});
        CHECK(e.params.at("omega") ==
              doctest::Approx(std::sqrt(8.0 - 0.16) / 2.0).epsilon(1e-14));
    }
    SUBCASE("kzero accepts nothing") {
        CHECK_THROWS_AS(instantiate("kzero", {{"kappa", 1.0}}), ConstraintViolation);
    }
    SUBCASE("expression slots are entry-specific") {
        ExtraSources k{"2*u", ""};
        ExtraSources rho{"", "1"};
        CHECK_THROWS_AS(instantiate("kappa", {}, k), ConstraintViolation);
        CHECK_THROWS_AS(instantiate("kfamily", {}, rho), ConstraintViolation);
    }
}

TEST_CASE("coefficient expressions drive the linear family") {
    ExtraSources extra{"2*u", ""};
    auto e = instantiate("kfamily", {}, extra);
    CHECK(e.ode.phi(0.3, 0.7) == doctest::Approx(0.42).epsilon(1e-14));

    // first integral u1 - u^2 for K = 2u
    CHECK(e.first_integral(0.5, 1.0) == doctest::Approx(0.75).epsilon(1e-12));
    Curve curve = integrate_solution(e.ode, {0.0, 0.2, 0.5}, 0.5);
    auto report = conservation_report(e.first_integral, curve);
    CHECK(report.max_relative_drift <= 1e-9);

    // profile picks up the coefficient derivative through its jet
    CHECK(curvature_profile_gap(e) <= 1e-10);
    const CurvatureReference r = e.reference_curvatures(0.5, 0.8);
    CHECK(*r.r1212 == doctest::Approx(0.25 - 0.8 * 2.0 - 1.0).epsilon(1e-14));

    SUBCASE("coefficient parameters need values") {
        ExtraSources with_param{"a*u", ""};
        CHECK_THROWS_AS(instantiate("kfamily", {}, with_param), ConstraintViolation);
        auto ok = instantiate("kfamily", {{"a", 3.0}}, with_param);
        CHECK(ok.ode.phi(0.5, 1.0) == doctest::Approx(1.5).epsilon(1e-14));
    }
}

TEST_CASE("density expressions drive the self-gravity entry by quadrature") {
    // rho = rho0 (1 + u^2) with default 4 pi G rho0 = 1:
    // potential gradient u + u^3/3, leaf curvature 1 + u^2.
    ExtraSources extra{"", "rho0*(1 + u^2)"};
    auto e = instantiate("gravity", {}, extra);
    CHECK(e.ode.phi(0.5, 1.0) ==
          doctest::Approx(-(0.5 + 0.125 / 3.0)).epsilon(1e-11));
    CHECK(e.reference_leaf_curvature(0.5, 1.0) == doctest::Approx(1.25).epsilon(1e-11));
    CHECK(e.first_integral(0.5, 1.0) ==
          doctest::Approx(0.5 + 0.125 + 0.0625 / 12.0).epsilon(1e-11));

    CHECK(curvature_profile_gap(e, 4, 4) <= 1e-9);

    Curve curve = integrate_solution(e.ode, {0.0, 0.2, 0.6}, 0.35);
    auto report = conservation_report(e.first_integral, curve);
    CHECK(report.max_relative_drift <= 1e-9);

    SUBCASE("negative or non-finite densities are refused") {
        CHECK_THROWS_AS(instantiate("gravity", {}, ExtraSources{"", "-(1)"}),
                        ConstraintViolation);
        CHECK_THROWS_AS(instantiate("gravity", {}, ExtraSources{"", "u"}), ConstraintViolation);
    }
    SUBCASE("density parameters need values") {
        CHECK_THROWS_AS(instantiate("gravity", {}, ExtraSources{"", "a + u^2"}),
                        ConstraintViolation);
        auto ok = instantiate("gravity", {{"a", 2.0}}, ExtraSources{"", "a + u^2"});
        CHECK(ok.ode.phi(0.0, 1.0) == doctest::Approx(0.0).epsilon(1e-14));
    }
}

TEST_CASE("exact geodesic whose prolongation solves nothing") {
    auto e = instantiate("kfamily");
    AnalyticCurve curve = tangent_geodesic_counterexample();

    std::vector<double> xs;
    for (int k = 0; k < 20; ++k) xs.push_back(2.0 * k / 19.0);
    const auto residuals = curve_residuals(e.ode, curve, xs);
    double worst = 0.0;
    for (const Vec3& r : residuals) worst = std::max(worst, r.cwiseAbs().maxCoeff());
    CHECK(worst <= 1e-12);

    for (double x : {0.0, 1.0, 2.0})
        CHECK(prolongation_defect(e.ode, curve(x)) == doctest::Approx(-1.0).epsilon(1e-14));

    // The directional derivative of phi/u1 across leaves vanishes for this
    // family, which is exactly what lets the example exist.
    for (const auto& [u, u1] : e.structural_region.sample(20, 5))
        CHECK(std::abs(transversality_indicator(e.ode, {0.0, u, u1})) <= 1e-14);
}

TEST_CASE("catalog serialization is complete and deterministic") {
    const std::string text = describe_entries();
    CHECK(text == describe_entries());

    const auto catalog = nlohmann::json::parse(text);
    REQUIRE(catalog.is_array());
    REQUIRE(catalog.size() == 5);
    CHECK(catalog[0]["name"] == "kappa");
    CHECK(catalog[0]["parameters"]["kappa"] == 1.0);
    CHECK(catalog[1]["energy"].is_string());
    CHECK(catalog[2]["energy_alt"].is_string());
    CHECK(catalog[3]["expression_slot"].is_string());
    CHECK(catalog[4]["lagrangian"].is_null());
    for (const auto& j : catalog) {
        CHECK(j["initial_conditions"].size() == 10);
        CHECK(j["documented_region"].contains("u1"));
        CHECK(j["horizon"].is_number());
    }
}
