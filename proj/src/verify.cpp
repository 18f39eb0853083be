#include "jetflow/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "jetflow/dynamics.hpp"
#include "jetflow/energy.hpp"
#include "jetflow/errors.hpp"
#include "jetflow/geometry.hpp"
#include "jetflow/lagrangian.hpp"

namespace jetflow {

namespace {

constexpr unsigned kSampleSeed = 2718u;

// Each check body returns the measured value; the wrapper attaches the
// verdict and converts thrown errors into failed checks so one bad entry
// cannot abort the battery.
template <typename Fn>
CheckResult run_check(const std::string& name, double bound, Fn&& body) {
    CheckResult r;
    r.name = name;
    r.bound = bound;
    try {
        r.measured = body(r);
        r.pass = r.skipped || r.measured <= bound;
    } catch (const Error& e) {
        r.pass = false;
        r.note = e.what();
        r.measured = std::numeric_limits<double>::quiet_NaN();
    }
    return r;
}

double rel_gap(double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

VerifyReport verify_entry(const RegistryEntry& entry) {
    VerifyReport report;
    report.entry = entry.name;
    const OdeRhs& ode = entry.ode;
    const auto documented = entry.documented_region.grid(20, 20);
    const auto structural = entry.structural_region.grid(20, 20);

    report.checks.push_back(run_check("metric_identity", 1e-12, [&](CheckResult& c) {
        double worst = 0.0;
        for (const auto& [u, u1] : documented) {
            const Mat3 g = metric_at(ode, {0.0, u, u1});
            worst = std::max(worst, std::abs(g.determinant() - 1.0));
            if (!metric_positive_definite(g)) {
                c.note = "not positive definite at u=" + format_value(u) +
                         " u1=" + format_value(u1);
                return std::numeric_limits<double>::infinity();
            }
        }
        return worst;
    }));

    report.checks.push_back(run_check("frame_duality", 1e-12, [&](CheckResult&) {
        double worst = 0.0;
        for (const auto& [u, u1] : documented) {
            const JetPoint p{0.0, u, u1};
            const Mat3 g = metric_at(ode, p);
            const Frame f = frame_at(ode, p);
            worst = std::max(worst, orthonormality_defect(g, f));
            worst = std::max(worst, duality_defect(f));
        }
        return worst;
    }));

    report.checks.push_back(run_check("curvature_reference", 1e-10, [&](CheckResult& c) {
        if (!entry.reference_curvatures) {
            c.skipped = true;
            c.note = "entry records no curvature profile";
            return 0.0;
        }
        double worst = 0.0;
        for (const auto& [u, u1] : structural) {
            const CurvTriple got = sectional_curvatures(ode, {0.0, u, u1});
            const CurvatureReference want = entry.reference_curvatures(u, u1);
            if (want.r1212) worst = std::max(worst, rel_gap(got.r1212, *want.r1212));
            if (want.r1313) worst = std::max(worst, rel_gap(got.r1313, *want.r1313));
            if (want.r2323) worst = std::max(worst, rel_gap(got.r2323, *want.r2323));
        }
        return worst;
    }));

    report.checks.push_back(run_check("leaf_geometry", 1e-10, [&](CheckResult&) {
        double worst = 0.0;
        for (const auto& [u, u1] : structural) {
            const LeafGeometry lg = leaf_geometry(ode, {0.0, u, u1});
            worst = std::max(worst, std::abs(lg.mean_curvature));
            worst = std::max(worst, std::abs(lg.k_ext + 0.25));
            worst = std::max(worst, lg.gauss_gap);
            if (entry.reference_leaf_curvature)
                worst = std::max(worst, rel_gap(lg.k_int, entry.reference_leaf_curvature(u, u1)));
        }
        return worst;
    }));

    const auto cartan_points = entry.structural_region.sample(50, kSampleSeed);

    report.checks.push_back(run_check("cartan_structure", 1e-6, [&](CheckResult&) {
        double worst = 0.0;
        for (const auto& [u, u1] : cartan_points)
            worst = std::max(worst, cartan_residuals(ode, {0.0, u, u1}).max_structure());
        return worst;
    }));

    report.checks.push_back(run_check("cartan_curvature", 1e-5, [&](CheckResult&) {
        double worst = 0.0;
        for (const auto& [u, u1] : cartan_points)
            worst = std::max(worst, cartan_residuals(ode, {0.0, u, u1}).max_curvature());
        return worst;
    }));

    // Trajectory checks share the integrated curves.
    std::vector<Curve> curves;
    std::string integration_failure;
    try {
        for (const JetPoint& ic : entry.initial_conditions)
            curves.push_back(integrate_solution(ode, ic, ic.x + entry.horizon));
    } catch (const Error& e) {
        integration_failure = e.what();
    }

    report.checks.push_back(run_check("solution_residual", 1e-7, [&](CheckResult& c) {
        if (!integration_failure.empty()) {
            c.note = integration_failure;
            return std::numeric_limits<double>::infinity();
        }
        double worst = 0.0;
        for (const Curve& curve : curves)
            for (const CurveSample& s : curve.samples)
                if (s.residual.allFinite())
                    worst = std::max(worst, s.residual.cwiseAbs().maxCoeff());
        return worst;
    }));

    const double conservation_bound = entry.name == "kfamily" ? 1e-9 : 1e-8;
    report.checks.push_back(run_check("conservation", conservation_bound, [&](CheckResult& c) {
        if (!entry.first_integral) {
            c.skipped = true;
            c.note = "entry records no first integral";
            return 0.0;
        }
        if (!integration_failure.empty()) {
            c.note = integration_failure;
            return std::numeric_limits<double>::infinity();
        }
        double worst = 0.0;
        for (const Curve& curve : curves)
            worst = std::max(worst,
                             conservation_report(entry.first_integral, curve).max_relative_drift);
        return worst;
    }));

    report.checks.push_back(run_check("energy_pde", 1e-9, [&](CheckResult& c) {
        if (!entry.energy) {
            c.skipped = true;
            c.note = "entry records no closed energy";
            return 0.0;
        }
        double worst =
            check_energy_candidate(ode, *entry.energy, entry.documented_region).max_scaled_residual;
        if (entry.energy_alt)
            worst = std::max(worst, check_energy_candidate(ode, *entry.energy_alt,
                                                           entry.documented_region)
                                        .max_scaled_residual);
        return worst;
    }));

    report.checks.push_back(run_check("leaf_trace", 1e-8, [&](CheckResult& c) {
        if (!entry.first_integral) {
            c.skipped = true;
            c.note = "entry records no first integral";
            return 0.0;
        }
        const Region& r = entry.structural_region;
        const double u_from = (r.u_min + r.u_max) / 2.0;
        const double u1_from = r.u1_min + 0.9 * (r.u1_max - r.u1_min);
        const double u_to = u_from - 0.5 * entry.horizon;
        const LeafTrace trace = trace_leaf(ode, u_from, u1_from, u_to);
        if (!trace.reached) {
            c.note = "leaf folded at u = " + format_value(trace.u_stop);
            return std::numeric_limits<double>::infinity();
        }
        const double f0 = entry.first_integral(u_from, u1_from);
        const double f1 = entry.first_integral(trace.points.back()[0], trace.points.back()[1]);
        return std::abs(f1 - f0) / std::max(1.0, std::abs(f0));
    }));

    report.checks.push_back(run_check("quadrature_identity", 1e-10, [&](CheckResult& c) {
        if (!entry.energy) {
            c.skipped = true;
            c.note = "entry records no closed energy";
            return 0.0;
        }
        const Region& r = entry.structural_region;
        const auto model = LagrangianModel::from_energy(*entry.energy, r.u1_min);
        double worst = 0.0;
        for (const auto& [u, u1] : r.sample(100, kSampleSeed))
            worst = std::max(worst,
                             std::abs(model.energy_function(u, u1) - entry.energy->value(u, u1)));
        return worst;
    }));

    report.checks.push_back(run_check("el_closed", 1e-7, [&](CheckResult& c) {
        if (!entry.lagrangian) {
            c.skipped = true;
            c.note = "entry records no closed Lagrangian";
            return 0.0;
        }
        const auto model = LagrangianModel::closed_form(*entry.lagrangian);
        double worst = 0.0;
        for (const auto& [u, u1] : structural)
            worst = std::max(worst, std::abs(el_residual_at(ode, model, u, u1)));
        return worst;
    }));

    report.checks.push_back(run_check("el_quadrature", 1e-6, [&](CheckResult& c) {
        if (!entry.energy) {
            c.skipped = true;
            c.note = "entry records no closed energy";
            return 0.0;
        }
        const Region& r = entry.structural_region;
        const auto model = LagrangianModel::from_energy(*entry.energy, r.u1_min);
        double worst = 0.0;
        for (const auto& [u, u1] : r.grid(12, 12))
            worst = std::max(worst, std::abs(el_residual_at(ode, model, u, u1)));
        return worst;
    }));

    report.checks.push_back(run_check("multiplier_exactness", 1e-6, [&](CheckResult& c) {
        if (!entry.lagrangian && !entry.energy) {
            c.skipped = true;
            c.note = "entry records neither Lagrangian nor energy";
            return 0.0;
        }
        const LagrangianModel model =
            entry.lagrangian
                ? LagrangianModel::closed_form(*entry.lagrangian)
                : LagrangianModel::from_energy(*entry.energy, entry.structural_region.u1_min);
        const auto r = multiplier_exactness_check(ode, model, entry.structural_region, 12, 12);
        c.note = "min|mu|=" + format_value(r.min_abs_mu);
        return r.max_gap;
    }));

    // Informational: classifies the family, never gates.
    report.checks.push_back(run_check("transversality", std::numeric_limits<double>::infinity(),
                                      [&](CheckResult& c) {
        double worst = 0.0;
        for (const auto& [u, u1] : structural)
            worst = std::max(worst, std::abs(transversality_indicator(ode, {0.0, u, u1})));
        c.note = worst <= 1e-12
                     ? "identically zero: geodesics need not prolong solutions here"
                     : "nonvanishing: geodesic and solution curves coincide";
        return worst;
    }));

    return report;
}

void print_report(std::ostream& out, const VerifyReport& report) {
    for (const CheckResult& c : report.checks) {
        const char* verdict = c.skipped ? "SKIP" : (c.pass ? "PASS" : "FAIL");
        out << verdict << ' ' << report.entry << '/' << c.name
            << " measured=" << format_value(c.measured) << " bound=" << format_value(c.bound);
        if (!c.note.empty()) out << " (" << c.note << ')';
        out << '\n';
    }
}

} // namespace jetflow
