#pragma once
// Built-in ODE families. Each entry bundles the right side phi(u, u1) with
// everything known about it in closed form: conserved quantities, a
// Lagrangian when one is recorded, reference curvature profiles, sampling
// regions on which those references are numerically trustworthy, and a set
// of initial conditions for trajectory checks. Entries are instantiated by
// name with optional parameter overrides; two of them additionally accept a
// user-supplied coefficient expression (a density, or a factor multiplying
// u1).

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "jetflow/dynamics.hpp"
#include "jetflow/expr.hpp"
#include "jetflow/jet.hpp"
#include "jetflow/region.hpp"

namespace jetflow {

// Expected curvature values at a chart point; a component is absent when the
// entry records no closed form for it.
struct CurvatureReference {
    std::optional<double> r1212;
    std::optional<double> r1313;
    std::optional<double> r2323;
};

struct RegistryEntry {
    std::string name;
    std::string summary;

    OdeRhs ode;
    ParamMap params; // resolved values, derived ones included

    // Conserved quantity as an expression over (u, u1), when closed.
    std::optional<BoundExpr> energy;
    // Second conserved form on a different scale (the damped family keeps
    // both an exponential-weighted and a logarithmic variant).
    std::optional<BoundExpr> energy_alt;
    // Closed-form Lagrangian, when recorded.
    std::optional<BoundExpr> lagrangian;

    // Conserved quantity as a plain function; always set when any conserved
    // form is known, including families where it needs quadrature.
    std::function<double(double, double)> first_integral;

    // Closed-form curvature and leaf-curvature profiles.
    std::function<CurvatureReference(double, double)> reference_curvatures;
    std::function<double(double, double)> reference_leaf_curvature;

    // Where sweeps are safe: documented covers value-level checks, the
    // structural subset keeps enough margin for finite-difference stencils
    // and stays clear of domain edges.
    Region documented_region;
    Region structural_region;

    // Starting points (x = 0) and integration span for trajectory checks.
    std::vector<JetPoint> initial_conditions;
    double horizon = 0.0;
};

// Optional expression inputs consumed by specific entries: "kfamily" reads
// coefficient (an expression in u multiplying u1), "gravity" reads density
// (an expression in u; empty means the uniform-density closed form).
struct ExtraSources {
    std::string coefficient;
    std::string density;
};

// Names of the built-in entries, in catalog order.
const std::vector<std::string>& entry_names();

// Builds an entry by name. Overrides replace default parameter values;
// unknown names, values breaking an entry's constraints, or overriding a
// derived parameter all throw ConstraintViolation. Unknown entry names
// throw UnknownEntry.
RegistryEntry instantiate(const std::string& name, const ParamMap& overrides = {},
                          const ExtraSources& extra = {});

// JSON catalog of all entries: parameters with defaults, closed forms,
// regions, constraints. Rendered with the bundled JSON library.
std::string describe_entries();

// Analytic curve x -> x + e^x together with the jet data the residual
// checks need. For the entry with phi = u1 this curve is an exact geodesic
// whose prolongation defect is identically -1: it witnesses that geodesics
// need not come from solutions when the transversality indicator vanishes.
AnalyticCurve tangent_geodesic_counterexample();

} // namespace jetflow
