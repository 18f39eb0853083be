#pragma once
// First integrals of u'' = phi(u, u1) and the foliation they induce. A
// function E(u, u1) is constant on solutions exactly when u1 E_u + phi E_u1
// vanishes; its level sets project to characteristic curves in the (u, u1)
// plane, which can be traced numerically to transport values between
// sections u = const.

#include <array>
#include <functional>
#include <vector>

#include "jetflow/dynamics.hpp"
#include "jetflow/expr.hpp"
#include "jetflow/jet.hpp"
#include "jetflow/region.hpp"

namespace jetflow {

struct EnergyCheckReport {
    double max_scaled_residual = 0.0; // max |u1 E_u + phi E_u1|
    double max_residual = 0.0;        // max |E_u + (phi/u1) E_u1|
    double min_abs_mu = 0.0;          // min |E_u1|: coefficient of the leaf form
    int points = 0;                   // points where both E and phi evaluated
    int skipped = 0;                  // points outside either domain
};

// Grid sweep of the first-integral condition over a region.
EnergyCheckReport check_energy_candidate(const OdeRhs& ode, const BoundExpr& energy,
                                         const Region& region, int nu = 20, int nu1 = 20);

struct LeafTraceOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int samples = 101;
    long max_steps = 200000;
};

struct LeafTrace {
    std::vector<std::array<double, 2>> points; // (u, u1) along the characteristic
    bool reached = false;                      // made it to the target section
    double u_stop = 0.0;                       // where the trace actually ended
    bool fold = false;                         // halted because u1 fell toward 0
};

// Follows du1/du = phi/u1 from (u_from, u1_from) toward the section
// u = u_to. Folds (u1 -> 0, where the leaf turns back in u) end the trace
// early; a start point already inside the fold-resolution band throws
// SingularCrossing.
LeafTrace trace_leaf(const OdeRhs& ode, double u_from, double u1_from, double u_to,
                     const LeafTraceOptions& opts = {});

// u1-coordinate of the intersection of the leaf through p with the section
// u = u_ref. Throws NotReachable when the leaf folds before the section.
double energy_label(const OdeRhs& ode, const JetPoint& p, double u_ref,
                    const LeafTraceOptions& opts = {});

using ScalarField = std::function<double(double u, double u1)>;

ScalarField scalar_field(const BoundExpr& e);

struct ConservationReport {
    double initial = 0.0;
    double max_drift = 0.0;          // max |F - F(start)| over the samples
    double max_relative_drift = 0.0; // drift / max(1, |F(start)|)
    int samples = 0;
};

// Drift of a scalar field along an integrated curve.
ConservationReport conservation_report(const ScalarField& field, const Curve& curve);

// Width of the u1-band around a fold that double precision cannot resolve
// when marching in u: near a fold u1 ~ sqrt(2|phi| (u_fold - u)), so a u1
// below this threshold corresponds to a u-gap under one representable step.
double fold_threshold(const OdeRhs& ode, double u, double u1);

} // namespace jetflow
