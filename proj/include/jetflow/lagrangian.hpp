#pragma once
// Variational descriptions of u'' = phi(u, u1). A Lagrangian here is a
// function L(u, u1) whose Euler-Lagrange equation, restricted to the chart
// u1 != 0, is equivalent to the ODE. Two sources are supported:
//
//   * a closed-form expression supplied directly, and
//   * reconstruction by quadrature from a conserved energy E(u, u1):
//
//         L(u, u1) = u1 * integral from b to u1 of E(u, s)/s^2 ds
//
//     with a fixed nonzero base point b of the same sign as u1. By
//     construction u1 L_u1 - L = E, and the Euler-Lagrange residual of this
//     L equals the defining condition on E itself, so the quadrature model
//     inherits its accuracy directly from the energy.
//
// Both kinds expose the same partials record; everything downstream (EL
// residuals, the Legendre-type energy u1 L_u1 - L, the exactness check of
// its differential against mu * w3) works through it.

#include <memory>
#include <optional>

#include "jetflow/dynamics.hpp"
#include "jetflow/expr.hpp"
#include "jetflow/jet.hpp"
#include "jetflow/region.hpp"

namespace jetflow {

struct LagrangianPartials {
    double value = 0.0;
    double d_u = 0.0;
    double d_u1 = 0.0;
    double d_uu1 = 0.0;
    double d_u1u1 = 0.0;
};

class LagrangianModel {
public:
    enum class Kind { ClosedForm, Quadrature };

    // L given as an expression over (u, u1); partials come from one
    // second-order automatic-differentiation pass.
    static LagrangianModel closed_form(BoundExpr lagrangian);

    // L rebuilt from a conserved energy by the quadrature above. u1_base
    // must be nonzero; evaluation points must have u1 of the same sign
    // (the integrand has a pole at s = 0, so the integral may not cross it).
    static LagrangianModel from_energy(BoundExpr energy, double u1_base);

    Kind kind() const { return kind_; }
    double u1_base() const { return base_; }

    // Underlying expressions, when the kind carries them.
    const std::optional<BoundExpr>& closed_expr() const { return closed_; }
    const std::optional<BoundExpr>& energy_expr() const { return energy_; }

    double value(double u, double u1) const;
    LagrangianPartials partials(double u, double u1) const;

    // Legendre-type invariant u1 L_u1 - L.
    double energy_function(double u, double u1) const;

private:
    LagrangianModel() = default;

    struct QuadCache;

    Kind kind_ = Kind::ClosedForm;
    std::optional<BoundExpr> closed_;
    std::optional<BoundExpr> energy_;
    double base_ = 1.0;
    std::shared_ptr<QuadCache> cache_;
};

// Euler-Lagrange residual u1 L_uu1 + phi L_u1u1 - L_u at one chart point.
// Zero (to numerical accuracy) exactly when extremals of L prolong to
// solutions of the ODE near that point.
double el_residual_at(const OdeRhs& ode, const LagrangianModel& model, double u, double u1);

struct ElReport {
    double max_residual = 0.0;
    int points = 0;   // samples where phi and the partials both evaluated
    int skipped = 0;  // samples outside either domain
};

// Sweep of the residual along an integrated curve's samples.
ElReport el_residual_along(const OdeRhs& ode, const LagrangianModel& model, const Curve& curve);

struct ExactnessReport {
    double max_gap = 0.0;     // worst coordinate mismatch between dh and mu * w3
    double min_abs_mu = 0.0;  // min |u1 L_u1u1| over the accepted points
    int points = 0;
    int skipped = 0;
};

// Verifies on a grid that d(u1 L_u1 - L) = mu * w3 with mu = u1 L_u1u1,
// where w3 is the coframe leg (0, -phi/u1, 1) in (dx, du, du1) coordinates.
// The differential on the left is taken by central differences of the
// energy function itself, independent of the model's analytic partials.
// Throws DegenerateLagrangian when mu vanishes on the grid (min below
// mu_floor): a degenerate L pins no second-order dynamics there.
ExactnessReport multiplier_exactness_check(const OdeRhs& ode, const LagrangianModel& model,
                                           const Region& region, int nu = 20, int nu1 = 20,
                                           double fd_step = 1e-5, double mu_floor = 1e-9);

} // namespace jetflow
