#pragma once
// Trajectories on the chart: prolonged solutions of u'' = phi(u, u1)
// integrated in x, and geodesics of the associated metric integrated in
// arc-length-like parameter t with the tangent carried in frame components.
// Both come back as sampled curves with per-sample diagnostic residuals.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "jetflow/geometry.hpp"
#include "jetflow/jet.hpp"

namespace jetflow {

struct CurveSample {
    double t = 0.0;       // curve parameter; equals x for solution curves
    JetPoint p;           // position on the chart
    Vec3 tangent;         // coordinate components of the curve tangent
    Vec3 residual;        // see Curve::kind for the meaning of the columns
};

struct Curve {
    // "solution": residual holds the frame components of the correspondence
    // defect, i.e. how far the prolonged curve is from being autoparallel.
    // "geodesic": residual holds the parallel-transport defect
    // a' + theta(tangent) a of the tangent's frame components.
    std::string kind;
    std::vector<CurveSample> samples;
    bool singular_event = false; // halted where |u1| fell to eps_u1
    double stop_param = 0.0;     // parameter value where integration ended
    long steps_accepted = 0;
    long steps_rejected = 0;
};

struct IntegrateOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int samples = 201;
    long max_steps = 200000;
    // Halt at the chart boundary |u1| = eps_u1. Solutions of right sides that
    // are regular across u1 = 0 can opt out to study the full ODE flow; the
    // geometric residual columns are NaN wherever the chart does not cover.
    bool halt_on_singular = true;
};

// Prolonged solution through init (init.x is the initial abscissa).
Curve integrate_solution(const OdeRhs& ode, const JetPoint& init, double x_end,
                         const IntegrateOptions& opts = {});

// Geodesic through init with initial tangent given in coordinate components.
Curve integrate_geodesic(const OdeRhs& ode, const JetPoint& init, const Vec3& tangent_coords,
                         double t_end, const IntegrateOptions& opts = {});

// Frame components (e1, e2, e3) of the acceleration of the prolongation of a
// curve x -> u(x) with the given derivatives at one point. Zero exactly when
// the prolonged curve is autoparallel there.
struct CurveJet {
    double u = 0.0;
    double u1 = 0.0;
    double u2 = 0.0;
    double u3 = 0.0;
};
Vec3 prolongation_residual(const OdeRhs& ode, const CurveJet& cj);

// Defect u2 - phi(u, u1): the prolongation tangent is e1 + defect * e3.
double prolongation_defect(const OdeRhs& ode, const CurveJet& cj);

using AnalyticCurve = std::function<CurveJet(double x)>;

// Residual of an analytic curve sampled at the given abscissas.
std::vector<Vec3> curve_residuals(const OdeRhs& ode, const AnalyticCurve& curve,
                                  const std::vector<double>& xs);

// CSV with columns t,x,u,u1,tangent_x,tangent_u,tangent_u1,res_e1,res_e2,res_e3.
void write_curve_csv(std::ostream& out, const Curve& curve);

} // namespace jetflow
