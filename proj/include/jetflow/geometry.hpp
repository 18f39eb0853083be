#pragma once
// The Riemannian structure attached to u'' = phi(u, u1) on the chart
// (x, u, u1), u1 != 0: metric, adapted orthonormal frame and coframe,
// connection forms, sectional curvatures, and the geometry of the surfaces
// x = const swept by the prolongation flow. Coordinate components are always
// ordered (x, u, u1); frame indices run 0..2 for the triple (e1, e2, e3).

#include <Eigen/Dense>

#include "jetflow/jet.hpp"

namespace jetflow {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

struct Frame {
    Vec3 e[3]; // frame vectors, coordinate components
    Vec3 w[3]; // dual coframe, coordinate components
};

// Connection forms theta[i][j] expanded in the coframe:
// theta[i][j] = sum_k coeff[i][j][k] * w[k]. Antisymmetric in (i, j).
struct ConnForms {
    double coeff[3][3][3] = {};

    // theta[i][j] evaluated on frame vector e[k] is exactly coeff[i][j][k].
    double on_frame(int i, int j, int k) const { return coeff[i][j][k]; }

    // Coordinate components of theta[i][j], for pairing with arbitrary vectors.
    Vec3 coords(const Frame& f, int i, int j) const {
        Vec3 out = Vec3::Zero();
        for (int k = 0; k < 3; ++k) out += coeff[i][j][k] * f.w[k];
        return out;
    }
};

struct CurvTriple {
    double r1212 = 0.0; // plane (e1, e2)
    double r1313 = 0.0; // plane (e1, e3)
    double r2323 = 0.0; // plane (e2, e3)
};

struct LeafGeometry {
    Eigen::Matrix2d shape;    // second fundamental form in the (e1, e2) basis
    double mean_curvature;    // half trace of shape
    double k_ext;             // det of shape
    double k_int;             // intrinsic curvature of the leaf
    double gauss_gap;         // |k_int - (r1212 + k_ext)|, a consistency check
};

struct CartanReport {
    // Max-abs coordinate entry of (finite-difference d(w[i]) - closed form).
    double structure_residual[3] = {};
    // |FD curvature - closed form| for the planes (e1,e2), (e1,e3), (e2,e3).
    double curvature_residual[3] = {};
    CurvTriple fd;
    CurvTriple closed;

    double max_structure() const;
    double max_curvature() const;
};

Mat3 metric_at(const OdeRhs& ode, const JetPoint& p);
Frame frame_at(const OdeRhs& ode, const JetPoint& p);
ConnForms connection_forms_at(const OdeRhs& ode, const JetPoint& p);

// Same objects built from an already-evaluated right side; used by inner
// integration loops that hold a PhiJet anyway. No chart/domain checks.
Frame frame_from_jet(double u1, double phi);
ConnForms connection_from_jet(double u1, const PhiJet& j);

// Frame components of the covariant derivative of e[j] along e[i].
Vec3 covariant_derivative_frame(const OdeRhs& ode, const JetPoint& p, int i, int j);

CurvTriple sectional_curvatures(const OdeRhs& ode, const JetPoint& p);
LeafGeometry leaf_geometry(const OdeRhs& ode, const JetPoint& p);

// d/du1 of phi/u1. Where this is nonzero, distinct right sides give distinct
// metrics at the point; identically zero families (phi = K(u) u1) collapse.
double transversality_indicator(const OdeRhs& ode, const JetPoint& p);

// Both structure equations checked numerically: exterior derivatives via
// central differences with the given coordinate step, wedge terms exact.
// Throws StepTooLarge when a stencil point leaves the chart or the domain.
CartanReport cartan_residuals(const OdeRhs& ode, const JetPoint& p, double fd_step = 1e-5);

bool metric_positive_definite(const Mat3& g);

// max |g(e_i, e_j) - delta_ij| and max |w[i](e_j) - delta_ij|.
double orthonormality_defect(const Mat3& g, const Frame& f);
double duality_defect(const Frame& f);

} // namespace jetflow
