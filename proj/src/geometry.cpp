#include "jetflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jetflow {

namespace {

void check_frame_index(int i) {
    if (i < 0 || i > 2) throw std::out_of_range("frame index must be 0, 1, or 2");
}

} // namespace

Frame frame_from_jet(double u1, double phi) {
    Frame f;
    f.e[0] = Vec3(1.0, u1, phi);
    f.e[1] = Vec3(0.0, 1.0, phi / u1);
    f.e[2] = Vec3(0.0, 0.0, 1.0);
    f.w[0] = Vec3(1.0, 0.0, 0.0);
    f.w[1] = Vec3(-u1, 1.0, 0.0);
    f.w[2] = Vec3(0.0, -phi / u1, 1.0);
    return f;
}

ConnForms connection_from_jet(double u1, const PhiJet& j) {
    ConnForms c;
    double q = j.phi / u1;
    double upper[3][3] = {
        {0.0, -q, -0.5},                                  // theta[0][1]
        {0.0, -0.5, -(j.phi_u1 - q)},                     // theta[0][2]
        {-0.5, 0.0, -(u1 * j.phi_u1 - j.phi) / (u1 * u1)} // theta[1][2]
    };
    int pair_row[3] = {0, 0, 1};
    int pair_col[3] = {1, 2, 2};
    for (int p = 0; p < 3; ++p) {
        int i = pair_row[p], jcol = pair_col[p];
        for (int k = 0; k < 3; ++k) {
            c.coeff[i][jcol][k] = upper[p][k];
            c.coeff[jcol][i][k] = -upper[p][k];
        }
    }
    return c;
}

namespace {

CurvTriple curvature_from_jet(double u1, const PhiJet& j) {
    CurvTriple r;
    double phi = j.phi;
    double u1_2 = u1 * u1;
    r.r1212 = 0.25 - j.along_prolongation(u1) / u1;
    r.r1313 = -0.75 + j.phi_u - j.phi_u1 * j.phi_u1 - phi * j.phi_u1u1 - j.phi_uu1 * u1 +
              3.0 * phi * j.phi_u1 / u1 - 2.0 * phi * phi / u1_2;
    r.r2323 = 0.25 - (phi * j.phi_u1 + j.phi_uu1) / u1 -
              (phi * j.phi_u1u1 - phi * phi - j.phi_u + j.phi_u1 * j.phi_u1) / u1_2 +
              4.0 * phi * j.phi_u1 / (u1_2 * u1) - 3.0 * phi * phi / (u1_2 * u1_2);
    return r;
}

// Coordinate components of the coframe and all connection forms at one
// stencil point; everything the exterior-derivative differencing needs.
struct FormSample {
    Vec3 w[3];
    Vec3 th[3][3];
};

FormSample sample_forms(const OdeRhs& ode, double u, double u1) {
    PhiJet j = ode.jet(u, u1);
    Frame f = frame_from_jet(u1, j.phi);
    ConnForms c = connection_from_jet(u1, j);
    FormSample s;
    for (int i = 0; i < 3; ++i) s.w[i] = f.w[i];
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) s.th[i][k] = c.coords(f, i, k);
    return s;
}

Mat3 wedge(const Vec3& a, const Vec3& b) {
    return a * b.transpose() - b * a.transpose();
}

// (d form)(m, n) = d_m comp_n - d_n comp_m from the six stencil samples.
template <typename Getter>
Mat3 fd_exterior(const FormSample plus[3], const FormSample minus[3], double h, Getter get) {
    Mat3 d;
    for (int m = 0; m < 3; ++m) {
        Vec3 row = (get(plus[m]) - get(minus[m])) / (2.0 * h);
        d.row(m) = row.transpose();
    }
    return d - Mat3(d.transpose());
}

PhiJet frame_jet(const OdeRhs& ode, const JetPoint& p) {
    ode.require_valid(p);
    return ode.jet(p.u, p.u1);
}

} // namespace

Mat3 metric_at(const OdeRhs& ode, const JetPoint& p) {
    PhiJet j = frame_jet(ode, p);
    Frame f = frame_from_jet(p.u1, j.phi);
    Mat3 g = Mat3::Zero();
    for (int i = 0; i < 3; ++i) g += f.w[i] * f.w[i].transpose();
    return g;
}

Frame frame_at(const OdeRhs& ode, const JetPoint& p) {
    PhiJet j = frame_jet(ode, p);
    return frame_from_jet(p.u1, j.phi);
}

ConnForms connection_forms_at(const OdeRhs& ode, const JetPoint& p) {
    PhiJet j = frame_jet(ode, p);
    return connection_from_jet(p.u1, j);
}

Vec3 covariant_derivative_frame(const OdeRhs& ode, const JetPoint& p, int i, int j) {
    check_frame_index(i);
    check_frame_index(j);
    ConnForms c = connection_forms_at(ode, p);
    // nabla_{e_i} e_j = sum_k theta[k][j](e_i) e_k
    Vec3 out;
    for (int k = 0; k < 3; ++k) out[k] = c.coeff[k][j][i];
    return out;
}

CurvTriple sectional_curvatures(const OdeRhs& ode, const JetPoint& p) {
    PhiJet j = frame_jet(ode, p);
    return curvature_from_jet(p.u1, j);
}

LeafGeometry leaf_geometry(const OdeRhs& ode, const JetPoint& p) {
    PhiJet j = frame_jet(ode, p);
    LeafGeometry lg;
    lg.shape << 0.0, 0.5, 0.5, 0.0;
    lg.mean_curvature = 0.0;
    lg.k_ext = -0.25;
    lg.k_int = -j.along_prolongation(p.u1) / p.u1;
    CurvTriple r = curvature_from_jet(p.u1, j);
    lg.gauss_gap = std::abs(lg.k_int - (r.r1212 + lg.k_ext));
    return lg;
}

double transversality_indicator(const OdeRhs& ode, const JetPoint& p) {
    PhiJet j = frame_jet(ode, p);
    return (p.u1 * j.phi_u1 - j.phi) / (p.u1 * p.u1);
}

double CartanReport::max_structure() const {
    return std::max({structure_residual[0], structure_residual[1], structure_residual[2]});
}

double CartanReport::max_curvature() const {
    return std::max({curvature_residual[0], curvature_residual[1], curvature_residual[2]});
}

CartanReport cartan_residuals(const OdeRhs& ode, const JetPoint& p, double fd_step) {
    ode.require_valid(p);
    double h = fd_step;
    if (!(h > 0.0)) throw std::invalid_argument("fd_step must be positive");
    if (std::abs(p.u1) - h <= ode.eps_u1())
        throw StepTooLarge("u1 stencil reaches the singular set at u1 = " +
                           std::to_string(p.u1));

    PhiJet j = ode.jet(p.u, p.u1);
    Frame f = frame_from_jet(p.u1, j.phi);
    ConnForms c = connection_from_jet(p.u1, j);
    FormSample center;
    for (int i = 0; i < 3; ++i) center.w[i] = f.w[i];
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) center.th[i][k] = c.coords(f, i, k);

    FormSample plus[3], minus[3];
    double du[3] = {0.0, h, 0.0};
    double du1[3] = {0.0, 0.0, h};
    try {
        for (int m = 0; m < 3; ++m) {
            plus[m] = sample_forms(ode, p.u + du[m], p.u1 + du1[m]);
            minus[m] = sample_forms(ode, p.u - du[m], p.u1 - du1[m]);
        }
    } catch (const DomainError& e) {
        throw StepTooLarge(std::string("stencil evaluation failed: ") + e.what());
    }

    CartanReport rep;
    rep.closed = curvature_from_jet(p.u1, j);

    // First structure equation: d w[0] = 0, and the two nontrivial rows.
    double q = j.phi / p.u1;
    Mat3 rhs[3];
    rhs[0] = Mat3::Zero();
    rhs[1] = q * wedge(f.w[0], f.w[1]) + wedge(f.w[0], f.w[2]);
    rhs[2] = (j.phi_u1 - q) * wedge(f.w[0], f.w[2]) +
             ((p.u1 * j.phi_u1 - j.phi) / (p.u1 * p.u1)) * wedge(f.w[1], f.w[2]);
    for (int i = 0; i < 3; ++i) {
        Mat3 d = fd_exterior(plus, minus, h, [i](const FormSample& s) { return s.w[i]; });
        rep.structure_residual[i] = (d - rhs[i]).cwiseAbs().maxCoeff();
    }

    // Second structure equation: Omega[i][j] = d theta[i][j]
    // + sum_k theta[i][k] ^ theta[k][j], paired with the plane's frame vectors.
    int pa[3] = {0, 0, 1};
    int pb[3] = {1, 2, 2};
    double closed_vals[3] = {rep.closed.r1212, rep.closed.r1313, rep.closed.r2323};
    double fd_vals[3];
    for (int idx = 0; idx < 3; ++idx) {
        int a = pa[idx], b = pb[idx];
        Mat3 d = fd_exterior(plus, minus, h,
                             [a, b](const FormSample& s) { return s.th[a][b]; });
        Mat3 w = Mat3::Zero();
        for (int k = 0; k < 3; ++k) w += wedge(center.th[a][k], center.th[k][b]);
        Mat3 omega = d + w;
        fd_vals[idx] = f.e[a].transpose() * omega * f.e[b];
        rep.curvature_residual[idx] = std::abs(fd_vals[idx] - closed_vals[idx]);
    }
    rep.fd = CurvTriple{fd_vals[0], fd_vals[1], fd_vals[2]};
    return rep;
}

bool metric_positive_definite(const Mat3& g) {
    Eigen::LLT<Mat3> llt(g);
    return llt.info() == Eigen::Success;
}

double orthonormality_defect(const Mat3& g, const Frame& f) {
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double v = f.e[i].transpose() * g * f.e[j];
            double target = i == j ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(v - target));
        }
    return worst;
}

double duality_defect(const Frame& f) {
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double v = f.w[i].dot(f.e[j]);
            double target = i == j ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(v - target));
        }
    return worst;
}

} // namespace jetflow
