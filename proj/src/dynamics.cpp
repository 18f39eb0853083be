#include "jetflow/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "jetflow/rk45.hpp"

namespace jetflow {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

RkOptions rk_options(const IntegrateOptions& o) {
    RkOptions r;
    r.abs_tol = o.abs_tol;
    r.rel_tol = o.rel_tol;
    r.max_steps = o.max_steps;
    return r;
}

Vec3 residual_from_jet(const PhiJet& j, const CurveJet& cj) {
    double d = cj.u2 - j.phi;
    double s = j.phi - cj.u1 * j.phi_u1;
    Vec3 r;
    r[0] = d * d * s / cj.u1;
    r[1] = d * d * s / (cj.u1 * cj.u1);
    r[2] = cj.u3 - (cj.u1 * j.phi_u + j.phi * j.phi_u1) - (j.phi / cj.u1) * d;
    return r;
}

double sample_param(double t0, double t1, int i, int n) {
    if (n <= 1) return t0;
    return t0 + (t1 - t0) * i / (n - 1);
}

void check_samples(int n) {
    if (n < 2) throw std::invalid_argument("sample count must be at least 2");
}

} // namespace

Vec3 prolongation_residual(const OdeRhs& ode, const CurveJet& cj) {
    ode.require_valid({0.0, cj.u, cj.u1});
    PhiJet j = ode.jet(cj.u, cj.u1);
    return residual_from_jet(j, cj);
}

double prolongation_defect(const OdeRhs& ode, const CurveJet& cj) {
    return cj.u2 - ode.phi(cj.u, cj.u1);
}

std::vector<Vec3> curve_residuals(const OdeRhs& ode, const AnalyticCurve& curve,
                                  const std::vector<double>& xs) {
    std::vector<Vec3> out;
    out.reserve(xs.size());
    for (double x : xs) out.push_back(prolongation_residual(ode, curve(x)));
    return out;
}

Curve integrate_solution(const OdeRhs& ode, const JetPoint& init, double x_end,
                         const IntegrateOptions& opts) {
    check_samples(opts.samples);
    if (opts.halt_on_singular) ode.require_valid(init);

    RkState<2> y0;
    y0 << init.u, init.u1;
    auto rhs = [&ode](double, const RkState<2>& y) {
        RkState<2> dy;
        dy << y[1], ode.phi(y[0], y[1]);
        return dy;
    };

    IntegrationResult<2> r;
    if (opts.halt_on_singular) {
        // Track the approach toward u1 = 0 from the starting side; a plain
        // |u1| test can be stepped across in one accepted step.
        double eps = ode.eps_u1();
        double side = init.u1 > 0.0 ? 1.0 : -1.0;
        r = rk45_integrate<2>(rhs, init.x, y0, x_end, rk_options(opts),
                              [eps, side](double, const RkState<2>& y) {
                                  return side * y[1] - eps;
                              });
    } else {
        r = rk45_integrate<2>(rhs, init.x, y0, x_end, rk_options(opts));
    }

    Curve c;
    c.kind = "solution";
    c.singular_event = r.event_hit;
    c.stop_param = r.t_stop;
    c.steps_accepted = r.stats.accepted;
    c.steps_rejected = r.stats.rejected;
    c.samples.reserve(static_cast<std::size_t>(opts.samples));

    for (int i = 0; i < opts.samples; ++i) {
        double t = sample_param(init.x, r.t_stop, i, opts.samples);
        RkState<2> y = i == 0 ? y0 : (i == opts.samples - 1 ? r.y_stop : r.dense.eval(t));
        CurveSample s;
        s.t = t;
        s.p = {t, y[0], y[1]};
        double phi = kNan;
        bool have_phi = true;
        try {
            phi = ode.phi(y[0], y[1]);
        } catch (const DomainError&) {
            have_phi = false;
        }
        s.tangent = Vec3(1.0, y[1], phi);
        if (have_phi && std::abs(y[1]) > ode.eps_u1()) {
            // Second derivative of the returned curve from the interpolant;
            // the residual then measures how closely the sampled curve itself
            // satisfies the autoparallel property, not just the solver's
            // internal claim.
            double u2 = r.dense.intervals.empty() ? phi : r.dense.eval_derivative(t)[1];
            PhiJet j = ode.jet(y[0], y[1]);
            CurveJet cj{y[0], y[1], u2, j.along_prolongation(y[1])};
            s.residual = residual_from_jet(j, cj);
        } else {
            s.residual = Vec3::Constant(kNan);
        }
        c.samples.push_back(s);
    }
    return c;
}

Curve integrate_geodesic(const OdeRhs& ode, const JetPoint& init, const Vec3& tangent_coords,
                         double t_end, const IntegrateOptions& opts) {
    check_samples(opts.samples);
    ode.require_valid(init);

    PhiJet j0 = ode.jet(init.u, init.u1);
    Frame f0 = frame_from_jet(init.u1, j0.phi);
    RkState<6> y0;
    y0 << init.x, init.u, init.u1,
        f0.w[0].dot(tangent_coords), f0.w[1].dot(tangent_coords), f0.w[2].dot(tangent_coords);

    auto rhs = [&ode](double, const RkState<6>& y) {
        PhiJet j = ode.jet(y[1], y[2]);
        Frame f = frame_from_jet(y[2], j.phi);
        ConnForms cf = connection_from_jet(y[2], j);
        Vec3 a(y[3], y[4], y[5]);
        Vec3 pos_dot = a[0] * f.e[0] + a[1] * f.e[1] + a[2] * f.e[2];
        RkState<6> dy;
        dy[0] = pos_dot[0];
        dy[1] = pos_dot[1];
        dy[2] = pos_dot[2];
        for (int i = 0; i < 3; ++i) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k)
                for (int m = 0; m < 3; ++m) s += cf.coeff[i][k][m] * a[m] * a[k];
            dy[3 + i] = -s;
        }
        return dy;
    };

    double eps = ode.eps_u1();
    double side = init.u1 > 0.0 ? 1.0 : -1.0;
    RkOptions ro = rk_options(opts);
    // Near u1 = 0 the frame blows up and the geodesic equations stiffen
    // faster than the event can trigger; recover the partial curve instead
    // of failing inside the solver and classify the stall below.
    ro.throw_on_stall = false;
    IntegrationResult<6> r =
        rk45_integrate<6>(rhs, 0.0, y0, t_end, ro,
                          [eps, side](double, const RkState<6>& y) {
                              return side * y[2] - eps;
                          });
    if (r.stalled) {
        if (std::abs(r.y_stop[2]) <= 1e-3) {
            // Step collapse at small |u1|: the geodesic reached the chart
            // boundary for numerical purposes.
            r.event_hit = true;
        } else {
            throw StepFailure("geodesic step collapse away from the chart boundary at t = " +
                              std::to_string(r.t_stop));
        }
    }

    Curve c;
    c.kind = "geodesic";
    c.singular_event = r.event_hit;
    c.stop_param = r.t_stop;
    c.steps_accepted = r.stats.accepted;
    c.steps_rejected = r.stats.rejected;
    c.samples.reserve(static_cast<std::size_t>(opts.samples));

    for (int i = 0; i < opts.samples; ++i) {
        double t = sample_param(0.0, r.t_stop, i, opts.samples);
        RkState<6> y = i == 0 ? y0 : (i == opts.samples - 1 ? r.y_stop : r.dense.eval(t));
        CurveSample s;
        s.t = t;
        s.p = {y[0], y[1], y[2]};
        Vec3 a(y[3], y[4], y[5]);
        try {
            PhiJet j = ode.jet(y[1], y[2]);
            Frame f = frame_from_jet(y[2], j.phi);
            ConnForms cf = connection_from_jet(y[2], j);
            s.tangent = a[0] * f.e[0] + a[1] * f.e[1] + a[2] * f.e[2];
            // Parallel-transport defect of the sampled data: interpolant
            // derivative of the frame components plus the connection term.
            if (!r.dense.intervals.empty()) {
                RkState<6> dy = r.dense.eval_derivative(t);
                for (int idx = 0; idx < 3; ++idx) {
                    double conn = 0.0;
                    for (int k = 0; k < 3; ++k)
                        for (int m = 0; m < 3; ++m)
                            conn += cf.coeff[idx][k][m] * a[m] * a[k];
                    s.residual[idx] = dy[3 + idx] + conn;
                }
            } else {
                s.residual = Vec3::Zero();
            }
        } catch (const DomainError&) {
            s.tangent = Vec3::Constant(kNan);
            s.residual = Vec3::Constant(kNan);
        }
        c.samples.push_back(s);
    }
    return c;
}

void write_curve_csv(std::ostream& out, const Curve& curve) {
    out << "t,x,u,u1,tangent_x,tangent_u,tangent_u1,res_e1,res_e2,res_e3\n";
    char buf[32];
    auto put = [&](double v, char sep) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf << sep;
    };
    for (const CurveSample& s : curve.samples) {
        put(s.t, ',');
        put(s.p.x, ',');
        put(s.p.u, ',');
        put(s.p.u1, ',');
        put(s.tangent[0], ',');
        put(s.tangent[1], ',');
        put(s.tangent[2], ',');
        put(s.residual[0], ',');
        put(s.residual[1], ',');
        put(s.residual[2], '\n');
    }
}

} // namespace jetflow
