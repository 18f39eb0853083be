#include "jetflow/energy.hpp"

#include <cmath>
#include <limits>

#include "jetflow/rk45.hpp"

namespace jetflow {

double fold_threshold(const OdeRhs& ode, double u, double u1) {
    double phi = 0.0;
    try {
        phi = ode.phi(u, u1);
    } catch (const DomainError&) {
        return ode.eps_u1();
    }
    double eps = std::numeric_limits<double>::epsilon();
    double band = std::sqrt(2.0 * std::abs(phi) * 16.0 * eps * (1.0 + std::abs(u)));
    return std::max(ode.eps_u1(), band);
}

EnergyCheckReport check_energy_candidate(const OdeRhs& ode, const BoundExpr& energy,
                                         const Region& region, int nu, int nu1) {
    EnergyCheckReport rep;
    rep.min_abs_mu = std::numeric_limits<double>::infinity();
    for (auto [u, u1] : region.grid(nu, nu1)) {
        double phi, e_u, e_u1;
        try {
            phi = ode.phi(u, u1);
            HyperDual2 e = energy.jet(u, u1);
            e_u = e.du;
            e_u1 = e.dv;
        } catch (const DomainError&) {
            ++rep.skipped;
            continue;
        } catch (const InvalidDomain&) {
            ++rep.skipped;
            continue;
        } catch (const DivisionByZero&) {
            ++rep.skipped;
            continue;
        }
        double scaled = u1 * e_u + phi * e_u1;
        double raw = e_u + (phi / u1) * e_u1;
        rep.max_scaled_residual = std::max(rep.max_scaled_residual, std::abs(scaled));
        rep.max_residual = std::max(rep.max_residual, std::abs(raw));
        rep.min_abs_mu = std::min(rep.min_abs_mu, std::abs(e_u1));
        ++rep.points;
    }
    if (rep.points == 0) throw EmptyRegion("no evaluable grid points for the energy check");
    return rep;
}

LeafTrace trace_leaf(const OdeRhs& ode, double u_from, double u1_from, double u_to,
                     const LeafTraceOptions& opts) {
    ode.require_valid({0.0, u_from, u1_from});
    if (std::abs(u1_from) <= fold_threshold(ode, u_from, u1_from))
        throw SingularCrossing(u_from);

    auto rhs = [&ode](double u, const RkState<1>& y) {
        RkState<1> dy;
        dy << ode.phi(u, y[0]) / y[0];
        return dy;
    };
    double side = u1_from > 0.0 ? 1.0 : -1.0;
    auto event = [&ode, side](double u, const RkState<1>& y) {
        double thr;
        try {
            thr = fold_threshold(ode, u, y[0]);
        } catch (const DomainError&) {
            return 1.0;
        }
        return side * y[0] - thr;
    };

    RkOptions ro;
    ro.abs_tol = opts.abs_tol;
    ro.rel_tol = opts.rel_tol;
    ro.max_steps = opts.max_steps;
    ro.throw_on_stall = false;

    RkState<1> y0;
    y0 << u1_from;
    auto r = rk45_integrate<1>(rhs, u_from, y0, u_to, ro, event);

    LeafTrace tr;
    tr.u_stop = r.t_stop;
    tr.fold = r.event_hit;
    if (r.stalled) {
        // The march in u cannot proceed; treat a stall close to the fold
        // band like the fold itself, anything else is a genuine failure.
        if (std::abs(r.y_stop[0]) <= 1e-3) {
            tr.fold = true;
        } else {
            throw StepFailure("leaf trace stalled at u = " + std::to_string(r.t_stop));
        }
    }
    tr.reached = !tr.fold && r.t_stop == u_to;

    int n = std::max(2, opts.samples);
    tr.points.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double u = u_from + (tr.u_stop - u_from) * i / (n - 1);
        double u1 = i == 0 ? u1_from : (i == n - 1 ? r.y_stop[0] : r.dense.eval(u)[0]);
        tr.points.push_back({u, u1});
    }
    return tr;
}

double energy_label(const OdeRhs& ode, const JetPoint& p, double u_ref,
                    const LeafTraceOptions& opts) {
    ode.require_valid(p);
    if (u_ref == p.u) return p.u1;
    LeafTrace tr = trace_leaf(ode, p.u, p.u1, u_ref, opts);
    if (!tr.reached) throw NotReachable(u_ref, tr.u_stop);
    return tr.points.back()[1];
}

ScalarField scalar_field(const BoundExpr& e) {
    auto shared = std::make_shared<BoundExpr>(e);
    return [shared](double u, double u1) { return shared->value(u, u1); };
}

ConservationReport conservation_report(const ScalarField& field, const Curve& curve) {
    ConservationReport rep;
    bool first = true;
    for (const CurveSample& s : curve.samples) {
        double v = field(s.p.u, s.p.u1);
        if (first) {
            rep.initial = v;
            first = false;
        }
        rep.max_drift = std::max(rep.max_drift, std::abs(v - rep.initial));
        ++rep.samples;
    }
    if (rep.samples == 0) throw EmptyRegion("curve has no samples");
    rep.max_relative_drift = rep.max_drift / std::max(1.0, std::abs(rep.initial));
    return rep;
}

} // namespace jetflow
