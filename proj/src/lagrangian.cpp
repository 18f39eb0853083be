#include "jetflow/lagrangian.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <utility>

#include "jetflow/errors.hpp"
#include "jetflow/quadrature.hpp"

namespace jetflow {

namespace {

// Below this the 1/s^2 pole dominates every digit of the integral.
constexpr double kTinyU1 = 1e-12;

std::string point_string(double u, double u1) {
    return "(u, u1) = (" + std::to_string(u) + ", " + std::to_string(u1) + ")";
}

} // namespace

// Memoizes the two integrals a quadrature-kind model needs per chart point:
//   Q = int_b^{u1} E(u, s)/s^2 ds     P = int_b^{u1} E_u(u, s)/s^2 ds
// Geometry sweeps revisit points, and each entry costs two adaptive
// quadratures, so caching pays for itself immediately.
struct LagrangianModel::QuadCache {
    std::mutex guard;
    std::map<std::pair<double, double>, std::pair<double, double>> entries;
};

LagrangianModel LagrangianModel::closed_form(BoundExpr lagrangian) {
    LagrangianModel m;
    m.kind_ = Kind::ClosedForm;
    m.closed_ = std::move(lagrangian);
    return m;
}

LagrangianModel LagrangianModel::from_energy(BoundExpr energy, double u1_base) {
    if (u1_base == 0.0 || !std::isfinite(u1_base))
        throw InvalidDomain("quadrature base point must be finite and nonzero");
    LagrangianModel m;
    m.kind_ = Kind::Quadrature;
    m.energy_ = std::move(energy);
    m.base_ = u1_base;
    m.cache_ = std::make_shared<QuadCache>();
    return m;
}

namespace {

// Both integrals share the domain guard: the integrand blows up at s = 0,
// so [base, u1] must stay on one side of it.
void check_range(double u1, double base) {
    if (std::abs(u1) <= kTinyU1) throw SingularPoint(u1);
    if ((u1 > 0.0) != (base > 0.0))
        throw SignCrossing("[" + std::to_string(base) + ", " + std::to_string(u1) + "]");
}

} // namespace

LagrangianPartials LagrangianModel::partials(double u, double u1) const {
    LagrangianPartials out;
    if (kind_ == Kind::ClosedForm) {
        const HyperDual2 j = closed_->jet(u, u1);
        if (!std::isfinite(j.val) || !std::isfinite(j.du) || !std::isfinite(j.dv) ||
            !std::isfinite(j.duv) || !std::isfinite(j.dvv))
            throw DomainError("Lagrangian expression not finite at " + point_string(u, u1));
        out.value = j.val;
        out.d_u = j.du;
        out.d_u1 = j.dv;
        out.d_uu1 = j.duv;
        out.d_u1u1 = j.dvv;
        return out;
    }

    check_range(u1, base_);

    double q = 0.0, p = 0.0;
    const std::pair<double, double> key{u, u1};
    {
        std::lock_guard<std::mutex> lock(cache_->guard);
        auto it = cache_->entries.find(key);
        if (it != cache_->entries.end()) {
            q = it->second.first;
            p = it->second.second;
        } else {
            const BoundExpr& energy = *energy_;
            q = integrate([&](double s) { return energy.value(u, s) / (s * s); }, base_, u1);
            p = integrate([&](double s) { return energy.jet(u, s).du / (s * s); }, base_, u1);
            cache_->entries.emplace(key, std::make_pair(q, p));
        }
    }

    // With Q and P in hand every partial is in closed form; differentiation
    // under the integral sign only touches the integrand, the bounds carry u1.
    const HyperDual2 e = energy_->jet(u, u1);
    out.value = u1 * q;
    out.d_u = u1 * p;
    out.d_u1 = q + e.val / u1;
    out.d_uu1 = p + e.du / u1;
    out.d_u1u1 = e.dv / u1;
    return out;
}

double LagrangianModel::value(double u, double u1) const {
    if (kind_ == Kind::ClosedForm) {
        const double v = closed_->value(u, u1);
        if (!std::isfinite(v))
            throw DomainError("Lagrangian expression not finite at " + point_string(u, u1));
        return v;
    }
    return partials(u, u1).value;
}

double LagrangianModel::energy_function(double u, double u1) const {
    const LagrangianPartials lp = partials(u, u1);
    return u1 * lp.d_u1 - lp.value;
}

double el_residual_at(const OdeRhs& ode, const LagrangianModel& model, double u, double u1) {
    const double phi = ode.phi(u, u1);
    const LagrangianPartials lp = model.partials(u, u1);
    return u1 * lp.d_uu1 + phi * lp.d_u1u1 - lp.d_u;
}

ElReport el_residual_along(const OdeRhs& ode, const LagrangianModel& model, const Curve& curve) {
    ElReport report;
    for (const CurveSample& s : curve.samples) {
        double r;
        try {
            r = el_residual_at(ode, model, s.p.u, s.p.u1);
        } catch (const Error&) {
            ++report.skipped;
            continue;
        }
        report.max_residual = std::max(report.max_residual, std::abs(r));
        ++report.points;
    }
    if (report.points == 0) throw EmptyRegion("no curve sample admitted the Lagrangian");
    return report;
}

ExactnessReport multiplier_exactness_check(const OdeRhs& ode, const LagrangianModel& model,
                                           const Region& region, int nu, int nu1,
                                           double fd_step, double mu_floor) {
    region.validate();
    ExactnessReport report;
    report.min_abs_mu = std::numeric_limits<double>::infinity();
    const double h = fd_step;

    for (const auto& [u, u1] : region.grid(nu, nu1)) {
        double phi, mu, hu_fd, hu1_fd;
        try {
            phi = ode.phi(u, u1);
            mu = u1 * model.partials(u, u1).d_u1u1;
            // Central differences of the energy function give dh without
            // reusing the analytic partials being tested.
            hu_fd = (model.energy_function(u + h, u1) - model.energy_function(u - h, u1)) / (2.0 * h);
            hu1_fd = (model.energy_function(u, u1 + h) - model.energy_function(u, u1 - h)) / (2.0 * h);
        } catch (const Error&) {
            ++report.skipped;
            continue;
        }
        // mu * w3 has coordinate components (0, -mu phi / u1, mu).
        const double gap = std::max(std::abs(hu_fd + mu * phi / u1), std::abs(hu1_fd - mu));
        report.max_gap = std::max(report.max_gap, gap);
        report.min_abs_mu = std::min(report.min_abs_mu, std::abs(mu));
        ++report.points;
    }

    if (report.points == 0) throw EmptyRegion("no grid point admitted both the ODE and the Lagrangian");
    if (report.min_abs_mu <= mu_floor)
        throw DegenerateLagrangian("u1 L_u1u1 reaches " + std::to_string(report.min_abs_mu) +
                                   " on the region; the multiplier vanishes");
    return report;
}

} // namespace jetflow
