#pragma once
// Points of the chart (x, u, u1) with u1 != 0, and the ODE right side
// phi(u, u1) an autonomous second-order equation u'' = phi(u, u') carries
// around as its defining data. All geometric objects are built from phi and
// its partials, so the right side travels as a jet evaluator.

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "jetflow/errors.hpp"
#include "jetflow/expr.hpp"
#include "jetflow/hyperdual.hpp"

namespace jetflow {

struct JetPoint {
    double x = 0.0;
    double u = 0.0;
    double u1 = 0.0;
};

// phi and every partial the curvature formulas need, at one point.
struct PhiJet {
    double phi = 0.0;
    double phi_u = 0.0;
    double phi_u1 = 0.0;
    double phi_uu = 0.0;
    double phi_uu1 = 0.0;
    double phi_u1u1 = 0.0;

    static PhiJet from(const HyperDual2& h) {
        return {h.val, h.du, h.dv, h.duu, h.duv, h.dvv};
    }

    // Derivative of phi along the prolongation direction; the equation is
    // autonomous so there is no explicit x term.
    double along_prolongation(double u1) const { return u1 * phi_u + phi * phi_u1; }
};

class OdeRhs {
public:
    OdeRhs() = default;

    static OdeRhs from_expr(BoundExpr phi, double eps_u1 = 1e-9, std::string label = "") {
        OdeRhs r;
        if (label.empty()) label = phi.ast.text();
        auto shared = std::make_shared<BoundExpr>(std::move(phi));
        r.jet_fn_ = [shared](double u, double u1) { return shared->jet(u, u1); };
        r.value_fn_ = [shared](double u, double u1) { return shared->value(u, u1); };
        r.eps_u1_ = eps_u1;
        r.label_ = std::move(label);
        return r;
    }

    static OdeRhs from_function(std::function<HyperDual2(double, double)> jet_fn,
                                std::string label, double eps_u1 = 1e-9) {
        OdeRhs r;
        r.jet_fn_ = std::move(jet_fn);
        r.eps_u1_ = eps_u1;
        r.label_ = std::move(label);
        return r;
    }

    // Translates arithmetic-level domain failures into the manifold-level
    // error so callers see one failure mode for "phi undefined here".
    PhiJet jet(double u, double u1) const {
        try {
            return PhiJet::from(jet_fn_(u, u1));
        } catch (const InvalidDomain& e) {
            throw DomainError(std::string(e.what()) + " while evaluating " + label_);
        } catch (const DivisionByZero& e) {
            throw DomainError(std::string(e.what()) + " while evaluating " + label_);
        }
    }

    double phi(double u, double u1) const {
        try {
            if (value_fn_) return value_fn_(u, u1);
            return jet_fn_(u, u1).val;
        } catch (const InvalidDomain& e) {
            throw DomainError(std::string(e.what()) + " while evaluating " + label_);
        } catch (const DivisionByZero& e) {
            throw DomainError(std::string(e.what()) + " while evaluating " + label_);
        }
    }

    // True when phi evaluates cleanly; used by samplers to stay in-domain.
    bool in_domain(double u, double u1) const {
        try {
            phi(u, u1);
            return true;
        } catch (const DomainError&) {
            return false;
        }
    }

    double eps_u1() const { return eps_u1_; }
    void set_eps_u1(double eps) { eps_u1_ = eps; }
    const std::string& label() const { return label_; }

    // Chart membership: |u1| must clear the configured threshold.
    void require_valid(const JetPoint& p) const {
        if (!(std::abs(p.u1) > eps_u1_)) throw SingularPoint(p.u1);
    }

    bool valid() const { return static_cast<bool>(jet_fn_); }

private:
    std::function<HyperDual2(double, double)> jet_fn_;
    std::function<double(double, double)> value_fn_;
    double eps_u1_ = 1e-9;
    std::string label_;
};

} // namespace jetflow
