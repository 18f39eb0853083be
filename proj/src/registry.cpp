#include "jetflow/registry.hpp"

#include <cmath>
#include <memory>
#include <set>
#include <utility>

#include "json.hpp"

#include "jetflow/errors.hpp"
#include "jetflow/quadrature.hpp"

namespace jetflow {

namespace {

BoundExpr over_uu1(const std::string& text, const ParamMap& params) {
    return {parse(text, {"u", "u1"}), params};
}

// Resolves overrides against an entry's defaults. Derived names are
// computed, never accepted; names outside the defaults are accepted only
// when the entry's extra expression actually references them.
ParamMap resolve_params(const std::string& entry, const ParamMap& defaults,
                        const ParamMap& overrides, const std::set<std::string>& derived,
                        const std::set<std::string>& extra_names = {}) {
    ParamMap out = defaults;
    for (const auto& [key, value] : overrides) {
        if (derived.count(key))
            throw ConstraintViolation("'" + key + "' is derived for entry '" + entry +
                                      "' and cannot be overridden");
        if (!defaults.count(key) && !extra_names.count(key))
            throw ConstraintViolation("unknown parameter '" + key + "' for entry '" + entry + "'");
        out[key] = value;
    }
    for (const auto& name : extra_names) {
        if (!out.count(name))
            throw ConstraintViolation("parameter '" + name +
                                      "' referenced by the supplied expression has no value");
    }
    return out;
}

std::vector<JetPoint> ramp_points(double u0, double du, double u10, double du1, double scale) {
    std::vector<JetPoint> out;
    out.reserve(10);
    for (int k = 0; k < 10; ++k)
        out.push_back({0.0, u0 + du * k, (u10 + du1 * k) * scale});
    return out;
}

RegistryEntry build_kappa(const ParamMap& overrides) {
    ParamMap params = resolve_params("kappa", {{"kappa", 1.0}}, overrides, {});
    const double kappa = params.at("kappa");
    if (kappa == 0.0 || !std::isfinite(kappa))
        throw ConstraintViolation("kappa must be finite and nonzero");

    RegistryEntry e;
    e.name = "kappa";
    e.summary = "constant-curvature leaves: phi = sqrt(1 - kappa*u1^2)";
    e.params = params;
    e.ode = OdeRhs::from_expr(over_uu1("sqrt(1 - kappa*u1^2)", params));
    e.energy = over_uu1("u + (1/kappa)*sqrt(1 - kappa*u1^2)", params);
    if (kappa > 0.0) {
        e.lagrangian = over_uu1(
            "-u - (1/kappa)*(sqrt(1 - kappa*u1^2) + sqrt(kappa)*u1*arcsin(sqrt(kappa)*u1))",
            params);
    } else {
        e.lagrangian = over_uu1(
            "-u - (1/kappa)*(sqrt(1 - kappa*u1^2) - sqrt(-kappa)*u1*arcsinh(sqrt(-kappa)*u1))",
            params);
    }
    {
        BoundExpr energy = *e.energy;
        e.first_integral = [energy](double u, double u1) { return energy.value(u, u1); };
    }
    e.reference_curvatures = [kappa](double, double u1) {
        CurvatureReference r;
        r.r1212 = 0.25 + kappa;
        r.r1313 = -0.75 - 2.0 / (u1 * u1);
        r.r2323 = 0.25 + 1.0 / (u1 * u1) - 3.0 / (u1 * u1 * u1 * u1);
        return r;
    };
    e.reference_leaf_curvature = [kappa](double, double) { return kappa; };

    // The u1 window scales as 1/sqrt(|kappa|); for kappa > 0 this keeps
    // kappa*u1^2 well below 1 so the square root stays real with margin.
    const double s = 1.0 / std::sqrt(std::abs(kappa));
    if (kappa > 0.0) {
        e.documented_region = {-1.0, 1.0, 0.1 * s, 0.9 * s};
        e.structural_region = {-1.0, 1.0, 0.35 * s, 0.85 * s};
    } else {
        e.documented_region = {-1.0, 1.0, 0.1, 2.0};
        e.structural_region = {-1.0, 1.0, 0.35, 1.5};
    }
    e.initial_conditions = ramp_points(-0.4, 0.08, 0.25, 0.03, s);
    e.horizon = 0.35 * s;
    return e;
}

RegistryEntry build_kzero(const ParamMap& overrides) {
    ParamMap params = resolve_params("kzero", {}, overrides, {});

    RegistryEntry e;
    e.name = "kzero";
    e.summary = "flat leaves on 2u + 1 > 0 with closed energy and Lagrangian";
    e.params = params;
    e.ode = OdeRhs::from_expr(over_uu1("(4*u1^2 + u^2 + u)/(4*(2*u + 1))", params));
    e.energy = over_uu1("u1^2/(2*u + 1) - (4*u^2 + 2*u + 1)/(32*u + 16)", params);
    e.lagrangian = over_uu1("u1^2/(2*u + 1) + (4*u^2 + 2*u + 1)/(32*u + 16)", params);
    {
        BoundExpr energy = *e.energy;
        e.first_integral = [energy](double u, double u1) { return energy.value(u, u1); };
    }
    e.reference_curvatures = [](double, double) {
        CurvatureReference r;
        r.r1212 = 0.0;
        return r;
    };
    e.reference_leaf_curvature = [](double, double) { return -0.25; };
    e.documented_region = {0.0, 1.0, 0.5, 2.0};
    e.structural_region = {0.0, 1.0, 0.5, 2.0};
    e.initial_conditions = ramp_points(0.1, 0.035, 0.6, 0.055, 1.0);
    e.horizon = 0.3;
    return e;
}

RegistryEntry build_damped(const ParamMap& overrides) {
    ParamMap params =
        resolve_params("damped", {{"alpha", 0.2}, {"lambda", 1.0}}, overrides, {"omega"});
    const double alpha = params.at("alpha");
    const double lambda = params.at("lambda");
    if (!(lambda > 0.0)) throw ConstraintViolation("lambda must be positive");
    if (alpha < 0.0) throw ConstraintViolation("alpha must be nonnegative");
    if (!(alpha * alpha < 4.0 * lambda))
        throw ConstraintViolation("need alpha^2 < 4*lambda (oscillatory regime)");
    params["omega"] = std::sqrt(4.0 * lambda - alpha * alpha) / 2.0;

    RegistryEntry e;
    e.name = "damped";
    e.summary = "linearly damped oscillator with exponential-weighted invariants";
    e.params = params;
    e.ode = OdeRhs::from_expr(over_uu1("-alpha*u1 - lambda*u", params));
    e.energy = over_uu1(
        "(exp((alpha/omega)*arctan((alpha*u1 + 2*lambda*u)/(2*omega*u1)))/2)"
        " * (alpha*u*u1 + u1^2 + lambda*u^2)",
        params);
    e.energy_alt = over_uu1(
        "(alpha/omega)*arctan((alpha*u1 + 2*lambda*u)/(2*omega*u1))"
        " + ln(alpha*u*u1 + u1^2 + lambda*u^2)",
        params);
    e.lagrangian = over_uu1(
        "(2*u1/(omega*u))*arctan((alpha*u + 2*u1)/(2*u*omega))"
        " - (alpha/omega)*arctan((alpha*u1 + 2*lambda*u)/(2*omega*u1))"
        " - ln(alpha*u*u1 + lambda*u^2 + u1^2)",
        params);
    {
        BoundExpr energy = *e.energy;
        e.first_integral = [energy](double u, double u1) { return energy.value(u, u1); };
    }
    e.reference_curvatures = [alpha, lambda](double u, double u1) {
        const double a = alpha * u1 + lambda * u;
        CurvatureReference r;
        r.r1212 = 0.25 + lambda - alpha * alpha - alpha * lambda * u / u1;
        r.r1313 = -0.75 - lambda + 2.0 * alpha * alpha + 3.0 * alpha * lambda * u / u1 -
                  2.0 * a * a / (u1 * u1);
        r.r2323 = 0.25 - alpha * a / u1 - (lambda + alpha * alpha - a * a) / (u1 * u1) +
                  4.0 * alpha * a / (u1 * u1 * u1) - 3.0 * a * a / (u1 * u1 * u1 * u1);
        return r;
    };
    e.reference_leaf_curvature = [alpha, lambda](double u, double u1) {
        return lambda - alpha * alpha - alpha * lambda * u / u1;
    };
    e.documented_region = {0.1, 1.0, 0.1, 1.0};
    e.structural_region = {0.3, 1.0, 0.3, 1.0};
    e.initial_conditions = ramp_points(0.2, 0.05, 0.55, 0.05, 1.0);
    e.horizon = 0.25;
    return e;
}

RegistryEntry build_gravity(const ParamMap& overrides, const std::string& density) {
    std::set<std::string> extra_names;
    Expr rho_ast;
    if (!density.empty()) {
        rho_ast = parse(density, {"u"});
        extra_names = rho_ast.param_names();
    }
    ParamMap params = resolve_params("gravity", {{"G", 1.0}, {"rho0", 1.0 / (4.0 * M_PI)}},
                                     overrides, {}, extra_names);
    const double big_g = params.at("G");
    if (!(big_g > 0.0)) throw ConstraintViolation("G must be positive");

    RegistryEntry e;
    e.name = "gravity";
    e.summary = "radial self-gravity phi = -potential_gradient(u)";
    e.params = params;
    e.documented_region = {-1.0, 1.0, 0.2, 1.5};
    e.structural_region = {-1.0, 1.0, 0.3, 1.2};
    e.initial_conditions = ramp_points(-0.3, 0.06, 0.55, 0.04, 1.0);
    e.horizon = 0.35;

    if (density.empty()) {
        const double rho0 = params.at("rho0");
        if (!(rho0 >= 0.0)) throw ConstraintViolation("rho0 must be nonnegative");
        const double c = 4.0 * M_PI * big_g * rho0; // phi = -c*u
        e.ode = OdeRhs::from_expr(over_uu1("-(4*pi*G*rho0)*u", params));
        e.energy = over_uu1("u1^2/2 + 2*pi*G*rho0*u^2", params);
        e.lagrangian = over_uu1("u1^2/2 - 2*pi*G*rho0*u^2", params);
        {
            BoundExpr energy = *e.energy;
            e.first_integral = [energy](double u, double u1) { return energy.value(u, u1); };
        }
        e.reference_curvatures = [c](double u, double u1) {
            const double grad = c * u; // potential gradient
            CurvatureReference r;
            r.r1212 = 0.25 + c;
            r.r1313 = -0.75 - c - 2.0 * grad * grad / (u1 * u1);
            r.r2323 = 0.25 + (grad * grad - c) / (u1 * u1) -
                      3.0 * grad * grad / (u1 * u1 * u1 * u1);
            return r;
        };
        e.reference_leaf_curvature = [c](double, double) { return c; };
        return e;
    }

    // Expression-supplied density: the potential gradient comes from one
    // quadrature of rho, the potential itself from a single quadrature of
    // (u - s) rho(s), and the density's own derivative from its jet.
    auto rho = std::make_shared<BoundExprU>(BoundExprU{rho_ast, params});
    const double fourpig = 4.0 * M_PI * big_g;

    // Physical density: refuse profiles that go negative on the documented
    // u-range (sampled; expressions are opaque to exact analysis).
    for (int k = 0; k <= 32; ++k) {
        const double u = -1.0 + 2.0 * k / 32.0;
        const double r = rho->value(u);
        if (!std::isfinite(r) || r < 0.0)
            throw ConstraintViolation("density must be finite and nonnegative on [-1, 1]; value " +
                                      std::to_string(r) + " at u = " + std::to_string(u));
    }

    e.ode = OdeRhs::from_function(
        [rho, fourpig](double u, double) {
            const double grad =
                fourpig * integrate([&](double s) { return rho->value(s); }, 0.0, u);
            const HyperDual2 rj = rho->jet(u);
            return HyperDual2{-grad, -fourpig * rj.val, 0.0, -fourpig * rj.du, 0.0, 0.0};
        },
        "-potential_gradient(u; rho = " + density + ")");
    e.first_integral = [rho, fourpig](double u, double u1) {
        const double potential =
            fourpig * integrate([&](double s) { return (u - s) * rho->value(s); }, 0.0, u);
        return u1 * u1 / 2.0 + potential;
    };
    e.reference_curvatures = [rho, fourpig](double u, double u1) {
        const double grad = fourpig * integrate([&](double s) { return rho->value(s); }, 0.0, u);
        const double curv = fourpig * rho->value(u); // second potential derivative
        CurvatureReference r;
        r.r1212 = 0.25 + curv;
        r.r1313 = -0.75 - curv - 2.0 * grad * grad / (u1 * u1);
        r.r2323 =
            0.25 + (grad * grad - curv) / (u1 * u1) - 3.0 * grad * grad / (u1 * u1 * u1 * u1);
        return r;
    };
    e.reference_leaf_curvature = [rho, fourpig](double u, double) {
        return fourpig * rho->value(u);
    };
    return e;
}

RegistryEntry build_kfamily(const ParamMap& overrides, const std::string& coefficient) {
    const std::string k_text = coefficient.empty() ? "1" : coefficient;
    Expr k_ast = parse(k_text, {"u"});
    ParamMap params = resolve_params("kfamily", {}, overrides, {}, k_ast.param_names());

    RegistryEntry e;
    e.name = "kfamily";
    e.summary = "phi = K(u)*u1: every leaf is totally geodesic";
    e.params = params;
    e.ode = OdeRhs::from_expr(over_uu1("(" + k_text + ")*u1", params));

    auto coeff = std::make_shared<BoundExprU>(BoundExprU{k_ast, params});
    // First integral u1 - int_0^u K; closed expression when K is constant 1.
    if (k_text == "1") e.energy = over_uu1("u1 - u", params);
    e.first_integral = [coeff](double u, double u1) {
        return u1 - integrate([&](double s) { return coeff->value(s); }, 0.0, u);
    };
    e.reference_curvatures = [coeff](double u, double u1) {
        const HyperDual2 kj = coeff->jet(u);
        CurvatureReference r;
        r.r1212 = 0.25 - u1 * kj.du - kj.val * kj.val;
        r.r1313 = -0.75;
        r.r2323 = 0.25;
        return r;
    };
    e.reference_leaf_curvature = [coeff](double u, double u1) {
        const HyperDual2 kj = coeff->jet(u);
        return -u1 * kj.du - kj.val * kj.val;
    };
    e.documented_region = {-1.0, 1.0, 0.2, 2.0};
    e.structural_region = {-1.0, 1.0, 0.3, 1.5};
    e.initial_conditions = ramp_points(-0.2, 0.06, 0.4, 0.06, 1.0);
    e.horizon = 0.5;
    return e;
}

nlohmann::json region_json(const Region& r) {
    return {{"u", {r.u_min, r.u_max}}, {"u1", {r.u1_min, r.u1_max}}};
}

} // namespace

const std::vector<std::string>& entry_names() {
    static const std::vector<std::string> names = {"kappa", "kzero", "damped", "gravity",
                                                   "kfamily"};
    return names;
}

RegistryEntry instantiate(const std::string& name, const ParamMap& overrides,
                          const ExtraSources& extra) {
    if (!extra.coefficient.empty() && name != "kfamily")
        throw ConstraintViolation("only entry 'kfamily' accepts a coefficient expression");
    if (!extra.density.empty() && name != "gravity")
        throw ConstraintViolation("only entry 'gravity' accepts a density expression");
    if (name == "kappa") return build_kappa(overrides);
    if (name == "kzero") return build_kzero(overrides);
    if (name == "damped") return build_damped(overrides);
    if (name == "gravity") return build_gravity(overrides, extra.density);
    if (name == "kfamily") return build_kfamily(overrides, extra.coefficient);
    throw UnknownEntry(name);
}

std::string describe_entries() {
    nlohmann::json catalog = nlohmann::json::array();
    for (const std::string& name : entry_names()) {
        RegistryEntry e = instantiate(name);
        nlohmann::json j;
        j["name"] = e.name;
        j["summary"] = e.summary;
        j["ode"] = e.ode.label();
        j["parameters"] = e.params;
        j["energy"] = e.energy ? nlohmann::json(e.energy->ast.text()) : nlohmann::json();
        j["energy_alt"] =
            e.energy_alt ? nlohmann::json(e.energy_alt->ast.text()) : nlohmann::json();
        j["lagrangian"] =
            e.lagrangian ? nlohmann::json(e.lagrangian->ast.text()) : nlohmann::json();
        j["documented_region"] = region_json(e.documented_region);
        j["structural_region"] = region_json(e.structural_region);
        j["horizon"] = e.horizon;
        nlohmann::json ics = nlohmann::json::array();
        for (const JetPoint& p : e.initial_conditions) ics.push_back({p.u, p.u1});
        j["initial_conditions"] = ics;
        if (name == "gravity") j["expression_slot"] = "density rho(u), quadrature-backed";
        if (name == "kfamily") j["expression_slot"] = "coefficient K(u) multiplying u1";
        catalog.push_back(std::move(j));
    }
    return catalog.dump(2) + "\n";
}

AnalyticCurve tangent_geodesic_counterexample() {
    return [](double x) {
        const double ex = std::exp(x);
        return CurveJet{x + ex, 1.0 + ex, ex, ex};
    };
}

} // namespace jetflow
