#include "jetflow/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "jetflow/dynamics.hpp"
#include "jetflow/energy.hpp"
#include "jetflow/errors.hpp"
#include "jetflow/expr.hpp"
#include "jetflow/geometry.hpp"
#include "jetflow/lagrangian.hpp"
#include "jetflow/registry.hpp"
#include "jetflow/verify.hpp"

namespace jetflow::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& text, const std::string& what) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0')
        throw UsageError("cannot parse " + what + " from '" + text + "'");
    return v;
}

// Comma-separated doubles, between lo and hi of them.
std::vector<double> parse_tuple(const std::string& text, std::size_t lo, std::size_t hi,
                                const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(item, what));
    if (out.size() < lo || out.size() > hi)
        throw UsageError(what + " expects " + std::to_string(lo) +
                         (hi != lo ? ".." + std::to_string(hi) : "") + " comma-separated values");
    return out;
}

ParamMap parse_params(const std::vector<std::string>& kvs) {
    ParamMap out;
    for (const std::string& kv : kvs) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw UsageError("--param expects name=value, got '" + kv + "'");
        out[kv.substr(0, eq)] = parse_double(kv.substr(eq + 1), "parameter value");
    }
    return out;
}

// A start point is "x,u,u1" or "u,u1" (x = 0).
JetPoint parse_point(const std::string& text, const std::string& what) {
    const auto v = parse_tuple(text, 2, 3, what);
    if (v.size() == 2) return {0.0, v[0], v[1]};
    return {v[0], v[1], v[2]};
}

double eps_from_env() {
    if (const char* env = std::getenv("JETFLOW_EPS_U1")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end == env || *end != '\0' || !(v > 0.0))
            throw UsageError("JETFLOW_EPS_U1 must be a positive number, got '" +
                             std::string(env) + "'");
        return v;
    }
    return 1e-9;
}

// What every subcommand needs to know about where phi comes from.
struct SourceOptions {
    std::string entry;
    std::string ode_text;
    std::vector<std::string> params;
    std::string coefficient;
    std::string density;
    double eps_u1 = 0.0; // 0 means unset: fall back to env, then default
};

void add_source_options(CLI::App* cmd, SourceOptions& src) {
    cmd->add_option("entry", src.entry, "builtin entry name (see 'jetflow list')");
    cmd->add_option("--ode", src.ode_text, "custom right side phi(u,u1) as an expression");
    cmd->add_option("--param", src.params, "parameter binding name=value (repeatable)");
    cmd->add_option("--K", src.coefficient, "coefficient K(u) for the kfamily entry");
    cmd->add_option("--rho", src.density, "density rho(u) for the gravity entry");
    cmd->add_option("--eps-u1", src.eps_u1,
                    "chart threshold on |u1| (default 1e-9, env JETFLOW_EPS_U1)");
}

struct Source {
    RegistryEntry entry;
    bool builtin = false; // regions/closed forms are meaningful only when true
};

Source resolve_source(const SourceOptions& src) {
    const double eps = src.eps_u1 > 0.0 ? src.eps_u1 : eps_from_env();
    if (!src.entry.empty() && !src.ode_text.empty())
        throw UsageError("give either a builtin entry name or --ode, not both");
    if (src.entry.empty() && src.ode_text.empty())
        throw UsageError("a builtin entry name or --ode is required");

    Source out;
    if (!src.entry.empty()) {
        out.entry =
            instantiate(src.entry, parse_params(src.params), {src.coefficient, src.density});
        out.entry.ode.set_eps_u1(eps);
        out.builtin = true;
        return out;
    }
    if (!src.coefficient.empty() || !src.density.empty())
        throw UsageError("--K/--rho apply to builtin entries only");
    out.entry.name = "custom";
    out.entry.summary = src.ode_text;
    out.entry.ode =
        OdeRhs::from_expr({parse(src.ode_text, {"u", "u1"}), parse_params(src.params)}, eps);
    return out;
}

Region region_for(const Source& src, const std::string& region_text, bool structural) {
    if (!region_text.empty()) {
        const auto v = parse_tuple(region_text, 4, 4, "--region");
        Region r{v[0], v[1], v[2], v[3]};
        r.validate();
        return r;
    }
    if (!src.builtin)
        throw UsageError("--region umin,umax,u1min,u1max is required with --ode");
    return structural ? src.entry.structural_region : src.entry.documented_region;
}

nlohmann::json vec3_json(const Vec3& v) { return {v[0], v[1], v[2]}; }

nlohmann::json mat3_json(const Mat3& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < 3; ++i) rows.push_back({m(i, 0), m(i, 1), m(i, 2)});
    return rows;
}

// ---------------------------------------------------------------- analyze

int cmd_analyze(const Source& src, const std::string& at, std::ostream& out) {
    const JetPoint p = parse_point(at, "--at");
    const OdeRhs& ode = src.entry.ode;
    ode.require_valid(p);

    nlohmann::json j;
    j["source"] = {{"name", src.entry.name}, {"ode", ode.label()}};
    if (src.builtin) j["source"]["parameters"] = src.entry.params;
    j["point"] = {{"x", p.x}, {"u", p.u}, {"u1", p.u1}};

    const PhiJet pj = ode.jet(p.u, p.u1);
    j["phi"] = {{"value", pj.phi},   {"u", pj.phi_u},    {"u1", pj.phi_u1},
                {"uu", pj.phi_uu},   {"uu1", pj.phi_uu1}, {"u1u1", pj.phi_u1u1}};

    const Mat3 g = metric_at(ode, p);
    j["metric"] = mat3_json(g);
    j["det_gap"] = g.determinant() - 1.0;
    j["positive_definite"] = metric_positive_definite(g);

    const Frame f = frame_at(ode, p);
    j["frame"] = {vec3_json(f.e[0]), vec3_json(f.e[1]), vec3_json(f.e[2])};
    j["coframe"] = {vec3_json(f.w[0]), vec3_json(f.w[1]), vec3_json(f.w[2])};

    const ConnForms th = connection_forms_at(ode, p);
    const auto triple = [&](int i, int k) {
        return nlohmann::json{th.on_frame(i, k, 0), th.on_frame(i, k, 1), th.on_frame(i, k, 2)};
    };
    j["connection"] = {{"th12", triple(0, 1)}, {"th13", triple(0, 2)}, {"th23", triple(1, 2)}};

    const CurvTriple curv = sectional_curvatures(ode, p);
    j["curvatures"] = {{"r1212", curv.r1212}, {"r1313", curv.r1313}, {"r2323", curv.r2323}};
    if (src.builtin && src.entry.reference_curvatures) {
        const CurvatureReference ref = src.entry.reference_curvatures(p.u, p.u1);
        nlohmann::json r;
        if (ref.r1212) r["r1212"] = *ref.r1212;
        if (ref.r1313) r["r1313"] = *ref.r1313;
        if (ref.r2323) r["r2323"] = *ref.r2323;
        j["reference_curvatures"] = r;
    }

    const LeafGeometry lg = leaf_geometry(ode, p);
    j["leaf"] = {{"shape", {{lg.shape(0, 0), lg.shape(0, 1)}, {lg.shape(1, 0), lg.shape(1, 1)}}},
                 {"mean_curvature", lg.mean_curvature},
                 {"k_ext", lg.k_ext},
                 {"k_int", lg.k_int},
                 {"gauss_gap", lg.gauss_gap}};

    j["transversality_indicator"] = transversality_indicator(ode, p);
    j["fold_threshold"] = fold_threshold(ode, p.u, p.u1);

    // The structure-equation residuals need a finite-difference stencil around
    // the point; report the failure instead of sinking the whole analysis.
    try {
        const CartanReport cr = cartan_residuals(ode, p);
        j["cartan"] = {
            {"structure",
             {cr.structure_residual[0], cr.structure_residual[1], cr.structure_residual[2]}},
            {"curvature",
             {cr.curvature_residual[0], cr.curvature_residual[1], cr.curvature_residual[2]}}};
    } catch (const Error& e) {
        j["cartan"] = {{"error", e.what()}};
    }

    if (src.builtin && src.entry.first_integral) {
        try {
            j["first_integral"] = src.entry.first_integral(p.u, p.u1);
        } catch (const Error& e) {
            j["first_integral_error"] = e.what();
        }
    }

    out << j.dump(2) << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- geodesic

int cmd_geodesic(const Source& src, const std::string& kind, const std::string& from,
                 const std::string& tangent_text, double until, int samples, bool no_halt,
                 std::ostream& out, std::ostream& err) {
    const JetPoint start = parse_point(from, "--from");
    IntegrateOptions opts;
    opts.samples = samples;
    opts.halt_on_singular = !no_halt;

    Curve curve;
    if (kind == "solution") {
        curve = integrate_solution(src.entry.ode, start, until, opts);
    } else if (kind == "geodesic") {
        Vec3 tangent;
        if (tangent_text.empty()) {
            // default: the prolongation direction e1 at the start point
            const double phi = src.entry.ode.phi(start.u, start.u1);
            tangent = Vec3{1.0, start.u1, phi};
        } else {
            const auto v = parse_tuple(tangent_text, 3, 3, "--tangent");
            tangent = Vec3{v[0], v[1], v[2]};
        }
        curve = integrate_geodesic(src.entry.ode, start, tangent, until, opts);
    } else {
        throw UsageError("--kind must be 'solution' or 'geodesic'");
    }

    write_curve_csv(out, curve);
    if (curve.singular_event)
        err << "halted at the chart boundary: parameter " << fmt(curve.stop_param)
            << ", last |u1| = " << fmt(std::abs(curve.samples.back().p.u1)) << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- energy

int cmd_energy(const Source& src, bool do_check, const std::string& trace_text, bool do_conserve,
               const std::string& label_text, const std::string& expr_text,
               const std::string& region_text, const std::string& from, double until,
               bool have_until, int nu, int nu1, std::ostream& out, std::ostream& err) {
    const int modes = int(do_check) + int(!trace_text.empty()) + int(do_conserve) +
                      int(!label_text.empty());
    if (modes != 1)
        throw UsageError("pick exactly one of --check, --trace, --conserve, --label");
    const OdeRhs& ode = src.entry.ode;

    if (do_check) {
        BoundExpr candidate;
        if (!expr_text.empty()) {
            candidate = {parse(expr_text, {"u", "u1"}), src.entry.params};
        } else if (src.builtin && src.entry.energy) {
            candidate = *src.entry.energy;
        } else {
            throw UsageError("--check needs --expr (no closed energy is recorded here)");
        }
        const Region region = region_for(src, region_text, false);
        const EnergyCheckReport r = check_energy_candidate(ode, candidate, region, nu, nu1);
        nlohmann::json j{{"expression", candidate.ast.text()},
                         {"max_scaled_residual", r.max_scaled_residual},
                         {"max_residual", r.max_residual},
                         {"min_abs_mu", r.min_abs_mu},
                         {"points", r.points},
                         {"skipped", r.skipped}};
        out << j.dump(2) << '\n';
        return kExitOk;
    }

    if (!trace_text.empty()) {
        const auto v = parse_tuple(trace_text, 3, 3, "--trace");
        const LeafTrace trace = trace_leaf(ode, v[0], v[1], v[2]);
        const bool with_field = static_cast<bool>(src.entry.first_integral);
        out << (with_field ? "u,u1,first_integral\n" : "u,u1\n");
        for (const auto& [u, u1] : trace.points) {
            out << fmt(u) << ',' << fmt(u1);
            if (with_field) out << ',' << fmt(src.entry.first_integral(u, u1));
            out << '\n';
        }
        if (trace.fold)
            err << "leaf folded at u = " << fmt(trace.u_stop) << " before reaching "
                << fmt(v[2]) << '\n';
        return kExitOk;
    }

    if (do_conserve) {
        ScalarField field;
        std::string field_name;
        if (!expr_text.empty()) {
            field = scalar_field({parse(expr_text, {"u", "u1"}), src.entry.params});
            field_name = expr_text;
        } else if (src.entry.first_integral) {
            field = src.entry.first_integral;
            field_name = "builtin first integral";
        } else {
            throw UsageError("--conserve needs --expr (no first integral is recorded here)");
        }
        JetPoint start;
        double x_end;
        if (!from.empty()) {
            start = parse_point(from, "--from");
            if (!have_until) throw UsageError("--conserve with --from also needs --until");
            x_end = until;
        } else if (src.builtin && !src.entry.initial_conditions.empty()) {
            start = src.entry.initial_conditions.front();
            x_end = start.x + src.entry.horizon;
        } else {
            throw UsageError("--conserve needs --from and --until with --ode");
        }
        const Curve curve = integrate_solution(ode, start, x_end);
        const ConservationReport r = conservation_report(field, curve);
        nlohmann::json j{{"field", field_name},
                         {"start", {start.x, start.u, start.u1}},
                         {"x_end", x_end},
                         {"initial", r.initial},
                         {"max_drift", r.max_drift},
                         {"max_relative_drift", r.max_relative_drift},
                         {"samples", r.samples}};
        out << j.dump(2) << '\n';
        return kExitOk;
    }

    const auto v = parse_tuple(label_text, 3, 3, "--label");
    out << fmt(energy_label(ode, {0.0, v[0], v[1]}, v[2])) << '\n';
    return kExitOk;
}

// -------------------------------------------------------------- lagrangian

int cmd_lagrangian(const Source& src, bool grid, const std::string& along, bool exactness,
                   const std::string& l_text, const std::string& e_text, double base,
                   bool have_base, const std::string& region_text, double until, bool have_until,
                   int nu, int nu1, std::ostream& out, std::ostream& err) {
    const int modes = int(grid) + int(!along.empty()) + int(exactness);
    if (modes != 1) throw UsageError("pick exactly one of --grid, --along, --exactness");
    if (!l_text.empty() && !e_text.empty())
        throw UsageError("give either --L or --E, not both");
    const OdeRhs& ode = src.entry.ode;

    // Source of the model: explicit expression beats the entry's records;
    // otherwise prefer the recorded closed form, then rebuild from energy.
    LagrangianModel model = [&]() -> LagrangianModel {
        if (!l_text.empty())
            return LagrangianModel::closed_form({parse(l_text, {"u", "u1"}), src.entry.params});
        if (!e_text.empty()) {
            if (!have_base) throw UsageError("--E needs --base (quadrature base point for u1)");
            return LagrangianModel::from_energy({parse(e_text, {"u", "u1"}), src.entry.params},
                                                base);
        }
        if (src.builtin && src.entry.lagrangian)
            return LagrangianModel::closed_form(*src.entry.lagrangian);
        if (src.builtin && src.entry.energy) {
            const double b = have_base ? base : src.entry.structural_region.u1_min;
            return LagrangianModel::from_energy(*src.entry.energy, b);
        }
        throw UsageError("no Lagrangian available: give --L or --E, or pick an entry with "
                         "recorded closed forms");
    }();

    if (grid) {
        const Region region = region_for(src, region_text, true);
        out << "u,u1,L,L_u,L_u1,energy,el_residual\n";
        for (const auto& [u, u1] : region.grid(nu, nu1)) {
            const LagrangianPartials lp = model.partials(u, u1);
            const double h = u1 * lp.d_u1 - lp.value;
            const double el = el_residual_at(ode, model, u, u1);
            out << fmt(u) << ',' << fmt(u1) << ',' << fmt(lp.value) << ',' << fmt(lp.d_u) << ','
                << fmt(lp.d_u1) << ',' << fmt(h) << ',' << fmt(el) << '\n';
        }
        return kExitOk;
    }

    if (!along.empty()) {
        const JetPoint start = parse_point(along, "--along");
        double x_end = 0.0;
        if (have_until)
            x_end = until;
        else if (src.builtin)
            x_end = start.x + src.entry.horizon;
        else
            throw UsageError("--along with --ode needs --until");
        const Curve curve = integrate_solution(ode, start, x_end);
        out << "t,u,u1,el_residual\n";
        int skipped = 0;
        for (const CurveSample& s : curve.samples) {
            try {
                const double el = el_residual_at(ode, model, s.p.u, s.p.u1);
                out << fmt(s.t) << ',' << fmt(s.p.u) << ',' << fmt(s.p.u1) << ',' << fmt(el)
                    << '\n';
            } catch (const Error&) {
                ++skipped;
            }
        }
        if (skipped > 0)
            err << skipped << " samples fell outside the Lagrangian's domain\n";
        return kExitOk;
    }

    const Region region = region_for(src, region_text, true);
    const ExactnessReport r = multiplier_exactness_check(ode, model, region, nu, nu1);
    nlohmann::json j{{"max_gap", r.max_gap},
                     {"min_abs_mu", r.min_abs_mu},
                     {"points", r.points},
                     {"skipped", r.skipped}};
    out << j.dump(2) << '\n';
    return kExitOk;
}

// ------------------------------------------------------------ curvature-map

int cmd_curvature_map(const Source& src, const std::string& region_text, int nu, int nu1,
                      std::ostream& out) {
    const Region region = region_for(src, region_text, false);
    out << "u,u1,r1212,r1313,r2323,k_int\n";
    for (const auto& [u, u1] : region.grid(nu, nu1)) {
        const JetPoint p{0.0, u, u1};
        const CurvTriple c = sectional_curvatures(src.entry.ode, p);
        const LeafGeometry lg = leaf_geometry(src.entry.ode, p);
        out << fmt(u) << ',' << fmt(u1) << ',' << fmt(c.r1212) << ',' << fmt(c.r1313) << ','
            << fmt(c.r2323) << ',' << fmt(lg.k_int) << '\n';
    }
    return kExitOk;
}

// ---------------------------------------------------------------- verify

int cmd_verify(const SourceOptions& src_opts, bool all, std::ostream& out) {
    if (!src_opts.ode_text.empty())
        throw UsageError("verify runs the recorded checks of builtin entries; --ode has "
                         "no recorded references to verify against");
    std::vector<Source> sources;
    if (all) {
        if (!src_opts.entry.empty() || !src_opts.ode_text.empty())
            throw UsageError("--all replaces the entry argument");
        for (const std::string& name : entry_names()) {
            SourceOptions one = src_opts;
            one.entry = name;
            sources.push_back(resolve_source(one));
        }
    } else {
        sources.push_back(resolve_source(src_opts));
    }

    bool ok = true;
    for (const Source& s : sources) {
        const VerifyReport report = verify_entry(s.entry);
        print_report(out, report);
        ok = ok && report.all_pass();
    }
    out << (ok ? "OK\n" : "FAILED\n");
    return ok ? kExitOk : kExitVerifyFailed;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"geometry of second-order ODEs: metric, curvature, geodesics, "
                 "energy foliation, variational reconstruction"};
    app.name("jetflow");
    app.require_subcommand(1);

    int exit_code = kExitOk;

    // list
    auto* list = app.add_subcommand("list", "catalog of builtin entries as JSON");
    list->callback([&] { out << describe_entries(); });

    // analyze
    SourceOptions analyze_src;
    std::string analyze_at;
    auto* analyze = app.add_subcommand("analyze", "full pointwise geometry report as JSON");
    add_source_options(analyze, analyze_src);
    analyze->add_option("--at", analyze_at, "chart point u,u1 (or x,u,u1)")->required();
    analyze->callback([&] { exit_code = cmd_analyze(resolve_source(analyze_src), analyze_at, out); });

    // geodesic
    SourceOptions geo_src;
    std::string geo_kind = "solution", geo_from, geo_tangent;
    double geo_until = 0.0;
    int geo_samples = 201;
    bool geo_no_halt = false;
    auto* geo = app.add_subcommand("geodesic", "integrate a solution or geodesic, CSV output");
    add_source_options(geo, geo_src);
    geo->add_option("--kind", geo_kind, "curve kind: solution (default) or geodesic");
    geo->add_option("--from", geo_from, "start point u,u1 (or x,u,u1)")->required();
    geo->add_option("--tangent", geo_tangent,
                    "geodesic initial tangent dx,du,du1 (default: prolongation direction)");
    geo->add_option("--until", geo_until, "end of the parameter interval")->required();
    geo->add_option("--samples", geo_samples, "number of output samples (default 201)");
    geo->add_flag("--no-halt", geo_no_halt, "do not stop at the chart boundary u1 = 0");
    geo->callback([&] {
        exit_code = cmd_geodesic(resolve_source(geo_src), geo_kind, geo_from, geo_tangent,
                                 geo_until, geo_samples, geo_no_halt, out, err);
    });

    // energy
    SourceOptions en_src;
    bool en_check = false, en_conserve = false;
    std::string en_trace, en_label, en_expr, en_region, en_from;
    double en_until = 0.0;
    int en_nu = 20, en_nu1 = 20;
    auto* en = app.add_subcommand("energy", "first-integral checks, leaf traces, labels");
    add_source_options(en, en_src);
    en->add_flag("--check", en_check, "grid-check a conserved-quantity candidate (JSON)");
    en->add_option("--trace", en_trace, "trace a leaf: u_from,u1_from,u_to (CSV)");
    en->add_flag("--conserve", en_conserve, "drift of the first integral along a trajectory");
    en->add_option("--label", en_label, "leaf label u,u1,u_ref: u1 at the section u = u_ref");
    en->add_option("--expr", en_expr, "candidate expression over (u,u1)");
    en->add_option("--region", en_region, "grid region umin,umax,u1min,u1max");
    en->add_option("--from", en_from, "trajectory start u,u1 (or x,u,u1)");
    auto* en_until_opt = en->add_option("--until", en_until, "trajectory end abscissa");
    en->add_option("--nu", en_nu, "grid points along u (default 20)");
    en->add_option("--nu1", en_nu1, "grid points along u1 (default 20)");
    en->callback([&] {
        exit_code = cmd_energy(resolve_source(en_src), en_check, en_trace, en_conserve, en_label,
                               en_expr, en_region, en_from, en_until, en_until_opt->count() > 0,
                               en_nu, en_nu1, out, err);
    });

    // lagrangian
    SourceOptions lag_src;
    bool lag_grid = false, lag_exact = false;
    std::string lag_along, lag_l, lag_e, lag_region;
    double lag_base = 0.0, lag_until = 0.0;
    int lag_nu = 12, lag_nu1 = 12;
    auto* lag = app.add_subcommand("lagrangian", "variational reconstruction and its checks");
    add_source_options(lag, lag_src);
    lag->add_flag("--grid", lag_grid, "tabulate L and its partials over a region (CSV)");
    lag->add_option("--along", lag_along, "Euler-Lagrange residual along the solution from u,u1");
    lag->add_flag("--exactness", lag_exact, "check d(energy) = mu * w3 over a region (JSON)");
    lag->add_option("--L", lag_l, "closed-form Lagrangian expression over (u,u1)");
    lag->add_option("--E", lag_e, "energy expression to rebuild L from by quadrature");
    auto* lag_base_opt = lag->add_option("--base", lag_base, "u1 base point for the quadrature");
    lag->add_option("--region", lag_region, "grid region umin,umax,u1min,u1max");
    auto* lag_until_opt = lag->add_option("--until", lag_until, "end abscissa for --along");
    lag->add_option("--nu", lag_nu, "grid points along u (default 12)");
    lag->add_option("--nu1", lag_nu1, "grid points along u1 (default 12)");
    lag->callback([&] {
        exit_code = cmd_lagrangian(resolve_source(lag_src), lag_grid, lag_along, lag_exact, lag_l,
                                   lag_e, lag_base, lag_base_opt->count() > 0, lag_region,
                                   lag_until, lag_until_opt->count() > 0, lag_nu, lag_nu1, out,
                                   err);
    });

    // curvature-map
    SourceOptions map_src;
    std::string map_region;
    int map_nu = 20, map_nu1 = 20;
    auto* map = app.add_subcommand("curvature-map", "curvature components over a grid, CSV");
    add_source_options(map, map_src);
    map->add_option("--region", map_region, "grid region umin,umax,u1min,u1max");
    map->add_option("--nu", map_nu, "grid points along u (default 20)");
    map->add_option("--nu1", map_nu1, "grid points along u1 (default 20)");
    map->callback([&] {
        exit_code = cmd_curvature_map(resolve_source(map_src), map_region, map_nu, map_nu1, out);
    });

    // verify
    SourceOptions ver_src;
    bool ver_all = false;
    auto* ver = app.add_subcommand("verify", "run the self-check battery, PASS/FAIL lines");
    add_source_options(ver, ver_src);
    ver->add_flag("--all", ver_all, "verify every builtin entry");
    ver->callback([&] { exit_code = cmd_verify(ver_src, ver_all, out); });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err); // prints help or the parse error
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return exit_code;
}

} // namespace jetflow::cli
