#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "fd_oracle.hpp"
#include "jetflow/errors.hpp"
#include "jetflow/expr.hpp"

using jetflow::Axis;
using jetflow::BoundExpr;
using jetflow::Expr;
using jetflow::HyperDual2;
using jetflow::parse;
using testutil::close_rel;

namespace {

const std::vector<std::string> UV = {"u", "u1"};

BoundExpr bind(const std::string& text, jetflow::ParamMap params = {}) {
    return BoundExpr{parse(text, UV), std::move(params)};
}

} // namespace

// ===== parsing =====

TEST_CASE("representative right sides parse and evaluate") {
    auto phi = bind("sqrt(1 - kappa*u1^2)", {{"kappa", 1.0}});
    auto r = phi.jet(0.0, 0.5);
    CHECK(r.val == doctest::Approx(std::sqrt(0.75)).epsilon(1e-15));

    auto kz = bind("(4*u1^2 + u^2 + u)/(2*u + 1)");
    auto s = kz.jet(0.0, 1.0);
    CHECK(s.val == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(s.du == doctest::Approx(-7.0).epsilon(1e-12));  // (2u^2+2u+1-8u1^2)/(2u+1)^2 at (0,1)
    CHECK(s.dv == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("precedence and associativity") {
    CHECK(parse("2^3^2", UV).eval({}, {}) == doctest::Approx(512.0));          // right assoc
    CHECK(parse("8/4/2", UV).eval({}, {}) == doctest::Approx(1.0));            // left assoc
    CHECK(parse("8-4-2", UV).eval({}, {}) == doctest::Approx(2.0));
    CHECK(parse("-2^2", UV).eval({}, {}) == doctest::Approx(-4.0));            // ^ before unary -
    CHECK(parse("(-2)^2", UV).eval({}, {}) == doctest::Approx(4.0));
    CHECK(parse("2^-1", UV).eval({}, {}) == doctest::Approx(0.5));
    CHECK(parse("2*-3", UV).eval({}, {}) == doctest::Approx(-6.0));
    CHECK(parse("1+2*3^2", UV).eval({}, {}) == doctest::Approx(19.0));
}

TEST_CASE("constants are predefined and unshadowable") {
    CHECK(parse("pi", UV).eval({}, {}) == doctest::Approx(std::numbers::pi));
    CHECK(parse("e", UV).eval({}, {}) == doctest::Approx(std::numbers::e));
    // a binding named pi is ignored: the name is resolved at parse time
    CHECK(parse("2*pi", UV).eval({{"pi", 3.0}}, {}) ==
          doctest::Approx(2.0 * std::numbers::pi));
}

TEST_CASE("variable roles are enforced") {
    CHECK_THROWS_AS(parse("u2 + 1", UV), jetflow::UnknownIdentifier);
    CHECK_THROWS_AS(parse("x + u", UV), jetflow::UnknownIdentifier);
    CHECK_THROWS_AS(parse("u1 + 1", {"u"}), jetflow::UnknownIdentifier);
    CHECK_NOTHROW(parse("rho0 * u", {"u"}));
}

TEST_CASE("syntax errors carry positions") {
    try {
        parse("1 + * 2", UV);
        FAIL("expected SyntaxError");
    } catch (const jetflow::SyntaxError& e) {
        CHECK(e.position == 4);
    }
    try {
        parse("sin(u", UV);
        FAIL("expected SyntaxError");
    } catch (const jetflow::SyntaxError& e) {
        CHECK(e.position == 5);
    }
    CHECK_THROWS_AS(parse("", UV), jetflow::SyntaxError);
    CHECK_THROWS_AS(parse("3 @ 4", UV), jetflow::SyntaxError);
    CHECK_THROWS_AS(parse("1 2", UV), jetflow::SyntaxError);
}

TEST_CASE("function arity and support") {
    CHECK_THROWS_AS(parse("sin(u, u1)", UV), jetflow::ArityError);
    CHECK_THROWS_AS(parse("abs(u)", UV), jetflow::UnsupportedFunction);
    CHECK_THROWS_AS(parse("foo(u)", UV), jetflow::UnknownIdentifier);
}

TEST_CASE("missing parameter binding surfaces at evaluation") {
    auto E = bind("u + (1/kappa)*sqrt(1 - kappa*u1^2)");
    CHECK_THROWS_AS(E.jet(0.0, 0.5), jetflow::MissingParam);
}

TEST_CASE("evaluation propagates domain errors") {
    auto f = bind("sqrt(1 - u1^2)");
    CHECK_THROWS_AS(f.jet(0.0, 2.0), jetflow::InvalidDomain);
    auto g = bind("u/u1");
    CHECK_THROWS_AS(g.jet(1.0, 0.0), jetflow::DivisionByZero);
    auto h = bind("ln(u)");
    CHECK_THROWS_AS(h.jet(-1.0, 1.0), jetflow::InvalidDomain);
}

TEST_CASE("expressions without u1 have exactly zero u1 slots") {
    auto f = bind("u^3 + sin(u)*exp(u)");
    auto r = f.jet(0.7, 1.3);
    CHECK(r.dv == 0.0);
    CHECK(r.duv == 0.0);
    CHECK(r.dvv == 0.0);
}

TEST_CASE("damped oscillator right side") {
    auto phi = bind("-alpha*u1 - lambda*u", {{"alpha", 0.2}, {"lambda", 1.0}});
    auto r = phi.jet(1.0, 2.0);
    CHECK(r.val == doctest::Approx(-1.4).epsilon(1e-15));
    CHECK(r.du == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(r.dv == doctest::Approx(-0.2).epsilon(1e-15));
}

// ===== printing =====

TEST_CASE("print round-trips structurally") {
    const std::vector<std::string> cases = {
        "sqrt(1 - kappa*u1^2)",
        "(4*u1^2 + u^2 + u)/(2*u + 1)",
        "-u - (1/kappa)*(sqrt(1 - kappa*u1^2) + sqrt(kappa)*u1*arcsin(sqrt(kappa)*u1))",
        "2^3^2",
        "-u^2",
        "(-u)^2",
        "u^-2",
        "a - (b + c)",
        "a/(b*c)/d",
        "2*-3 + pi",
        "exp(u)^2",
        "arctan((alpha*u1 + 2*lambda*u)/(2*omega*u1))",
    };
    for (const auto& text : cases) {
        CAPTURE(text);
        Expr e = parse(text, UV);
        Expr again = parse(e.print(), UV);
        CHECK(jetflow::same_tree(e.root(), again.root()));
    }
}

// ===== randomized AST round-trip and derivative oracle =====

namespace {

struct RandomExprGen {
    std::mt19937_64 rng;
    explicit RandomExprGen(unsigned seed) : rng(seed) {}

    // Produces expression text that is total on u, u1 in [-1.2, 1.2]:
    // guarded arguments keep sqrt/ln/arcsin/division inside their domains.
    std::string gen(int depth) {
        std::uniform_int_distribution<int> pick(0, depth <= 0 ? 3 : 11);
        switch (pick(rng)) {
            case 0: return "u";
            case 1: return "u1";
            case 2: return "a";
            case 3: {
                std::uniform_real_distribution<double> c(0.1, 3.0);
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.3f", c(rng));
                return buf;
            }
            case 4: return "(" + gen(depth - 1) + " + " + gen(depth - 1) + ")";
            case 5: return "(" + gen(depth - 1) + " - " + gen(depth - 1) + ")";
            case 6: return gen(depth - 1) + "*" + gen(depth - 1);
            case 7: return gen(depth - 1) + "/(2 + (" + gen(depth - 1) + ")^2)";
            case 8: return "sin(" + gen(depth - 1) + ")";
            case 9: return "cos(" + gen(depth - 1) + ")";
            case 10: return "arctan(" + gen(depth - 1) + ")";
            default: return "sqrt(1 + (" + gen(depth - 1) + ")^2)";
        }
    }
};

} // namespace

TEST_CASE("random expressions: round-trip and agreement with finite differences") {
    RandomExprGen gen(20240817);
    std::mt19937_64 pts(7);
    std::uniform_real_distribution<double> box(-1.2, 1.2);

    for (int i = 0; i < 100; ++i) {
        const std::string text = gen.gen(3);
        CAPTURE(text);
        Expr e = parse(text, UV);

        Expr again = parse(e.print(), UV);
        CHECK(jetflow::same_tree(e.root(), again.root()));

        BoundExpr be{e, {{"a", 0.7}}};
        const double u = box(pts), u1 = box(pts);
        testutil::Fn2 f = [&](double uu, double vv) { return be.value(uu, vv); };
        auto r = be.jet(u, u1);
        CHECK(close_rel(r.val, f(u, u1), 1e-14));
        CHECK(close_rel(r.du, testutil::fd_du(f, u, u1, 1e-5), 1e-7));
        CHECK(close_rel(r.dv, testutil::fd_dv(f, u, u1, 1e-5), 1e-7));
        CHECK(close_rel(r.duu, testutil::fd_duu(f, u, u1, 1e-4), 1e-5));
        CHECK(close_rel(r.duv, testutil::fd_duv(f, u, u1, 1e-4), 1e-5));
        CHECK(close_rel(r.dvv, testutil::fd_dvv(f, u, u1, 1e-4), 1e-5));
    }
}
