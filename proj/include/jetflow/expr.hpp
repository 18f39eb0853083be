#pragma once
// Arithmetic expressions over jet variables and named parameters.
//
// Grammar (EBNF):
//   expression = term { ("+" | "-") term } ;
//   term       = unary { ("*" | "/") unary } ;
//   unary      = "-" unary | power ;
//   power      = primary [ "^" unary ] ;            (right associative)
//   primary    = number | identifier | identifier "(" expression ")"
//              | "(" expression ")" ;
//
// "^" binds tighter than unary minus, so -u^2 parses as -(u^2). There is no
// implicit multiplication. pi and e are predefined constants and cannot be
// shadowed by parameters. Identifiers that look like jet variables (x, u, u1,
// u2, ...) but are not in the allowed variable set are rejected at parse time;
// all other identifiers are free parameters bound at evaluation.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "jetflow/hyperdual.hpp"

namespace jetflow {

using ParamMap = std::map<std::string, double>;

enum class UnaryFn { Neg, Sqrt, Exp, Ln, Sin, Cos, Tan, Arctan, Arcsin, Arcsinh };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    enum class Kind { Number, Var, Param, Unary, Binary };
    Kind kind;
    std::size_t position = 0;  // offset into the source text, for diagnostics

    double number = 0.0;        // Kind::Number
    std::string name;           // Kind::Var / Kind::Param
    UnaryFn unary_fn{};         // Kind::Unary
    BinaryOp binary_op{};       // Kind::Binary
    ExprPtr lhs, rhs;           // Unary uses lhs only
};

class Expr {
public:
    Expr() = default;
    explicit Expr(ExprPtr root, std::string text) : root_(std::move(root)), text_(std::move(text)) {}

    bool valid() const { return root_ != nullptr; }
    const ExprPtr& root() const { return root_; }
    const std::string& text() const { return text_; }  // original source

    // Canonical rendering with minimal parentheses; reparsing it yields an
    // identical tree.
    std::string print() const;

    // Variables are paired with lift axes: eval binds them in declaration
    // order of parse()'s allowed_vars (first -> Axis::U, second -> Axis::V).
    HyperDual2 eval_hd(const ParamMap& params,
                       const std::map<std::string, HyperDual2>& vars) const;
    double eval(const ParamMap& params, const std::map<std::string, double>& vars) const;

    // Free parameter names referenced anywhere in the tree.
    std::set<std::string> param_names() const;

private:
    ExprPtr root_;
    std::string text_;
};

// Parse text over an allowed set of jet variables (such as {"u","u1"} for an
// ODE right side or {"u"} for a density). Throws SyntaxError,
// UnknownIdentifier, ArityError.
Expr parse(const std::string& text, const std::vector<std::string>& allowed_vars);

// Structural equality of parse trees (positions ignored).
bool same_tree(const ExprPtr& a, const ExprPtr& b);

// An expression over (u, u1) bundled with its parameter bindings. This is the
// shape energy candidates, Lagrangians and ODE right sides travel in.
struct BoundExpr {
    Expr ast;
    ParamMap params;

    // Value and all partials with respect to (u, u1).
    HyperDual2 jet(double u, double u1) const {
        return ast.eval_hd(params, {{"u", HyperDual2::lift(u, Axis::U)},
                                    {"u1", HyperDual2::lift(u1, Axis::V)}});
    }
    double value(double u, double u1) const {
        return ast.eval(params, {{"u", u}, {"u1", u1}});
    }
};

// Same bundle for expressions over u alone (densities, coefficient functions).
struct BoundExprU {
    Expr ast;
    ParamMap params;

    HyperDual2 jet(double u) const {
        return ast.eval_hd(params, {{"u", HyperDual2::lift(u, Axis::U)}});
    }
    double value(double u) const { return ast.eval(params, {{"u", u}}); }
};

} // namespace jetflow
