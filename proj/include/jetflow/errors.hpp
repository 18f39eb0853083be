#pragma once
// Error types thrown across the library. Everything derives from jetflow::Error
// so callers (and the CLI) can map failures to a single exit path.

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jetflow {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Scalar AD arithmetic.
struct DivisionByZero : Error {
    DivisionByZero() : Error("division by zero value") {}
    explicit DivisionByZero(const std::string& ctx) : Error("division by zero value: " + ctx) {}
};

struct InvalidDomain : Error {
    explicit InvalidDomain(const std::string& msg) : Error("invalid domain: " + msg) {}
};

struct UnsupportedFunction : Error {
    explicit UnsupportedFunction(const std::string& name)
        : Error("unsupported function: " + name) {}
};

// Expression parsing and evaluation.
struct SyntaxError : Error {
    std::size_t position;
    SyntaxError(std::size_t pos, const std::string& msg)
        : Error("syntax error at position " + std::to_string(pos) + ": " + msg), position(pos) {}
};

struct UnknownIdentifier : Error {
    std::string name;
    explicit UnknownIdentifier(const std::string& n)
        : Error("unknown identifier: " + n), name(n) {}
};

struct ArityError : Error {
    explicit ArityError(const std::string& msg) : Error("arity error: " + msg) {}
};

struct MissingParam : Error {
    std::string name;
    explicit MissingParam(const std::string& n)
        : Error("missing parameter binding: " + n), name(n) {}
};

// Manifold-level evaluation.
struct SingularPoint : Error {
    explicit SingularPoint(double u1)
        : Error("point outside chart: |u1| = " + std::to_string(u1) + " is below eps_u1") {}
};

struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error("domain error: " + msg) {}
};

struct StepTooLarge : Error {
    explicit StepTooLarge(const std::string& msg)
        : Error("finite-difference stencil leaves the domain: " + msg) {}
};

// Integration.
struct StepFailure : Error {
    explicit StepFailure(const std::string& msg) : Error("integrator step failure: " + msg) {}
};

struct SingularCrossing : Error {
    double where;
    explicit SingularCrossing(double w)
        : Error("u1 reached the singular set near parameter " + std::to_string(w)), where(w) {}
};

struct NotReachable : Error {
    double stopped_at;
    NotReachable(double target, double stop)
        : Error("reference section u = " + std::to_string(target) +
                " not reachable along the leaf; trace stopped at u = " + std::to_string(stop)),
          stopped_at(stop) {}
};

// Quadrature.
struct QuadratureFailure : Error {
    explicit QuadratureFailure(const std::string& msg) : Error("quadrature failure: " + msg) {}
};

struct SignCrossing : Error {
    explicit SignCrossing(const std::string& msg)
        : Error("integration range crosses u1 = 0: " + msg) {}
};

// Region-based checks.
struct EmptyRegion : Error {
    explicit EmptyRegion(const std::string& msg) : Error("empty sampling region: " + msg) {}
};

struct DegenerateLagrangian : Error {
    explicit DegenerateLagrangian(const std::string& msg)
        : Error("degenerate Lagrangian: " + msg) {}
};

// Registry.
struct ConstraintViolation : Error {
    explicit ConstraintViolation(const std::string& msg)
        : Error("parameter constraint violated: " + msg) {}
};

struct UnknownEntry : Error {
    explicit UnknownEntry(const std::string& name) : Error("unknown builtin entry: " + name) {}
};

// CLI.
struct UsageError : Error {
    explicit UsageError(const std::string& msg) : Error("usage error: " + msg) {}
};

} // namespace jetflow
