#pragma once
// Second-order forward-mode scalar: carries value, both first partials and the
// full symmetric Hessian with respect to two independent variables (u, v).
// Arithmetic is exact to rounding; no truncation enters the derivative slots.

#include <cmath>
#include <limits>

#include "jetflow/errors.hpp"

namespace jetflow {

enum class Axis { U, V };

struct HyperDual2 {
    double val = 0.0;
    double du = 0.0;
    double dv = 0.0;
    double duu = 0.0;
    double duv = 0.0;
    double dvv = 0.0;

    constexpr HyperDual2() = default;
    constexpr HyperDual2(double v) : val(v) {}  // constant lift, all derivatives zero
    constexpr HyperDual2(double v, double pu, double pv, double puu, double puv, double pvv)
        : val(v), du(pu), dv(pv), duu(puu), duv(puv), dvv(pvv) {}

    // Lift a coordinate value as an independent variable: unit first derivative
    // along the chosen axis, zero curvature.
    static constexpr HyperDual2 lift(double v, Axis axis) {
        HyperDual2 r(v);
        (axis == Axis::U ? r.du : r.dv) = 1.0;
        return r;
    }

    constexpr HyperDual2 operator-() const { return {-val, -du, -dv, -duu, -duv, -dvv}; }
};

constexpr HyperDual2 operator+(const HyperDual2& a, const HyperDual2& b) {
    return {a.val + b.val, a.du + b.du, a.dv + b.dv, a.duu + b.duu, a.duv + b.duv, a.dvv + b.dvv};
}

constexpr HyperDual2 operator-(const HyperDual2& a, const HyperDual2& b) {
    return {a.val - b.val, a.du - b.du, a.dv - b.dv, a.duu - b.duu, a.duv - b.duv, a.dvv - b.dvv};
}

// Leibniz rule through second order.
constexpr HyperDual2 operator*(const HyperDual2& a, const HyperDual2& b) {
    return {a.val * b.val,
            a.du * b.val + a.val * b.du,
            a.dv * b.val + a.val * b.dv,
            a.duu * b.val + 2.0 * a.du * b.du + a.val * b.duu,
            a.duv * b.val + a.du * b.dv + a.dv * b.du + a.val * b.duv,
            a.dvv * b.val + 2.0 * a.dv * b.dv + a.val * b.dvv};
}

// Chain rule for a scalar function with derivatives f0 = f(a), f1 = f'(a), f2 = f''(a).
constexpr HyperDual2 compose(const HyperDual2& a, double f0, double f1, double f2) {
    return {f0,
            f1 * a.du,
            f1 * a.dv,
            f2 * a.du * a.du + f1 * a.duu,
            f2 * a.du * a.dv + f1 * a.duv,
            f2 * a.dv * a.dv + f1 * a.dvv};
}

inline HyperDual2 operator/(const HyperDual2& a, const HyperDual2& b) {
    if (b.val == 0.0) throw DivisionByZero();
    const double inv = 1.0 / b.val;
    return a * compose(b, inv, -inv * inv, 2.0 * inv * inv * inv);
}

constexpr HyperDual2 operator+(const HyperDual2& a, double c) { return a + HyperDual2(c); }
constexpr HyperDual2 operator+(double c, const HyperDual2& a) { return HyperDual2(c) + a; }
constexpr HyperDual2 operator-(const HyperDual2& a, double c) { return a - HyperDual2(c); }
constexpr HyperDual2 operator-(double c, const HyperDual2& a) { return HyperDual2(c) - a; }
constexpr HyperDual2 operator*(const HyperDual2& a, double c) { return a * HyperDual2(c); }
constexpr HyperDual2 operator*(double c, const HyperDual2& a) { return HyperDual2(c) * a; }
inline HyperDual2 operator/(const HyperDual2& a, double c) { return a / HyperDual2(c); }
inline HyperDual2 operator/(double c, const HyperDual2& a) { return HyperDual2(c) / a; }

inline bool is_constant(const HyperDual2& a) {
    return a.du == 0.0 && a.dv == 0.0 && a.duu == 0.0 && a.duv == 0.0 && a.dvv == 0.0;
}

inline HyperDual2 sqrt(const HyperDual2& a) {
    if (!(a.val > 0.0)) throw InvalidDomain("sqrt requires a strictly positive argument");
    const double r = std::sqrt(a.val);
    return compose(a, r, 0.5 / r, -0.25 / (r * a.val));
}

inline HyperDual2 exp(const HyperDual2& a) {
    const double e = std::exp(a.val);
    return compose(a, e, e, e);
}

inline HyperDual2 ln(const HyperDual2& a) {
    if (!(a.val > 0.0)) throw InvalidDomain("ln requires a strictly positive argument");
    const double inv = 1.0 / a.val;
    return compose(a, std::log(a.val), inv, -inv * inv);
}

inline HyperDual2 sin(const HyperDual2& a) {
    const double s = std::sin(a.val), c = std::cos(a.val);
    return compose(a, s, c, -s);
}

inline HyperDual2 cos(const HyperDual2& a) {
    const double s = std::sin(a.val), c = std::cos(a.val);
    return compose(a, c, -s, -c);
}

inline HyperDual2 tan(const HyperDual2& a) {
    const double c = std::cos(a.val);
    if (c == 0.0) throw InvalidDomain("tan undefined at odd multiples of pi/2");
    const double t = std::tan(a.val);
    const double sec2 = 1.0 + t * t;
    return compose(a, t, sec2, 2.0 * t * sec2);
}

inline HyperDual2 arctan(const HyperDual2& a) {
    const double d = 1.0 + a.val * a.val;
    return compose(a, std::atan(a.val), 1.0 / d, -2.0 * a.val / (d * d));
}

inline HyperDual2 arcsin(const HyperDual2& a) {
    if (!(std::abs(a.val) < 1.0)) throw InvalidDomain("arcsin requires |argument| < 1");
    const double d = 1.0 - a.val * a.val;
    const double r = std::sqrt(d);
    return compose(a, std::asin(a.val), 1.0 / r, a.val / (d * r));
}

inline HyperDual2 arcsinh(const HyperDual2& a) {
    const double d = 1.0 + a.val * a.val;
    const double r = std::sqrt(d);
    return compose(a, std::asinh(a.val), 1.0 / r, -a.val / (d * r));
}

// Integer powers handle any base; fractional powers require a positive base.
inline HyperDual2 pow(const HyperDual2& a, const HyperDual2& b) {
    if (is_constant(b)) {
        const double c = b.val;
        const double n = std::nearbyint(c);
        if (c == n && std::abs(n) < 1e9) {
            if (a.val == 0.0) {
                if (n < 0.0) throw DivisionByZero("zero base with negative exponent");
                if (n == 0.0) return HyperDual2(1.0);
                if (n == 1.0) return compose(a, 0.0, 1.0, 0.0);
                // n >= 2: value and first derivative vanish at zero
                const double f2 = (n == 2.0) ? 2.0 : 0.0;
                return compose(a, 0.0, 0.0, f2);
            }
            const double f0 = std::pow(a.val, n);
            const double f1 = n * std::pow(a.val, n - 1.0);
            const double f2 = n * (n - 1.0) * std::pow(a.val, n - 2.0);
            return compose(a, f0, f1, f2);
        }
        if (!(a.val > 0.0))
            throw InvalidDomain("fractional power requires a strictly positive base");
        const double f0 = std::pow(a.val, c);
        return compose(a, f0, c * f0 / a.val, c * (c - 1.0) * f0 / (a.val * a.val));
    }
    if (!(a.val > 0.0))
        throw InvalidDomain("power with non-constant exponent requires a positive base");
    return exp(b * ln(a));
}

inline HyperDual2 abs(const HyperDual2&) {
    // Kink at zero breaks the second-order chain rule; rejected by contract.
    throw UnsupportedFunction("abs");
}

} // namespace jetflow
