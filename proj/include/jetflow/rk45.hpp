#pragma once
// Embedded Dormand-Prince 5(4) integrator with PI step-size control, a
// locally fifth-order continuous extension, and sign-change event location.
// The right side may throw DomainError; such steps are rejected and retried
// with half the step, so trajectories can hug domain boundaries without the
// caller seeing spurious failures.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "jetflow/errors.hpp"

namespace jetflow {

template <int N>
using RkState = Eigen::Matrix<double, N, 1>;

struct RkOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double h_max = 0.0;       // 0: no cap beyond the remaining span
    long max_steps = 200000;  // accepted + rejected attempts
    double event_tol = 1e-10; // bisection width (in t) for event location
    // When the step size underflows (dynamics too stiff to advance), either
    // throw StepFailure or return the partial result with `stalled` set.
    bool throw_on_stall = true;
};

struct RkStats {
    long accepted = 0;
    long rejected = 0;
    long rhs_evals = 0;
};

template <int N>
class DenseOutput {
public:
    using State = RkState<N>;
    // Continuous extension per accepted step: quartic in the local variable
    // theta = (t - t0)/h with coefficient states c[0..4].
    struct Interval {
        double t0;
        double h;
        std::array<State, 5> c;
    };

    std::vector<Interval> intervals;
    State fallback = State::Zero();

    State eval(double t) const {
        if (intervals.empty()) return fallback;
        const Interval& iv = locate(t);
        double th = clamp_theta((t - iv.t0) / iv.h);
        double th1 = 1.0 - th;
        return iv.c[0] + th * (iv.c[1] + th1 * (iv.c[2] + th * (iv.c[3] + th1 * iv.c[4])));
    }

    // d/dt of the continuous extension.
    State eval_derivative(double t) const {
        if (intervals.empty()) return State::Zero();
        const Interval& iv = locate(t);
        double th = clamp_theta((t - iv.t0) / iv.h);
        State d = iv.c[1] + (1.0 - 2.0 * th) * iv.c[2] + th * (2.0 - 3.0 * th) * iv.c[3] +
                  2.0 * th * (1.0 - th) * (1.0 - 2.0 * th) * iv.c[4];
        return d / iv.h;
    }

private:
    static double clamp_theta(double th) { return std::min(1.0, std::max(0.0, th)); }

    const Interval& locate(double t) const {
        // Intervals are appended in march order; normalize by direction so a
        // binary search works both forwards and backwards.
        double dir = intervals.front().h > 0.0 ? 1.0 : -1.0;
        double tau = dir * t;
        std::size_t lo = 0, hi = intervals.size();
        while (hi - lo > 1) {
            std::size_t mid = (lo + hi) / 2;
            if (dir * intervals[mid].t0 <= tau)
                lo = mid;
            else
                hi = mid;
        }
        return intervals[lo];
    }
};

template <int N>
struct IntegrationResult {
    DenseOutput<N> dense;
    bool event_hit = false;
    bool stalled = false; // only with RkOptions::throw_on_stall = false
    double t_stop = 0.0;
    RkState<N> y_stop = RkState<N>::Zero();
    RkStats stats;
};

// rhs: State(double t, const State&). event: double(double t, const State&),
// integration halts where the event value first reaches <= 0.
template <int N, typename Rhs, typename Event>
IntegrationResult<N> rk45_integrate(Rhs rhs, double t0, RkState<N> y0, double t1,
                                    const RkOptions& opts, Event event) {
    using State = RkState<N>;
    IntegrationResult<N> res;
    res.dense.fallback = y0;
    res.t_stop = t0;
    res.y_stop = y0;

    if (event(t0, y0) <= 0.0) {
        res.event_hit = true;
        return res;
    }
    if (t1 == t0) return res;

    const double dir = t1 > t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    const double hmax = opts.h_max > 0.0 ? std::min(opts.h_max, span) : span;

    double t = t0;
    State y = y0;
    State k1 = rhs(t, y);
    res.stats.rhs_evals += 1;

    double h = dir * std::min(hmax, span * 1e-2);
    double facold = 1e-4;
    bool rejected_last = false;
    long attempts = 0;

    // Dormand-Prince tableau.
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    static constexpr double d1 = -12715105075.0 / 11282082432.0,
                            d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0,
                            d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0,
                            d7 = 69997945.0 / 29380423.0;

    while (true) {
        if (++attempts > opts.max_steps)
            throw StepFailure("step budget exhausted at t = " + std::to_string(t));
        if (std::abs(h) < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
            if (opts.throw_on_stall)
                throw StepFailure("step size underflow at t = " + std::to_string(t));
            res.stalled = true;
            res.t_stop = t;
            res.y_stop = y;
            return res;
        }

        bool last = false;
        if (dir * (t + h - t1) >= 0.0) {
            h = t1 - t;
            last = true;
        }

        State k2, k3, k4, k5, k6, k7, y_new;
        try {
            k2 = rhs(t + c2 * h, y + h * (a21 * k1));
            k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
            k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
            k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            k6 = rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            k7 = rhs(t + h, y_new);
        } catch (const DomainError&) {
            res.stats.rejected += 1;
            h *= 0.5;
            rejected_last = true;
            continue;
        }
        res.stats.rhs_evals += 6;

        State err_vec = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double err = 0.0;
        for (int i = 0; i < N; ++i) {
            double sc = opts.abs_tol +
                        opts.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            double q = err_vec[i] / sc;
            err += q * q;
        }
        err = std::sqrt(err / N);

        if (err <= 1.0 || !std::isfinite(err)) {
            if (!std::isfinite(err)) {
                // Non-finite stage values behave like a domain failure.
                res.stats.rejected += 1;
                h *= 0.5;
                rejected_last = true;
                continue;
            }
            typename DenseOutput<N>::Interval iv;
            iv.t0 = t;
            iv.h = h;
            State ydiff = y_new - y;
            State bspl = h * k1 - ydiff;
            iv.c[0] = y;
            iv.c[1] = ydiff;
            iv.c[2] = bspl;
            iv.c[3] = ydiff - h * k7 - bspl;
            iv.c[4] = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
            res.dense.intervals.push_back(iv);
            res.stats.accepted += 1;

            double g = event(t + h, y_new);
            if (g <= 0.0) {
                double lo = t, hi = t + h;
                while (std::abs(hi - lo) > opts.event_tol) {
                    double mid = 0.5 * (lo + hi);
                    if (event(mid, res.dense.eval(mid)) <= 0.0)
                        hi = mid;
                    else
                        lo = mid;
                }
                res.event_hit = true;
                res.t_stop = hi;
                res.y_stop = res.dense.eval(hi);
                return res;
            }

            t += h;
            y = y_new;
            k1 = k7;
            if (last) {
                res.t_stop = t1;
                res.y_stop = y;
                return res;
            }

            double fac11 = std::pow(err, 0.17);
            double fac = fac11 / std::pow(facold, 0.04);
            fac = std::max(0.1, std::min(5.0, fac / 0.9));
            double h_new = h / fac;
            if (rejected_last) h_new = dir * std::min(std::abs(h_new), std::abs(h));
            h = dir * std::min(std::abs(h_new), hmax);
            facold = std::max(err, 1e-4);
            rejected_last = false;
        } else {
            res.stats.rejected += 1;
            double fac11 = std::pow(err, 0.17);
            h = h / std::min(5.0, fac11 / 0.9);
            rejected_last = true;
        }
    }
}

template <int N, typename Rhs>
IntegrationResult<N> rk45_integrate(Rhs rhs, double t0, RkState<N> y0, double t1,
                                    const RkOptions& opts = {}) {
    return rk45_integrate<N>(std::move(rhs), t0, std::move(y0), t1, opts,
                             [](double, const RkState<N>&) { return 1.0; });
}

} // namespace jetflow
