#pragma once
// Thin adaptive-quadrature front end used for the integral reconstructions
// (Lagrangians from energies, potentials from densities). Wraps Gauss-Kronrod
// and turns "did not converge" into a typed error instead of a quiet loss of
// accuracy.

#include <functional>

namespace jetflow {

struct QuadratureOptions {
    double abs_tol = 1e-11;   // accepted when the error estimate clears this
    unsigned max_depth = 15;  // adaptive bisection depth
};

// Integrates f over [a, b] (either orientation). Throws QuadratureFailure
// when the error estimate stays above tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opts = {});

} // namespace jetflow
