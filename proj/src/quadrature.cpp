#include "jetflow/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

#include "jetflow/errors.hpp"

namespace jetflow {

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opts) {
    if (a == b) return 0.0;
    if (a > b) return -integrate(f, b, a, opts);

    using rule = boost::math::quadrature::gauss_kronrod<double, 15>;
    double error = 0.0;
    double l1 = 0.0;
    // Request a tight relative termination; acceptance is judged on the
    // returned error estimate against the absolute tolerance (scale-floored
    // so large integrals are not held to an impossible bar). The requested
    // tolerance must respect two floors of the underlying rule: its panel
    // error estimate never drops below a few eps in normalized units, so
    // asking beyond 1e-13, or beyond eps/half-width on a narrow interval,
    // makes every panel fail its stop test and the rule subdivides to max
    // depth, summing 2^depth roundoff floors into the returned estimate
    // even though the value itself stays exact.
    const double eps = std::numeric_limits<double>::epsilon();
    const double tol = std::max(1e-13, 8.0 * eps / std::max(b - a, eps));
    double value = rule::integrate(f, a, b, opts.max_depth, tol, &error, &l1);
    double bar = opts.abs_tol * std::max(1.0, std::abs(value));
    if (!(error <= bar) || !std::isfinite(value))
        throw QuadratureFailure("error estimate " + std::to_string(error) + " over [" +
                                std::to_string(a) + ", " + std::to_string(b) + "]");
    return value;
}

} // namespace jetflow
