#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "fpt/errors.hpp"

namespace fpt {

enum class ClockKind { constant, exponential, power, tabulated, custom };

// Deterministic volatility clock of a continuous martingale
// dM_u = h(u) dB_u:  h(u) > 0 and the quadratic variation
// H(t) = int_0^t h^2(u) du.  H is the time change mapping the problem onto a
// standard Brownian motion run at speed H.
//
// Kinds:
//   constant(sigma):        h(u) = sigma
//   exponential(lambda):    h(u) = exp(lambda u)
//   power(scale, p):        h(u) = scale (1 + u)^p
//   tabulated(u, h):        monotone cubic (Fritsch-Carlson) interpolation of
//                           h^2 on the knots; H integrates the interpolant
//                           exactly; h is held constant beyond the last knot
//   custom(fn):             arbitrary positive h; H by adaptive quadrature
class VolatilityClock {
public:
    static VolatilityClock constant(double sigma);
    static VolatilityClock exponential(double lambda);
    static VolatilityClock power(double scale, double exponent);
    static VolatilityClock tabulated(std::vector<double> u, std::vector<double> h);
    static VolatilityClock custom(std::function<double(double)> h);

    ClockKind kind() const { return kind_; }

    double h(double u) const;
    double h2(double u) const;
    double h2_prime(double u) const;

    // H(t); exact formula for the analytic kinds, exact integral of the
    // interpolant for tabulated, adaptive quadrature (abs tol 1e-12) for
    // custom.  t < 0 is a domain error.
    double cumulative_variance(double t) const;

    // H(tau) - H(t); requires t <= tau.
    double variance_between(double t, double tau) const;

    // H(infinity); +infinity when the variance does not saturate.
    double total_variance() const;

    // H^{-1}(theta) by bisection to absolute tolerance 1e-12 in t.
    // theta < 0 or theta beyond the total variance is a domain error.
    double inverse_clock(double theta) const;

private:
    VolatilityClock() = default;

    double tabulated_h2(double u) const;
    double tabulated_h2_prime(double u) const;
    double tabulated_H(double t) const;

    ClockKind kind_ = ClockKind::constant;
    double p1_ = 1.0, p2_ = 0.0;  // sigma | lambda | scale,exponent
    std::function<double(double)> custom_h_;

    // tabulated representation: knots, g = h^2 at knots, Fritsch-Carlson
    // slopes of g, and the exact integral of the interpolant up to each knot
    std::vector<double> knots_, g_, slope_, G_;
};

}  // namespace fpt
