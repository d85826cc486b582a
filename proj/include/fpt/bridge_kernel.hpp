#pragma once

#include "fpt/clock.hpp"
#include "fpt/errors.hpp"

namespace fpt {

// Transition kernels on the clock scale.  V = H(tau) - H(t) throughout.

// Free heat kernel N(y - x; V) = (2 pi V)^{-1/2} exp(-(y-x)^2 / (2V))
double free_kernel(const VolatilityClock& clock, double t, double x, double tau, double y);

// Kernel of Brownian motion absorbed at 0 (method of images):
//   N(y - x; V) - N(y + x; V)
double image_kernel(const VolatilityClock& clock, double t, double x, double tau, double y);

// Same with the absorbing barrier at level c instead of 0:
//   N(y - x; V) - N(y + x - 2c; V)
double absorbed_kernel_at(const VolatilityClock& clock, double t, double x, double tau,
                          double y, double barrier);

// Transition density of the Brownian motion conditioned to stay positive on
// [t, s] and to vanish at s (the three-dimensional Bessel bridge onto 0 in
// the clock H): for t <= tau < s, x > 0, y > 0,
//
//   p(tau, y | t, x) = passage(tau, y; s, 0) / passage(t, x; s, 0)
//                      * [N(y-x; V) - N(y+x; V)]
//
// Degenerate steps (H(tau) - H(t) < 1e-14) return 0 and append a warning.
double bridge_transition(const VolatilityClock& clock, double s, double t, double x,
                         double tau, double y, WarningLog* warnings = nullptr);

// P(Y_tau <= Y | Y_t = x) under the same bridge law, in closed form.
// With Dt = H(s)-H(t), Dtau = H(s)-H(tau), V = H(tau)-H(t),
// sig2 = V Dtau / Dt, m = x Dtau / Dt:
//   C(Y) = [J_m(Y) - J_{-m}(Y)] / (x sqrt(2 pi sig2) ... )   (normalised)
// Total mass over Y in [0, inf) is exactly 1.
double bridge_transition_cdf(const VolatilityClock& clock, double s, double t, double x,
                             double tau, double Y);

}  // namespace fpt
