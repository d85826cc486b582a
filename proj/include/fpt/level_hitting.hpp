#pragma once

#include "fpt/clock.hpp"

namespace fpt {

// First passage of the time-changed Brownian motion M (dM = h dB, M_0 = 0)
// to the fixed level a > 0.
//
// Density in t:  phi_a(t) = a h^2(t) (2 pi H(t)^3)^{-1/2} exp(-a^2 / (2 H(t)))
double level_density(const VolatilityClock& clock, double a, double t);

// P(T_a <= t) = 2 (1 - Phi(a / sqrt(H(t)))) = erfc(a / sqrt(2 H(t)))
double level_cdf(const VolatilityClock& clock, double a, double t);

// P(T_a < infinity) = erfc(a / sqrt(2 H(inf))); 1 when H diverges.
double level_total_mass(const VolatilityClock& clock, double a);

// First-passage kernel of a Brownian motion (in clock time) started at x > 0
// at time t, absorbed at 0, hitting at time s:
//   |x| (2 pi (H(s)-H(t))^3)^{-1/2} exp(-x^2 / (2 (H(s)-H(t))))
// The y argument is the absorption level (0 for the standard problem); the
// displacement is |x - y|.
double passage_kernel(const VolatilityClock& clock, double t, double x, double s, double y);

}  // namespace fpt
