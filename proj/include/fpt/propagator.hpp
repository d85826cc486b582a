#pragma once

#include "fpt/bridge_kernel.hpp"
#include "fpt/errors.hpp"
#include "fpt/gauge.hpp"

namespace fpt {

struct PropagatorConfig {
    // tau = s (1 - delta_frac) is the evaluation offset for the terminal
    // limit; must lie in (0, 0.1)
    double delta_frac = 1e-4;
    // upper integration limit in units of the concentrated scale sqrt(eps)
    double b_max_sigmas = 12.0;  // >= 8
    // extrapolate the O(sqrt(delta)) boundary-layer error to delta -> 0 over
    // {delta, delta/2, delta/4}; without it the raw value at delta is used
    bool richardson = true;
    AnchorPolicy anchor = AnchorPolicy::grazing;
    int gauge_steps = 2048;
    double quad_tol = 1e-10;

    void validate() const;
};

// Potential-weighted absorbed kernel, assembled from the gauge pair:
//
//   G(t, a; tau, b) = exp{ a pi(t) - b pi(tau) + S(t, tau) }
//                     * [ N(z - y; V) - N(z + y; V) ]
//   y = a + v(t),  z = b + v(tau),  V = H(tau) - H(t)
//
// Solves the backward and forward equations with potential beta'(u) x
// exactly for every anchor; the image term absorbs at state -v(u), so the
// anchor decides where the barrier sits (grazing keeps it <= 0).
// Assembled in log space; the image difference uses -expm1(-2 y z / V).
// y <= 0 or z <= 0 is evaluated as written and appends a shifted-domain
// warning.
double schrodinger_kernel(const GaugeFunctions& gauge, const VolatilityClock& clock,
                          double t, double a, double tau, double b,
                          WarningLog* warnings = nullptr);

struct KernelParts {
    double log_gauge;  // a pi(t) - b pi(tau) + S(t,tau)
    double y, z, V;
    double direct;     // N(z - y; V)
    double image;      // N(z + y; V)
    double value;
};

KernelParts schrodinger_kernel_parts(const GaugeFunctions& gauge, const VolatilityClock& clock,
                                     double t, double a, double tau, double b);

struct BridgeExpectation {
    double value;             // extrapolated (or raw) expectation
    double raw;               // value at delta_frac before extrapolation
    double delta_used;        // delta_frac actually evaluated
    double change_on_refine;  // |R2 - R1| / max(|R2|, tiny)
};

// E[ exp{ -int_t^s beta'(u) Y_u du } ] for the Bessel bridge Y from a at t
// to 0 at s, computed as
//
//   lim_{tau -> s-} int_0^inf [passage(tau,b; s,0) / passage(t,a; s,0)]
//                             G(t, a; tau, b) db
//
// at tau = s (1 - delta).  The b-integral concentrates at scale
// sqrt(H(s)-H(tau)); it is taken adaptively on [0, b_hi] against the exact
// Gaussian envelope.  With richardson the s-boundary-layer error O(sqrt(d))
// is removed by evaluating delta, delta/2, delta/4:
//   R_k = (sqrt(2) E(d/2^k) - E(d/2^{k-1})) / (sqrt(2) - 1)
// and |R2 - R1| must be <= 1e-3 relative or ConvergenceError is thrown.
BridgeExpectation bridge_expectation_full(const MovingBoundary& boundary,
                                          const VolatilityClock& clock,
                                          double t, double s,
                                          const PropagatorConfig& cfg = {},
                                          WarningLog* warnings = nullptr);

// convenience: .value of the above
double bridge_expectation(const MovingBoundary& boundary, const VolatilityClock& clock,
                          double t, double s, const PropagatorConfig& cfg = {},
                          WarningLog* warnings = nullptr);

}  // namespace fpt
