#pragma once

#include <vector>

#include "fpt/boundary.hpp"
#include "fpt/clock.hpp"
#include "fpt/propagator.hpp"

namespace fpt {

struct PipelineOptions {
    PropagatorConfig propagator;
    // clamp the bridge expectation into (0, 1] -- valid when beta' >= 0 on
    // the horizon (the weight exp{-int beta' Y} is then <= 1 pathwise);
    // disabled automatically when beta' dips below 0
    bool clamp_expectation = true;
    double cdf_quad_tol = 1e-8;
};

// Change-of-measure prefactor carrying the boundary slope:
//   exp{ -a beta(0) - 1/2 int_0^s f'(u) beta(u) du }
// (equivalently exp{ -beta(s) a + a int_0^s beta' - 1/2 int b beta }; both
// forms are computed and must agree to 1e-10 relative).
double girsanov_prefactor(const MovingBoundary& boundary, const VolatilityClock& clock,
                          double s, double quad_tol = 1e-12);

// First-passage density of M over f at s > 0:
//   p(s) = E_bridge[s] * girsanov_prefactor(s) * phi_a(s)
// where phi_a is the fixed-level density at a = f(0).  s == 0 returns 0.
double fpt_density(const MovingBoundary& boundary, const VolatilityClock& clock,
                   double s, const PipelineOptions& opts = {},
                   WarningLog* warnings = nullptr);

// P(T <= t), integrating the density with the substitution
// q = a / sqrt(2 H(s)) (maps [t, inf) to a finite q-interval and flattens the
// Gaussian tail); the q-integral is truncated at q_lo + 9.
double fpt_cdf(const MovingBoundary& boundary, const VolatilityClock& clock,
               double t, const PipelineOptions& opts = {},
               WarningLog* warnings = nullptr);

// Appends the scenario-level caveats for the given horizon to `warnings`:
// beta-prime-negative (clamp disabled, pathwise weight can exceed 1) and
// shifted-image (absorption at the gauge-shifted state makes the analytic
// density approximate whenever beta' is not identically zero).
void scenario_warnings(const MovingBoundary& boundary, const VolatilityClock& clock,
                       double horizon, WarningLog* warnings);

struct DensityCurve {
    std::vector<double> s;
    std::vector<double> density;
    std::vector<double> cdf;      // cumulative, anchored at fpt_cdf(s[0])
    double total_mass;            // cdf.back()
    WarningLog warnings;
};

DensityCurve density_curve(const MovingBoundary& boundary, const VolatilityClock& clock,
                           const std::vector<double>& grid,
                           const PipelineOptions& opts = {});

}  // namespace fpt
