#include "fpt/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "fpt/level_hitting.hpp"
#include "fpt/numerics.hpp"

namespace fpt {

double girsanov_prefactor(const MovingBoundary& boundary, const VolatilityClock& clock,
                          double s, double quad_tol) {
    if (!(s > 0.0)) throw NumericsError("girsanov_prefactor: needs s > 0");
    // beta() and slope() are already normalised so that f(0) = a > 0
    const double a = boundary.start_level();

    auto beta = [&](double u) { return boundary.beta(clock, u); };

    // exponent, direct form: -a beta(0) - 1/2 int f' beta
    const double ib = integrate_adaptive(
        [&](double u) { return boundary.slope(u) * beta(u); }, 0.0, s, quad_tol);
    const double e1 = -a * beta(0.0) - 0.5 * ib;

    // the same after integrating the slope term by parts through beta':
    // -a beta(s) + a int beta' - 1/2 int f' beta
    const double ibp = integrate_adaptive(
        [&](double u) { return boundary.beta_prime(clock, u); }, 0.0, s, quad_tol);
    const double e2 = -a * beta(s) + a * ibp - 0.5 * ib;

    if (std::abs(e1 - e2) > 1e-10 * std::max(1.0, std::abs(e1)))
        throw NumericsError("girsanov_prefactor: exponent forms disagree (" +
                            std::to_string(e1) + " vs " + std::to_string(e2) +
                            "); boundary derivatives are inconsistent");
    return std::exp(e1);
}

namespace {

double bridge_factor(const MovingBoundary& boundary, const VolatilityClock& clock, double s,
                     const PipelineOptions& opts, WarningLog* warnings) {
    double E = bridge_expectation(boundary, clock, 0.0, s, opts.propagator, warnings);
    if (opts.clamp_expectation && boundary.beta_prime_min(clock, s) >= 0.0) {
        // exp(-int beta' Y) <= 1 pathwise when beta' >= 0
        if (E > 1.0) {
            if (E > 1.0 + 1e-6)
                warn(warnings, "bridge expectation exceeded 1 by " + std::to_string(E - 1.0) +
                                   "; clamped");
            E = 1.0;
        }
        if (E <= 0.0) {
            warn(warnings, "bridge expectation was non-positive; clamped to 0");
            E = 0.0;
        }
    }
    return E;
}

}  // namespace

double fpt_density(const MovingBoundary& boundary, const VolatilityClock& clock, double s,
                   const PipelineOptions& opts, WarningLog* warnings) {
    if (s < 0.0) throw NumericsError("fpt_density: negative time");
    if (s == 0.0) return 0.0;
    const double a = boundary.start_level();
    const double E = bridge_factor(boundary, clock, s, opts, warnings);
    const double pf = girsanov_prefactor(boundary, clock, s);
    return E * pf * level_density(clock, a, s);
}

double fpt_cdf(const MovingBoundary& boundary, const VolatilityClock& clock, double t,
               const PipelineOptions& opts, WarningLog* warnings) {
    if (t < 0.0) throw NumericsError("fpt_cdf: negative time");
    if (t == 0.0) return 0.0;
    const double a = boundary.start_level();

    // q = a / sqrt(2 H(s)) maps (0, t] onto [q_t, inf) and flattens the
    // small-s tail; ds = -a^2 / (q^3 h^2(s)) dq
    const double qt = a / std::sqrt(2.0 * clock.cumulative_variance(t));
    auto integrand = [&](double q) {
        const double s = clock.inverse_clock(a * a / (2.0 * q * q));
        const double jac = a * a / (q * q * q * clock.h2(s));
        return fpt_density(boundary, clock, s, opts, warnings) * jac;
    };
    const double F = integrate_adaptive(integrand, qt, qt + 9.0, opts.cdf_quad_tol);
    return std::min(1.0, std::max(0.0, F));
}

void scenario_warnings(const MovingBoundary& boundary, const VolatilityClock& clock,
                       double horizon, WarningLog* warnings) {
    if (boundary.beta_prime_min(clock, horizon) < 0.0)
        warn(warnings,
             "beta-prime-negative: weight exp{-int beta' Y} exceeds 1 on some paths; "
             "clamp disabled, analytic values should be cross-checked by simulation");
    bool beta_prime_zero = true;
    for (int k = 0; k <= 64 && beta_prime_zero; ++k)
        beta_prime_zero = boundary.beta_prime(clock, horizon * k / 64.0) == 0.0;
    if (!beta_prime_zero)
        warn(warnings,
             "shifted-image: absorption is enforced at the gauge-shifted state, so "
             "analytic density is approximate for nonzero beta'");
}

DensityCurve density_curve(const MovingBoundary& boundary, const VolatilityClock& clock,
                           const std::vector<double>& grid, const PipelineOptions& opts) {
    if (grid.empty()) throw NumericsError("density_curve: empty grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < 0.0 || (i > 0 && grid[i] <= grid[i - 1]))
            throw NumericsError("density_curve: grid must be non-negative and increasing");
    }

    DensityCurve out;
    out.s = grid;
    out.density.resize(grid.size());
    out.cdf.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        out.density[i] = fpt_density(boundary, clock, grid[i], opts, &out.warnings);

    out.cdf[0] = grid[0] == 0.0 ? 0.0 : fpt_cdf(boundary, clock, grid[0], opts, &out.warnings);
    for (std::size_t i = 1; i < grid.size(); ++i)
        out.cdf[i] = out.cdf[i - 1] +
                     0.5 * (out.density[i] + out.density[i - 1]) * (grid[i] - grid[i - 1]);
    out.total_mass = out.cdf.back();

    scenario_warnings(boundary, clock, grid.back(), &out.warnings);
    if (out.total_mass < 0.999)
        warn(&out.warnings, "mass-below-one: cumulative mass at the horizon is below 1");
    return out;
}

}  // namespace fpt
