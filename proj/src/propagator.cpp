#include "fpt/propagator.hpp"

#include <cmath>
#include <limits>

#include "fpt/level_hitting.hpp"
#include "fpt/numerics.hpp"

namespace fpt {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void PropagatorConfig::validate() const {
    if (!(delta_frac > 0.0 && delta_frac < 0.1))
        throw NumericsError("propagator: delta_frac must lie in (0, 0.1)");
    if (!(b_max_sigmas >= 8.0))
        throw NumericsError("propagator: b_max_sigmas must be >= 8");
    if (gauge_steps < 2) throw NumericsError("propagator: gauge_steps too small");
    if (!(quad_tol > 0.0)) throw NumericsError("propagator: quad_tol must be positive");
}

KernelParts schrodinger_kernel_parts(const GaugeFunctions& gauge, const VolatilityClock& clock,
                                     double t, double a, double tau, double b) {
    KernelParts p;
    p.V = clock.variance_between(t, tau);
    p.y = a + gauge.v(t);
    p.z = b + gauge.v(tau);
    p.log_gauge = a * gauge.pi(t) - b * gauge.pi(tau) + gauge.action(t, tau);
    if (p.V <= 0.0) throw NumericsError("schrodinger_kernel: degenerate interval");
    const double d = p.z - p.y;
    p.direct = std::exp(-d * d / (2.0 * p.V)) / std::sqrt(kTwoPi * p.V);
    const double e = p.z + p.y;
    p.image = std::exp(-e * e / (2.0 * p.V)) / std::sqrt(kTwoPi * p.V);
    // exp{log_gauge} [N(z-y) - N(z+y)], difference via expm1 around the
    // direct term
    p.value = std::exp(p.log_gauge - d * d / (2.0 * p.V)) / std::sqrt(kTwoPi * p.V) *
              (-std::expm1(-2.0 * p.y * p.z / p.V));
    return p;
}

double schrodinger_kernel(const GaugeFunctions& gauge, const VolatilityClock& clock,
                          double t, double a, double tau, double b, WarningLog* warnings) {
    const KernelParts p = schrodinger_kernel_parts(gauge, clock, t, a, tau, b);
    if (p.y <= 0.0 || p.z <= 0.0)
        warn(warnings, "schrodinger_kernel: shifted state left the positive half line");
    return p.value;
}

namespace {

// one evaluation of the terminal-limit integrand family at offset delta
double expectation_at_delta(const MovingBoundary& boundary, const VolatilityClock& clock,
                            const GaugeFunctions& gauge, double t, double s, double delta,
                            const PropagatorConfig& cfg, WarningLog* warnings) {
    const double a = boundary.start_level();
    const double tau = s - delta * (s - t);
    const double eps = clock.variance_between(tau, s);   // concentration scale^2
    const double It = clock.variance_between(t, s);
    const double V = clock.variance_between(t, tau);

    const double y = a + gauge.v(t);
    const double v_tau = gauge.v(tau);
    const double pi_t = gauge.pi(t);
    const double pi_tau = gauge.pi(tau);
    const double S = gauge.action(t, tau);

    if (y <= 0.0)
        warn(warnings, "bridge_expectation: anchored start state is not positive");

    // log of everything except log(b) and the image difference:
    //   ratio = (b/a) (It/eps)^{3/2} exp{a^2/(2 It) - b^2/(2 eps)}
    //   kernel = exp{a pi(t) - b pi(tau) + S} N(z-y; V) (-expm1(-2yz/V))
    const double log_const = -std::log(a) + 1.5 * std::log(It / eps) + a * a / (2.0 * It) +
                             a * pi_t + S - 0.5 * std::log(kTwoPi * V);
    auto log_abs = [&](double b, int& sign) {
        sign = 0;
        if (b <= 0.0) return -std::numeric_limits<double>::infinity();
        const double z = b + v_tau;
        const double d = z - y;
        const double w = -std::expm1(-2.0 * y * z / V);
        if (w == 0.0) return -std::numeric_limits<double>::infinity();
        sign = w > 0.0 ? 1 : -1;
        return log_const + std::log(b) - b * b / (2.0 * eps) - b * pi_tau -
               d * d / (2.0 * V) + std::log(std::abs(w));
    };

    // the combined Gaussian weight in b concentrates at scale sig_c
    const double sig_c2 = 1.0 / (1.0 / eps + 1.0 / V);
    const double sig_c = std::sqrt(sig_c2);
    const double mu_c = sig_c2 * ((y - v_tau) / V - pi_tau);
    const double b_hi = std::max(0.0, mu_c) + cfg.b_max_sigmas * sig_c;

    // normalise by a probed peak so the quadrature tolerance is effectively
    // relative whatever the overall exponential scale
    double peak = -std::numeric_limits<double>::infinity();
    const double probes[] = {0.25 * sig_c,       0.5 * sig_c,  sig_c,
                             2.0 * sig_c,        4.0 * sig_c,  mu_c,
                             mu_c + sig_c,       mu_c + 2.0 * sig_c,
                             0.5 * b_hi};
    for (double b : probes) {
        if (!(b > 0.0) || b >= b_hi) continue;
        int sg;
        peak = std::max(peak, log_abs(b, sg));
    }
    if (std::isinf(peak)) return 0.0;
    if (peak > 690.0) throw NumericsError("bridge_expectation: integrand overflows");

    auto integrand = [&](double b) {
        int sg;
        const double l = log_abs(b, sg);
        return sg * std::exp(l - peak);
    };
    const double tol = cfg.quad_tol * std::max(sig_c, 1e-300);
    return std::exp(peak) * integrate_adaptive(integrand, 0.0, b_hi, tol);
}

}  // namespace

BridgeExpectation bridge_expectation_full(const MovingBoundary& boundary,
                                          const VolatilityClock& clock, double t, double s,
                                          const PropagatorConfig& cfg, WarningLog* warnings) {
    cfg.validate();
    if (!(s > t) || t < 0.0) throw NumericsError("bridge_expectation: needs 0 <= t < s");
    if (boundary.beta_prime_min(clock, s) < 0.0)
        warn(warnings,
             "bridge_expectation: beta' < 0 on the horizon, weight exceeds 1 on some paths");

    GaugeOptions gopt;
    gopt.policy = cfg.anchor;
    gopt.steps = cfg.gauge_steps;
    const GaugeFunctions gauge = solve_gauge(boundary, clock, t, s, gopt);

    BridgeExpectation out;
    out.delta_used = cfg.delta_frac;
    const double e0 =
        expectation_at_delta(boundary, clock, gauge, t, s, cfg.delta_frac, cfg, warnings);
    out.raw = e0;
    if (!cfg.richardson) {
        out.value = e0;
        out.change_on_refine = std::numeric_limits<double>::quiet_NaN();
        return out;
    }

    // the offset error is O(sqrt(delta)); eliminate it from pairs at
    // delta, delta/2, delta/4 and require the two extrapolants to agree
    const double e1 =
        expectation_at_delta(boundary, clock, gauge, t, s, cfg.delta_frac / 2.0, cfg, warnings);
    const double e2 =
        expectation_at_delta(boundary, clock, gauge, t, s, cfg.delta_frac / 4.0, cfg, warnings);
    const double rt2 = std::sqrt(2.0);
    const double r1 = (rt2 * e1 - e0) / (rt2 - 1.0);
    const double r2 = (rt2 * e2 - e1) / (rt2 - 1.0);
    out.value = r2;
    out.change_on_refine = std::abs(r2 - r1) / std::max(std::abs(r2), 1e-300);
    if (!(out.change_on_refine <= 1e-3))
        throw ConvergenceError(
            "bridge_expectation: terminal-limit extrapolants did not settle (relative change " +
                std::to_string(out.change_on_refine) + ")",
            {e0, e1, e2, r1, r2});
    return out;
}

double bridge_expectation(const MovingBoundary& boundary, const VolatilityClock& clock,
                          double t, double s, const PropagatorConfig& cfg, WarningLog* warnings) {
    return bridge_expectation_full(boundary, clock, t, s, cfg, warnings).value;
}

}  // namespace fpt
