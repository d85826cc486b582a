#include "fpt/bridge_kernel.hpp"

#include <cmath>

#include "fpt/level_hitting.hpp"

namespace fpt {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double gauss_pdf(double d, double V) {
    return std::exp(-d * d / (2.0 * V)) / std::sqrt(kTwoPi * V);
}

double gauss_cdf(double z) { return 0.5 * std::erfc(-z * 0.70710678118654752440); }

}  // namespace

double free_kernel(const VolatilityClock& clock, double t, double x, double tau, double y) {
    const double V = clock.variance_between(t, tau);
    if (V <= 0.0) throw NumericsError("free_kernel: degenerate interval");
    return gauss_pdf(y - x, V);
}

double image_kernel(const VolatilityClock& clock, double t, double x, double tau, double y) {
    const double V = clock.variance_between(t, tau);
    if (V <= 0.0) throw NumericsError("image_kernel: degenerate interval");
    // N(y-x) - N(y+x) = N(y-x) (1 - e^{-2xy/V}), assembled with expm1
    const double direct = gauss_pdf(y - x, V);
    return -direct * std::expm1(-2.0 * x * y / V);
}

double absorbed_kernel_at(const VolatilityClock& clock, double t, double x, double tau,
                          double y, double barrier) {
    const double V = clock.variance_between(t, tau);
    if (V <= 0.0) throw NumericsError("absorbed_kernel_at: degenerate interval");
    const double direct = gauss_pdf(y - x, V);
    // image point reflected across the barrier: 2c - x
    return -direct * std::expm1(-2.0 * (x - barrier) * (y - barrier) / V);
}

double bridge_transition(const VolatilityClock& clock, double s, double t, double x,
                         double tau, double y, WarningLog* warnings) {
    if (!(t < s) || !(tau < s) || !(t <= tau))
        throw NumericsError("bridge_transition: needs t <= tau < s");
    if (!(x > 0.0) || !(y >= 0.0))
        throw NumericsError("bridge_transition: needs x > 0, y >= 0");
    const double V = clock.variance_between(t, tau);
    if (V < 1e-14) {
        warn(warnings, "bridge_transition: degenerate step returns 0");
        return 0.0;
    }
    const double ratio = passage_kernel(clock, tau, y, s, 0.0) / passage_kernel(clock, t, x, s, 0.0);
    const double direct = gauss_pdf(y - x, V);
    return ratio * (-direct * std::expm1(-2.0 * x * y / V));
}

double bridge_transition_cdf(const VolatilityClock& clock, double s, double t, double x,
                             double tau, double Y) {
    if (!(t < s) || !(tau < s) || !(t <= tau))
        throw NumericsError("bridge_transition_cdf: needs t <= tau < s");
    if (!(x > 0.0)) throw NumericsError("bridge_transition_cdf: needs x > 0");
    if (Y <= 0.0) return 0.0;
    const double Dt = clock.variance_between(t, s);
    const double Dtau = clock.variance_between(tau, s);
    const double V = clock.variance_between(t, tau);
    if (V < 1e-14) return Y >= x ? 1.0 : 0.0;

    // integrating y * [N(y - m; sig2) - N(y + m; sig2)] / (x sqrt(...) ...)
    // with sig2 = V Dtau / Dt, m = x Dtau / Dt; the x^2/(2 Dt) terms cancel
    const double sig2 = V * Dtau / Dt;
    const double sig = std::sqrt(sig2);
    const double m = x * Dtau / Dt;

    auto J = [&](double mm) {
        // int_0^Y y N(y - mm; sig2) dy
        const double lo = -mm / sig, hi = (Y - mm) / sig;
        return sig2 * (gauss_pdf(mm, sig2) - gauss_pdf(Y - mm, sig2)) +
               mm * (gauss_cdf(hi) - gauss_cdf(lo));
    };
    const double mass = J(m) - J(-m);
    // the transition integrates to 1; J over [0, inf) normalises exactly
    auto Jinf = [&](double mm) {
        return sig2 * gauss_pdf(mm, sig2) + mm * (1.0 - gauss_cdf(-mm / sig));
    };
    const double total = Jinf(m) - Jinf(-m);
    return std::min(1.0, std::max(0.0, mass / total));
}

}  // namespace fpt
