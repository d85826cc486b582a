#include "fpt/level_hitting.hpp"

#include <cmath>

#include "fpt/errors.hpp"

namespace fpt {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double level_density(const VolatilityClock& clock, double a, double t) {
    if (!(a > 0.0)) throw NumericsError("level_density: a must be positive");
    if (t < 0.0) throw NumericsError("level_density: negative time");
    if (t == 0.0) return 0.0;
    const double H = clock.cumulative_variance(t);
    return a * clock.h2(t) / std::sqrt(kTwoPi * H * H * H) * std::exp(-a * a / (2.0 * H));
}

double level_cdf(const VolatilityClock& clock, double a, double t) {
    if (!(a > 0.0)) throw NumericsError("level_cdf: a must be positive");
    if (t < 0.0) throw NumericsError("level_cdf: negative time");
    if (t == 0.0) return 0.0;
    const double H = clock.cumulative_variance(t);
    // reflection: P(T_a <= t) = 2 P(W_H >= a) = erfc(a / sqrt(2H))
    return std::erfc(a / std::sqrt(2.0 * H));
}

double level_total_mass(const VolatilityClock& clock, double a) {
    if (!(a > 0.0)) throw NumericsError("level_total_mass: a must be positive");
    const double total = clock.total_variance();
    if (std::isinf(total)) return 1.0;
    return std::erfc(a / std::sqrt(2.0 * total));
}

double passage_kernel(const VolatilityClock& clock, double t, double x, double s, double y) {
    if (!(s > t)) throw NumericsError("passage_kernel: needs s > t");
    const double V = clock.variance_between(t, s);
    const double d = std::abs(x - y);
    return d * clock.h2(s) / std::sqrt(kTwoPi * V * V * V) * std::exp(-d * d / (2.0 * V));
}

}  // namespace fpt
