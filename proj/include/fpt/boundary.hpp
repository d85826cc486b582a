#pragma once

#include <functional>
#include <vector>

#include "fpt/errors.hpp"
#include "fpt/clock.hpp"

namespace fpt {

enum class DerivativeMode { analytic, finite_difference };

// Moving boundary f(u) with f(0) != 0.  The hitting problem is stated for
// f(0) > 0; if f(0) < 0 the boundary is negated on construction (the driving
// martingale is symmetric, so T is unchanged) and negated() reports it.
//
// Derived quantities against a clock:
//   beta(u)       = f'(u) / h^2(u)
//   beta_prime(u) = d/du beta(u)
class MovingBoundary {
public:
    static MovingBoundary constant(double level);
    // coeffs[k] multiplies u^k
    static MovingBoundary polynomial(std::vector<double> coeffs);
    // f(u) = a + c * H(u): beta == c and beta_prime == 0 identically.
    // Binding to a different clock than the one supplied is a logic error
    // caught in beta()/beta_prime() only through wrong numbers; callers keep
    // the pairing.
    static MovingBoundary linear_in_variance(double a, double c, const VolatilityClock& clock);
    static MovingBoundary custom(std::function<double(double)> f,
                                 std::function<double(double)> fp,
                                 std::function<double(double)> fpp);
    // derivatives by central differences, step cbrt(eps)*max(1,|u|),
    // one-sided at u near 0
    static MovingBoundary custom_fd(std::function<double(double)> f);

    double value(double u) const;   // f(u), after any negation
    double slope(double u) const;   // f'(u)
    double slope2(double u) const;  // f''(u)

    double beta(const VolatilityClock& clock, double u) const;
    double beta_prime(const VolatilityClock& clock, double u) const;

    double start_level() const;          // a = f(0) > 0
    bool negated() const { return negated_; }
    DerivativeMode derivative_mode() const { return mode_; }

    // min over a 512-point scan of [0, horizon]; used to pick clamping and
    // anchor policies
    double beta_prime_min(const VolatilityClock& clock, double horizon) const;

private:
    MovingBoundary() = default;
    void finalize();  // checks f(0), applies negation

    std::function<double(double)> f_, fp_, fpp_;
    DerivativeMode mode_ = DerivativeMode::analytic;
    bool negated_ = false;
    double a_ = 0.0;
    bool constant_beta_ = false;  // linear_in_variance: beta == c exactly
    double const_beta_value_ = 0.0;
};

struct OuReduction {
    VolatilityClock clock;     // h(u) = e^u
    MovingBoundary boundary;   // f(u) = g(u) e^u
};

// Ornstein-Uhlenbeck reduction: X' = -X dt + dB hitting a level curve g(t)
// maps to M_u = e^u X_u hitting f(u) = g(u) e^u with h(u) = e^u (unit mean
// reversion; rescale time first for other rates).  Requires g(0) > 0 or
// g(0) < 0 (handled by negation); g(0) == 0 is a domain error.
OuReduction ou_to_martingale(std::function<double(double)> g,
                             std::function<double(double)> gp,
                             std::function<double(double)> gpp);

}  // namespace fpt
