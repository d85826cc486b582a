#include "fpt/boundary.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace fpt {

namespace {

double fd_step(double u) {
    return std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(u));
}

}  // namespace

void MovingBoundary::finalize() {
    const double f0 = f_(0.0);
    if (f0 == 0.0)
        throw NumericsError("boundary: f(0) == 0 starts on the boundary");
    if (!(std::isfinite(f0))) throw NumericsError("boundary: f(0) not finite");
    negated_ = f0 < 0.0;
    a_ = std::abs(f0);
}

MovingBoundary MovingBoundary::constant(double level) {
    MovingBoundary b;
    b.f_ = [level](double) { return level; };
    b.fp_ = [](double) { return 0.0; };
    b.fpp_ = [](double) { return 0.0; };
    b.finalize();
    return b;
}

MovingBoundary MovingBoundary::polynomial(std::vector<double> coeffs) {
    if (coeffs.empty()) throw NumericsError("boundary: empty polynomial");
    std::vector<double> d1(coeffs.size() > 1 ? coeffs.size() - 1 : 1, 0.0);
    std::vector<double> d2(coeffs.size() > 2 ? coeffs.size() - 2 : 1, 0.0);
    for (std::size_t k = 1; k < coeffs.size(); ++k) d1[k - 1] = coeffs[k] * static_cast<double>(k);
    for (std::size_t k = 2; k < coeffs.size(); ++k)
        d2[k - 2] = coeffs[k] * static_cast<double>(k) * static_cast<double>(k - 1);
    auto horner = [](const std::vector<double>& c, double u) {
        double acc = 0.0;
        for (std::size_t k = c.size(); k-- > 0;) acc = acc * u + c[k];
        return acc;
    };
    MovingBoundary b;
    b.f_ = [c = std::move(coeffs), horner](double u) { return horner(c, u); };
    b.fp_ = [c = std::move(d1), horner](double u) { return horner(c, u); };
    b.fpp_ = [c = std::move(d2), horner](double u) { return horner(c, u); };
    b.finalize();
    return b;
}

MovingBoundary MovingBoundary::linear_in_variance(double a, double c,
                                                  const VolatilityClock& clock) {
    MovingBoundary b;
    VolatilityClock ck = clock;  // value copy keeps the pairing alive
    b.f_ = [a, c, ck](double u) { return a + c * ck.cumulative_variance(u); };
    b.fp_ = [c, ck](double u) { return c * ck.h2(u); };
    b.fpp_ = [c, ck](double u) { return c * ck.h2_prime(u); };
    b.finalize();
    b.constant_beta_ = true;
    b.const_beta_value_ = b.negated_ ? -c : c;
    return b;
}

MovingBoundary MovingBoundary::custom(std::function<double(double)> f,
                                      std::function<double(double)> fp,
                                      std::function<double(double)> fpp) {
    if (!f || !fp || !fpp) throw NumericsError("boundary: custom needs all three callables");
    MovingBoundary b;
    b.f_ = std::move(f);
    b.fp_ = std::move(fp);
    b.fpp_ = std::move(fpp);
    b.finalize();
    return b;
}

MovingBoundary MovingBoundary::custom_fd(std::function<double(double)> f) {
    if (!f) throw NumericsError("boundary: custom needs a callable");
    MovingBoundary b;
    auto fp = [f](double u) {
        const double st = fd_step(u);
        if (u - st < 0.0) {
            const double f0 = f(u), f1 = f(u + st), f2 = f(u + 2.0 * st);
            return (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * st);
        }
        return (f(u + st) - f(u - st)) / (2.0 * st);
    };
    auto fpp = [f](double u) {
        const double st = std::sqrt(std::sqrt(std::numeric_limits<double>::epsilon())) *
                          std::max(1.0, std::abs(u));
        if (u - st < 0.0) {
            const double f0 = f(u), f1 = f(u + st), f2 = f(u + 2.0 * st),
                         f3 = f(u + 3.0 * st);
            return (2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3) / (st * st);
        }
        return (f(u + st) - 2.0 * f(u) + f(u - st)) / (st * st);
    };
    b.f_ = std::move(f);
    b.fp_ = std::move(fp);
    b.fpp_ = std::move(fpp);
    b.mode_ = DerivativeMode::finite_difference;
    b.finalize();
    return b;
}

double MovingBoundary::value(double u) const { return negated_ ? -f_(u) : f_(u); }
double MovingBoundary::slope(double u) const { return negated_ ? -fp_(u) : fp_(u); }
double MovingBoundary::slope2(double u) const { return negated_ ? -fpp_(u) : fpp_(u); }

double MovingBoundary::beta(const VolatilityClock& clock, double u) const {
    if (constant_beta_) return const_beta_value_;
    return slope(u) / clock.h2(u);
}

double MovingBoundary::beta_prime(const VolatilityClock& clock, double u) const {
    if (constant_beta_) return 0.0;
    const double g = clock.h2(u);
    // (f''/h^2) - f' h2' / h^4
    return slope2(u) / g - slope(u) * clock.h2_prime(u) / (g * g);
}

double MovingBoundary::start_level() const { return a_; }

double MovingBoundary::beta_prime_min(const VolatilityClock& clock, double horizon) const {
    constexpr int kScan = 512;
    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= kScan; ++i) {
        const double u = horizon * i / kScan;
        lo = std::min(lo, beta_prime(clock, u));
    }
    return lo;
}

OuReduction ou_to_martingale(std::function<double(double)> g, std::function<double(double)> gp,
                             std::function<double(double)> gpp) {
    if (!g || !gp || !gpp) throw NumericsError("ou reduction: needs g, g', g''");
    // X' = -X dt + dB hitting g(t)  <=>  M_u = e^u X_u (a martingale with
    // h(u) = e^u) hitting f(u) = g(u) e^u
    OuReduction r{VolatilityClock::exponential(1.0), MovingBoundary::constant(1.0)};
    auto f = [g](double u) { return g(u) * std::exp(u); };
    auto fp = [g, gp](double u) { return (g(u) + gp(u)) * std::exp(u); };
    auto fpp = [g, gp, gpp](double u) { return (g(u) + 2.0 * gp(u) + gpp(u)) * std::exp(u); };
    r.boundary = MovingBoundary::custom(std::move(f), std::move(fp), std::move(fpp));
    return r;
}

}  // namespace fpt
