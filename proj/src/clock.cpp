#include "fpt/clock.hpp"

#include <algorithm>
#include <cmath>

#include "fpt/numerics.hpp"

namespace fpt {

namespace {

double fd_step(double u) {
    return std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(u));
}

// Fritsch-Carlson monotone slopes for values g on knots u
std::vector<double> monotone_slopes(const std::vector<double>& u, const std::vector<double>& g) {
    const std::size_t n = u.size();
    std::vector<double> d(n), del(n - 1), h(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = u[i + 1] - u[i];
        del[i] = (g[i + 1] - g[i]) / h[i];
    }
    if (n == 2) {
        d[0] = d[1] = del[0];
        return d;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (del[i - 1] * del[i] <= 0.0) {
            d[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
        }
    }
    auto endpoint = [](double h0, double h1, double s0, double s1) {
        double dd = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
        if (dd * s0 <= 0.0)
            dd = 0.0;
        else if (s0 * s1 < 0.0 && std::abs(dd) > 3.0 * std::abs(s0))
            dd = 3.0 * s0;
        return dd;
    };
    d[0] = endpoint(h[0], h[1], del[0], del[1]);
    d[n - 1] = endpoint(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
    return d;
}

}  // namespace

VolatilityClock VolatilityClock::constant(double sigma) {
    if (!(sigma > 0.0)) throw NumericsError("clock: sigma must be positive");
    VolatilityClock c;
    c.kind_ = ClockKind::constant;
    c.p1_ = sigma;
    return c;
}

VolatilityClock VolatilityClock::exponential(double lambda) {
    VolatilityClock c;
    c.kind_ = ClockKind::exponential;
    c.p1_ = lambda;
    return c;
}

VolatilityClock VolatilityClock::power(double scale, double exponent) {
    if (!(scale > 0.0)) throw NumericsError("clock: scale must be positive");
    VolatilityClock c;
    c.kind_ = ClockKind::power;
    c.p1_ = scale;
    c.p2_ = exponent;
    return c;
}

VolatilityClock VolatilityClock::tabulated(std::vector<double> u, std::vector<double> h) {
    if (u.size() != h.size() || u.size() < 2)
        throw NumericsError("clock: tabulated needs matching knot/value arrays, >= 2 points");
    if (u.front() != 0.0) throw NumericsError("clock: tabulated knots must start at 0");
    for (std::size_t i = 0; i + 1 < u.size(); ++i)
        if (!(u[i + 1] > u[i])) throw NumericsError("clock: tabulated knots must increase");
    for (double v : h)
        if (!(v > 0.0)) throw NumericsError("clock: tabulated h must be positive");

    VolatilityClock c;
    c.kind_ = ClockKind::tabulated;
    c.knots_ = std::move(u);
    c.g_.resize(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) c.g_[i] = h[i] * h[i];
    c.slope_ = monotone_slopes(c.knots_, c.g_);

    // exact integral of the interpolant up to each knot
    c.G_.assign(c.knots_.size(), 0.0);
    for (std::size_t i = 0; i + 1 < c.knots_.size(); ++i) {
        const double dl = c.knots_[i + 1] - c.knots_[i];
        c.G_[i + 1] = c.G_[i] + dl * (0.5 * (c.g_[i] + c.g_[i + 1]) +
                                      dl * (c.slope_[i] - c.slope_[i + 1]) / 12.0);
    }
    return c;
}

VolatilityClock VolatilityClock::custom(std::function<double(double)> h) {
    if (!h) throw NumericsError("clock: custom needs a callable");
    VolatilityClock c;
    c.kind_ = ClockKind::custom;
    c.custom_h_ = std::move(h);
    return c;
}

double VolatilityClock::tabulated_h2(double u) const {
    if (u >= knots_.back()) return g_.back();
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), u);
    const std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
    const double dl = knots_[i + 1] - knots_[i];
    const double th = (u - knots_[i]) / dl;
    const double h00 = (2.0 * th - 3.0) * th * th + 1.0;
    const double h10 = ((th - 2.0) * th + 1.0) * th;
    const double h01 = (3.0 - 2.0 * th) * th * th;
    const double h11 = (th - 1.0) * th * th;
    return g_[i] * h00 + dl * slope_[i] * h10 + g_[i + 1] * h01 + dl * slope_[i + 1] * h11;
}

double VolatilityClock::tabulated_h2_prime(double u) const {
    if (u >= knots_.back()) return 0.0;
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), u);
    const std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
    const double dl = knots_[i + 1] - knots_[i];
    const double th = (u - knots_[i]) / dl;
    const double h00p = 6.0 * th * (th - 1.0);
    const double h10p = (3.0 * th - 4.0) * th + 1.0;
    const double h01p = 6.0 * th * (1.0 - th);
    const double h11p = (3.0 * th - 2.0) * th;
    return (g_[i] * h00p + dl * slope_[i] * h10p + g_[i + 1] * h01p + dl * slope_[i + 1] * h11p) /
           dl;
}

double VolatilityClock::tabulated_H(double t) const {
    if (t >= knots_.back()) return G_.back() + g_.back() * (t - knots_.back());
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
    const double dl = knots_[i + 1] - knots_[i];
    const double th = (t - knots_[i]) / dl;
    const double th2 = th * th;
    // integrals of the Hermite basis from 0 to th, scaled by dl
    const double i00 = th2 * th2 * 0.5 - th2 * th + th;
    const double i10 = th2 * th2 * 0.25 - th2 * th * (2.0 / 3.0) + th2 * 0.5;
    const double i01 = -th2 * th2 * 0.5 + th2 * th;
    const double i11 = th2 * th2 * 0.25 - th2 * th / 3.0;
    return G_[i] + dl * (g_[i] * i00 + dl * slope_[i] * i10 + g_[i + 1] * i01 +
                         dl * slope_[i + 1] * i11);
}

double VolatilityClock::h2(double u) const {
    switch (kind_) {
        case ClockKind::constant: return p1_ * p1_;
        case ClockKind::exponential: return std::exp(2.0 * p1_ * u);
        case ClockKind::power: {
            const double base = 1.0 + u;
            return p1_ * p1_ * std::pow(base, 2.0 * p2_);
        }
        case ClockKind::tabulated: return tabulated_h2(u);
        case ClockKind::custom: {
            const double v = custom_h_(u);
            return v * v;
        }
    }
    throw NumericsError("clock: bad kind");
}

double VolatilityClock::h(double u) const {
    switch (kind_) {
        case ClockKind::constant: return p1_;
        case ClockKind::exponential: return std::exp(p1_ * u);
        case ClockKind::power: return p1_ * std::pow(1.0 + u, p2_);
        case ClockKind::tabulated: return std::sqrt(tabulated_h2(u));
        case ClockKind::custom: return custom_h_(u);
    }
    throw NumericsError("clock: bad kind");
}

double VolatilityClock::h2_prime(double u) const {
    switch (kind_) {
        case ClockKind::constant: return 0.0;
        case ClockKind::exponential: return 2.0 * p1_ * std::exp(2.0 * p1_ * u);
        case ClockKind::power:
            return p1_ * p1_ * 2.0 * p2_ * std::pow(1.0 + u, 2.0 * p2_ - 1.0);
        case ClockKind::tabulated: return tabulated_h2_prime(u);
        case ClockKind::custom: {
            const double step = fd_step(u);
            if (u - step < 0.0) {
                // one-sided second-order at the left edge
                const double f0 = h2(u), f1 = h2(u + step), f2 = h2(u + 2.0 * step);
                return (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * step);
            }
            return (h2(u + step) - h2(u - step)) / (2.0 * step);
        }
    }
    throw NumericsError("clock: bad kind");
}

double VolatilityClock::cumulative_variance(double t) const {
    if (t < 0.0) throw NumericsError("clock: negative time");
    if (t == 0.0) return 0.0;
    return variance_between(0.0, t);
}

double VolatilityClock::variance_between(double t, double tau) const {
    if (t < 0.0 || tau < t) throw NumericsError("clock: bad interval");
    if (tau == t) return 0.0;
    switch (kind_) {
        case ClockKind::constant: return p1_ * p1_ * (tau - t);
        case ClockKind::exponential: {
            if (p1_ == 0.0) return tau - t;
            // e^{2 l t} (e^{2 l (tau-t)} - 1) / (2 l), exact for small steps
            return std::exp(2.0 * p1_ * t) * std::expm1(2.0 * p1_ * (tau - t)) / (2.0 * p1_);
        }
        case ClockKind::power: {
            const double q = 2.0 * p2_ + 1.0;
            if (q == 0.0) return p1_ * p1_ * (std::log1p(tau) - std::log1p(t));
            // c^2 (1+t)^q (expm1(q log1p((tau-t)/(1+t)))) / q
            return p1_ * p1_ * std::pow(1.0 + t, q) *
                   std::expm1(q * std::log1p((tau - t) / (1.0 + t))) / q;
        }
        case ClockKind::tabulated: return tabulated_H(tau) - tabulated_H(t);
        case ClockKind::custom: {
            const double tol = 1e-12 * std::max(1.0, tau - t);
            return integrate_adaptive([this](double u) { return h2(u); }, t, tau, tol);
        }
    }
    throw NumericsError("clock: bad kind");
}

double VolatilityClock::total_variance() const {
    const double inf = std::numeric_limits<double>::infinity();
    switch (kind_) {
        case ClockKind::constant: return inf;
        case ClockKind::exponential:
            return p1_ < 0.0 ? -1.0 / (2.0 * p1_) : inf;
        case ClockKind::power: {
            const double q = 2.0 * p2_ + 1.0;
            return q < 0.0 ? p1_ * p1_ / (-q) : inf;
        }
        case ClockKind::tabulated: return inf;  // constant extension beyond the knots
        case ClockKind::custom: return inf;     // assumed non-saturating; see inverse_clock
    }
    throw NumericsError("clock: bad kind");
}

double VolatilityClock::inverse_clock(double theta) const {
    if (theta < 0.0) throw NumericsError("clock: negative variance target");
    if (theta == 0.0) return 0.0;
    const double total = total_variance();
    if (theta >= total)
        throw NumericsError("clock: variance target " + std::to_string(theta) +
                            " is beyond the saturation level " + std::to_string(total));

    double hi = 1.0;
    double lo = 0.0;
    int guard = 0;
    while (cumulative_variance(hi) < theta) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 600)
            throw NumericsError("clock: could not bracket the variance target (saturating h?)");
    }
    while (hi - lo > 1e-12 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        if (cumulative_variance(mid) < theta)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace fpt
