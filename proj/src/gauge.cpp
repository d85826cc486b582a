#include "fpt/gauge.hpp"

#include <algorithm>
#include <cmath>

namespace fpt {

double GaugeFunctions::eval(const std::vector<double>& y, const std::vector<double>& yp,
                            double u) const {
    const std::size_t n = u_.size() - 1;
    const double step = (u_.back() - u_.front()) / static_cast<double>(n);
    double pos = (u - u_.front()) / step;
    std::size_t i = pos <= 0.0 ? 0
                               : std::min(n - 1, static_cast<std::size_t>(pos));
    const double dl = u_[i + 1] - u_[i];
    const double th = (u - u_[i]) / dl;
    const double h00 = (2.0 * th - 3.0) * th * th + 1.0;
    const double h10 = ((th - 2.0) * th + 1.0) * th;
    const double h01 = (3.0 - 2.0 * th) * th * th;
    const double h11 = (th - 1.0) * th * th;
    return y[i] * h00 + dl * yp[i] * h10 + y[i + 1] * h01 + dl * yp[i + 1] * h11;
}

double GaugeFunctions::pi(double u) const { return eval(pi0_, pi0p_, u) + kappa_; }

double GaugeFunctions::v(double u) const {
    const double H = eval(Hgrid_, h2grid_, u);
    return eval(v0_, v0p_, u) + kappa_ * (Hgrid_.back() - H);
}

double GaugeFunctions::pi_tilde(double u) const {
    if (policy_ == AnchorPolicy::pinned && kappa_ == 0.0)
        return pi0_.front() - eval(pi0_, pi0p_, u);
    return -pi(u);
}

double GaugeFunctions::v_tilde(double u) const {
    if (policy_ == AnchorPolicy::pinned && kappa_ == 0.0) {
        const double H = eval(Hgrid_, h2grid_, u);
        return pi0_.front() * (H - Hgrid_.front()) + (eval(v0_, v0p_, u) - v0_.front());
    }
    return v(u);
}

double GaugeFunctions::action(double t, double tau) const {
    if (!(t <= tau)) throw NumericsError("gauge action: needs t <= tau");
    const double q_t = eval(q0_, q0p_, t), q_tau = eval(q0_, q0p_, tau);
    const double v_t = eval(v0_, v0p_, t), v_tau = eval(v0_, v0p_, tau);
    const double dH = eval(Hgrid_, h2grid_, tau) - eval(Hgrid_, h2grid_, t);
    return (q_t - q_tau) + kappa_ * (v_t - v_tau) + 0.5 * kappa_ * kappa_ * dH;
}

GaugeFunctions solve_gauge(const MovingBoundary& boundary, const VolatilityClock& clock,
                           double t_start, double s, const GaugeOptions& opts) {
    if (!(s > t_start)) throw NumericsError("solve_gauge: needs s > t_start");
    if (opts.steps < 2) throw NumericsError("solve_gauge: too few steps");

    GaugeFunctions g;
    g.t0_ = t_start;
    g.s_ = s;
    g.policy_ = opts.policy;

    const int n = opts.steps;
    const double dt = (s - t_start) / n;

    g.u_.resize(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) g.u_[static_cast<std::size_t>(i)] = t_start + dt * i;
    g.u_.back() = s;

    g.Hgrid_.resize(g.u_.size());
    g.h2grid_.resize(g.u_.size());
    g.Hgrid_[0] = clock.cumulative_variance(t_start);
    g.h2grid_[0] = clock.h2(t_start);
    for (std::size_t i = 1; i < g.u_.size(); ++i) {
        g.Hgrid_[i] = g.Hgrid_[i - 1] + clock.variance_between(g.u_[i - 1], g.u_[i]);
        g.h2grid_[i] = clock.h2(g.u_[i]);
    }

    // backward RK4 from the anchor (pi0, v0, q0)(s) = 0 with
    //   pi0' = beta', v0' = -h^2 pi0, q0' = -1/2 h^2 pi0^2
    auto rhs = [&](double u, const double y[3], double dy[3]) {
        const double h2 = clock.h2(u);
        dy[0] = boundary.beta_prime(clock, u);
        dy[1] = -h2 * y[0];
        dy[2] = -0.5 * h2 * y[0] * y[0];
    };

    const std::size_t m = g.u_.size();
    g.pi0_.assign(m, 0.0);
    g.v0_.assign(m, 0.0);
    g.q0_.assign(m, 0.0);
    g.pi0p_.assign(m, 0.0);
    g.v0p_.assign(m, 0.0);
    g.q0p_.assign(m, 0.0);

    double y[3] = {0.0, 0.0, 0.0};
    auto store = [&](std::size_t i) {
        double dy[3];
        rhs(g.u_[i], y, dy);
        g.pi0_[i] = y[0];
        g.v0_[i] = y[1];
        g.q0_[i] = y[2];
        g.pi0p_[i] = dy[0];
        g.v0p_[i] = dy[1];
        g.q0p_[i] = dy[2];
    };
    store(m - 1);
    for (std::size_t i = m - 1; i-- > 0;) {
        const double u1 = g.u_[i + 1];
        const double hstep = g.u_[i] - u1;  // negative
        double k1[3], k2[3], k3[3], k4[3], tmp[3];
        rhs(u1, y, k1);
        for (int j = 0; j < 3; ++j) tmp[j] = y[j] + 0.5 * hstep * k1[j];
        rhs(u1 + 0.5 * hstep, tmp, k2);
        for (int j = 0; j < 3; ++j) tmp[j] = y[j] + 0.5 * hstep * k2[j];
        rhs(u1 + 0.5 * hstep, tmp, k3);
        for (int j = 0; j < 3; ++j) tmp[j] = y[j] + hstep * k3[j];
        rhs(u1 + hstep, tmp, k4);
        for (int j = 0; j < 3; ++j)
            y[j] += hstep / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        store(i);
    }

    if (opts.kappa_override) {
        g.kappa_ = *opts.kappa_override;
    } else if (opts.policy == AnchorPolicy::grazing) {
        // smallest kappa >= 0 keeping v = v0 + kappa (H(s) - H(u)) >= 0 on
        // the grid, i.e. the absorbing barrier -v never enters the positive
        // half line
        double k = 0.0;
        for (std::size_t i = 0; i + 1 < m; ++i) {
            const double denom = g.Hgrid_.back() - g.Hgrid_[i];
            if (denom <= 0.0) continue;
            k = std::max(k, -g.v0_[i] / denom);
        }
        g.kappa_ = k;
    } else {
        g.kappa_ = 0.0;
    }
    return g;
}

HTransformPrefactors h_transform_prefactors(const VolatilityClock& clock, double s,
                                            double t, double tau) {
    if (!(t < s) || !(tau < s)) throw NumericsError("h_transform_prefactors: needs t, tau < s");
    const double It = clock.variance_between(t, s);
    const double Itau = clock.variance_between(tau, s);
    HTransformPrefactors p;
    p.A = 1.0 / (2.0 * It);
    p.B = It * std::sqrt(It);
    p.A_tilde = -1.0 / (2.0 * Itau);
    p.B_tilde = 1.0 / std::sqrt(Itau);
    return p;
}

}  // namespace fpt
