#pragma once

#include <optional>
#include <vector>

#include "fpt/boundary.hpp"
#include "fpt/clock.hpp"

namespace fpt {

// The gauge pair removes the linear potential beta'(u) x from the bridge
// generator.  On [t_start, s]:
//
//   pi'(u)  =  beta'(u),      pi(s) = 0        (backward anchor)
//   v'(u)   = -h^2(u) pi(u),  v(s) = 0
//   action  S(t, tau) = 1/2 int_t^tau h^2 pi^2 du
//
// and the adjoint pair anchored at t_start:
//
//   pi~'(u) = -beta'(u),      pi~(t_start) = 0
//   v~'(u)  =  h^2(u) pi~(u), v~(t_start) = 0
//
// Anchor policy shifts pi by a constant kappa (and v accordingly): the
// assembled kernel solves the same equations for every kappa but the image
// term places its absorbing barrier at -v(u), so kappa selects where the
// barrier sits.
//   pinned     kappa = 0 (anchors pinned at the start state as written above)
//   consistent pi~ = -pi, v~ = v (kappa = 0 with adjoints tied to the pair)
//   grazing    smallest kappa >= 0 with -v(u) <= 0 on the whole interval
enum class AnchorPolicy { pinned, consistent, grazing };

struct GaugeOptions {
    AnchorPolicy policy = AnchorPolicy::pinned;
    int steps = 2048;  // RK4 steps across [t_start, s]
    std::optional<double> kappa_override;
};

class GaugeFunctions {
public:
    double pi(double u) const;
    double v(double u) const;
    double pi_tilde(double u) const;
    double v_tilde(double u) const;

    // S(t, tau) = 1/2 int_t^tau h^2 pi^2, t <= tau
    double action(double t, double tau) const;

    double t_start() const { return t0_; }
    double s() const { return s_; }
    double kappa() const { return kappa_; }
    AnchorPolicy policy() const { return policy_; }

    // dense output grid (RK4 knots), ascending in u
    const std::vector<double>& grid() const { return u_; }

    friend GaugeFunctions solve_gauge(const MovingBoundary&, const VolatilityClock&,
                                      double, double, const GaugeOptions&);

private:
    GaugeFunctions() = default;

    double eval(const std::vector<double>& y, const std::vector<double>& yp, double u) const;

    double t0_ = 0.0, s_ = 1.0, kappa_ = 0.0;
    AnchorPolicy policy_ = AnchorPolicy::pinned;
    std::vector<double> u_;                    // grid
    std::vector<double> Hgrid_, h2grid_;       // H and h^2 at grid (H' = h^2)
    std::vector<double> pi0_, v0_, q0_;        // kappa = 0 solution + action integral
    std::vector<double> pi0p_, v0p_, q0p_;     // derivatives at knots (Hermite eval)
};

// Integrates the gauge system once (backward RK4 from s) and applies the
// anchor policy algebraically:
//   pi = pi0 + kappa,  v = v0 + kappa (H(s) - H(u)),
//   S(t,tau) = S0(t,tau) + kappa (v0(t) - v0(tau)) + kappa^2/2 (H(tau)-H(t))
GaugeFunctions solve_gauge(const MovingBoundary& boundary, const VolatilityClock& clock,
                           double t_start, double s, const GaugeOptions& opts = {});

struct HTransformPrefactors {
    double A, B, A_tilde, B_tilde;
};

// Scalar prefactors of the h-transform at the endpoints (c = 1):
//   A = 1 / (2 (H(s)-H(t))),      B = c (H(s)-H(t))^{3/2}
//   A~ = -1 / (2 (H(s)-H(tau))),  B~ = c (H(s)-H(tau))^{-1/2}
// B / B~ reproduces the (I_t / I_tau)^{3/2} ratio of the passage kernels; c
// cancels in every assembled quantity.
HTransformPrefactors h_transform_prefactors(const VolatilityClock& clock, double s,
                                            double t, double tau);

}  // namespace fpt
