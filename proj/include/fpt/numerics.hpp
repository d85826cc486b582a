#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fpt/errors.hpp"

namespace fpt {

class VolatilityClock;

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

// Declares an inverse-square-root endpoint singularity so the integrator can
// substitute it away (u = lo + q^2 resp. u = hi - q^2) before adapting.
enum class EndpointSingularity { none, sqrt_lower, sqrt_upper };

struct QuadratureResult {
    double value = 0.0;
    double error_bound = 0.0;
    int segments = 0;
};

// Globally adaptive Gauss-Kronrod (G7/K15) integration of fn over [lo, hi]
// to an absolute tolerance.  Segments with the largest error estimate are
// bisected first.  Throws QuadratureError (with the worst remaining bracket)
// if the tolerance is not reached within max_segments.
QuadratureResult integrate_adaptive_full(
    const std::function<double(double)>& fn, double lo, double hi,
    double abs_tol,
    EndpointSingularity hint = EndpointSingularity::none,
    int max_segments = 4000);

double integrate_adaptive(
    const std::function<double(double)>& fn, double lo, double hi,
    double abs_tol,
    EndpointSingularity hint = EndpointSingularity::none,
    int max_segments = 4000);

// n-point Gauss-Legendre rule on [-1, 1]; nodes ascending.  Cached per n.
const std::pair<std::vector<double>, std::vector<double>>&
gauss_legendre(int n);

// Numerically stable sum (recursive pairwise); order-deterministic.
double pairwise_sum(const double* x, std::size_t n);
double pairwise_sum(const std::vector<double>& x);

// ---------------------------------------------------------------------------
// Finite-difference PDE residuals
// ---------------------------------------------------------------------------

// The generator family appearing in the bridge construction, evaluated on a
// kernel K(t, x).  With I(t) = H(s) - H(t):
//
//   heat:        -K_t = 1/2 h^2(t) K_xx
//   bridge:      -K_t = 1/2 h^2(t) K_xx + h^2(t) (1/x - x/I(t)) K_x
//   schrodinger: -K_t = 1/2 h^2(t) K_xx - beta'(t) x K
//   bridge_potential:  bridge drift plus the -beta'(t) x K potential term
//
// and their forward (Fokker-Planck) counterparts in (tau, y), e.g.
//
//   bridge forward:  K_tau = 1/2 h^2 K_yy - d/dy[ h^2 (1/y - y/I(tau)) K ].
enum class PdeForm {
    heat,
    bridge,
    schrodinger,
    bridge_potential,
};

struct ResidualGrid {
    double t_lo, t_hi;
    int nt;
    double x_lo, x_hi;
    int nx;
    double dt;  // time finite-difference step (2nd order central)
    double dx;  // space finite-difference step (4th order central)
};

struct ResidualReport {
    PdeForm form;
    bool forward = false;
    double max_rel_residual = 0.0;
    double argmax_t = 0.0, argmax_x = 0.0;
    int nt = 0, nx = 0;
    double dt = 0.0, dx = 0.0;
};

// Backward residual of kernel(t, x) (fixed forward endpoint bound by the
// caller).  beta_prime may be empty for the potential-free forms; s is the
// bridge terminal time (unused by heat/schrodinger forms).
ResidualReport check_backward_residual(
    const std::function<double(double, double)>& kernel,
    const VolatilityClock& clock,
    const std::function<double(double)>& beta_prime,
    double s, const ResidualGrid& grid, PdeForm form);

// Forward (Fokker-Planck) residual of kernel(tau, y) (fixed backward
// endpoint bound by the caller).
ResidualReport check_forward_residual(
    const std::function<double(double, double)>& kernel,
    const VolatilityClock& clock,
    const std::function<double(double)>& beta_prime,
    double s, const ResidualGrid& grid, PdeForm form);

// ---------------------------------------------------------------------------
// Crank-Nicolson reference evolution
// ---------------------------------------------------------------------------

// Evolves  u_t = 1/2 h^2(t) u_xx - c(t) x u  from t_from forward to t_to on
// (0, x_max) with absorbing (Dirichlet-zero) boundaries: the exact law of a
// diffusion with speed h^2, killed at rate c(t) x, absorbed at 0 and x_max.
// profile holds interior values at x_j = j dx, j = 1..nx,
// dx = x_max / (nx + 1).  c may be empty (zero potential).  Total mass is
// non-increasing when c >= 0.
std::vector<double> evolve_reference_pde(
    const VolatilityClock& clock,
    const std::function<double(double)>& potential_slope,
    double t_from, double t_to, std::vector<double> profile,
    double x_max, int nt);

}  // namespace fpt
