#pragma once

#include <cstdint>
#include <vector>

#include "fpt/boundary.hpp"
#include "fpt/clock.hpp"

namespace fpt {

// Results are bit-identical for a given (seed, n_paths, n_steps) regardless
// of n_threads: every path owns an independent generator seeded by
// splitmix64(seed, path index), and reductions run in a fixed order.

struct FptSample {
    std::vector<double> times;  // sorted hitting times of uncensored paths
    std::size_t n_paths = 0;
    std::size_t n_censored = 0;  // paths alive at the horizon
    double horizon = 0.0;
};

// Euler walk of M_u (exact Gaussian increments, variance H(u_{i+1})-H(u_i))
// tested against the moving boundary; a Brownian-bridge correction accounts
// for crossings inside a step: p_cross = exp(-2 d_i d_{i+1} / dH).
FptSample simulate_martingale_fpt(const MovingBoundary& boundary, const VolatilityClock& clock,
                                  std::size_t n_paths, std::size_t n_steps, double horizon,
                                  std::uint64_t seed, int n_threads = 0,
                                  bool bridge_correction = true);

struct BridgeEnsemble {
    std::vector<double> grid;            // time points, ascending, grid[0]=t
    std::vector<std::vector<double>> paths;  // paths[p][i] = Y at grid[i]
};

// Exact sampler: the bridge from a at t to 0 at s is the norm of three
// Brownian bridges with mean path (a,0,0) (1 - theta/theta_s) in the clock
// theta = H(u) - H(t).
BridgeEnsemble simulate_bridge_exact(const VolatilityClock& clock, double a, double t, double s,
                                     std::size_t n_paths, std::size_t n_steps,
                                     std::uint64_t seed, int n_threads = 0);

// Euler-Maruyama on dY = h^2 (1/Y - Y/(H(s)-H(u))) du + h dB with a
// geometric grid accumulating at s (ratio chosen so the last step has size
// s * 1e-8 relative), reflection rejection (retry a step landing <= 0, up to
// 100 times, then reflect), terminal value forced to 0.
BridgeEnsemble simulate_bridge_euler(const VolatilityClock& clock, double a, double t, double s,
                                     std::size_t n_paths, std::size_t n_steps,
                                     std::uint64_t seed, int n_threads = 0);

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
};

// E[exp{-int_t^s beta'(u) Y_u du}] by exact bridge sampling; the time
// integral uses a trapezoid on a grid mixing uniform coverage of [t, mid]
// with points accumulating geometrically at s (the mean path is ~linear
// there, so the bias is controlled).
McEstimate mc_bridge_expectation(const MovingBoundary& boundary, const VolatilityClock& clock,
                                 double t, double s, std::size_t n_paths, std::size_t n_steps,
                                 std::uint64_t seed, int n_threads = 0);

// Kolmogorov-Smirnov distance between an empirical sample (censoring-aware:
// comparison runs on [0, horizon] only) and an analytic CDF.
double ks_statistic(const FptSample& sample, const std::vector<double>& analytic_cdf,
                    const std::vector<double>& at_times);
double ks_statistic(const std::vector<double>& sorted_sample,
                    const std::vector<double>& analytic_cdf,
                    const std::vector<double>& at_times, std::size_t n_total);

// Direct Euler simulation of dX = -X dt + dB from X_0 = x0 hitting `level`;
// independent oracle for the mean-reverting reduction.
FptSample simulate_ou_fpt_euler(double x0, double level, double horizon, double dt,
                                std::size_t n_paths, std::uint64_t seed, int n_threads = 0);

// splitmix64 stream: deterministic per-path seeds
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace fpt
