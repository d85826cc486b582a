#include "fpt/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "fpt/numerics.hpp"

namespace fpt {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

int resolve_threads(int n_threads) {
    if (n_threads > 0) return n_threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// contiguous path ranges; worker(i0, i1) must only write its own slots
void parallel_for(std::size_t n, int n_threads,
                  const std::function<void(std::size_t, std::size_t)>& worker) {
    const std::size_t k =
        std::min(static_cast<std::size_t>(resolve_threads(n_threads)), std::max<std::size_t>(n, 1));
    if (k <= 1) {
        worker(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(k - 1);
    const std::size_t chunk = (n + k - 1) / k;
    for (std::size_t i = 1; i < k; ++i) {
        const std::size_t lo = chunk * i;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(worker, lo, hi);
    }
    worker(0, std::min(n, chunk));
    for (auto& th : pool) th.join();
}

// increasing theta knots for the 3-d bridge samplers
std::vector<double> theta_grid(const VolatilityClock& clock, const std::vector<double>& u,
                               double t) {
    std::vector<double> th(u.size());
    th[0] = clock.variance_between(t, u[0]);
    for (std::size_t i = 1; i < u.size(); ++i)
        th[i] = th[i - 1] + clock.variance_between(u[i - 1], u[i]);
    return th;
}

// one exact path of the bridge from x0 at theta[0]=0 to 0 at theta.back():
// norm of three Brownian bridges around the mean (x0, 0, 0)(1 - theta/T)
template <class Rng>
void sample_bridge_path(const std::vector<double>& theta, double x0, Rng& rng,
                        std::vector<double>& out) {
    const double T = theta.back();
    std::normal_distribution<double> gauss(0.0, 1.0);
    double w1 = 0.0, w2 = 0.0, w3 = 0.0;
    out[0] = x0;
    const std::size_t m = theta.size();
    for (std::size_t i = 1; i < m; ++i) {
        const double rem0 = T - theta[i - 1];
        const double rem1 = T - theta[i];
        const double dth = theta[i] - theta[i - 1];
        if (rem1 <= 0.0 || dth <= 0.0) {
            w1 = w2 = w3 = 0.0;
            out[i] = 0.0;
            continue;
        }
        const double shrink = rem1 / rem0;
        const double sd = std::sqrt(dth * shrink);
        w1 = w1 * shrink + sd * gauss(rng);
        w2 = w2 * shrink + sd * gauss(rng);
        w3 = w3 * shrink + sd * gauss(rng);
        const double mean = x0 * rem1 / T;
        out[i] = std::sqrt((mean + w1) * (mean + w1) + w2 * w2 + w3 * w3);
    }
    out[m - 1] = 0.0;
}

}  // namespace

FptSample simulate_martingale_fpt(const MovingBoundary& boundary, const VolatilityClock& clock,
                                  std::size_t n_paths, std::size_t n_steps, double horizon,
                                  std::uint64_t seed, int n_threads, bool bridge_correction) {
    if (n_paths == 0 || n_steps == 0 || !(horizon > 0.0))
        throw NumericsError("simulate_martingale_fpt: empty run");

    std::vector<double> u(n_steps + 1), fvals(n_steps + 1), dH(n_steps);
    for (std::size_t i = 0; i <= n_steps; ++i) {
        u[i] = horizon * static_cast<double>(i) / static_cast<double>(n_steps);
        fvals[i] = boundary.value(u[i]);
    }
    for (std::size_t i = 0; i < n_steps; ++i) dH[i] = clock.variance_between(u[i], u[i + 1]);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> hit(n_paths, nan);

    parallel_for(n_paths, n_threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t p = lo; p < hi; ++p) {
            std::mt19937_64 rng(mix_seed(seed, p));
            std::normal_distribution<double> gauss(0.0, 1.0);
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            double M = 0.0;
            double d0 = fvals[0];  // distance below the boundary, > 0
            for (std::size_t i = 0; i < n_steps; ++i) {
                const double M1 = M + std::sqrt(dH[i]) * gauss(rng);
                const double d1 = fvals[i + 1] - M1;
                const double du = u[i + 1] - u[i];
                if (d1 <= 0.0) {
                    const double lam = d0 / (d0 - d1);
                    hit[p] = u[i] + du * lam;
                    break;
                }
                if (bridge_correction) {
                    // within-step crossing of the Brownian bridge between
                    // the two positive endpoint gaps
                    const double expo = -2.0 * d0 * d1 / dH[i];
                    if (expo > -40.0 && unif(rng) < std::exp(expo)) {
                        hit[p] = u[i] + du * d0 / (d0 + d1);
                        break;
                    }
                }
                M = M1;
                d0 = d1;
            }
        }
    });

    FptSample out;
    out.n_paths = n_paths;
    out.horizon = horizon;
    out.times.reserve(n_paths);
    for (double tvalue : hit) {
        if (std::isnan(tvalue))
            ++out.n_censored;
        else
            out.times.push_back(tvalue);
    }
    std::sort(out.times.begin(), out.times.end());
    return out;
}

BridgeEnsemble simulate_bridge_exact(const VolatilityClock& clock, double a, double t, double s,
                                     std::size_t n_paths, std::size_t n_steps,
                                     std::uint64_t seed, int n_threads) {
    if (!(a > 0.0) || !(s > t) || n_paths == 0 || n_steps == 0)
        throw NumericsError("simulate_bridge_exact: bad arguments");

    BridgeEnsemble out;
    out.grid.resize(n_steps + 1);
    for (std::size_t i = 0; i <= n_steps; ++i)
        out.grid[i] = t + (s - t) * static_cast<double>(i) / static_cast<double>(n_steps);
    const std::vector<double> theta = theta_grid(clock, out.grid, t);

    out.paths.assign(n_paths, std::vector<double>());
    parallel_for(n_paths, n_threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t p = lo; p < hi; ++p) {
            std::mt19937_64 rng(mix_seed(seed, p));
            out.paths[p].resize(theta.size());
            sample_bridge_path(theta, a, rng, out.paths[p]);
        }
    });
    return out;
}

BridgeEnsemble simulate_bridge_euler(const VolatilityClock& clock, double a, double t, double s,
                                     std::size_t n_paths, std::size_t n_steps,
                                     std::uint64_t seed, int n_threads) {
    if (!(a > 0.0) || !(s > t) || n_paths == 0 || n_steps < 4)
        throw NumericsError("simulate_bridge_euler: bad arguments");

    // geometric knots accumulating at s; the last free knot sits at relative
    // offset 1e-8 and the terminal value is pinned to 0
    BridgeEnsemble out;
    out.grid.resize(n_steps + 1);
    const double rho = std::pow(1e-8, 1.0 / static_cast<double>(n_steps - 1));
    out.grid[0] = t;
    for (std::size_t i = 1; i < n_steps; ++i)
        out.grid[i] = s - (s - t) * std::pow(rho, static_cast<double>(i));
    out.grid[n_steps] = s;
    const std::vector<double> theta = theta_grid(clock, out.grid, t);
    const double T = theta.back();

    out.paths.assign(n_paths, std::vector<double>());
    parallel_for(n_paths, n_threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t p = lo; p < hi; ++p) {
            std::mt19937_64 rng(mix_seed(seed, p));
            std::normal_distribution<double> gauss(0.0, 1.0);
            auto& path = out.paths[p];
            path.resize(theta.size());
            path[0] = a;
            double Y = a;
            for (std::size_t i = 1; i < theta.size(); ++i) {
                const double dth = theta[i] - theta[i - 1];
                const double rem = T - theta[i - 1];
                const double drift = (1.0 / Y - Y / rem) * dth;
                const double sd = std::sqrt(dth);
                double next = 0.0;
                bool ok = false;
                for (int tries = 0; tries < 100; ++tries) {
                    next = Y + drift + sd * gauss(rng);
                    if (next > 0.0) {
                        ok = true;
                        break;
                    }
                }
                if (!ok) next = std::abs(next);
                if (i + 1 == theta.size()) next = 0.0;
                Y = next;
                path[i] = Y;
            }
        }
    });
    return out;
}

McEstimate mc_bridge_expectation(const MovingBoundary& boundary, const VolatilityClock& clock,
                                 double t, double s, std::size_t n_paths, std::size_t n_steps,
                                 std::uint64_t seed, int n_threads) {
    if (!(s > t) || n_paths == 0 || n_steps < 8)
        throw NumericsError("mc_bridge_expectation: bad arguments");
    const double a = boundary.start_level();

    // half the knots cover [t, mid] uniformly; the rest approach s
    // geometrically so the trapezoid sees the ~sqrt(s-u) path scale
    const std::size_t n_half = n_steps / 2;
    const std::size_t n_geo = n_steps - n_half;
    const double mid = t + 0.5 * (s - t);
    std::vector<double> u;
    u.reserve(n_steps + 2);
    for (std::size_t i = 0; i < n_half; ++i)
        u.push_back(t + (mid - t) * static_cast<double>(i) / static_cast<double>(n_half));
    const double rho = std::pow(2e-6, 1.0 / static_cast<double>(n_geo));
    for (std::size_t j = 0; j <= n_geo; ++j)
        u.push_back(s - (s - mid) * std::pow(rho, static_cast<double>(j)));
    u.push_back(s);

    const std::vector<double> theta = theta_grid(clock, u, t);
    std::vector<double> bp(u.size()), w(u.size(), 0.0);
    for (std::size_t i = 0; i < u.size(); ++i) bp[i] = boundary.beta_prime(clock, u[i]);
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        const double du = u[i + 1] - u[i];
        w[i] += 0.5 * du;
        w[i + 1] += 0.5 * du;
    }

    std::vector<double> weight(n_paths);
    parallel_for(n_paths, n_threads, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> path(theta.size());
        for (std::size_t p = lo; p < hi; ++p) {
            std::mt19937_64 rng(mix_seed(seed, p));
            sample_bridge_path(theta, a, rng, path);
            double integral = 0.0;
            for (std::size_t i = 0; i < path.size(); ++i) integral += w[i] * bp[i] * path[i];
            weight[p] = std::exp(-integral);
        }
    });

    McEstimate est;
    est.n = n_paths;
    est.mean = pairwise_sum(weight.data(), weight.size()) / static_cast<double>(n_paths);
    std::vector<double> dev2(n_paths);
    for (std::size_t p = 0; p < n_paths; ++p) {
        const double d = weight[p] - est.mean;
        dev2[p] = d * d;
    }
    const double var = pairwise_sum(dev2.data(), dev2.size()) /
                       (static_cast<double>(n_paths) * std::max<double>(1.0, n_paths - 1.0));
    est.std_error = std::sqrt(var);
    return est;
}

double ks_statistic(const std::vector<double>& sorted_sample,
                    const std::vector<double>& analytic_cdf,
                    const std::vector<double>& at_times, std::size_t n_total) {
    if (analytic_cdf.size() != at_times.size())
        throw NumericsError("ks_statistic: grid size mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < at_times.size(); ++i) {
        const auto it =
            std::upper_bound(sorted_sample.begin(), sorted_sample.end(), at_times[i]);
        const double emp = static_cast<double>(it - sorted_sample.begin()) /
                           static_cast<double>(n_total);
        worst = std::max(worst, std::abs(emp - analytic_cdf[i]));
    }
    return worst;
}

double ks_statistic(const FptSample& sample, const std::vector<double>& analytic_cdf,
                    const std::vector<double>& at_times) {
    for (double tv : at_times)
        if (tv > sample.horizon * (1.0 + 1e-12))
            throw NumericsError("ks_statistic: comparison point beyond the censoring horizon");
    return ks_statistic(sample.times, analytic_cdf, at_times, sample.n_paths);
}

FptSample simulate_ou_fpt_euler(double x0, double level, double horizon, double dt,
                                std::size_t n_paths, std::uint64_t seed, int n_threads) {
    if (!(level > x0) || !(horizon > 0.0) || !(dt > 0.0) || n_paths == 0)
        throw NumericsError("simulate_ou_fpt_euler: bad arguments");
    const std::size_t n_steps = static_cast<std::size_t>(std::ceil(horizon / dt));
    const double step = horizon / static_cast<double>(n_steps);
    const double sd = std::sqrt(step);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> hit(n_paths, nan);
    parallel_for(n_paths, n_threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t p = lo; p < hi; ++p) {
            std::mt19937_64 rng(mix_seed(seed, p));
            std::normal_distribution<double> gauss(0.0, 1.0);
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            double X = x0;
            double d0 = level - x0;
            for (std::size_t i = 0; i < n_steps; ++i) {
                const double X1 = X - X * step + sd * gauss(rng);
                const double d1 = level - X1;
                if (d1 <= 0.0) {
                    hit[p] = (static_cast<double>(i) + d0 / (d0 - d1)) * step;
                    break;
                }
                const double expo = -2.0 * d0 * d1 / step;
                if (expo > -40.0 && unif(rng) < std::exp(expo)) {
                    hit[p] = (static_cast<double>(i) + d0 / (d0 + d1)) * step;
                    break;
                }
                X = X1;
                d0 = d1;
            }
        }
    });

    FptSample out;
    out.n_paths = n_paths;
    out.horizon = horizon;
    out.times.reserve(n_paths);
    for (double tv : hit) {
        if (std::isnan(tv))
            ++out.n_censored;
        else
            out.times.push_back(tv);
    }
    std::sort(out.times.begin(), out.times.end());
    return out;
}

}  // namespace fpt
