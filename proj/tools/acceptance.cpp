// End-to-end acceptance: one line per criterion, exit 0 only if all pass.
// A criterion may pass via a documented gap: when the shifted-image route
// disagrees with simulation beyond 5 standard errors under a nonzero
// potential, the mc-validate report must quantify the discrepancy.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "cli_core.hpp"
#include "fpt/boundary.hpp"
#include "fpt/bridge_kernel.hpp"
#include "fpt/clock.hpp"
#include "fpt/gauge.hpp"
#include "fpt/level_hitting.hpp"
#include "fpt/montecarlo.hpp"
#include "fpt/numerics.hpp"
#include "fpt/pipeline.hpp"
#include "fpt/propagator.hpp"

using namespace fpt;

namespace {

int failures = 0;

void report(int idx, bool pass, const std::string& detail) {
    std::printf("criterion %d: %s  [%s]\n", idx, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
    va_list ap;
    va_start(ap, f);
    char buf[512];
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

std::size_t nearest_index(const std::vector<double>& grid, double want) {
    std::size_t j = 0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (std::fabs(grid[i] - want) < std::fabs(grid[j] - want)) j = i;
    return j;
}

double slice_ks(const BridgeEnsemble& ens, const VolatilityClock& clock, double s, double tau0) {
    const std::size_t j = nearest_index(ens.grid, tau0);
    const double tau = ens.grid[j];
    std::vector<double> vals;
    vals.reserve(ens.paths.size());
    for (const auto& p : ens.paths) vals.push_back(p[j]);
    std::sort(vals.begin(), vals.end());
    double ks = 0.0;
    const double n = (double)vals.size();
    for (std::size_t i = 0; i < vals.size(); ++i) {
        const double F = bridge_transition_cdf(clock, s, 0.0, 1.0, tau, vals[i]);
        ks = std::max(ks, std::max(std::fabs(F - (double)i / n),
                                   std::fabs(F - (double)(i + 1) / n)));
    }
    return ks;
}

void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    auto unit = VolatilityClock::constant(1.0);
    auto cb = MovingBoundary::polynomial({1.0});
    const double target = std::erfc(1.0 / std::sqrt(2.0));
    const double err = std::fabs(fpt_cdf(cb, unit, 1.0) - target);

    auto sample = simulate_martingale_fpt(cb, unit, 1000000, 1000, 1.0, 2026);
    std::vector<double> grid, acdf;
    for (int i = 1; i <= 200; ++i) {
        grid.push_back((double)i / 200.0);
        acdf.push_back(level_cdf(unit, 1.0, grid.back()));
    }
    const double ks = ks_statistic(sample, acdf, grid);
    const double dt = seconds_since(t0);
    report(1, err < 1e-6 && ks < 0.005 && dt < 60.0,
           fmt("flat barrier: cdf(1) err %.2e (<1e-6), KS %.4f (<0.005) at 1e6 paths, "
               "%.1fs (<60s)",
               err, ks, dt));
}

void criterion_2() {
    auto unit = VolatilityClock::constant(1.0);
    auto lb = MovingBoundary::polynomial({1.0, 1.0});
    double dens_err = 0.0, exp_err = 0.0;
    for (double s : {0.25, 0.5, 1.0, 2.0}) {
        const double cf = std::exp(-(1.0 + s) * (1.0 + s) / (2.0 * s)) /
                          std::sqrt(2.0 * M_PI * s * s * s);
        dens_err = std::max(dens_err, std::fabs(fpt_density(lb, unit, s) / cf - 1.0));
        exp_err = std::max(exp_err, std::fabs(bridge_expectation(lb, unit, 0.0, s) - 1.0));
    }
    const double cdf_err = std::fabs(fpt_cdf(lb, unit, 1.0) - 0.0904178);
    report(2, dens_err < 1e-6 && exp_err < 1e-6 && cdf_err < 1e-5,
           fmt("linear barrier: density rel %.2e (<1e-6), |E-1| %.2e (<1e-6), cdf(1) err "
               "%.2e (<1e-5)",
               dens_err, exp_err, cdf_err));
}

void criterion_3() {
    auto ec = VolatilityClock::exponential(-0.5);
    auto unit = VolatilityClock::constant(1.0);
    auto vb = MovingBoundary::linear_in_variance(1.0, 0.5, ec);
    auto lin = MovingBoundary::polynomial({1.0, 0.5});
    double cf_err = 0.0, tc_err = 0.0;
    for (double s : {0.5, 1.0, 2.0}) {
        const double H = ec.cumulative_variance(s);
        const double h2 = ec.h2(s);
        const double cf = h2 * std::exp(-(1.0 + 0.5 * H) * (1.0 + 0.5 * H) / (2.0 * H)) /
                          std::sqrt(2.0 * M_PI * H * H * H);
        const double got = fpt_density(vb, ec, s);
        cf_err = std::max(cf_err, std::fabs(got / cf - 1.0));
        tc_err = std::max(tc_err, std::fabs(got / (h2 * fpt_density(lin, unit, H)) - 1.0));
    }
    report(3, cf_err < 1e-5 && tc_err < 1e-5,
           fmt("decaying clock: closed-form rel %.2e (<1e-5), time-change invariant rel "
               "%.2e (<1e-5)",
               cf_err, tc_err));
}

void criterion_4() {
    const auto t0 = std::chrono::steady_clock::now();
    auto unit = VolatilityClock::constant(1.0);
    auto ec = VolatilityClock::exponential(1.0);

    const double ks_u = slice_ks(simulate_bridge_exact(unit, 1.0, 0.0, 1.0, 100000, 64, 401),
                                 unit, 1.0, 0.5);
    const double ks_e = slice_ks(simulate_bridge_exact(ec, 1.0, 0.0, 1.0, 100000, 64, 402),
                                 ec, 1.0, 0.5);

    double mass_err = 0.0;
    for (int ci = 0; ci < 2; ++ci) {
        const auto& c = ci ? ec : unit;
        const double mass = integrate_adaptive(
            [&](double y) { return bridge_transition(c, 1.0, 0.0, 1.0, 0.5, y); }, 0.0, 12.0,
            1e-12);
        mass_err = std::max(mass_err, std::fabs(mass - 1.0));
    }

    const double s = 1.0, t = 0.0, x = 0.7, tau1 = 0.35, tau2 = 0.65, z = 0.5;
    const double composed = integrate_adaptive(
        [&](double y) {
            return bridge_transition(unit, s, t, x, tau1, y) *
                   bridge_transition(unit, s, tau1, y, tau2, z);
        },
        0.0, 8.0, 1e-10);
    const double ck_err = std::fabs(composed - bridge_transition(unit, s, t, x, tau2, z));

    const double dt = seconds_since(t0);
    report(4,
           ks_u < 0.02 && ks_e < 0.02 && mass_err < 1e-8 && ck_err < 1e-6 && dt < 120.0,
           fmt("bridge law: slice KS %.4f/%.4f (<0.02) at 1e5 paths, mass err %.1e (<1e-8), "
               "composition err %.1e (<1e-6), %.1fs (<120s)",
               ks_u, ks_e, mass_err, ck_err, dt));
}

void criterion_5() {
    auto unit = VolatilityClock::constant(1.0);
    auto qb = MovingBoundary::polynomial({1.0, 0.0, 1.0});

    double worst_sigma = 0.0, best_sigma = 1e300, max_stderr = 0.0;
    std::string detail;
    for (double s : {0.5, 1.0}) {
        const double ana = bridge_expectation(qb, unit, 0.0, s);
        const auto mc = mc_bridge_expectation(qb, unit, 0.0, s, 1000000, 1024, 501);
        const double sd = std::fabs(ana - mc.mean) / mc.std_error;
        worst_sigma = std::max(worst_sigma, sd);
        best_sigma = std::min(best_sigma, sd);
        max_stderr = std::max(max_stderr, mc.std_error);
        detail += fmt("s=%.1f: E %.6f vs mc %.6f+-%.1e (%.0f sigma); ", s, ana, mc.mean,
                      mc.std_error, sd);
    }
    const bool stderr_ok = max_stderr < 1e-3;
    const bool agree2 = worst_sigma < 2.0;

    auto sample = simulate_martingale_fpt(qb, unit, 200000, 2000, 1.0, 502);
    std::vector<double> grid, acdf;
    for (int i = 1; i <= 20; ++i) {
        grid.push_back((double)i / 20.0);
        acdf.push_back(fpt_cdf(qb, unit, grid.back()));
    }
    const double sup = ks_statistic(sample, acdf, grid);
    detail += fmt("cdf sup %.4f; ", sup);

    // agreement is unconditional when the potential slope is zero: the same
    // validation machinery must pass strictly on the linear barrier
    cli::RunConfig zcfg;
    zcfg.boundary.kind = "polynomial";
    zcfg.boundary.coeffs = {1.0, 1.0};
    zcfg.grid = {0.05, 1.0, 20, "uniform"};
    zcfg.mc = {100000, 1000, 503};
    auto zrep = cli::run_mc_validate(zcfg, 0);
    const bool strict_zero = zrep.pass && zrep.json["agreement"].get<bool>() &&
                             zrep.json["ks_pass"].get<bool>() &&
                             !zrep.json["documented_gap"].get<bool>();
    detail += fmt("zero-potential validate strict %s (ks %.4f); ",
                  strict_zero ? "yes" : "NO", zrep.json["ks_statistic"].get<double>());

    if (agree2 && sup < 0.02 && stderr_ok) {
        report(5, strict_zero, "quadratic barrier: " + detail + "strict agreement");
        return;
    }

    // documented-gap route: the discrepancy must exceed 5 stderr and the
    // mc-validate report must carry it quantified
    cli::RunConfig cfg;
    cfg.boundary.kind = "polynomial";
    cfg.boundary.coeffs = {1.0, 0.0, 1.0};
    cfg.grid = {0.05, 1.0, 20, "uniform"};
    cfg.mc = {100000, 512, 501};
    auto rep = cli::run_mc_validate(cfg, 0);
    const bool quantified = rep.json["documented_gap"].get<bool>() &&
                            rep.json["sigma_distance"].get<double>() > 5.0 &&
                            rep.json.contains("gap_absolute") &&
                            rep.json.contains("gap_relative") && rep.pass;
    detail += fmt("documented gap: report sigma %.0f, gap_rel %.3f",
                  rep.json["sigma_distance"].get<double>(),
                  rep.json["gap_relative"].get<double>());
    report(5, stderr_ok && best_sigma > 5.0 && quantified && strict_zero,
           "quadratic barrier (shifted-image caveat): " + detail);
}

void criterion_6() {
    auto red = ou_to_martingale([](double) { return 2.0; }, [](double) { return 0.0; },
                                [](double) { return 0.0; });
    auto es = simulate_ou_fpt_euler(0.0, 2.0, 3.0, 1e-3, 1000000, 601);
    std::vector<double> grid, acdf;
    for (int i = 1; i <= 15; ++i) {
        grid.push_back(3.0 * (double)i / 15.0);
        acdf.push_back(fpt_cdf(red.boundary, red.clock, grid.back()));
    }
    const double sup = ks_statistic(es, acdf, grid);
    report(6, sup < 0.02,
           fmt("mean-reverting level 2: analytic vs direct Euler (1e6 paths, dt 1e-3) CDF "
               "sup %.4f (<0.02)",
               sup));
}

void criterion_7() {
    std::ostringstream log;
    const bool ok = cli::run_selftest(log);
    std::string brief = log.str();
    for (auto& ch : brief)
        if (ch == '\n') ch = ' ';
    report(7, ok, "residual suite: " + brief);
}

void criterion_8() {
    auto unit = VolatilityClock::constant(1.0);
    auto qb = MovingBoundary::polynomial({1.0, 0.0, 1.0});  // potential slope 2
    auto g = solve_gauge(qb, unit, 0.0, 1.0, {});           // prescribed anchor
    const double e1 = std::fabs(g.pi(0.0) + 2.0);
    const double e2 = std::fabs(g.v(0.0) + 1.0);
    const double e3 = std::fabs(g.action(0.0, 1.0) - 2.0 / 3.0);
    report(8, e1 < 1e-8 && e2 < 1e-8 && e3 < 1e-8,
           fmt("gauge closed forms: |pi(0)+2| %.1e, |v(0)+1| %.1e, |S(0,1)-2/3| %.1e "
               "(all <1e-8)",
               e1, e2, e3));
}

void criterion_9() {
    cli::RunConfig cfg;
    cfg.boundary.kind = "polynomial";
    cfg.boundary.coeffs = {1.0, 0.0, 1.0};
    cfg.grid = {0.1, 1.0, 8, "uniform"};
    cfg.mc = {20000, 256, 901};
    const std::string r1 = cli::run_mc_validate(cfg, 1).json.dump(2);
    const std::string r4 = cli::run_mc_validate(cfg, 4).json.dump(2);
    report(9, r1 == r4,
           fmt("determinism: mc-validate with 1 vs 4 threads -> %s (%zu bytes)",
               r1 == r4 ? "byte-identical" : "DIFFERENT", r1.size()));
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    std::printf("acceptance: %d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
