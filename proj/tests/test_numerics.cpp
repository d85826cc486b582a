#include <cmath>
#include <vector>

#include "doctest.h"
#include "fpt/clock.hpp"
#include "fpt/numerics.hpp"

using namespace fpt;

namespace {
constexpr double kSqrtPi = 1.7724538509055160272981674833411;
}

TEST_CASE("smooth integrands hit the requested absolute tolerance") {
    // int_0^1 e^u du = e - 1
    auto r = integrate_adaptive_full([](double u) { return std::exp(u); }, 0.0, 1.0, 1e-12);
    CHECK(std::abs(r.value - (M_E - 1.0)) < 1e-12);
    CHECK(r.error_bound <= 1e-12);

    // int_{-3}^{7} e^{-u^2} du ~ sqrt(pi) for a shifted window
    const double g = integrate_adaptive([](double u) { return std::exp(-u * u); }, -3.0, 7.0, 1e-13);
    const double exact = 0.5 * kSqrtPi * (std::erf(7.0) + std::erf(3.0));
    CHECK(std::abs(g - exact) < 1e-12);
}

TEST_CASE("oscillatory integrand") {
    // int_0^{2 pi} cos(13 u) du = 0, needs a few bisections
    const double v =
        integrate_adaptive([](double u) { return std::cos(13.0 * u); }, 0.0, 2.0 * M_PI, 1e-11);
    CHECK(std::abs(v) < 1e-11);
}

TEST_CASE("inverse-square-root endpoint via substitution hint") {
    // int_0^1 u^{-1/2} du = 2 exactly
    const double v = integrate_adaptive([](double u) { return 1.0 / std::sqrt(u); }, 0.0, 1.0,
                                        1e-12, EndpointSingularity::sqrt_lower);
    CHECK(std::abs(v - 2.0) < 1e-12);

    // int_0^1 (1-u)^{-1/2} u du = 4/3
    const double w = integrate_adaptive(
        [](double u) { return u / std::sqrt(1.0 - u); }, 0.0, 1.0, 1e-12,
        EndpointSingularity::sqrt_upper);
    CHECK(std::abs(w - 4.0 / 3.0) < 1e-11);
}

TEST_CASE("unresolvable singularity raises with the offending bracket") {
    // 1/u is not integrable at 0; the worst bracket must hug the origin
    bool threw = false;
    try {
        integrate_adaptive([](double u) { return 1.0 / u; }, 0.0, 1.0, 1e-10,
                           EndpointSingularity::none, 200);
    } catch (const QuadratureError& e) {
        threw = true;
        CHECK(e.bracket_lo() >= 0.0);
        CHECK(e.bracket_hi() < 0.1);
        CHECK(e.error_bound() > 0.0);
    }
    CHECK(threw);
}

TEST_CASE("gauss-legendre rules integrate polynomials exactly") {
    const auto& [x, w] = gauss_legendre(12);
    REQUIRE(x.size() == 12);
    // degree-23 polynomial u^22 over [-1,1]: 2/23
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * std::pow(x[i], 22);
    CHECK(std::abs(acc - 2.0 / 23.0) < 1e-14);
    // weights sum to the interval length
    double ws = 0.0;
    for (double wi : w) ws += wi;
    CHECK(std::abs(ws - 2.0) < 1e-14);
    // nodes ascend
    for (std::size_t i = 1; i < x.size(); ++i) CHECK(x[i] > x[i - 1]);
}

TEST_CASE("pairwise sum is order-stable and accurate") {
    std::vector<double> xs(100001);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = 1.0 / (1.0 + static_cast<double>(i));
    const double s1 = pairwise_sum(xs);
    const double s2 = pairwise_sum(xs.data(), xs.size());
    CHECK(s1 == s2);  // bitwise
    // harmonic number H_100001 to 1e-12
    CHECK(s1 == doctest::Approx(12.090156129763429).epsilon(1e-12));
}

TEST_CASE("heat kernel has vanishing backward and forward residuals") {
    auto clock = VolatilityClock::constant(1.0);
    const double s = 1.0;
    // K(t, x) = N(x; s - t): solves -K_t = 1/2 K_xx
    auto kernel = [s](double t, double x) {
        const double V = s - t;
        return std::exp(-x * x / (2.0 * V)) / std::sqrt(2.0 * M_PI * V);
    };
    ResidualGrid grid{0.1, 0.6, 6, -1.5, 1.5, 7, 1e-5, 1e-3};
    auto rep = check_backward_residual(kernel, clock, {}, s, grid, PdeForm::heat);
    CHECK(rep.max_rel_residual < 1e-6);

    // as a function of the forward pair it solves the forward equation too
    auto fwd = [](double tau, double y) {
        return std::exp(-y * y / (2.0 * tau)) / std::sqrt(2.0 * M_PI * tau);
    };
    ResidualGrid fgrid{0.3, 0.9, 6, -1.5, 1.5, 7, 1e-5, 1e-3};
    auto frep = check_forward_residual(fwd, clock, {}, s, fgrid, PdeForm::heat);
    CHECK(frep.max_rel_residual < 1e-6);
}

TEST_CASE("reference evolution conserves the heat solution and absorbs mass") {
    auto clock = VolatilityClock::constant(1.0);
    const double x_max = 8.0;
    const int nx = 400;
    const double dx = x_max / (nx + 1);

    // start from the image-kernel profile of a walker at 2; it solves the
    // absorbed equation exactly, so CN must track it
    const double x0 = 2.0, t0 = 0.1, t1 = 0.5;
    auto absorbed = [&](double t, double x) {
        return (std::exp(-(x - x0) * (x - x0) / (2.0 * t)) -
                std::exp(-(x + x0) * (x + x0) / (2.0 * t))) /
               std::sqrt(2.0 * M_PI * t);
    };
    std::vector<double> profile(nx);
    for (int j = 0; j < nx; ++j) profile[j] = absorbed(t0, dx * (j + 1));
    auto evolved = evolve_reference_pde(clock, {}, t0, t1, profile, x_max, 400);
    double worst = 0.0;
    for (int j = 0; j < nx; ++j) {
        const double x = dx * (j + 1);
        if (x < 0.2 || x > 6.0) continue;  // skip the absorbing edges
        worst = std::max(worst, std::abs(evolved[static_cast<std::size_t>(j)] - absorbed(t1, x)));
    }
    CHECK(worst < 2e-4);

    // with a positive killing rate, mass strictly decreases
    auto killed = evolve_reference_pde(
        clock, [](double) { return 1.0 ; }, t0, t1, profile, x_max, 200);
    double m0 = 0.0, m1 = 0.0;
    for (int j = 0; j < nx; ++j) {
        m0 += evolved[static_cast<std::size_t>(j)] * dx;
        m1 += killed[static_cast<std::size_t>(j)] * dx;
    }
    CHECK(m1 < m0);
}
