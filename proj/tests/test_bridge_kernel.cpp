#include <cmath>

#include "doctest.h"
#include "fpt/bridge_kernel.hpp"
#include "fpt/numerics.hpp"

using namespace fpt;

TEST_CASE("free and image kernels, frozen") {
    auto c = VolatilityClock::constant(1.0);
    CHECK(free_kernel(c, 0.0, 0.0, 1.0, 0.0) ==
          doctest::Approx(0.3989422804014327).epsilon(1e-14));
    CHECK(image_kernel(c, 0.0, 1.0, 1.0, 1.0) ==
          doctest::Approx(0.3449513138882446).epsilon(1e-14));
    // absorbed walker from 2 observed at 1
    CHECK(image_kernel(c, 0.0, 2.0, 1.0, 1.0) ==
          doctest::Approx(0.23753887610720537).epsilon(1e-14));
    // zero barrier recovers the image kernel
    CHECK(absorbed_kernel_at(c, 0.0, 2.0, 1.0, 1.0, 0.0) ==
          doctest::Approx(image_kernel(c, 0.0, 2.0, 1.0, 1.0)).epsilon(1e-15));
    // the kernel vanishes on the barrier
    CHECK(absorbed_kernel_at(c, 0.0, 2.0, 1.0, -0.5, -0.5) == 0.0);
    CHECK(image_kernel(c, 0.0, 2.0, 1.0, 0.0) == 0.0);
}

TEST_CASE("image kernel solves heat equation with absorbing origin") {
    auto c = VolatilityClock::exponential(0.5);
    const double s = 2.0;
    auto kernel = [&](double t, double x) { return image_kernel(c, t, x, 1.5, 0.9); };
    ResidualGrid grid{0.2, 1.0, 5, 0.4, 2.2, 6, 1e-5, 1e-3};
    auto rep = check_backward_residual(kernel, c, {}, s, grid, PdeForm::heat);
    CHECK(rep.max_rel_residual < 1e-6);
}

TEST_CASE("bridge transition, frozen and composed") {
    auto c = VolatilityClock::constant(1.0);
    CHECK(bridge_transition(c, 1.0, 0.0, 1.0, 0.5, 0.8) ==
          doctest::Approx(1.022853227705965).epsilon(1e-13));

    // Chapman-Kolmogorov through an intermediate slice
    const double s = 1.0, t = 0.0, x = 0.7, tau1 = 0.35, tau2 = 0.65, z = 0.5;
    auto composed = integrate_adaptive(
        [&](double y) {
            return bridge_transition(c, s, t, x, tau1, y) *
                   bridge_transition(c, s, tau1, y, tau2, z);
        },
        0.0, 8.0, 1e-9);
    CHECK(composed == doctest::Approx(bridge_transition(c, s, t, x, tau2, z)).epsilon(1e-6));
}

TEST_CASE("bridge transition integrates to one") {
    auto c = VolatilityClock::exponential(1.0);
    for (double tau : {0.2, 0.6, 0.95}) {
        const double mass = integrate_adaptive(
            [&](double y) { return bridge_transition(c, 1.0, 0.0, 1.0, tau, y); }, 0.0, 12.0,
            1e-10);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("bridge transition is clock-invariant") {
    auto c = VolatilityClock::exponential(1.0);
    auto unit = VolatilityClock::constant(1.0);
    const double s = 1.0, t = 0.1, x = 0.9, tau = 0.7, y = 0.4;
    const double Ht = c.cumulative_variance(t), Htau = c.cumulative_variance(tau),
                 Hs = c.cumulative_variance(s);
    // densities in the state variable match at mapped times
    CHECK(bridge_transition(c, s, t, x, tau, y) ==
          doctest::Approx(bridge_transition(unit, Hs, Ht, x, Htau, y)).epsilon(1e-12));
}

TEST_CASE("transition cdf differentiates back to the density") {
    auto c = VolatilityClock::constant(1.0);
    const double s = 1.0, t = 0.0, x = 1.0, tau = 0.5;
    for (double Y : {0.3, 0.8, 1.5, 2.5}) {
        const double mass = integrate_adaptive(
            [&](double y) { return bridge_transition(c, s, t, x, tau, y); }, 0.0, Y, 1e-11);
        CHECK(bridge_transition_cdf(c, s, t, x, tau, Y) == doctest::Approx(mass).epsilon(1e-9));
    }
    CHECK(bridge_transition_cdf(c, s, t, x, tau, 0.0) == 0.0);
    CHECK(bridge_transition_cdf(c, s, t, x, tau, 50.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("degenerate step warns and returns zero") {
    auto c = VolatilityClock::constant(1.0);
    WarningLog log;
    CHECK(bridge_transition(c, 1.0, 0.5, 1.0, 0.5, 1.0, &log) == 0.0);
    REQUIRE(log.size() == 1);
    CHECK(log[0].find("degenerate") != std::string::npos);
}
