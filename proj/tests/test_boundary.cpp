#include <cmath>

#include "doctest.h"
#include "fpt/boundary.hpp"

using namespace fpt;

TEST_CASE("polynomial boundary and derivatives") {
    auto b = MovingBoundary::polynomial({1.0, 2.0, 3.0});  // 1 + 2u + 3u^2
    CHECK(b.value(0.5) == doctest::Approx(2.75).epsilon(1e-15));
    CHECK(b.slope(0.5) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(b.slope2(0.5) == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(b.start_level() == 1.0);
    CHECK_FALSE(b.negated());
    CHECK(b.derivative_mode() == DerivativeMode::analytic);
}

TEST_CASE("beta against closed forms") {
    auto b = MovingBoundary::polynomial({1.0, 0.0, 1.0});  // 1 + u^2
    auto unit = VolatilityClock::constant(1.0);
    CHECK(b.beta(unit, 0.7) == doctest::Approx(1.4).epsilon(1e-14));
    CHECK(b.beta_prime(unit, 0.7) == doctest::Approx(2.0).epsilon(1e-14));

    // f = 1 + u on h = e^u: beta = e^{-2u}, beta' = -2 e^{-2u}
    auto lin = MovingBoundary::polynomial({1.0, 1.0});
    auto expc = VolatilityClock::exponential(1.0);
    CHECK(lin.beta(expc, 0.4) == doctest::Approx(std::exp(-0.8)).epsilon(1e-13));
    CHECK(lin.beta_prime(expc, 0.4) ==
          doctest::Approx(-2.0 * std::exp(-0.8)).epsilon(1e-13));
    CHECK(lin.beta_prime_min(expc, 1.0) == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("finite-difference fallback tracks analytic derivatives") {
    auto fd = MovingBoundary::custom_fd([](double u) { return 2.0 + std::sin(u); });
    auto an = MovingBoundary::custom([](double u) { return 2.0 + std::sin(u); },
                                     [](double u) { return std::cos(u); },
                                     [](double u) { return -std::sin(u); });
    CHECK(fd.derivative_mode() == DerivativeMode::finite_difference);
    for (double u : {0.0, 0.3, 1.1, 2.9}) {
        CHECK(fd.slope(u) == doctest::Approx(an.slope(u)).epsilon(1e-6));
        CHECK(fd.slope2(u) == doctest::Approx(an.slope2(u)).epsilon(1e-5));
    }
}

TEST_CASE("negative start flips the problem") {
    auto b = MovingBoundary::polynomial({-1.0, -2.0});  // -1 - 2u
    CHECK(b.negated());
    CHECK(b.start_level() == 1.0);
    CHECK(b.value(0.5) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(b.slope(0.5) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("starting on the boundary is rejected") {
    CHECK_THROWS_AS(MovingBoundary::polynomial({0.0, 1.0}), NumericsError);
}

TEST_CASE("linear-in-variance boundary has constant beta exactly") {
    auto clock = VolatilityClock::exponential(0.9);
    auto b = MovingBoundary::linear_in_variance(1.5, 0.5, clock);
    CHECK(b.value(0.0) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(b.value(1.3) ==
          doctest::Approx(1.5 + 0.5 * clock.cumulative_variance(1.3)).epsilon(1e-14));
    for (double u : {0.0, 0.2, 1.0, 2.7}) {
        CHECK(b.beta(clock, u) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(b.beta_prime(clock, u) == 0.0);
    }
}

TEST_CASE("mean-reverting reduction") {
    // X' = -X dt + dB toward the fixed level 1: f(u) = e^u on h(u) = e^u
    auto red = ou_to_martingale([](double) { return 1.0; }, [](double) { return 0.0; },
                                [](double) { return 0.0; });
    CHECK(red.clock.kind() == ClockKind::exponential);
    CHECK(red.clock.h(1.0) == doctest::Approx(M_E).epsilon(1e-14));
    CHECK(red.boundary.value(1.0) == doctest::Approx(M_E).epsilon(1e-14));
    CHECK(red.boundary.slope(1.0) == doctest::Approx(M_E).epsilon(1e-14));
    // beta = e^{-u}, beta' = -e^{-u} < 0
    CHECK(red.boundary.beta(red.clock, 0.5) == doctest::Approx(std::exp(-0.5)).epsilon(1e-13));
    CHECK(red.boundary.beta_prime(red.clock, 0.5) ==
          doctest::Approx(-std::exp(-0.5)).epsilon(1e-13));

    // g(0) = 0 is the boundary-start degenerate case
    CHECK_THROWS_AS(ou_to_martingale([](double u) { return u; }, [](double) { return 1.0; },
                                     [](double) { return 0.0; }),
                    NumericsError);
}
