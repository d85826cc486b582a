#include <cmath>

#include "doctest.h"
#include "fpt/level_hitting.hpp"
#include "fpt/numerics.hpp"

using namespace fpt;

TEST_CASE("unit clock level density and cdf, frozen") {
    auto c = VolatilityClock::constant(1.0);
    CHECK(level_density(c, 1.0, 1.0) ==
          doctest::Approx(0.24197072451914337).epsilon(1e-14));
    CHECK(level_cdf(c, 1.0, 1.0) ==
          doctest::Approx(0.31731050786291415).epsilon(1e-14));
    CHECK(level_density(c, 1.0, 0.0) == 0.0);
    CHECK(level_cdf(c, 1.0, 0.0) == 0.0);
    CHECK(level_total_mass(c, 1.0) == 1.0);
}

TEST_CASE("exponential clock level values, frozen") {
    auto c = VolatilityClock::exponential(1.0);
    CHECK(level_density(c, 1.0, 1.0) ==
          doctest::Approx(0.44148324125489397).epsilon(1e-13));
    CHECK(level_cdf(c, 1.0, 1.0) ==
          doctest::Approx(0.5758235582202842).epsilon(1e-13));
}

TEST_CASE("saturating clock leaves escape probability") {
    auto c = VolatilityClock::exponential(-0.5);  // H(inf) = 1
    CHECK(level_total_mass(c, 1.0) ==
          doctest::Approx(0.31731050786291415).epsilon(1e-13));
    CHECK(level_cdf(c, 1.0, 80.0) < level_total_mass(c, 1.0) + 1e-15);
}

TEST_CASE("density integrates to the cdf") {
    auto c = VolatilityClock::exponential(1.0);
    const double mass =
        integrate_adaptive([&](double t) { return level_density(c, 1.3, t); }, 0.0, 2.0, 1e-11);
    CHECK(mass == doctest::Approx(level_cdf(c, 1.3, 2.0)).epsilon(1e-10));
}

TEST_CASE("time change maps the problem onto the unit clock") {
    auto c = VolatilityClock::exponential(1.0);
    auto unit = VolatilityClock::constant(1.0);
    const double a = 0.8;
    for (double t : {0.3, 1.0, 1.7}) {
        const double H = c.cumulative_variance(t);
        CHECK(level_density(c, a, t) ==
              doctest::Approx(level_density(unit, a, H) * c.h2(t)).epsilon(1e-12));
        CHECK(level_cdf(c, a, t) == doctest::Approx(level_cdf(unit, a, H)).epsilon(1e-12));
    }
}

TEST_CASE("passage kernel carries the displacement factor, frozen") {
    auto c = VolatilityClock::constant(1.0);
    CHECK(passage_kernel(c, 0.0, 2.0, 1.0, 0.0) ==
          doctest::Approx(0.10798193302637613).epsilon(1e-14));
    // displacement is symmetric
    CHECK(passage_kernel(c, 0.0, 5.0, 1.0, 2.0) ==
          doctest::Approx(passage_kernel(c, 0.0, -1.0, 1.0, 2.0)).epsilon(1e-15));
    // level density is the passage kernel from the origin
    auto e = VolatilityClock::exponential(0.7);
    CHECK(level_density(e, 1.2, 0.9) ==
          doctest::Approx(passage_kernel(e, 0.0, 0.0, 0.9, 1.2)).epsilon(1e-13));
}

TEST_CASE("domain checks") {
    auto c = VolatilityClock::constant(1.0);
    CHECK_THROWS_AS((void)level_density(c, -1.0, 1.0), NumericsError);
    CHECK_THROWS_AS((void)level_cdf(c, 0.0, 1.0), NumericsError);
    CHECK_THROWS_AS((void)passage_kernel(c, 1.0, 1.0, 1.0, 0.0), NumericsError);
}
