#include <cmath>
#include <vector>

#include "doctest.h"
#include "fpt/clock.hpp"
#include "fpt/numerics.hpp"

using namespace fpt;

TEST_CASE("constant clock closed forms") {
    auto c = VolatilityClock::constant(0.7);
    CHECK(c.h(3.2) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(c.h2(3.2) == doctest::Approx(0.49).epsilon(1e-15));
    CHECK(c.h2_prime(3.2) == 0.0);
    CHECK(c.cumulative_variance(2.0) == doctest::Approx(0.98).epsilon(1e-15));
    CHECK(std::isinf(c.total_variance()));
}

TEST_CASE("exponential clock cumulative variance, frozen") {
    auto c = VolatilityClock::exponential(1.0);
    // int_0^1 e^{2u} du = (e^2 - 1) / 2
    CHECK(c.cumulative_variance(1.0) ==
          doctest::Approx(3.194528049465325).epsilon(1e-14));
    CHECK(c.h2_prime(0.5) == doctest::Approx(2.0 * std::exp(1.0)).epsilon(1e-14));

    // lambda = 0 degenerates to the constant clock
    auto c0 = VolatilityClock::exponential(0.0);
    CHECK(c0.cumulative_variance(2.5) == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("negative-rate exponential clock saturates") {
    auto c = VolatilityClock::exponential(-0.5);
    CHECK(c.total_variance() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c.cumulative_variance(5.0) < 1.0);
    CHECK(c.cumulative_variance(50.0) <= 1.0);  // saturates to 1 ulp-exactly
    CHECK_THROWS_AS((void)c.inverse_clock(1.0), NumericsError);
    // within range the inverse still works
    const double th = 0.6;
    CHECK(c.cumulative_variance(c.inverse_clock(th)) == doctest::Approx(th).epsilon(1e-10));
}

TEST_CASE("power clock against quadrature") {
    auto c = VolatilityClock::power(0.8, -0.3);
    const double direct = integrate_adaptive([&](double u) { return c.h2(u); }, 0.0, 2.0, 1e-13);
    CHECK(c.cumulative_variance(2.0) == doctest::Approx(direct).epsilon(1e-12));

    // p = -1/2 makes H logarithmic
    auto cl = VolatilityClock::power(1.0, -0.5);
    CHECK(cl.cumulative_variance(3.0) == doctest::Approx(std::log(4.0)).epsilon(1e-13));
    CHECK(std::isinf(cl.total_variance()));

    // 2p + 1 < 0 saturates at c^2 / |2p+1|
    auto cs = VolatilityClock::power(2.0, -1.0);
    CHECK(cs.total_variance() == doctest::Approx(4.0).epsilon(1e-13));
}

TEST_CASE("variance_between avoids cancellation near the endpoint") {
    auto c = VolatilityClock::exponential(1.0);
    const double s = 1.0, tau = s * (1.0 - 1e-10);
    const double direct = c.variance_between(tau, s);
    // exact: e^{2 tau} (e^{2(s-tau)} - 1)/2
    const double exact = std::exp(2.0 * tau) * std::expm1(2.0 * (s - tau)) / 2.0;
    CHECK(direct == doctest::Approx(exact).epsilon(1e-13));
    CHECK(direct > 0.0);
}

TEST_CASE("additivity of variance increments") {
    auto c = VolatilityClock::power(1.3, 0.7);
    const double a = c.variance_between(0.0, 0.9);
    const double b = c.variance_between(0.9, 2.4);
    CHECK(a + b == doctest::Approx(c.cumulative_variance(2.4)).epsilon(1e-12));
}

TEST_CASE("inverse clock round-trips") {
    auto c = VolatilityClock::exponential(0.8);
    for (double t : {0.1, 0.7, 1.9, 4.2}) {
        const double th = c.cumulative_variance(t);
        CHECK(c.inverse_clock(th) == doctest::Approx(t).epsilon(1e-9));
    }
    CHECK(c.inverse_clock(0.0) == 0.0);
}

TEST_CASE("tabulated clock reproduces its knots and integrates exactly") {
    // sample h(u) = e^{-u} on a coarse grid; the interpolant is monotone
    std::vector<double> u, h;
    for (int i = 0; i <= 16; ++i) {
        u.push_back(0.25 * i);
        h.push_back(std::exp(-u.back()));
    }
    auto c = VolatilityClock::tabulated(u, h);
    for (std::size_t i = 0; i < u.size(); ++i)
        CHECK(c.h2(u[i]) == doctest::Approx(h[i] * h[i]).epsilon(1e-14));

    // cumulative variance matches adaptive quadrature of the interpolant
    const double q = integrate_adaptive([&](double x) { return c.h2(x); }, 0.0, 3.7, 1e-12);
    CHECK(c.cumulative_variance(3.7) == doctest::Approx(q).epsilon(1e-10));

    // and is close to the underlying smooth clock (coarse-knot sanity only;
    // the monotone interpolant carries O(knot^2) slope error)
    const double truth = -std::expm1(-2.0 * 3.7) / 2.0;
    CHECK(c.cumulative_variance(3.7) == doctest::Approx(truth).epsilon(5e-3));

    // beyond the last knot h freezes
    CHECK(c.h2(10.0) == doctest::Approx(h.back() * h.back()).epsilon(1e-15));
    const double dH = c.variance_between(u.back(), u.back() + 2.0);
    CHECK(dH == doctest::Approx(2.0 * h.back() * h.back()).epsilon(1e-13));
}

TEST_CASE("tabulated clock validation") {
    CHECK_THROWS_AS(VolatilityClock::tabulated({0.0}, {1.0}), NumericsError);
    CHECK_THROWS_AS(VolatilityClock::tabulated({0.5, 1.0}, {1.0, 1.0}), NumericsError);
    CHECK_THROWS_AS(VolatilityClock::tabulated({0.0, 0.0}, {1.0, 1.0}), NumericsError);
    CHECK_THROWS_AS(VolatilityClock::tabulated({0.0, 1.0}, {1.0, -1.0}), NumericsError);
}

TEST_CASE("custom clock matches the closed-form twin") {
    auto ref = VolatilityClock::exponential(0.6);
    auto c = VolatilityClock::custom([](double x) { return std::exp(0.6 * x); });
    CHECK(c.cumulative_variance(1.7) ==
          doctest::Approx(ref.cumulative_variance(1.7)).epsilon(1e-10));
    CHECK(c.h2_prime(0.9) == doctest::Approx(ref.h2_prime(0.9)).epsilon(1e-8));
    CHECK(c.inverse_clock(2.0) == doctest::Approx(ref.inverse_clock(2.0)).epsilon(1e-8));
}

TEST_CASE("domain errors") {
    auto c = VolatilityClock::constant(1.0);
    CHECK_THROWS_AS((void)c.cumulative_variance(-0.1), NumericsError);
    CHECK_THROWS_AS((void)c.variance_between(0.5, 0.2), NumericsError);
    CHECK_THROWS_AS((void)c.inverse_clock(-1.0), NumericsError);
    CHECK_THROWS_AS(VolatilityClock::constant(0.0), NumericsError);
    CHECK_THROWS_AS(VolatilityClock::power(-1.0, 0.5), NumericsError);
}
