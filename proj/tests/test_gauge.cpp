#include <cmath>

#include "doctest.h"
#include "fpt/gauge.hpp"

using namespace fpt;

namespace {

// f = 1 + u^2 on the unit clock over [0, 1]: beta' = 2 and
//   pi0(u) = 2u - 2, v0(u) = -(1-u)^2, S(0,1) = 2/3,
//   adjoints anchored at the start: pi~(u) = -2u, v~(u) = -u^2
struct QuadCase {
    MovingBoundary boundary = MovingBoundary::polynomial({1.0, 0.0, 1.0});
    VolatilityClock clock = VolatilityClock::constant(1.0);
};

}  // namespace

TEST_CASE("quadratic boundary gauge, closed forms") {
    QuadCase q;
    auto g = solve_gauge(q.boundary, q.clock, 0.0, 1.0);
    CHECK(g.kappa() == 0.0);
    CHECK(g.pi(0.0) == doctest::Approx(-2.0).epsilon(1e-11));
    CHECK(g.pi(1.0) == doctest::Approx(0.0).epsilon(1e-11));
    CHECK(g.v(0.0) == doctest::Approx(-1.0).epsilon(1e-11));
    CHECK(g.v(1.0) == doctest::Approx(0.0).epsilon(1e-11));
    CHECK(g.action(0.0, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-11));
    CHECK(g.pi_tilde(1.0) == doctest::Approx(-2.0).epsilon(1e-11));
    CHECK(g.v_tilde(1.0) == doctest::Approx(-1.0).epsilon(1e-11));
    // between-knot evaluation stays on the parabola
    CHECK(g.v(0.37) == doctest::Approx(-(1.0 - 0.37) * (1.0 - 0.37)).epsilon(1e-10));
    CHECK(g.pi(0.37) == doctest::Approx(2.0 * 0.37 - 2.0).epsilon(1e-10));
}

TEST_CASE("anchor identity ties v0 to the boundary") {
    // v0(t) = f(s) - f(t) - beta(s) (H(s) - H(t))
    auto b = MovingBoundary::polynomial({2.0, -0.5, 0.3});
    auto c = VolatilityClock::exponential(0.7);
    const double s = 1.4;
    auto g = solve_gauge(b, c, 0.0, s);
    for (double t : {0.0, 0.4, 1.0, 1.3}) {
        const double expect = b.value(s) - b.value(t) -
                              b.beta(c, s) * c.variance_between(t, s);
        CHECK(g.v(t) == doctest::Approx(expect).epsilon(1e-9));
    }
    // pi + pi~ is constant under the pinned anchoring
    const double c0 = g.pi(0.0) + g.pi_tilde(0.0);
    for (double t : {0.3, 0.8, 1.2}) {
        CHECK(g.pi(t) + g.pi_tilde(t) == doctest::Approx(c0).epsilon(1e-10));
    }
}

TEST_CASE("rk4 against an exponential-clock closed form") {
    // f = 1 + u on h = e^u over [0, 1]:
    //   pi0(u) = e^{-2u} - e^{-2}
    //   v0(u)  = (1 - u) - (1 - e^{2u-2})/2
    auto b = MovingBoundary::polynomial({1.0, 1.0});
    auto c = VolatilityClock::exponential(1.0);
    auto g = solve_gauge(b, c, 0.0, 1.0);
    for (double u : {0.0, 0.25, 0.5, 0.99}) {
        const double pi_exact = std::exp(-2.0 * u) - std::exp(-2.0);
        const double v_exact = (1.0 - u) - 0.5 * (1.0 - std::exp(2.0 * u - 2.0));
        CHECK(g.pi(u) == doctest::Approx(pi_exact).epsilon(1e-10));
        CHECK(g.v(u) == doctest::Approx(v_exact).epsilon(1e-10));
    }
}

TEST_CASE("action is additive") {
    QuadCase q;
    auto g = solve_gauge(q.boundary, q.clock, 0.0, 1.0,
                         GaugeOptions{AnchorPolicy::grazing, 512, {}});
    const double whole = g.action(0.1, 0.9);
    const double split = g.action(0.1, 0.55) + g.action(0.55, 0.9);
    CHECK(whole == doctest::Approx(split).epsilon(1e-13));
}

TEST_CASE("grazing anchor keeps the shifted state non-negative") {
    QuadCase q;
    auto g = solve_gauge(q.boundary, q.clock, 0.0, 1.0,
                         GaugeOptions{AnchorPolicy::grazing, 2048, {}});
    // kappa = max over u of (1-u)^2/(1-u) = 1, and v = u(1-u)
    CHECK(g.kappa() == doctest::Approx(1.0).epsilon(1e-9));
    for (double u : {0.0, 0.2, 0.5, 0.9}) {
        CHECK(g.v(u) == doctest::Approx(u * (1.0 - u)).epsilon(1e-9));
        CHECK(g.v(u) > -1e-12);
    }
    // the tilde pair is tied to the shifted pair
    CHECK(g.pi_tilde(0.4) == doctest::Approx(-g.pi(0.4)).epsilon(1e-13));
    CHECK(g.v_tilde(0.4) == doctest::Approx(g.v(0.4)).epsilon(1e-13));
}

TEST_CASE("kappa shift is algebraic, not a re-solve") {
    QuadCase q;
    GaugeOptions opt;
    opt.kappa_override = 0.7;
    auto g = solve_gauge(q.boundary, q.clock, 0.0, 1.0, opt);
    auto g0 = solve_gauge(q.boundary, q.clock, 0.0, 1.0);
    const double dH = 1.0 - 0.4;  // H(s) - H(u) on the unit clock
    CHECK(g.pi(0.4) == doctest::Approx(g0.pi(0.4) + 0.7).epsilon(1e-12));
    CHECK(g.v(0.4) == doctest::Approx(g0.v(0.4) + 0.7 * dH).epsilon(1e-12));
    // S(t,tau) shifts by kappa (v0(t)-v0(tau)) + kappa^2/2 (H(tau)-H(t))
    const double expect = g0.action(0.2, 0.8) + 0.7 * (g0.v(0.2) - g0.v(0.8)) +
                          0.5 * 0.49 * 0.6;
    CHECK(g.action(0.2, 0.8) == doctest::Approx(expect).epsilon(1e-11));
}

TEST_CASE("h-transform endpoint prefactors, frozen") {
    auto c = VolatilityClock::constant(1.0);
    auto p = h_transform_prefactors(c, 1.0, 0.0, 0.0);
    CHECK(p.A == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(p.B == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p.A_tilde == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(p.B_tilde == doctest::Approx(1.0).epsilon(1e-14));
    // invariant: A * 2 (H(s)-H(t)) = 1 exactly as computed
    auto e = VolatilityClock::exponential(0.9);
    auto pe = h_transform_prefactors(e, 1.2, 0.3, 0.8);
    CHECK(pe.A * 2.0 * e.variance_between(0.3, 1.2) == 1.0);
}
