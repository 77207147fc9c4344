#include <doctest.h>

#include <cmath>

#include "snlab/phase_coords.hpp"

using namespace snlab;

namespace {

// f^n_gamma(x) in long double, mu = 1 + 2 sqrt 2 - gamma.
long double iterate_ld(long double x, double gamma, long n) {
    const long double mu = 1.0L + 2.0L * std::sqrt(2.0L) - static_cast<long double>(gamma);
    for (long i = 0; i < n; ++i) x = mu * x * (1.0L - x);
    return x;
}

}  // namespace

TEST_CASE("flow box geometry of the quadratic family") {
    const auto& g = quadratic_geometry();
    CHECK(g.q == 3);
    CHECK(g.d < g.a);
    CHECK(g.a < g.e);
    CHECK(g.e < g.e_max);
    // a is the fold point: f^3_0(a) = a with derivative one.
    CHECK(std::abs(static_cast<double>(iterate_ld(g.a, 0.0, 3)) - g.a) < 1e-7);
    CHECK(g.laminar.contains(g.a));
    CHECK_FALSE(g.laminar.contains(g.c));
}

TEST_CASE("ladder parameters solve the passage equation") {
    const auto& g = quadratic_geometry();
    auto lad = gamma_ladder(g, 30, 40);
    for (int l = 30; l <= 40; ++l) {
        const double gl = lad.gamma(l);
        CHECK(gl > 0.0);
        if (l > 30) CHECK(gl < lad.gamma(l - 1));
        // Independent check: 3l iterates of d land on e.
        const long double y = iterate_ld(g.d, gl, 3L * l);
        CHECK(std::abs(static_cast<double>(y) - g.e) < 1e-8);
        CHECK(std::abs(passage_time(g, gl) - l) < 1e-6);
    }
    CHECK(std::abs(gamma_root(g, 35) - lad.gamma(35)) < 1e-15);
}

TEST_CASE("theta map spans a rung") {
    const auto& g = quadratic_geometry();
    auto lad = gamma_ladder(g, 49, 52);
    CHECK(theta_map(g, lad, 50, 0.0) == doctest::Approx(lad.gamma(50)).epsilon(1e-12));
    CHECK(theta_map(g, lad, 50, 1.0) == doctest::Approx(lad.gamma(51)).epsilon(1e-12));
    double prev = lad.gamma(50);
    for (double t = 0.1; t < 1.0; t += 0.1) {
        const double gt = theta_map(g, lad, 50, t);
        CHECK(gt < prev);
        CHECK(std::abs(passage_time(g, gt) - (50.0 + t)) < 1e-6);
        auto pos = theta_of_gamma(g, lad, gt);
        CHECK(pos.l == 50);
        CHECK(pos.theta == doctest::Approx(t).epsilon(1e-8));
        prev = gt;
    }
}

TEST_CASE("flow chart conjugates f^q to a unit translation") {
    const auto& g = quadratic_geometry();
    const double gamma = 1e-4;
    auto chart = build_chart(g, gamma, ChartKind::flow);
    const DoubleDouble native = g.native(gamma);
    for (double x : {0.505, 0.51, 0.52, 0.53, 0.545}) {
        const DoubleDouble xd(x);
        const DoubleDouble y = iterate_value(g.family, xd, native, 3);
        CHECK(chart.raw_phase(y) - chart.raw_phase(xd) == doctest::Approx(1.0).epsilon(1e-9));
        const double t = chart.tau_bar_s(xd);
        CHECK(std::abs(to_double(chart.tau_bar_s_inverse(t)) - x) < 1e-12);
    }
    CHECK(chart.passage_time() == doctest::Approx(passage_time(g, gamma)));
}

TEST_CASE("normalized distortion stays near one") {
    const auto& g = quadratic_geometry();
    auto lad = gamma_ladder(g, 59, 62);
    auto dg = normalized_distortion(g, lad, 60, 16);
    REQUIRE(dg.size() >= 16);
    for (double v : dg) {
        CHECK(v > 0.9);
        CHECK(v < 1.1);
    }
}

TEST_CASE("phase coordinate errors") {
    const auto& g = quadratic_geometry();
    CHECK_THROWS_AS(gamma_ladder(g, 10, 5), Error);
    CHECK_THROWS_AS(build_chart(g, -1e-3, ChartKind::flow), Error);
}
