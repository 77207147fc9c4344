#include <doctest.h>

#include <cmath>

#include "snlab/mather.hpp"

using namespace snlab;

TEST_CASE("Mather samples land in the stable fundamental domain") {
    const auto& g = quadratic_geometry();
    auto charts = zero_charts(g);
    for (double tau : {0.05, 0.3, 0.55, 0.8}) {
        auto s = mather_point(g, charts, tau);
        if (s.truncated) continue;
        CHECK(s.r <= 0);
        CHECK(s.m() >= 0.0);
        CHECK(s.m() < 1.0);
        // Brute force in double-double: the first of the iterates to reach [d, a) is number s.n.
        DoubleDouble y = charts.unstable.tau_bar_u_inverse(tau);
        CHECK(std::abs(to_double(y) - s.x) < 1e-15);
        long first = 0;
        for (long k = 1; k <= s.n && first == 0; ++k) {
            y = g.family.value(y, g.native(0.0));
            if (to_double(y) >= g.d && to_double(y) < g.a) first = k;
        }
        CHECK(first == s.n);
        CHECK(to_double(y) == s.landing);
        // Pushing the landing point further along f^q raises the stable phase by whole units.
        const DoubleDouble z = iterate_value(g.family, DoubleDouble(s.landing), g.native(0.0), 3);
        const double shift = charts.stable.tau_bar_s(z) - charts.stable.tau_bar_s(DoubleDouble(s.landing));
        CHECK(shift == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("V(j) grows with j") {
    const auto& g = quadratic_geometry();
    MatherOptions opts;
    opts.grid = 256;
    opts.j_max = 1000;
    auto table = mather_grid(g, zero_charts(g), opts);
    REQUIRE(table.samples.size() == 256);
    CHECK(table.v_measure(1.0) == 0.0);
    double prev = 0.0;
    for (double j : {2.0, 5.0, 20.0, 100.0, 1000.0}) {
        const double v = table.v_measure(j);
        CHECK(v >= prev);
        prev = v;
    }
    CHECK(prev > 0.9);
    CHECK_FALSE(table.discontinuities.empty());
}

TEST_CASE("Misiurewicz parameters send the critical orbit onto the fixed point") {
    const auto& g = quadratic_geometry();
    auto tracks = repelling_points_of_f0(g.family, 1, g.laminar, 20000);
    const PeriodicPointTrack* target = nullptr;
    for (const auto& t : tracks)
        if (t.points.front() > 0.5) target = &t;
    REQUIRE(target != nullptr);
    auto lad = gamma_ladder(g, 59, 62);
    auto seq = misiurewicz_sequence(g, lad, *target, 60, 61);
    REQUIRE(seq.entries.size() == 2);
    for (const auto& e : seq.entries) {
        REQUIRE(e.found);
        CHECK(e.theta >= 0.0);
        CHECK(e.theta < 1.0);
        CHECK(e.residual < 1e-10);
        // Independent oracle: iterate c in long double and watch for the fixed point 1 - 1/mu.
        const long double mu = 1.0L + 2.0L * std::sqrt(2.0L) - static_cast<long double>(e.gamma);
        const long double fixed = 1.0L - 1.0L / mu;
        long double x = 0.5L;
        long double closest = 1.0L;
        for (int k = 0; k < 2000; ++k) {
            x = mu * x * (1.0L - x);
            closest = std::min(closest, std::abs(x - fixed));
        }
        CHECK(static_cast<double>(closest) < 1e-8);
        const double lyap = lyapunov_slope(g.family, g.family.value(g.c, g.family.native<double>(e.gamma)),
                                           g.family.native<double>(e.gamma), 5000, 500);
        CHECK(lyap > 0.0);
    }
}

TEST_CASE("preimages are ordered by depth") {
    const auto& g = quadratic_geometry();
    auto pre = preimages_in(g, g.c, 0.0, 1.0, 4);
    REQUIRE_FALSE(pre.empty());
    for (size_t i = 1; i < pre.size(); ++i) CHECK(pre[i - 1].depth <= pre[i].depth);
    const double native = g.family.native<double>(0.0);
    for (const auto& p : pre) CHECK(std::abs(iterate_value(g.family, p.x, native, p.depth) - g.c) < 1e-9);
}
