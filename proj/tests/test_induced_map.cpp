#include <doctest.h>

#include <cmath>

#include "snlab/induced_map.hpp"

using namespace snlab;

namespace {

struct Fixture {
    const FlowGeometry& g = quadratic_geometry();
    Ladder lad = gamma_ladder(g, 39, 42);
    InducedContext ctx = build_induced(g, lad, 40, 0.3);
};

}  // namespace

TEST_CASE("induced step matches direct iteration bit for bit") {
    Fixture fx;
    const auto& ctx = fx.ctx;
    for (double x : {0.1, 0.3, 0.5, 0.7, 0.9, ctx.lower(), 0.5 * (ctx.lower() + ctx.upper())}) {
        const int i = ctx.domain_of(x);
        const long count = i < 0 ? 1 : 3L * i + 1;
        double y = x;
        for (long s = 0; s < count; ++s) y = ctx.native * y * (1.0 - y);
        auto step = induced_step(ctx, x);
        CHECK(step.count == count);
        CHECK(step.y == y);
    }
}

TEST_CASE("points outside the union take one step") {
    Fixture fx;
    CHECK(fx.ctx.domain_of(fx.ctx.lower() - 1e-9) == -1);
    CHECK(fx.ctx.domain_of(fx.ctx.upper()) == -1);
    CHECK(induced_step(fx.ctx, 0.2).count == 1);
}

TEST_CASE("domains tile the flow box") {
    Fixture fx;
    const auto& ctx = fx.ctx;
    CHECK(ctx.edges.size() == static_cast<size_t>(ctx.l + 2));
    CHECK(to_double(ctx.edge(0)) == doctest::Approx(fx.g.e).epsilon(1e-15));
    // [d_1, e) lies in the union, with d_1 = f^q(d).
    const double d1 = iterate_value(fx.g.family, fx.g.d, fx.g.family.native<double>(0.0), 3);
    CHECK(ctx.lower() <= d1);
    CHECK(ctx.lower() >= fx.g.d);
    for (int i = 0; i <= ctx.l; ++i) {
        CHECK(ctx.domain_width(i) > 0.0);
        // f^q carries e_{-i} to e_{-i+1}.
        const DoubleDouble y = iterate_value(fx.g.family, ctx.edge(i), ctx.native_dd, 3);
        CHECK(std::abs(to_double(y - ctx.edge(i - 1))) < 1e-12);
    }
    auto disc = ctx.discontinuity_points();
    CHECK(disc.size() == static_cast<size_t>(ctx.l + 1));
    // The image jumps across each discontinuity.
    for (double p : disc) {
        const double left = induced_step(ctx, std::nextafter(p, 0.0) - 1e-13).y;
        const double right = induced_step(ctx, p + 1e-13).y;
        CHECK(std::abs(left - right) > 1e-6);
    }
}

TEST_CASE("orbit derivative follows the chain rule") {
    Fixture fx;
    const auto& ctx = fx.ctx;
    const double x0 = 0.37;
    auto orb = induced_orbit_deriv(ctx, x0, 25);
    double acc = 0.0;
    double x = x0;
    long base = 0;
    for (int k = 0; k < 25; ++k) {
        auto step = induced_step(ctx, x);
        for (long s = 0; s < step.count; ++s) {
            acc += std::log(std::abs(ctx.native * (1.0 - 2.0 * x)));
            x = ctx.native * x * (1.0 - x);
        }
        base += step.count;
        CHECK(orb.orbit[static_cast<size_t>(k) + 1] == x);
        CHECK(orb.base_index[static_cast<size_t>(k) + 1] == base);
    }
    CHECK(orb.log_deriv == doctest::Approx(acc).epsilon(1e-12));
}

TEST_CASE("interval image of a unimodal iterate") {
    const auto& g = quadratic_geometry();
    const DoubleDouble native = g.native(0.0);
    auto img = interval_image(g.family, native, DoubleDouble(0.4), DoubleDouble(0.6), 2);
    // Dense sampling oracle.
    double lo = 1.0, hi = 0.0;
    for (int k = 0; k <= 20000; ++k) {
        const double x = 0.4 + 0.2 * k / 20000.0;
        const double y = iterate_value(g.family, x, to_double(native), 2);
        lo = std::min(lo, y);
        hi = std::max(hi, y);
    }
    CHECK(to_double(img.first) <= lo + 1e-12);
    CHECK(to_double(img.second) >= hi - 1e-12);
    CHECK(to_double(img.first) > lo - 1e-6);
    CHECK(to_double(img.second) < hi + 1e-6);
}

TEST_CASE("breve step joins partial end pieces") {
    Fixture fx;
    const auto& ctx = fx.ctx;
    // Covers E^{-5} fully plus slivers of its neighbours.
    const DoubleDouble lo = ctx.edge(5) - DoubleDouble(0.05 * ctx.domain_width(6));
    const DoubleDouble hi = ctx.edge(4) + DoubleDouble(0.05 * ctx.domain_width(4));
    auto img = breve_interval_step(ctx, lo, hi);
    REQUIRE(img.pieces.size() == 1);
    CHECK(img.pieces[0].label == -5);
    CHECK(img.pieces[0].joined);
    CHECK(img.pieces[0].src_lo == lo);
    CHECK(img.pieces[0].src_hi == hi);
    CHECK(img.hull_lo() <= img.hull_hi());
    CHECK_THROWS_AS(breve_interval_step(ctx, hi, lo), Error);
}

TEST_CASE("induced map tends to the limit map away from its discontinuities") {
    const auto& g = quadratic_geometry();
    const double theta = 0.3;
    auto lim = limit_induced_map(g, theta);
    auto lad = gamma_ladder(g, 59, 301);
    double prev = INFINITY;
    for (int l : {60, 150, 300}) {
        auto ctx = build_induced(g, lad, l, theta);
        double worst = 0.0;
        for (double t : {0.45, 0.6, 0.8, 0.95}) {
            const double x = to_double(lim.charts.stable.tau_bar_s_inverse(t));
            REQUIRE(lim.in_union(x));
            worst = std::max(worst, std::abs(induced_step(ctx, x).y - lim(x)));
        }
        for (double x : {0.53, 0.545}) worst = std::max(worst, std::abs(induced_step(ctx, x).y - lim(x)));
        CHECK(worst <= prev);
        prev = worst;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("induced context rejects non-positive gamma") {
    const auto& g = quadratic_geometry();
    CHECK_THROWS_AS(build_induced_at(g, 40, 0.3, 0.0), Error);
    CHECK_THROWS_AS(build_induced_at(g, 40, 0.3, -1e-4), Error);
}
