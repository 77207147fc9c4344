#include <doctest.h>

#include <cmath>

#include "snlab/recurrence.hpp"

using namespace snlab;

TEST_CASE("partition of the critical neighbourhood") {
    auto p = delta_partition(0.5, 0.05, std::exp(-10.0), 0.3);
    CHECK(p.r_delta == 10);
    CHECK(p.r_delta_plus == 3);
    auto cell = p.locate(0.5 + std::exp(-12.5));
    REQUIRE(cell);
    CHECK(cell->r == 13);
    auto left = p.locate(0.5 - std::exp(-12.5));
    REQUIRE(left);
    CHECK(left->r == -13);
    // Piece 85 of 169 sits in the middle of I_13.
    auto [lo, hi] = p.band(13);
    auto mid = p.locate(0.5 * (lo + hi));
    REQUIRE(mid);
    CHECK(mid->m == 85);
    CHECK_FALSE(p.locate(0.5));
    CHECK(p.in_delta(0.5 + 1e-5));
    CHECK_FALSE(p.in_delta(0.5 + 1e-4));
    CHECK_THROWS_AS(delta_partition(0.5, 0.05, 2.0, 0.3), Error);
}

TEST_CASE("binding period grows with depth") {
    const auto& g = quadratic_geometry();
    auto lad = gamma_ladder(g, 79, 82);
    auto ctx = build_induced(g, lad, 80, 0.27);
    long prev = 0;
    for (int r : {6, 10, 14}) {
        auto b = binding_period(ctx, g.c + std::exp(-r - 0.5), 0.05);
        CHECK_FALSE(b.capped);
        CHECK(b.p >= prev);
        CHECK(b.final_length > std::exp(-2.0 * 0.05 * static_cast<double>(b.p)));
        prev = b.p;
    }
    CHECK(prev > 0);
}

TEST_CASE("recurrence check is monotone in alpha and agrees with the base orbit") {
    const auto& g = quadratic_geometry();
    auto lad = gamma_ladder(g, 99, 102);
    auto params = delta_partition(g.c);
    int agree = 0, total = 0;
    for (double theta : {0.1, 0.27, 0.5, 0.73, 0.9}) {
        auto ctx = build_induced(g, lad, 100, theta);
        auto strict = br_check(ctx, delta_partition(g.c, 0.01), 20000);
        auto loose = br_check(ctx, delta_partition(g.c, 0.2), 20000);
        if (strict.br_pass) CHECK(loose.br_pass);
        CHECK(loose.min_margin >= strict.min_margin);
        auto rep = br_check(ctx, params, 20000);
        auto base = base_br_check(g, ctx.gamma, ctx.lower(), params, rep.steps);
        ++total;
        if (base.br_pass == rep.br_pass) ++agree;
        CHECK(rep.steps > 0);
        CHECK(rep.base_iterates >= rep.steps);
    }
    CHECK(agree == total);
}

TEST_CASE("scan grid bounds") {
    const auto& g = quadratic_geometry();
    auto lad = gamma_ladder(g, 99, 102);
    CHECK_THROWS_AS(br_scan(g, lad, 100, 0.5, 0.05, 100, delta_partition(g.c), 1000), Error);
    auto pos = normalize_rung(100, 1.25);
    CHECK(pos.l == 101);
    CHECK(pos.theta == doctest::Approx(0.25));
    pos = normalize_rung(100, -0.25);
    CHECK(pos.l == 99);
    CHECK(pos.theta == doctest::Approx(0.75));
}
