#include <doctest.h>

#include <cmath>
#include <random>

#include "snlab/double_double.hpp"
#include "snlab/map_core.hpp"

using namespace snlab;

TEST_CASE("quadratic family jet at the critical point") {
    auto fam = UnimodalFamily::quadratic();
    auto j = evaluate(fam, 0.5, 4.0);
    CHECK(j.f == doctest::Approx(1.0));
    CHECK(j.df == doctest::Approx(0.0));
    CHECK(j.d2f == doctest::Approx(-8.0));
}

TEST_CASE("evaluate rejects points outside the interval") {
    auto fam = UnimodalFamily::quadratic();
    CHECK_THROWS_AS(evaluate(fam, 1.2, 3.0), Error);
    CHECK_THROWS_AS(evaluate(fam, 0.3, 4.5), Error);
}

TEST_CASE("log-derivative sums follow the chain rule") {
    auto fam = UnimodalFamily::quadratic();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(0.05, 0.95), umu(3.5, 4.0);
    for (int trial = 0; trial < 50; ++trial) {
        double x0 = ux(rng), mu = umu(rng);
        const int n = 6;
        auto rec = iterate(fam, x0, mu, n);
        REQUIRE(rec.samples.size() == n + 1);
        // Independent oracle: long-double central difference of f^n.
        long double h = 1e-9L;
        auto fn = [&](long double x) {
            for (int i = 0; i < n; ++i) x = (long double)mu * x * (1.0L - x);
            return x;
        };
        long double fd = (fn(x0 + h) - fn(x0 - h)) / (2 * h);
        CHECK(std::exp(rec.log_deriv_sums[n]) == doctest::Approx((double)std::fabs(fd)).epsilon(1e-5));
    }
}

TEST_CASE("log-derivative floor at an exactly critical orbit") {
    auto fam = UnimodalFamily::quadratic();
    auto rec = iterate(fam, 0.5, 2.0, 3);
    CHECK(rec.log_deriv_sums[1] == log_deriv_floor);
    CHECK(lyapunov_slope(fam, 0.3, 2.0, 2000, 10) < 0.0);
}

TEST_CASE("Lyapunov slope of the full quadratic map is ln 2") {
    auto fam = UnimodalFamily::quadratic();
    CHECK(lyapunov_slope(fam, 0.3141, 4.0, 1000000, 1000) == doctest::Approx(std::log(2.0)).epsilon(0.02));
}

TEST_CASE("Schwarzian of the quadratic family matches the closed form and is negative") {
    auto fam = UnimodalFamily::quadratic();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        double x = ux(rng);
        if (std::abs(x - 0.5) < 1e-3) continue;
        double s = schwarzian_at(fam, x, 3.7);
        CHECK(s < 0.0);
        CHECK(s == doctest::Approx(-6.0 / ((1 - 2 * x) * (1 - 2 * x))).epsilon(1e-10));
    }
    CHECK_THROWS_AS(schwarzian_at(fam, 0.5, 3.7), Error);
}

TEST_CASE("double-double anchor solves the fold polynomial") {
    auto fam = UnimodalFamily::quadratic();
    DoubleDouble mu = fam.gamma_offset();
    // mu^2 - 2 mu - 7 = 0 at the period-three fold.
    DoubleDouble r = mu * mu - DoubleDouble(2.0) * mu - DoubleDouble(7.0);
    CHECK(std::abs(to_double(r)) < 1e-30);
    CHECK(to_double(mu) == 1.0 + 2.0 * std::sqrt(2.0));
}

TEST_CASE("double-double arithmetic carries extra precision") {
    DoubleDouble one_third = DoubleDouble(1.0) / DoubleDouble(3.0);
    DoubleDouble back = one_third * DoubleDouble(3.0) - DoubleDouble(1.0);
    CHECK(std::abs(to_double(back)) < 1e-31);
    DoubleDouble tiny = DoubleDouble(1.0) + DoubleDouble(1e-20);
    CHECK((tiny - DoubleDouble(1.0)).hi() == doctest::Approx(1e-20));
    CHECK(to_double(sqrt(DoubleDouble(2.0)) * sqrt(DoubleDouble(2.0)) - DoubleDouble(2.0)) == doctest::Approx(0.0).epsilon(1e-30));
}
