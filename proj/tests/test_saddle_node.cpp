#include <doctest.h>

#include <chrono>
#include <cmath>

#include "snlab/saddle_node.hpp"

using namespace snlab;

namespace {

// Oracle: period-three fold orbit point near 1/2 from the closed-form parameter
// by bisection of Df^3 - 1 in long double.
long double fold_point_oracle() {
    const long double mu = 1.0L + 2.0L * std::sqrt(2.0L);
    auto d3 = [&](long double x) {
        long double d = 1.0L;
        for (int i = 0; i < 3; ++i) {
            d *= mu * (1.0L - 2.0L * x);
            x = mu * x * (1.0L - x);
        }
        return d - 1.0L;
    };
    long double lo = 0.505L, hi = 0.53L;
    for (int i = 0; i < 200; ++i) {
        long double m = 0.5L * (lo + hi);
        if ((d3(m) > 0) == (d3(lo) > 0)) lo = m; else hi = m;
    }
    return 0.5L * (lo + hi);
}

}  // namespace

TEST_CASE("period-three fold of the quadratic family") {
    auto fam = UnimodalFamily::quadratic();
    auto t0 = std::chrono::steady_clock::now();
    auto sn = locate_saddle_node(fam, 3, 3.83, 0.16);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(std::abs(sn.native - (1.0 + 2.0 * std::sqrt(2.0))) < 1e-10);
    CHECK(secs < 1.0);
    CHECK(sn.a == doctest::Approx((double)fold_point_oracle()).epsilon(1e-9));
    CHECK(sn.orbit.size() == 3);
    CHECK(sn.second_deriv * sn.param_deriv > 0.0);
    CHECK(sn.residual_fixed < 1e-12);
    CHECK(sn.residual_unit < 1e-9);
    CHECK(std::abs(to_double(sn.native_dd - fam.gamma_offset())) < 1e-20);
}

TEST_CASE("fixed-point seed does not yield a period-one fold") {
    auto fam = UnimodalFamily::quadratic();
    CHECK_THROWS_AS(locate_saddle_node(fam, 1, 3.0, 2.0 / 3.0), Error);
}

TEST_CASE("gamma convention removes the orbit for positive gamma") {
    auto base = UnimodalFamily::quadratic();
    auto sn = locate_saddle_node(base, 3, 3.83, 0.16);
    auto fam = gamma_convention(base, sn);
    CHECK(fam.orientation() == 1);
    CHECK(native_of_gamma(fam, 1e-4) == doctest::Approx(sn.native - 1e-4).epsilon(1e-15));
    CHECK_THROWS_AS(native_of_gamma(fam, 0.1), Error);
    // Independent check: f^3(x) - x has a root near a only for gamma < 0.
    auto min_disp = [&](double gamma) {
        double mu = 1.0 + 2.0 * std::sqrt(2.0) - gamma, m = 1e9;
        for (int i = 0; i <= 2000; ++i) {
            double x = 0.49 + 0.05 * i / 2000.0, y = x;
            for (int k = 0; k < 3; ++k) y = mu * y * (1 - y);
            m = std::min(m, y - x);
        }
        return m;
    };
    CHECK(min_disp(1e-4) > 0.0);
    CHECK(min_disp(-1e-4) < 0.0);
}

TEST_CASE("repelling periodic points at the fold parameter") {
    auto base = UnimodalFamily::quadratic();
    const double mu = 1.0 + 2.0 * std::sqrt(2.0);
    IntervalSet none;
    auto pts = repelling_points_of_f0(base, 2, none, 20000);
    bool fixed = false, two = false;
    double xp = (mu + 1 + std::sqrt((mu + 1) * (mu - 3))) / (2 * mu);
    for (const auto& t : pts) {
        if (t.period == 1 && std::abs(t.points[0] - (1 - 1 / mu)) < 1e-12) {
            fixed = true;
            CHECK(t.multipliers[0] == doctest::Approx(2 - mu));
        }
        if (t.period == 2 && std::abs(t.points[0] - xp) < 1e-12) two = true;
        CHECK(std::abs(t.multipliers[0]) > 1.0);
    }
    CHECK(fixed);
    CHECK(two);
}

TEST_CASE("excluded neighbourhood removes the fold orbit") {
    auto base = UnimodalFamily::quadratic();
    auto sn = locate_saddle_node(base, 3, 3.83, 0.16);
    IntervalSet ex;
    for (double p : sn.orbit) ex.parts.push_back({p - 0.01, p + 0.01});
    auto pts = repelling_points_of_f0(base, 3, ex, 20000);
    for (const auto& t : pts) {
        double y = t.points[0];
        for (int k = 0; k < t.period; ++k) {
            CHECK_FALSE(ex.contains(y));
            y = 3.8284271247461903 * y * (1 - y);
        }
    }
}

TEST_CASE("continuation of the interior fixed point") {
    auto fam = UnimodalFamily::quadratic();
    const double mu = 1.0 + 2.0 * std::sqrt(2.0);
    std::vector<double> grid;
    for (int i = 1; i <= 20; ++i) grid.push_back(1e-3 * i);
    auto track = continue_periodic_point(fam, 1, 1 - 1 / mu, 0.0, grid);
    REQUIRE(track.complete);
    REQUIRE(track.points.size() == grid.size());
    for (size_t i = 0; i < grid.size(); ++i)
        CHECK(track.points[i] == doctest::Approx(1 - 1 / (mu - grid[i])).epsilon(1e-13));
}

TEST_CASE("fold location does not depend on the seed within the basin") {
    auto fam = UnimodalFamily::quadratic();
    const double seeds[10][2] = {{3.83, 0.16},  {3.829, 0.158}, {3.827, 0.161}, {3.83, 0.515},  {3.826, 0.512},
                                 {3.83, 0.956}, {3.828, 0.957}, {3.829, 0.955}, {3.8285, 0.163}, {3.8275, 0.516}};
    std::vector<double> mus;
    for (auto& s : seeds) mus.push_back(locate_saddle_node(fam, 3, s[0], s[1]).native);
    for (double a : mus)
        for (double b : mus) CHECK(std::abs(a - b) < 1e-9);
}
