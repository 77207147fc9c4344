#pragma once

#include <optional>
#include <vector>

#include "snlab/map_core.hpp"

namespace snlab {

struct SaddleNodeData {
    double native;          // parameter at the fold
    DoubleDouble native_dd; // same, polished in double-double
    double a;               // fold point of f^q closest to the critical point
    std::vector<double> orbit;
    double second_deriv;    // D^2 f^q(a)
    double param_deriv;     // d/dgamma f^q(a) under the family's gamma convention
    double residual_fixed;  // |f^q(a) - a|
    double residual_unit;   // |Df^q(a) - 1|
    int iterations;
};

// Newton on (f^q - x, Df^q - 1) in (native, x) from the given seed.
SaddleNodeData locate_saddle_node(const UnimodalFamily& family, int q, double native_seed, double x_seed);

// Orientation s such that native = sn.native - s * gamma has no period-q orbit near a for gamma > 0.
// Returns the family re-anchored at the located fold.
UnimodalFamily gamma_convention(const UnimodalFamily& family, const SaddleNodeData& sn, double window = 0.05);

double native_of_gamma(const UnimodalFamily& family, double gamma, double window = 0.05);

// Open intervals that must stay free of the periodic orbits we collect.
struct IntervalSet {
    std::vector<std::pair<double, double>> parts;
    bool contains(double x) const {
        for (auto [lo, hi] : parts)
            if (x >= lo && x <= hi) return true;
        return false;
    }
};

struct PeriodicPointTrack {
    int period;
    std::vector<double> gammas;
    std::vector<double> points;
    std::vector<double> multipliers;
    bool complete = true;  // false when continuation stopped early
};

double periodic_multiplier(const UnimodalFamily& family, double x, double native, int period);

// Newton on f^p(x) = x at the given native parameter (double-double arithmetic).
DoubleDouble periodic_point_newton(const UnimodalFamily& family, int period, DoubleDouble x, DoubleDouble native);

// Repelling periodic points of minimal period <= max_period at gamma = 0 whose orbits avoid `excluded`.
std::vector<PeriodicPointTrack> repelling_points_of_f0(const UnimodalFamily& family, int max_period,
                                                       const IntervalSet& excluded, int grid = 100000);

PeriodicPointTrack continue_periodic_point(const UnimodalFamily& family, int period, double x0, double gamma0,
                                           const std::vector<double>& gamma_grid);

}  // namespace snlab
