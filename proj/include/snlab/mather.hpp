#pragma once

#include <cmath>
#include <vector>

#include "snlab/phase_coords.hpp"

namespace snlab {

// The two gamma = 0 charts on either side of a.
struct ZeroCharts {
    PhaseChart stable;
    PhaseChart unstable;
};
ZeroCharts zero_charts(const FlowGeometry& geo);

struct MatherSample {
    double tau = 0.0;
    double x = 0.0;       // point of I^u_0 with tau^u_0 = tau
    double mbar = 0.0;    // tau-bar^s_0 of the first hit of [d, a); +inf if deeper than the chart reaches
    double landing = 0.0;
    long r = 0;           // deepest re-entry floor, <= 0
    long n = 0;           // iterates until the first hit of [d, a)
    bool truncated = false;

    double m() const { return mbar - std::floor(mbar); }
    // Smallest real j with the sample in V(j) is anything above this value.
    double v_threshold() const;
};

MatherSample mather_point(const FlowGeometry& geo, const ZeroCharts& charts, double tau, long orbit_cap = 100000);

struct MatherDiscontinuity {
    double tau_lo;
    double tau_hi;
    int left_index;  // grid witness pair (left_index, left_index + 1 mod grid)
};

struct MatherTable {
    std::vector<MatherSample> samples;
    int j_max = 0;
    std::vector<MatherDiscontinuity> discontinuities;

    bool in_v(size_t i, double j) const { return !samples[i].truncated && samples[i].v_threshold() < j; }
    double v_measure(double j) const;
    std::vector<bool> v_mask(double j) const;
};

struct MatherOptions {
    int grid = 4096;
    int j_max = 4000;
    long orbit_cap = 100000;
    double jump = 0.25;  // circle distance flagging a candidate discontinuity
    int workers = 1;
};

MatherTable mather_grid(const FlowGeometry& geo, const ZeroCharts& charts, const MatherOptions& opts);

struct ReturnResidual {
    double max = 0.0;
    double mean = 0.0;
    int samples = 0;
    int escaped = 0;
};

// Compare the normalised first return to E^{-i}_gamma = [e_{-i-1}, e_{-i}) at gamma = g_l(theta)
// with the rotated Mather invariant on samples from V(i - 1).
ReturnResidual return_map_residual(const FlowGeometry& geo, const Ladder& ladder, int i, int l, double theta,
                                   const MatherTable& table, int samples = 50);

struct MisiurewiczEntry {
    int l = 0;
    bool found = false;
    double gamma = 0.0;
    double theta = 0.0;
    double residual = 0.0;
    double transversality = 0.0;  // |d/dtheta| of the landing condition at the root
    ErrorCode failure = ErrorCode::no_root_in_rung;
};

struct MisiurewiczSequence {
    int target_period = 0;
    double target_point = 0.0;  // y* at gamma = 0
    double preimage = 0.0;      // x* in I^u_0 with f^{j'}(x*) = y*
    int preimage_depth = 0;     // j'
    int m_base = 0;             // m = m_base or m_base + q depending on the side of the jump
    int m = 0;
    double theta_star = 0.0;    // limit prediction
    std::vector<MisiurewiczEntry> entries;
};

MisiurewiczSequence misiurewicz_sequence(const FlowGeometry& geo, const Ladder& ladder, const PeriodicPointTrack& target,
                                         int l_min, int l_max, int workers = 1);

struct Preimage {
    double x;
    int depth;
};

// Points of (lo, hi) mapped onto y by f_0^depth, depth = 1..max_depth, by increasing depth then position.
std::vector<Preimage> preimages_in(const FlowGeometry& geo, double y, double lo, double hi, int max_depth);

// Newton continuation of a preimage: x near seed with f^depth(x) = y at the given parameter.
DoubleDouble preimage_newton(const UnimodalFamily& family, DoubleDouble seed, DoubleDouble y, DoubleDouble native, int depth);

// Fraction of 1e-4 bins of [f^2(c), f(c)] visited by iterates of the local unstable manifold of a.
double unstable_cover(const FlowGeometry& geo, int iterations, double resolution);

// Critical-orbit point f^n_gamma(c) in double-double.
DoubleDouble critical_iterate(const FlowGeometry& geo, double gamma, long n);

}  // namespace snlab
