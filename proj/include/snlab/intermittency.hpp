#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "snlab/induced_map.hpp"
#include "snlab/recurrence.hpp"

namespace snlab {

// E-bar: E, f(E), ..., f^{q-1}(E) at gamma = 0.
IntervalSet laminar_region(const FlowGeometry& geo);
// q intervals of the given half-width around the fold orbit; rejected when they meet c or a critical point of f^q_0.
IntervalSet laminar_region(const FlowGeometry& geo, double half_width);

struct LaminarProfile {
    std::vector<long> laminar;  // run lengths in f-iterates, in orbit order
    std::vector<long> burst;
    bool starts_laminar = false;
    long n_total = 0;
    long laminar_total = 0;
    double chi = 0.0;

    // Mean over runs not cut by the ends of the window.
    double mean_laminar() const;
    double mean_burst() const;
    long longest_laminar() const;
};

LaminarProfile laminar_segments(const UnimodalFamily& family, double gamma, double x0, long n, const IntervalSet& region,
                                long burn_in = 1000);

struct ChiEstimate {
    double gamma = 0.0;
    double chi = 0.0;
    double stderr_mean = 0.0;    // across-seed standard error of chi
    double within_stderr = 0.0;  // batch-means standard error of a single-seed estimate (pooled)
    double spread = 0.0;         // standard deviation of the per-seed values
    double max_pair_gap = 0.0;
    double mean_laminar = 0.0;
    std::vector<double> per_seed;

    // Seed-to-seed variation is within the noise of a single estimate.
    bool constant() const { return spread < 3.0 * within_stderr; }
};

ChiEstimate chi_estimate(const UnimodalFamily& family, double gamma, int seeds, long n, const IntervalSet& region,
                         std::uint64_t seed = 1, int workers = 1);

struct WindowPoint {
    double gamma = 0.0;
    double lyapunov = 0.0;
    bool masked = false;  // negative Lyapunov slope
    long period = 0;      // by orbit closure, 0 when none found
};

std::vector<WindowPoint> window_detect(const UnimodalFamily& family, const std::vector<double>& gammas, long n,
                                       int workers = 1);

struct WindowInterval {
    long period = 0;
    int depth = 0;        // iterates from I^u_0 to c
    double gamma_superstable = 0.0;
    double gamma_lo = 0.0;
    double gamma_hi = 0.0;
    double theta_lo = 0.0;
    double theta_hi = 0.0;
    bool ok = false;
};

struct RungWindows {
    int l = 0;
    std::vector<WindowInterval> windows;
    double theta_measure = 0.0;  // total theta-length of the attracting-orbit intervals found
};

// Windows of rung l whose critical orbit returns to c once after a single passage, located through their
// superstable parameters and extended in gamma while the attracting orbit has |multiplier| <= 1.
RungWindows rung_windows(const FlowGeometry& geo, const Ladder& ladder, int l, int max_depth = 8);

struct ScalingPoint {
    double gamma;
    double chi;
    double stderr_mean;
    double mean_laminar;
    bool masked;
};

struct ScalingFit {
    std::vector<ScalingPoint> points;
    double slope = 0.0;           // ln(1 - chi) against ln gamma
    double slope_stderr = 0.0;
    double band_min = 0.0;        // (1 - chi) / sqrt(gamma) over unmasked points
    double band_max = 0.0;
    double laminar_slope = 0.0;   // ln(mean laminar length) against ln gamma
    int used = 0;
};

ScalingFit scaling_fit(const UnimodalFamily& family, const std::vector<double>& gammas, long n, const IntervalSet& region,
                       const std::vector<bool>& masked, int seeds = 8, std::uint64_t seed = 1, int workers = 1);

enum class MeasureMode { base, induced, pushforward };
MeasureMode parse_measure_mode(const std::string& s);
std::string to_string(MeasureMode m);

struct EmpiricalMeasure {
    MeasureMode source = MeasureMode::base;
    double lo = 0.0;
    double hi = 1.0;
    std::vector<double> masses;
    long samples = 0;

    double bin_width() const { return (hi - lo) / static_cast<double>(masses.size()); }
    double bin_lo(size_t i) const { return lo + bin_width() * static_cast<double>(i); }
    double bin_hi(size_t i) const { return lo + bin_width() * static_cast<double>(i + 1); }
    // Mass of [a, b] with partial bins prorated.
    double mass(double a, double b) const;
    double mass(const IntervalSet& s) const;
    // Mass of bins lying entirely outside [a, b].
    double mass_outside(double a, double b) const;
};

// Histogram of n points of an orbit from a quasi-random start. For pushforward, every base iterate
// consumed by the induced steps is credited, so n counts base iterates in all modes except induced.
EmpiricalMeasure measure_estimate(const FlowGeometry& geo, const Ladder& ladder, double gamma, MeasureMode mode, long n,
                                  int bins = 4096, std::uint64_t seed = 1);

double total_variation(const EmpiricalMeasure& a, const EmpiricalMeasure& b);

// Wasserstein-1 distance to the uniform atomic measure on the points.
double wasserstein_to_atoms(const EmpiricalMeasure& m, const std::vector<double>& atoms);

// Smallest K with mass(A) <= K sqrt(|A|) over `count` random intervals.
double tail_constant(const EmpiricalMeasure& m, int count, std::uint64_t seed = 1);

struct HittingTimes {
    double induced_to_v = 0.0;  // mean iterations of the induced map to enter V
    double base_to_tilde = 0.0; // mean iterations of f to enter the induced union
    long samples = 0;
};

HittingTimes hitting_time_stats(const InducedContext& ctx, double v_lo, double v_hi, long n, std::uint64_t seed = 1);

}  // namespace snlab
