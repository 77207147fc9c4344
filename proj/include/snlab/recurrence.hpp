#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "snlab/induced_map.hpp"

namespace snlab {

// Neighbourhoods of c: I_r = [c + e^{-r}, c + e^{-r+1}), I_{-r} mirrored, each cut into r^2 pieces.
struct RecurrenceParams {
    double c = 0.5;
    double alpha = 0.05;
    double delta = std::exp(-10.0);
    double iota = 0.3;
    int r_delta = 10;
    int r_delta_plus = 3;

    struct Cell {
        int r;  // signed: negative left of c
        int m;  // 1 .. r^2
    };
    // Cell of x, or nothing when x = c or |x - c| > 1.
    std::optional<Cell> locate(double x) const;
    bool in_delta(double x) const { return std::abs(x - c) < std::exp(-static_cast<double>(r_delta)); }
    bool in_delta_plus(double x) const { return std::abs(x - c) < std::exp(-static_cast<double>(r_delta_plus)); }
    // [lo, hi) of I_r.
    std::pair<double, double> band(int r) const;
};

RecurrenceParams delta_partition(double c, double alpha = 0.05, double delta = std::exp(-10.0), double iota = 0.3);

struct BindingResult {
    long p = 0;
    bool capped = false;
    double final_length = 0.0;  // |eta_p|
};

// Binding period of x from breve iterates of eta_0 = (c, x).
BindingResult binding_period(const InducedContext& ctx, double x, double alpha, long cap = 10000);

struct RecurrenceReturn {
    long k;
    int r;
    bool bound;
    double distance;  // |c~_k - c|
};

struct BindingWindow {
    long k;
    long p;
};

struct RecurrenceReport {
    int l = 0;
    double theta = 0.0;
    double gamma = 0.0;
    long horizon = 0;
    bool br_pass = true;
    long first_fail = -1;
    long steps = 0;             // induced steps actually taken
    long base_iterates = 0;
    std::vector<RecurrenceReturn> returns;
    std::vector<BindingWindow> binding;
    double log_product = 0.0;   // sum of ln|c~_i - c| over returns to (c - delta, c + delta)
    double min_margin = INFINITY;  // min over returns of log_product + alpha k
    double free_depth_sum = 0.0;
    double ce_slope = 0.0;      // slope of ln|D f~^i(f(c))| in i
    long captured_at = -1;      // induced step at which the orbit landed on the capture target
};

struct CaptureTarget {
    std::vector<DoubleDouble> orbit;  // periodic orbit at the parameter of the check
    double tolerance = 1e-9;
};

struct BrOptions {
    bool stop_at_failure = true;
    long dd_prefix = 0;  // base iterates carried in double-double before switching to double
    std::optional<CaptureTarget> capture;
    bool binding = true;
};

RecurrenceReport br_check(const InducedContext& ctx, const RecurrenceParams& params, long n, const BrOptions& opts = {});

// Brute-force check on the base orbit. Each return to (c - delta, c + delta) is charged at the induced
// index reconstructed by counting passages through [e_{-l}, e) with plain iterates of f^q.
struct BaseBrReport {
    bool br_pass = true;
    long first_fail = -1;
    bool br_pass_base_time = true;  // same product against e^{-alpha K} with K the base index
    long base_iterates = 0;
    long returns = 0;
};
BaseBrReport base_br_check(const FlowGeometry& geo, double gamma, double e_left, const RecurrenceParams& params, long n);

struct ScanPoint {
    double theta;
    double gamma;
    int rung;
    bool br_pass;
    long first_fail;
    double ce_slope;
    ErrorCode failure;
    bool ok;  // false when the parameter could not be set up
};

struct ScanResult {
    int l = 0;
    double center = 0.0;
    double half_width = 0.0;
    std::vector<ScanPoint> points;
    double survival = 0.0;
    double survival_ce = 0.0;  // surviving with positive ce_slope
};

// br_check on the midpoints of a uniform grid over (center - eps, center + eps) in rung l.
ScanResult br_scan(const FlowGeometry& geo, const Ladder& ladder, int l, double center, double eps, int grid,
                   const RecurrenceParams& params, long n, int workers = 1);

// Moves (l, theta) with theta outside [0, 1) to the rung that contains it.
RungPosition normalize_rung(int l, double theta);

}  // namespace snlab
