#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "snlab/error.hpp"

namespace snlab {

// Bracketed root of a continuous function on [lo, hi] with f(lo) f(hi) <= 0.
// Illinois-type regula falsi with a bisection step whenever progress stalls.
template <class F>
double bracketed_root(F&& f, double lo, double hi, double flo, double fhi, double xtol, int max_iter = 200) {
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) throw Error(ErrorCode::bracket_loss, "no sign change on bracket");
    int side = 0;
    for (int it = 0; it < max_iter && std::abs(hi - lo) > xtol; ++it) {
        double x = (it % 3 == 2) ? 0.5 * (lo + hi) : (lo * fhi - hi * flo) / (fhi - flo);
        if (!(x > std::min(lo, hi) && x < std::max(lo, hi))) x = 0.5 * (lo + hi);
        double fx = f(x);
        if (fx == 0.0) return x;
        if ((fx > 0.0) == (fhi > 0.0)) {
            hi = x;
            fhi = fx;
            if (side == -1) flo *= 0.5;
            side = -1;
        } else {
            lo = x;
            flo = fx;
            if (side == 1) fhi *= 0.5;
            side = 1;
        }
    }
    return std::abs(flo) < std::abs(fhi) ? lo : hi;
}

// Plain bisection to machine resolution; returns the endpoint pair.
template <class F>
std::pair<double, double> bisect(F&& pred_left, double lo, double hi, int iterations) {
    // pred_left(x) is true on the left part of [lo, hi].
    for (int i = 0; i < iterations; ++i) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (pred_left(mid))
            lo = mid;
        else
            hi = mid;
    }
    return {lo, hi};
}

struct GaussLegendre {
    std::array<double, 32> nodes;
    std::array<double, 32> weights;
};

// 32-point rule on [-1, 1].
const GaussLegendre& gauss_legendre32();

template <class F>
double gl32(F&& f, double a, double b) {
    const auto& rule = gauss_legendre32();
    double mid = 0.5 * (a + b);
    double half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 32; ++i) s += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return s * half;
}

// Streaming least-squares line fit y = intercept + slope * x.
class LineAccumulator {
public:
    void add(double x, double y) {
        ++n_;
        double dx = x - mean_x_;
        mean_x_ += dx / n_;
        double dy = y - mean_y_;
        mean_y_ += dy / n_;
        sxx_ += dx * (x - mean_x_);
        sxy_ += dx * (y - mean_y_);
        syy_ += dy * (y - mean_y_);
    }
    long count() const { return n_; }
    double slope() const { return sxx_ > 0.0 ? sxy_ / sxx_ : 0.0; }
    double intercept() const { return mean_y_ - slope() * mean_x_; }
    double residual_variance() const {
        if (n_ < 3) return 0.0;
        double r = syy_ - slope() * sxy_;
        return std::max(r, 0.0) / static_cast<double>(n_ - 2);
    }
    double slope_stderr() const { return sxx_ > 0.0 ? std::sqrt(residual_variance() / sxx_) : 0.0; }

private:
    long n_ = 0;
    double mean_x_ = 0.0;
    double mean_y_ = 0.0;
    double sxx_ = 0.0;
    double sxy_ = 0.0;
    double syy_ = 0.0;
};

struct LineFit {
    double slope;
    double intercept;
    double slope_stderr;
};

// Least-squares line through (x, y) by QR.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Distance on R/Z.
inline double circle_distance(double a, double b) {
    double d = std::fmod(std::abs(a - b), 1.0);
    return std::min(d, 1.0 - d);
}

inline double wrap01(double x) {
    double r = x - std::floor(x);
    return r >= 1.0 ? 0.0 : r;
}

std::uint64_t splitmix64(std::uint64_t& state);

// Kronecker sequence frac(offset + k / golden_ratio) mapped into [lo, hi].
std::vector<double> low_discrepancy_points(std::uint64_t seed, int count, double lo, double hi);

std::vector<double> geometric_grid(double lo, double hi, int points);

}  // namespace snlab
