#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "snlab/mather.hpp"
#include "snlab/phase_coords.hpp"

namespace snlab {

// Fundamental domains E^{-i} = [e_{-i}, e_{-i+1}), i = 0..l, with E^0 = I^u = [e, f^q(e)).
// A point of E^{-i} is sent to f^{iq+1} of itself; other points to f of themselves.
struct InducedContext {
    const FlowGeometry* geo = nullptr;
    int l = 0;
    double theta = 0.0;
    double gamma = 0.0;
    double native = 0.0;
    DoubleDouble native_dd;
    std::vector<DoubleDouble> edges_dd;  // e_{-l}, ..., e_0 = e, e_1, increasing
    std::vector<double> edges;

    double lower() const { return edges.front(); }
    double upper() const { return edges.back(); }
    int domain_count() const { return l + 1; }

    // e_{-i} for i = -1..l.
    DoubleDouble edge(int i) const { return edges_dd[static_cast<size_t>(l - i)]; }
    double domain_width(int i) const { return to_double(edge(i - 1) - edge(i)); }

    // i with x in E^{-i}, or -1 outside the union.
    int domain_of(double x) const {
        if (!(x >= edges.front() && x < edges.back())) return -1;
        auto k = std::upper_bound(edges.begin(), edges.end(), x) - edges.begin() - 1;
        return l - static_cast<int>(k);
    }
    int domain_of(DoubleDouble x) const {
        if (!(x >= edges_dd.front() && x < edges_dd.back())) return -1;
        auto k = std::upper_bound(edges_dd.begin(), edges_dd.end(), x) - edges_dd.begin() - 1;
        return l - static_cast<int>(k);
    }
    long count_of(int i) const { return i < 0 ? 1 : static_cast<long>(i) * geo->q + 1; }

    // Discontinuities of the induced map: e_0, e_{-1}, ..., e_{-l}.
    std::vector<double> discontinuity_points() const;
};

InducedContext build_induced(const FlowGeometry& geo, const Ladder& ladder, int l, double theta);
// Same construction at an explicit parameter of rung l.
InducedContext build_induced_at(const FlowGeometry& geo, int l, double theta, double gamma);

template <class S>
struct InducedStep {
    S y;
    long count;
};

template <class S>
InducedStep<S> induced_step(const InducedContext& ctx, S x) {
    const long count = ctx.count_of(ctx.domain_of(x));
    S native;
    if constexpr (std::is_same_v<S, DoubleDouble>)
        native = ctx.native_dd;
    else
        native = static_cast<S>(ctx.native);
    return {iterate_value(ctx.geo->family, x, native, count), count};
}

template <class S>
struct InducedOrbit {
    std::vector<S> orbit;  // x_0 .. x_n under the induced map
    std::vector<long> base_index;
    double log_deriv = 0.0;  // ln |D f~^n(x_0)|
    long base_iterates = 0;

    double step_ratio() const { return base_iterates > 0 ? static_cast<double>(orbit.size() - 1) / base_iterates : 0.0; }
};

template <class S>
InducedOrbit<S> induced_orbit_deriv(const InducedContext& ctx, S x0, long n) {
    if (n < 1) throw Error(ErrorCode::domain, "need at least one induced step");
    const auto& fam = ctx.geo->family;
    S native;
    if constexpr (std::is_same_v<S, DoubleDouble>)
        native = ctx.native_dd;
    else
        native = static_cast<S>(ctx.native);
    InducedOrbit<S> out;
    out.orbit.reserve(static_cast<size_t>(n) + 1);
    out.orbit.push_back(x0);
    out.base_index.push_back(0);
    S x = x0;
    for (long k = 0; k < n; ++k) {
        const long count = ctx.count_of(ctx.domain_of(x));
        for (long s = 0; s < count; ++s) {
            auto j = fam.jet(x, native);
            out.log_deriv += log_abs_deriv(to_double(j.df));
            x = j.f;
        }
        out.base_iterates += count;
        out.orbit.push_back(x);
        out.base_index.push_back(out.base_iterates);
    }
    return out;
}

struct IntervalPiece {
    DoubleDouble src_lo, src_hi;
    DoubleDouble lo, hi;  // image of [src_lo, src_hi] under f^count
    int label = 0;        // -l-1 .. 1; -i for E^{-i}
    long count = 1;
    bool joined = false;  // absorbed an adjacent partial piece
};

struct IntervalImage {
    std::vector<IntervalPiece> pieces;

    // Connected components of the union of the piece images, increasing.
    std::vector<std::pair<DoubleDouble, DoubleDouble>> components() const;
    DoubleDouble hull_lo() const;
    DoubleDouble hull_hi() const;
};

// Image of [lo, hi] under f^n, exact for a unimodal map.
std::pair<DoubleDouble, DoubleDouble> interval_image(const UnimodalFamily& family, DoubleDouble native, DoubleDouble lo,
                                                     DoubleDouble hi, long n);

// Partition of I by the fundamental domains with the join rule, each piece advanced by its own count.
IntervalImage breve_interval_step(const InducedContext& ctx, DoubleDouble lo, DoubleDouble hi);

// Limit map at gamma = 0 with rotation theta, on (d, e) and outside the limit union.
// Diagnostic only; the map has infinitely many discontinuities accumulating at a.
struct LimitInducedMap {
    const FlowGeometry* geo;
    ZeroCharts charts;
    double theta;

    double operator()(double x) const;
    bool in_union(double x) const;
};

LimitInducedMap limit_induced_map(const FlowGeometry& geo, double theta);

}  // namespace snlab
