#include "snlab/induced_map.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "snlab/numerics.hpp"

namespace snlab {

std::vector<double> InducedContext::discontinuity_points() const {
    std::vector<double> out;
    out.reserve(static_cast<size_t>(l) + 1);
    for (int i = 0; i <= l; ++i) out.push_back(to_double(edge(i)));
    return out;
}

InducedContext build_induced_at(const FlowGeometry& geo, int l, double theta, double gamma) {
    if (!(gamma > 0.0)) throw Error(ErrorCode::domain, "induced map needs gamma > 0");
    if (l < 1) throw Error(ErrorCode::domain, "rung must be positive");
    InducedContext ctx;
    ctx.geo = &geo;
    ctx.l = l;
    ctx.theta = theta;
    ctx.gamma = gamma;
    ctx.native_dd = geo.native(gamma);
    ctx.native = to_double(ctx.native_dd);

    const auto& fam = geo.family;
    const DoubleDouble e(geo.e);
    const DoubleDouble e1 = iterate_value(fam, e, ctx.native_dd, geo.q);
    const DoubleDouble lo(geo.left_bound);
    std::vector<DoubleDouble> back{e};
    back.reserve(static_cast<size_t>(l) + 1);
    for (int i = 1; i <= l; ++i) back.push_back(fq_preimage(geo, ctx.native_dd, back.back(), lo, back.back()));

    ctx.edges_dd.assign(back.rbegin(), back.rend());
    ctx.edges_dd.push_back(e1);
    ctx.edges.reserve(ctx.edges_dd.size());
    for (auto v : ctx.edges_dd) ctx.edges.push_back(to_double(v));

    for (int i = 0; i < l; ++i) {
        DoubleDouble img = iterate_value(fam, ctx.edge(i + 1), ctx.native_dd, geo.q);
        double rel = std::abs(to_double(img - ctx.edge(i))) / std::abs(to_double(ctx.edge(i)));
        if (!(rel < 1e-10)) throw Error(ErrorCode::backward_solve, "fundamental domain endpoints do not match");
    }
    for (size_t k = 1; k < ctx.edges.size(); ++k)
        if (!(ctx.edges_dd[k] > ctx.edges_dd[k - 1])) throw Error(ErrorCode::backward_solve, "domains out of order");

    const DoubleDouble d(geo.d);
    const DoubleDouble d1 = iterate_value(fam, d, ctx.native_dd, geo.q);
    const double slack = 1e-9 * to_double(d1 - d);
    if (to_double(ctx.edges_dd.front() - d) < -slack || to_double(ctx.edges_dd.front() - d1) > slack)
        throw Error(ErrorCode::domain, "parameter is not in the requested rung");
    return ctx;
}

InducedContext build_induced(const FlowGeometry& geo, const Ladder& ladder, int l, double theta) {
    return build_induced_at(geo, l, theta, theta_map(geo, ladder, l, theta));
}

std::pair<DoubleDouble, DoubleDouble> interval_image(const UnimodalFamily& family, DoubleDouble native, DoubleDouble lo,
                                                     DoubleDouble hi, long n) {
    const DoubleDouble c(family.critical_point());
    for (long s = 0; s < n; ++s) {
        DoubleDouble a = family.value(lo, native), b = family.value(hi, native);
        if (b < a) std::swap(a, b);
        if (lo < c && c < hi) {
            DoubleDouble fc = family.value(c, native);
            if (fc > b) b = fc;
            if (fc < a) a = fc;
        }
        lo = a;
        hi = b;
    }
    return {lo, hi};
}

std::vector<std::pair<DoubleDouble, DoubleDouble>> IntervalImage::components() const {
    std::vector<std::pair<DoubleDouble, DoubleDouble>> parts;
    for (const auto& p : pieces) parts.emplace_back(p.lo, p.hi);
    std::sort(parts.begin(), parts.end(), [](const auto& u, const auto& v) { return u.first < v.first; });
    std::vector<std::pair<DoubleDouble, DoubleDouble>> out;
    for (const auto& p : parts) {
        if (!out.empty() && p.first <= out.back().second) {
            if (p.second > out.back().second) out.back().second = p.second;
        } else {
            out.push_back(p);
        }
    }
    return out;
}

DoubleDouble IntervalImage::hull_lo() const {
    DoubleDouble v = pieces.front().lo;
    for (const auto& p : pieces)
        if (p.lo < v) v = p.lo;
    return v;
}

DoubleDouble IntervalImage::hull_hi() const {
    DoubleDouble v = pieces.front().hi;
    for (const auto& p : pieces)
        if (p.hi > v) v = p.hi;
    return v;
}

IntervalImage breve_interval_step(const InducedContext& ctx, DoubleDouble lo, DoubleDouble hi) {
    if (!(hi > lo)) throw Error(ErrorCode::empty_interval, "interval is empty");
    const int l = ctx.l;
    const auto& edges = ctx.edges_dd;

    struct Raw {
        DoubleDouble lo, hi;
        int label;
        bool full;
    };
    std::vector<Raw> raw;
    // Outer pieces count as full when they are at least as long as the adjacent domain.
    if (lo < edges.front()) {
        DoubleDouble top = hi < edges.front() ? hi : edges.front();
        raw.push_back({lo, top, -l - 1, to_double(top - lo) >= ctx.domain_width(l)});
    }
    for (int i = l; i >= 0; --i) {
        DoubleDouble a = ctx.edge(i), b = ctx.edge(i - 1);
        DoubleDouble u = lo > a ? lo : a, v = hi < b ? hi : b;
        if (v > u) raw.push_back({u, v, -i, u == a && v == b});
    }
    if (hi > edges.back()) {
        DoubleDouble bottom = lo > edges.back() ? lo : edges.back();
        raw.push_back({bottom, hi, 1, to_double(hi - bottom) >= ctx.domain_width(0)});
    }

    struct Group {
        DoubleDouble lo, hi;
        int label;
        bool joined;
    };
    std::vector<Group> groups;
    for (const auto& r : raw) groups.push_back({r.lo, r.hi, r.label, false});

    auto length = [](const Raw& r) { return to_double(r.hi - r.lo); };
    if (raw.size() == 2 && !raw[0].full && !raw[1].full) {
        // Tie-break: code after the longer piece, equal lengths after the lower index.
        const size_t keep = length(raw[1]) > length(raw[0]) ? 1 : 0;
        groups = {{raw[0].lo, raw[1].hi, raw[keep].label, true}};
    } else if (raw.size() >= 2) {
        if (!raw.back().full) {
            groups[groups.size() - 2].hi = groups.back().hi;
            groups[groups.size() - 2].joined = true;
            groups.pop_back();
        }
        if (!raw.front().full && groups.size() >= 2) {
            groups[1].lo = groups[0].lo;
            groups[1].joined = true;
            groups.erase(groups.begin());
        }
    }

    IntervalImage out;
    for (const auto& g : groups) {
        IntervalPiece p;
        p.src_lo = g.lo;
        p.src_hi = g.hi;
        p.label = g.label;
        p.count = (g.label == -l - 1 || g.label == 1) ? 1 : static_cast<long>(-g.label) * ctx.geo->q + 1;
        p.joined = g.joined;
        std::tie(p.lo, p.hi) = interval_image(ctx.geo->family, ctx.native_dd, g.lo, g.hi, p.count);
        out.pieces.push_back(p);
    }
    return out;
}

LimitInducedMap limit_induced_map(const FlowGeometry& geo, double theta) {
    return {&geo, zero_charts(geo), theta};
}

bool LimitInducedMap::in_union(double x) const {
    const DoubleDouble native0 = geo->native(0.0);
    const double e1 = to_double(iterate_value(geo->family, DoubleDouble(geo->e), native0, geo->q));
    if (!(x > geo->d && x < e1)) return false;
    if (x >= geo->a) return true;
    return charts.stable.tau_bar_s(DoubleDouble(x)) >= theta;
}

double LimitInducedMap::operator()(double x) const {
    const auto& fam = geo->family;
    const DoubleDouble native0 = geo->native(0.0);
    const double f0 = fam.value(x, to_double(native0));
    if (!in_union(x) || x >= geo->e) return f0;
    if (x > geo->a) {
        DoubleDouble y(x);
        const DoubleDouble e(geo->e);
        for (long k = 0; k < 10000000 && y < e; ++k) y = iterate_value(fam, y, native0, geo->q);
        return to_double(fam.value(y, native0));
    }
    if (x == geo->a) return f0;
    const double t = wrap01(charts.stable.tau_bar_s(DoubleDouble(x)) - theta);
    return to_double(fam.value(charts.unstable.tau_bar_u_inverse(t), native0));
}

}  // namespace snlab
