#include "snlab/recurrence.hpp"

#include <algorithm>
#include <cmath>

#include "snlab/numerics.hpp"
#include "snlab/parallel.hpp"

namespace snlab {

RecurrenceParams delta_partition(double c, double alpha, double delta, double iota) {
    if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::domain, "delta must lie in (0, 1)");
    if (!(iota > 0.0 && iota < 1.0)) throw Error(ErrorCode::domain, "iota must lie in (0, 1)");
    if (!(alpha > 0.0)) throw Error(ErrorCode::domain, "alpha must be positive");
    RecurrenceParams p;
    p.c = c;
    p.alpha = alpha;
    p.delta = delta;
    p.iota = iota;
    p.r_delta = static_cast<int>(std::lround(-std::log(delta)));
    p.r_delta_plus = static_cast<int>(std::lround(-iota * std::log(delta)));
    return p;
}

std::optional<RecurrenceParams::Cell> RecurrenceParams::locate(double x) const {
    const double dist = std::abs(x - c);
    if (dist == 0.0 || dist > 1.0) return std::nullopt;
    int r = std::max(1, static_cast<int>(std::ceil(-std::log(dist))));
    // Guard the logarithm against rounding at band edges.
    while (dist < std::exp(-static_cast<double>(r))) ++r;
    while (r > 1 && dist >= std::exp(-static_cast<double>(r - 1))) --r;
    const double lo = std::exp(-static_cast<double>(r));
    const double len = std::exp(-static_cast<double>(r - 1)) - lo;
    const long pieces = static_cast<long>(r) * r;
    long m = static_cast<long>(std::floor((dist - lo) / len * static_cast<double>(pieces))) + 1;
    m = std::clamp(m, 1L, pieces);
    return Cell{x >= c ? r : -r, static_cast<int>(m)};
}

std::pair<double, double> RecurrenceParams::band(int r) const {
    const double near = std::exp(-static_cast<double>(std::abs(r)));
    const double far = std::exp(-static_cast<double>(std::abs(r) - 1));
    return r > 0 ? std::pair{c + near, c + far} : std::pair{c - far, c - near};
}

BindingResult binding_period(const InducedContext& ctx, double x, double alpha, long cap) {
    const DoubleDouble c(ctx.geo->c);
    if (x == ctx.geo->c) throw Error(ErrorCode::domain, "binding period is undefined at c");
    DoubleDouble lo = x < ctx.geo->c ? DoubleDouble(x) : c;
    DoubleDouble hi = x < ctx.geo->c ? c : DoubleDouble(x);
    BindingResult out;
    for (long j = 0; j < cap; ++j) {
        const double len = to_double(hi - lo);
        if (len > std::exp(-2.0 * alpha * static_cast<double>(j))) {
            out.p = j;
            out.final_length = len;
            return out;
        }
        auto img = breve_interval_step(ctx, lo, hi);
        lo = img.hull_lo();
        hi = img.hull_hi();
    }
    out.p = cap;
    out.capped = true;
    out.final_length = to_double(hi - lo);
    return out;
}

namespace {

struct ReturnBook {
    const InducedContext& ctx;
    const RecurrenceParams& params;
    const BrOptions& opts;
    RecurrenceReport& rep;
    long bound_until = -1;

    // Returns false once the condition is violated.
    bool visit(long k, double x) {
        if (!(std::abs(x - params.c) < params.delta)) return true;
        const double dist = std::abs(x - params.c);
        auto cell = params.locate(x);
        const int r = cell ? std::abs(cell->r) : 0;
        const bool bound = k <= bound_until;
        rep.returns.push_back({k, cell ? cell->r : 0, bound, dist});
        if (!bound) rep.free_depth_sum += r;
        rep.log_product += dist > 0.0 ? std::log(dist) : -INFINITY;
        const double margin = rep.log_product + params.alpha * static_cast<double>(k);
        rep.min_margin = std::min(rep.min_margin, margin);
        if (opts.binding && dist > 0.0) {
            auto b = binding_period(ctx, x, params.alpha);
            rep.binding.push_back({k, b.p});
            bound_until = std::max(bound_until, k + b.p);
        }
        if (margin < 0.0 && rep.br_pass) {
            rep.br_pass = false;
            rep.first_fail = k;
        }
        return rep.br_pass;
    }
};

long capture_index(const CaptureTarget& t, double x) {
    for (size_t i = 0; i < t.orbit.size(); ++i)
        if (std::abs(x - to_double(t.orbit[i])) < t.tolerance) return static_cast<long>(i);
    return -1;
}

}  // namespace

RecurrenceReport br_check(const InducedContext& ctx, const RecurrenceParams& params, long n, const BrOptions& opts) {
    if (n < 1 || n > 10000000) throw Error(ErrorCode::domain, "horizon must lie in [1, 1e7]");
    const auto& fam = ctx.geo->family;
    RecurrenceReport rep;
    rep.l = ctx.l;
    rep.theta = ctx.theta;
    rep.gamma = ctx.gamma;
    rep.horizon = n;
    ReturnBook book{ctx, params, opts, rep};
    LineAccumulator ce;

    DoubleDouble xd(ctx.geo->c);
    double x = ctx.geo->c;
    bool use_dd = opts.dd_prefix > 0;
    double log_deriv = 0.0;
    long cycle = -1;  // index on the capture orbit once landed
    const long period = opts.capture ? static_cast<long>(opts.capture->orbit.size()) : 0;

    for (long k = 0; k < n; ++k) {
        long count;
        double step_log = 0.0;
        if (cycle >= 0) {
            const auto& orb = opts.capture->orbit;
            count = ctx.count_of(ctx.domain_of(orb[static_cast<size_t>(cycle)]));
            for (long s = 0; s < count; ++s) {
                step_log += log_abs_deriv(to_double(fam.jet(orb[static_cast<size_t>(cycle)], ctx.native_dd).df));
                cycle = (cycle + 1) % period;
            }
            x = to_double(orb[static_cast<size_t>(cycle)]);
        } else if (use_dd) {
            count = ctx.count_of(ctx.domain_of(xd));
            for (long s = 0; s < count; ++s) {
                auto j = fam.jet(xd, ctx.native_dd);
                step_log += log_abs_deriv(to_double(j.df));
                xd = j.f;
            }
            x = to_double(xd);
            if (rep.base_iterates + count >= opts.dd_prefix) use_dd = false;
        } else {
            count = ctx.count_of(ctx.domain_of(x));
            for (long s = 0; s < count; ++s) {
                auto j = fam.jet(x, ctx.native);
                step_log += log_abs_deriv(j.df);
                x = j.f;
            }
        }
        rep.base_iterates += count;
        // The derivative is taken along the orbit of f(c), so the first factor at c is left out.
        if (k > 0) log_deriv += step_log;
        rep.steps = k + 1;
        ce.add(static_cast<double>(k + 1), log_deriv);
        if (cycle < 0 && opts.capture) {
            long idx = capture_index(*opts.capture, x);
            if (idx >= 0) {
                cycle = idx;
                rep.captured_at = k + 1;
                x = to_double(opts.capture->orbit[static_cast<size_t>(idx)]);
            }
        }
        if (!book.visit(k + 1, x) && opts.stop_at_failure) break;
    }
    rep.ce_slope = ce.slope();
    return rep;
}

BaseBrReport base_br_check(const FlowGeometry& geo, double gamma, double e_left, const RecurrenceParams& params, long n) {
    const auto& fam = geo.family;
    const double native = fam.native<double>(gamma);
    const double e = geo.e;
    BaseBrReport out;
    double x = geo.c;
    double log_product = 0.0;
    for (long k = 1; k <= n; ++k) {
        if (x >= e_left && x < e) {
            while (x < e) {
                x = iterate_value(fam, x, native, geo.q);
                out.base_iterates += geo.q;
            }
        }
        x = fam.value(x, native);
        out.base_iterates += 1;
        const double dist = std::abs(x - params.c);
        if (dist < params.delta) {
            ++out.returns;
            log_product += dist > 0.0 ? std::log(dist) : -INFINITY;
            if (log_product + params.alpha * static_cast<double>(k) < 0.0 && out.br_pass) {
                out.br_pass = false;
                out.first_fail = k;
            }
            if (log_product + params.alpha * static_cast<double>(out.base_iterates) < 0.0) out.br_pass_base_time = false;
        }
    }
    return out;
}

RungPosition normalize_rung(int l, double theta) {
    const double shift = std::floor(theta);
    return {l + static_cast<int>(shift), theta - shift};
}

ScanResult br_scan(const FlowGeometry& geo, const Ladder& ladder, int l, double center, double eps, int grid,
                   const RecurrenceParams& params, long n, int workers) {
    if (grid < 256) throw Error(ErrorCode::domain, "scan grid must have at least 256 points");
    ScanResult out;
    out.l = l;
    out.center = center;
    out.half_width = eps;
    out.points.resize(static_cast<size_t>(grid));
    parallel_for(out.points.size(), workers, [&](size_t i) {
        ScanPoint& pt = out.points[i];
        pt.theta = center - eps + (static_cast<double>(i) + 0.5) * 2.0 * eps / grid;
        auto pos = normalize_rung(l, pt.theta);
        pt.rung = pos.l;
        pt.gamma = 0.0;
        pt.br_pass = false;
        pt.first_fail = -1;
        pt.ce_slope = 0.0;
        pt.failure = ErrorCode::domain;
        pt.ok = false;
        try {
            pt.gamma = theta_map(geo, ladder, pos.l, pos.theta);
            auto ctx = build_induced_at(geo, pos.l, pos.theta, pt.gamma);
            BrOptions opts;
            opts.binding = false;
            auto rep = br_check(ctx, params, n, opts);
            pt.br_pass = rep.br_pass;
            pt.first_fail = rep.first_fail;
            pt.ce_slope = rep.ce_slope;
            pt.ok = true;
        } catch (const Error& err) {
            pt.failure = err.code();
        }
    });
    long pass = 0, pass_ce = 0;
    for (const auto& pt : out.points) {
        if (pt.ok && pt.br_pass) {
            ++pass;
            if (pt.ce_slope > 0.0) ++pass_ce;
        }
    }
    out.survival = static_cast<double>(pass) / grid;
    out.survival_ce = static_cast<double>(pass_ce) / grid;
    return out;
}

}  // namespace snlab
