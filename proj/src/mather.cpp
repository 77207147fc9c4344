#include "snlab/mather.hpp"

#include <algorithm>
#include <climits>
#include <cmath>

#include "snlab/numerics.hpp"
#include "snlab/parallel.hpp"

namespace snlab {

ZeroCharts zero_charts(const FlowGeometry& geo) {
    return {PhaseChart::stable_zero(geo), PhaseChart::unstable_zero(geo)};
}

double MatherSample::v_threshold() const {
    return std::max({mbar, static_cast<double>(std::abs(r)), static_cast<double>(n)});
}

MatherSample mather_point(const FlowGeometry& geo, const ZeroCharts& charts, double tau, long orbit_cap) {
    MatherSample s;
    s.tau = tau;
    const DoubleDouble native = geo.native(0.0);
    DoubleDouble x = charts.unstable.tau_bar_u_inverse(tau);
    s.x = to_double(x);
    const double fqe = to_double(iterate_value(geo.family, DoubleDouble(geo.e), native, geo.q));
    DoubleDouble deepest = x;
    for (long i = 1; i <= orbit_cap; ++i) {
        x = geo.family.value(x, native);
        double xd = to_double(x);
        if (xd >= geo.d && xd < geo.a) {
            s.n = i;
            s.landing = xd;
            try {
                s.mbar = charts.stable.tau_bar_s(x);
            } catch (const Error&) {
                s.mbar = INFINITY;
            }
            break;
        }
        if (xd > geo.a && xd <= fqe && x < deepest) deepest = x;
        if (i == orbit_cap) s.truncated = true;
    }
    if (s.truncated) {
        s.mbar = NAN;
        s.n = orbit_cap;
    }
    try {
        s.r = static_cast<long>(std::floor(charts.unstable.tau_bar_u(deepest)));
    } catch (const Error&) {
        s.r = -LONG_MAX / 2;
    }
    s.r = std::min(s.r, 0L);
    return s;
}

double MatherTable::v_measure(double j) const {
    if (samples.empty()) return 0.0;
    size_t hits = 0;
    for (size_t i = 0; i < samples.size(); ++i) hits += in_v(i, j);
    return static_cast<double>(hits) / static_cast<double>(samples.size());
}

std::vector<bool> MatherTable::v_mask(double j) const {
    std::vector<bool> mask(samples.size());
    for (size_t i = 0; i < samples.size(); ++i) mask[i] = in_v(i, j);
    return mask;
}

namespace {

double circle_gap(const MatherSample& a, const MatherSample& b) {
    if (a.truncated || b.truncated || !std::isfinite(a.mbar) || !std::isfinite(b.mbar)) return 0.5;
    return circle_distance(a.m(), b.m());
}

}  // namespace

MatherTable mather_grid(const FlowGeometry& geo, const ZeroCharts& charts, const MatherOptions& opts) {
    if (opts.grid < 2) throw Error(ErrorCode::insufficient_points, "Mather grid needs two points");
    MatherTable table;
    table.j_max = opts.j_max;
    table.samples.resize(opts.grid);
    parallel_for(opts.grid, opts.workers, [&](size_t i) {
        double tau = (static_cast<double>(i) + 0.5) / opts.grid;
        table.samples[i] = mather_point(geo, charts, tau, opts.orbit_cap);
    });

    std::vector<int> candidates;
    for (int i = 0; i < opts.grid; ++i) {
        const auto& a = table.samples[i];
        const auto& b = table.samples[(i + 1) % opts.grid];
        if (circle_gap(a, b) > opts.jump) candidates.push_back(i);
    }
    std::vector<std::optional<MatherDiscontinuity>> found(candidates.size());
    parallel_for(candidates.size(), opts.workers, [&](size_t k) {
        int i = candidates[k];
        MatherSample lo = table.samples[i];
        MatherSample hi = table.samples[(i + 1) % opts.grid];
        double tlo = lo.tau, thi = (i + 1 == opts.grid) ? hi.tau + 1.0 : hi.tau;
        for (int it = 0; it < 40 && thi - tlo > 1e-12; ++it) {
            double tm = 0.5 * (tlo + thi);
            MatherSample mid = mather_point(geo, charts, wrap01(tm), opts.orbit_cap);
            double gl = circle_gap(lo, mid), gr = circle_gap(mid, hi);
            if (std::max(gl, gr) <= opts.jump) return;  // a steep but continuous stretch
            if (gl >= gr) {
                thi = tm;
                hi = mid;
            } else {
                tlo = tm;
                lo = mid;
            }
        }
        found[k] = MatherDiscontinuity{wrap01(tlo), wrap01(thi), i};
    });
    for (auto& f : found)
        if (f) table.discontinuities.push_back(*f);
    std::sort(table.discontinuities.begin(), table.discontinuities.end(),
              [](const auto& a, const auto& b) { return a.tau_lo < b.tau_lo; });
    return table;
}

ReturnResidual return_map_residual(const FlowGeometry& geo, const Ladder& ladder, int i, int l, double theta,
                                   const MatherTable& table, int samples) {
    if (i < 1) throw Error(ErrorCode::domain, "domain index must be positive");
    std::vector<size_t> eligible;
    for (size_t k = 0; k < table.samples.size(); ++k)
        if (table.in_v(k, i - 1)) eligible.push_back(k);
    if (eligible.empty()) throw Error(ErrorCode::insufficient_points, "V(i-1) is empty on the grid");

    const double gamma = theta_map(geo, ladder, l, theta);
    const auto chart = PhaseChart::flow(geo, gamma);
    const DoubleDouble native = geo.native(gamma);
    const DoubleDouble lo = chart.tau_bar_u_inverse(-i - 1.0);
    const DoubleDouble hi = chart.tau_bar_u_inverse(-static_cast<double>(i));
    const long cap = 20L * (l + i + 10) * geo.q + 20L * static_cast<long>(i) + 100000L;

    ReturnResidual out;
    double sum = 0.0;
    // Evenly spaced picks first; escaped samples are replaced by the remaining eligible points.
    const size_t want = std::min<size_t>(samples, eligible.size());
    std::vector<size_t> order;
    std::vector<char> used(eligible.size(), 0);
    for (size_t s = 0; s < want; ++s) {
        size_t k = (s * eligible.size()) / want;
        order.push_back(eligible[k]);
        used[k] = 1;
    }
    for (size_t k = 0; k < eligible.size(); ++k)
        if (!used[k]) order.push_back(eligible[k]);
    for (size_t pick : order) {
        if (out.samples >= static_cast<int>(want)) break;
        const auto& smp = table.samples[pick];
        DoubleDouble x = chart.tau_bar_u_inverse(-i - 1.0 + smp.tau);
        DoubleDouble y = x;
        bool returned = false;
        for (long n = 1; n <= cap; ++n) {
            y = geo.family.value(y, native);
            if (!(y < lo) && y < hi) {
                returned = true;
                break;
            }
        }
        if (!returned) {
            ++out.escaped;
            continue;
        }
        double kappa = wrap01(chart.tau_bar_u(y));
        double r = circle_distance(kappa, smp.m() - theta);
        out.max = std::max(out.max, r);
        sum += r;
        ++out.samples;
    }
    out.mean = out.samples ? sum / out.samples : 0.0;
    return out;
}

DoubleDouble critical_iterate(const FlowGeometry& geo, double gamma, long n) {
    return iterate_value(geo.family, DoubleDouble(geo.c), geo.native(gamma), n);
}

namespace {

std::optional<double> branch_preimage(const UnimodalFamily& fam, double native, double y, int branch) {
    const double c = fam.critical_point();
    double lo = branch == 0 ? 0.0 : c, hi = branch == 0 ? c : 1.0;
    auto g = [&](double x) { return fam.value(x, native) - y; };
    double glo = g(lo), ghi = g(hi);
    if ((glo > 0.0) == (ghi > 0.0) && glo != 0.0 && ghi != 0.0) return std::nullopt;
    return bracketed_root(g, lo, hi, glo, ghi, 1e-16);
}

}  // namespace

DoubleDouble preimage_newton(const UnimodalFamily& fam, DoubleDouble seed, DoubleDouble y, DoubleDouble native, int depth) {
    DoubleDouble x = seed;
    for (int it = 0; it < 60; ++it) {
        auto j = iterate_jet(fam, x, native, depth);
        DoubleDouble dx = (j.f - y) / j.df;
        x -= dx;
        if (std::abs(dx.hi()) < 1e-31) break;
    }
    return x;
}

std::vector<Preimage> preimages_in(const FlowGeometry& geo, double y, double lo, double hi, int max_depth) {
    const double native0 = geo.family.native<double>(0.0);
    std::vector<Preimage> out;
    std::vector<double> level{y};
    for (int depth = 1; depth <= max_depth; ++depth) {
        std::vector<double> next;
        for (double v : level)
            for (int br : {0, 1})
                if (auto x = branch_preimage(geo.family, native0, v, br)) next.push_back(*x);
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        for (double x : next)
            if (x > lo && x < hi) out.push_back({x, depth});
        if (next.size() > (1u << 20)) break;
        level = std::move(next);
    }
    return out;
}

MisiurewiczSequence misiurewicz_sequence(const FlowGeometry& geo, const Ladder& ladder, const PeriodicPointTrack& target,
                                         int l_min, int l_max, int workers) {
    if (target.points.empty()) throw Error(ErrorCode::domain, "empty target track");
    MisiurewiczSequence seq;
    seq.target_period = target.period;
    seq.target_point = target.points.front();
    const double native0 = geo.family.native<double>(0.0);
    const DoubleDouble native0_dd = geo.native(0.0);
    const auto charts = zero_charts(geo);
    const double iu_hi = to_double(iterate_value(geo.family, DoubleDouble(geo.e), native0_dd, geo.q));

    // Shallowest preimage of y* inside I^u_0, away from e where the critical return jumps.
    {
        auto pre = preimages_in(geo, seq.target_point, geo.e + 1e-9, iu_hi - 1e-9, 30);
        if (pre.empty()) throw Error(ErrorCode::no_root_in_rung, "target has no preimage in I^u_0");
        seq.preimage = pre.front().x;
        seq.preimage_depth = pre.front().depth;
    }
    const int jp = seq.preimage_depth;
    const int j = geo.entry_index;
    const double tau_star = wrap01(charts.unstable.tau_bar_u(DoubleDouble(seq.preimage)));
    const double tau_c = wrap01(charts.stable.tau_bar_s(critical_iterate(geo, 0.0, j)));
    seq.theta_star = wrap01(tau_c - tau_star);
    const int extra = tau_c - tau_star >= 0.0 ? 0 : 1;
    seq.m_base = j + jp;
    seq.m = seq.m_base + geo.q * extra;

    seq.entries.resize(static_cast<size_t>(std::max(0, l_max - l_min + 1)));
    parallel_for(seq.entries.size(), workers, [&](size_t idx) {
        const int l = l_min + static_cast<int>(idx);
        MisiurewiczEntry& ent = seq.entries[idx];
        ent.l = l;
        try {
            const double g_hi = theta_map(geo, ladder, l, 0.0);
            const double g_lo = theta_map(geo, ladder, l, 1.0);
            const double width = g_hi - g_lo;
            const long n_land = j + static_cast<long>(geo.q) * (l + extra);
            auto ystar = [&](DoubleDouble native) {
                return periodic_point_newton(geo.family, seq.target_period, DoubleDouble(seq.target_point), native);
            };
            auto xstar = [&](DoubleDouble native) {
                return preimage_newton(geo.family, DoubleDouble(seq.preimage), ystar(native), native, jp);
            };
            auto k_fun = [&](double g) {
                DoubleDouble native = geo.native(g);
                return to_double(iterate_value(geo.family, DoubleDouble(geo.c), native, n_land) - xstar(native));
            };
            auto h_fun = [&](double g) {
                DoubleDouble native = geo.native(g);
                return to_double(iterate_value(geo.family, DoubleDouble(geo.c), native,
                                               static_cast<long>(l) * geo.q + seq.m) - ystar(native));
            };
            const double g0 = theta_map(geo, ladder, l, seq.theta_star);
            double step = 0.005 * width;
            double a = g0, b = g0, ka = 0.0, kb = 0.0;
            bool bracketed = false;
            for (int it = 0; it < 12 && !bracketed; ++it, step *= 2.0) {
                a = std::max(g_lo, g0 - step);
                b = std::min(g_hi, g0 + step);
                ka = k_fun(a);
                kb = k_fun(b);
                bracketed = (ka > 0.0) != (kb > 0.0);
            }
            if (!bracketed) throw Error(ErrorCode::no_root_in_rung, "landing condition has no sign change");
            double gk = bracketed_root(k_fun, a, b, ka, kb, 1e-17 * g0, 400);
            double rel = 1e-12;
            double root = gk;
            for (int it = 0; it < 8; ++it, rel *= 10.0) {
                double u = gk * (1.0 - rel), v = gk * (1.0 + rel);
                double hu = h_fun(u), hv = h_fun(v);
                if ((hu > 0.0) != (hv > 0.0)) {
                    root = bracketed_root(h_fun, u, v, hu, hv, 1e-19 * gk, 400);
                    break;
                }
            }
            ent.gamma = root;
            ent.residual = std::abs(h_fun(root));
            if (!(root > g_lo && root < g_hi)) throw Error(ErrorCode::no_root_in_rung, "root outside the rung");
            ent.theta = theta_of_gamma(geo, ladder, root).theta;
            // Transversality: rate at which the landing phase rotates with theta.
            const double h = 1e-5;
            auto landing_phase = [&](double th) {
                double g = theta_map(geo, ladder, l, th);
                auto ch = PhaseChart::flow(geo, g);
                DoubleDouble y = iterate_value(geo.family, DoubleDouble(geo.c), geo.native(g), n_land);
                return ch.tau_bar_u(y) - ch.tau_bar_u(xstar(geo.native(g)));
            };
            double th0 = std::clamp(ent.theta, 2 * h, 1.0 - 2 * h);
            ent.transversality = std::abs(landing_phase(th0 + h) - landing_phase(th0 - h)) / (2 * h);
            ent.found = ent.residual < 1e-10;
            if (!ent.found) ent.failure = ErrorCode::no_convergence;
        } catch (const Error& err) {
            ent.found = false;
            ent.failure = err.code();
        }
    });
    return seq;
}

double unstable_cover(const FlowGeometry& geo, int iterations, double resolution) {
    const double native = geo.family.native<double>(0.0);
    const double c = geo.c;
    const double fc = geo.family.value(c, native);
    const double f2c = geo.family.value(fc, native);
    const auto bins = static_cast<size_t>(std::ceil((fc - f2c) / resolution));
    std::vector<char> hit(bins, 0);
    const double lo = geo.e;
    const double hi = iterate_value(geo.family, geo.e, native, geo.q);
    const int seeds = 20000;
    for (int s = 0; s < seeds; ++s) {
        double x = lo + (hi - lo) * (s + 0.5) / seeds;
        for (int k = 0; k < iterations; ++k) {
            if (x >= f2c && x <= fc) {
                auto b = static_cast<size_t>((x - f2c) / resolution);
                hit[std::min(b, bins - 1)] = 1;
            }
            x = geo.family.value(x, native);
        }
    }
    size_t covered = 0;
    for (char h : hit) covered += h;
    return static_cast<double>(covered) / static_cast<double>(bins);
}

}  // namespace snlab
