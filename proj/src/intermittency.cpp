#include "snlab/intermittency.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "snlab/numerics.hpp"
#include "snlab/parallel.hpp"

namespace snlab {

IntervalSet laminar_region(const FlowGeometry& geo) { return geo.laminar; }

IntervalSet laminar_region(const FlowGeometry& geo, double half_width) {
    IntervalSet s;
    for (double p : geo.sn.orbit) s.parts.emplace_back(p - half_width, p + half_width);
    // Critical points of f^q_0: c and its preimages of depth < q.
    const double native0 = geo.family.native<double>(0.0);
    std::vector<double> crit{geo.c}, level{geo.c};
    for (int k = 1; k < geo.q; ++k) {
        std::vector<double> next;
        for (double y : level)
            for (int br : {0, 1}) {
                double lo = br == 0 ? 0.0 : geo.c, hi = br == 0 ? geo.c : 1.0;
                auto g = [&](double x) { return geo.family.value(x, native0) - y; };
                double glo = g(lo), ghi = g(hi);
                if ((glo > 0.0) != (ghi > 0.0)) next.push_back(bracketed_root(g, lo, hi, glo, ghi, 1e-15));
            }
        crit.insert(crit.end(), next.begin(), next.end());
        level = std::move(next);
    }
    for (double x : crit)
        if (s.contains(x)) throw Error(ErrorCode::unsupported_geometry, "laminar region contains a critical point of f^q");
    return s;
}

namespace {

// Membership of the three-or-so intervals, unrolled for the inner loops.
struct RegionTest {
    std::vector<std::pair<double, double>> parts;
    explicit RegionTest(const IntervalSet& s) : parts(s.parts) {}
    bool operator()(double x) const {
        for (const auto& [lo, hi] : parts)
            if (x >= lo && x <= hi) return true;
        return false;
    }
};

}  // namespace

double LaminarProfile::mean_laminar() const {
    // Runs touching either end of the window are incomplete.
    size_t first = starts_laminar ? 1 : 0;
    bool ends_laminar = !laminar.empty() && (starts_laminar ? laminar.size() > burst.size() : laminar.size() == burst.size());
    size_t last = laminar.size() - (ends_laminar && laminar.size() > first ? 1 : 0);
    if (last <= first) return laminar.empty() ? 0.0 : static_cast<double>(laminar_total) / laminar.size();
    double s = 0.0;
    for (size_t i = first; i < last; ++i) s += static_cast<double>(laminar[i]);
    return s / static_cast<double>(last - first);
}

double LaminarProfile::mean_burst() const {
    if (burst.empty()) return 0.0;
    double s = std::accumulate(burst.begin(), burst.end(), 0.0);
    return s / static_cast<double>(burst.size());
}

long LaminarProfile::longest_laminar() const {
    return laminar.empty() ? 0 : *std::max_element(laminar.begin(), laminar.end());
}

LaminarProfile laminar_segments(const UnimodalFamily& family, double gamma, double x0, long n, const IntervalSet& region,
                                long burn_in) {
    if (n < 1) throw Error(ErrorCode::domain, "orbit length must be positive");
    const double native = family.native<double>(gamma);
    evaluate(family, x0, native);
    RegionTest in(region);
    double x = x0;
    for (long k = 0; k < burn_in; ++k) x = family.value(x, native);
    LaminarProfile prof;
    prof.n_total = n;
    bool state = in(x);
    prof.starts_laminar = state;
    long run = 0;
    for (long k = 0; k < n; ++k) {
        bool now = in(x);
        if (now != state) {
            (state ? prof.laminar : prof.burst).push_back(run);
            state = now;
            run = 0;
        }
        ++run;
        if (now) ++prof.laminar_total;
        x = family.value(x, native);
    }
    (state ? prof.laminar : prof.burst).push_back(run);
    prof.chi = static_cast<double>(prof.laminar_total) / static_cast<double>(n);
    return prof;
}

ChiEstimate chi_estimate(const UnimodalFamily& family, double gamma, int seeds, long n, const IntervalSet& region,
                         std::uint64_t seed, int workers) {
    if (seeds < 8) throw Error(ErrorCode::domain, "at least 8 seeds are required");
    constexpr int batches = 32;
    if (n < batches) throw Error(ErrorCode::domain, "orbit too short for batch means");
    auto starts = low_discrepancy_points(seed, seeds, 0.02, 0.98);
    std::vector<double> chi(seeds), within(seeds), lam(seeds);
    std::vector<long> lam_runs(seeds);
    parallel_for(static_cast<size_t>(seeds), workers, [&](size_t s) {
        const double native = family.native<double>(gamma);
        RegionTest in(region);
        double x = starts[s];
        for (long k = 0; k < 1000; ++k) x = family.value(x, native);
        const long per_batch = n / batches;
        std::vector<double> bm(batches, 0.0);
        long total_in = 0, run = 0, runs = 0, run_sum = 0;
        bool prev = in(x), first_run = true;
        for (long k = 0; k < per_batch * batches; ++k) {
            bool now = in(x);
            if (now) {
                ++total_in;
                bm[static_cast<size_t>(k / per_batch)] += 1.0;
                ++run;
            } else if (prev) {
                if (!first_run) {
                    run_sum += run;
                    ++runs;
                }
                run = 0;
                first_run = false;
            } else {
                first_run = false;
            }
            prev = now;
            x = family.value(x, native);
        }
        chi[s] = static_cast<double>(total_in) / static_cast<double>(per_batch * batches);
        double mean = 0.0, var = 0.0;
        for (double& b : bm) {
            b /= static_cast<double>(per_batch);
            mean += b;
        }
        mean /= batches;
        for (double b : bm) var += (b - mean) * (b - mean);
        var /= (batches - 1);
        within[s] = std::sqrt(var / batches);
        lam[s] = static_cast<double>(run_sum);
        lam_runs[s] = runs;
    });
    ChiEstimate out;
    out.gamma = gamma;
    out.per_seed = chi;
    out.chi = std::accumulate(chi.begin(), chi.end(), 0.0) / seeds;
    double var = 0.0, w2 = 0.0;
    for (int s = 0; s < seeds; ++s) {
        var += (chi[s] - out.chi) * (chi[s] - out.chi);
        w2 += within[s] * within[s];
    }
    out.spread = std::sqrt(var / (seeds - 1));
    out.stderr_mean = out.spread / std::sqrt(static_cast<double>(seeds));
    out.within_stderr = std::sqrt(w2 / seeds);
    auto [mn, mx] = std::minmax_element(chi.begin(), chi.end());
    out.max_pair_gap = *mx - *mn;
    double lam_sum = std::accumulate(lam.begin(), lam.end(), 0.0);
    long run_count = std::accumulate(lam_runs.begin(), lam_runs.end(), 0L);
    out.mean_laminar = run_count > 0 ? lam_sum / static_cast<double>(run_count) : static_cast<double>(n);
    return out;
}

std::vector<WindowPoint> window_detect(const UnimodalFamily& family, const std::vector<double>& gammas, long n,
                                       int workers) {
    if (n < 1000000) throw Error(ErrorCode::domain, "window detection needs at least 1e6 iterates");
    std::vector<WindowPoint> out(gammas.size());
    parallel_for(gammas.size(), workers, [&](size_t i) {
        WindowPoint& w = out[i];
        w.gamma = gammas[i];
        const double native = family.native<double>(w.gamma);
        const double c = family.critical_point();
        const double x0 = family.value(c, native);
        w.lyapunov = lyapunov_slope(family, x0, native, n, n / 10);
        w.masked = w.lyapunov < 0.0;
        if (w.masked) {
            double x = iterate_value(family, x0, native, n);
            const double ref = x;
            const long cap = std::min<long>(n, 1000000);
            for (long p = 1; p <= cap; ++p) {
                x = family.value(x, native);
                if (std::abs(x - ref) < 1e-10) {
                    w.period = p;
                    break;
                }
            }
        }
    });
    return out;
}

namespace {

struct PeriodicFix {
    bool ok = false;
    DoubleDouble x;
    double multiplier = 0.0;
};

// Periodic point of period n near the seed, by Newton in double-double.
PeriodicFix periodic_near(const UnimodalFamily& fam, DoubleDouble seed, DoubleDouble native, long n, double radius) {
    PeriodicFix out;
    DoubleDouble x = seed;
    for (int it = 0; it < 60; ++it) {
        auto j = iterate_jet(fam, x, native, n);
        DoubleDouble g = j.f - x;
        DoubleDouble dg = j.df - DoubleDouble(1.0);
        if (dg.hi() == 0.0) return out;
        DoubleDouble dx = g / dg;
        x -= dx;
        if (std::abs(to_double(x - seed)) > radius) return out;
        if (std::abs(dx.hi()) < 1e-30) {
            out.ok = true;
            break;
        }
    }
    if (!out.ok) {
        auto j = iterate_jet(fam, x, native, n);
        out.ok = std::abs(to_double(j.f - x)) < 1e-24;
    }
    out.x = x;
    out.multiplier = to_double(iterate_jet(fam, x, native, n).df);
    return out;
}

}  // namespace

RungWindows rung_windows(const FlowGeometry& geo, const Ladder& ladder, int l, int max_depth) {
    RungWindows out;
    out.l = l;
    const auto& fam = geo.family;
    const DoubleDouble native0 = geo.native(0.0);
    const auto charts = zero_charts(geo);
    const double iu_hi = to_double(iterate_value(fam, DoubleDouble(geo.e), native0, geo.q));
    const int j = geo.entry_index;
    const double tau_c = wrap01(charts.stable.tau_bar_s(critical_iterate(geo, 0.0, j)));
    const double g_hi = theta_map(geo, ladder, l, 0.0);
    const double g_lo = theta_map(geo, ladder, l, 1.0);
    const double h = 1e-4;
    const DoubleDouble c(geo.c);

    for (const auto& pre : preimages_in(geo, geo.c, geo.e + 1e-9, iu_hi - 1e-9, max_depth)) {
        WindowInterval w;
        w.depth = pre.depth;
        const double tau = wrap01(charts.unstable.tau_bar_u(DoubleDouble(pre.x)));
        const double theta_c = wrap01(tau_c - tau);
        const int extra = tau_c - tau >= 0.0 ? 0 : 1;
        const long n_land = j + static_cast<long>(geo.q) * (l + extra);
        w.period = n_land + pre.depth;
        try {
            auto k_fun = [&](double g) {
                DoubleDouble native = geo.native(g);
                DoubleDouble xc = preimage_newton(fam, DoubleDouble(pre.x), c, native, pre.depth);
                return to_double(iterate_value(fam, c, native, n_land) - xc);
            };
            const double g0 = theta_map(geo, ladder, l, std::clamp(theta_c, 1e-6, 1.0 - 1e-6));
            const double width = g_hi - g_lo;
            double step = 0.002 * width, a = g0, b = g0, ka = 0.0, kb = 0.0;
            bool bracketed = false;
            for (int it = 0; it < 14 && !bracketed; ++it, step *= 2.0) {
                a = std::max(g_lo, g0 - step);
                b = std::min(g_hi, g0 + step);
                ka = k_fun(a);
                kb = k_fun(b);
                bracketed = (ka > 0.0) != (kb > 0.0);
            }
            if (!bracketed) continue;
            const double gs = bracketed_root(k_fun, a, b, ka, kb, 1e-17 * g0, 400);
            if (!(gs > g_lo && gs < g_hi)) continue;
            w.gamma_superstable = gs;

            auto attracting = [&](double g) {
                auto fix = periodic_near(fam, c, geo.native(g), w.period, 1e-3);
                return fix.ok && std::abs(fix.multiplier) <= 1.0;
            };
            // Initial probe from the multiplier slope at the superstable parameter.
            const double dg = gs * 1e-13;
            auto mu = [&](double g) { return periodic_near(fam, c, geo.native(g), w.period, 1e-3).multiplier; };
            const double slope = std::abs(mu(gs + dg) - mu(gs - dg)) / (2.0 * dg);
            const double probe0 = slope > 0.0 ? 2.0 / slope : gs * 1e-10;
            auto edge = [&](int dir) {
                double inside = gs, probe = probe0, outside = gs + dir * probe;
                for (int it = 0; it < 60 && attracting(outside); ++it) {
                    inside = outside;
                    probe *= 2.0;
                    outside = gs + dir * probe;
                }
                for (int it = 0; it < 50; ++it) {
                    double mid = 0.5 * (inside + outside);
                    if (mid == inside || mid == outside) break;
                    (attracting(mid) ? inside : outside) = mid;
                }
                return inside;
            };
            w.gamma_lo = edge(-1);
            w.gamma_hi = edge(+1);
            const double ts = theta_of_gamma(geo, ladder, gs).theta;
            const double dgdtheta = std::abs(theta_map(geo, ladder, l, std::clamp(ts + h, 0.0, 1.0)) -
                                             theta_map(geo, ladder, l, std::clamp(ts - h, 0.0, 1.0))) /
                                    (std::clamp(ts + h, 0.0, 1.0) - std::clamp(ts - h, 0.0, 1.0));
            // Larger gamma means smaller theta.
            w.theta_lo = ts - (w.gamma_hi - gs) / dgdtheta;
            w.theta_hi = ts + (gs - w.gamma_lo) / dgdtheta;
            w.ok = true;
            out.theta_measure += w.theta_hi - w.theta_lo;
        } catch (const Error&) {
            w.ok = false;
        }
        out.windows.push_back(w);
    }
    return out;
}

ScalingFit scaling_fit(const UnimodalFamily& family, const std::vector<double>& gammas, long n, const IntervalSet& region,
                       const std::vector<bool>& masked, int seeds, std::uint64_t seed, int workers) {
    if (masked.size() != gammas.size()) throw Error(ErrorCode::domain, "mask and grid differ in length");
    ScalingFit fit;
    std::vector<double> lx, ly, ll;
    for (size_t i = 0; i < gammas.size(); ++i) {
        if (masked[i]) {
            fit.points.push_back({gammas[i], NAN, NAN, NAN, true});
            continue;
        }
        auto est = chi_estimate(family, gammas[i], seeds, n, region, seed, workers);
        fit.points.push_back({gammas[i], est.chi, est.stderr_mean, est.mean_laminar, false});
        if (est.chi < 1.0) {
            lx.push_back(std::log(gammas[i]));
            ly.push_back(std::log(1.0 - est.chi));
            ll.push_back(std::log(est.mean_laminar));
        }
    }
    fit.used = static_cast<int>(lx.size());
    if (fit.used < 6) throw Error(ErrorCode::insufficient_points, "fewer than 6 unmasked grid points");
    auto line = fit_line(lx, ly);
    fit.slope = line.slope;
    fit.slope_stderr = line.slope_stderr;
    fit.laminar_slope = fit_line(lx, ll).slope;
    fit.band_min = INFINITY;
    fit.band_max = 0.0;
    for (const auto& p : fit.points) {
        if (p.masked) continue;
        double k = (1.0 - p.chi) / std::sqrt(p.gamma);
        fit.band_min = std::min(fit.band_min, k);
        fit.band_max = std::max(fit.band_max, k);
    }
    return fit;
}

MeasureMode parse_measure_mode(const std::string& s) {
    if (s == "base") return MeasureMode::base;
    if (s == "induced") return MeasureMode::induced;
    if (s == "pushforward") return MeasureMode::pushforward;
    throw Error(ErrorCode::validation, "unknown measure mode '" + s + "'");
}

std::string to_string(MeasureMode m) {
    switch (m) {
        case MeasureMode::base: return "base";
        case MeasureMode::induced: return "induced";
        case MeasureMode::pushforward: return "pushforward";
    }
    return "base";
}

double EmpiricalMeasure::mass(double a, double b) const {
    if (b <= a) return 0.0;
    const double w = bin_width();
    double s = 0.0;
    long i0 = std::max(0L, static_cast<long>(std::floor((a - lo) / w)));
    long i1 = std::min(static_cast<long>(masses.size()) - 1, static_cast<long>(std::floor((b - lo) / w)));
    for (long i = i0; i <= i1; ++i) {
        double u = std::max(a, bin_lo(static_cast<size_t>(i))), v = std::min(b, bin_hi(static_cast<size_t>(i)));
        if (v > u) s += masses[static_cast<size_t>(i)] * (v - u) / w;
    }
    return s;
}

double EmpiricalMeasure::mass(const IntervalSet& s) const {
    double m = 0.0;
    for (auto [a, b] : s.parts) m += mass(a, b);
    return m;
}

double EmpiricalMeasure::mass_outside(double a, double b) const {
    double s = 0.0;
    for (size_t i = 0; i < masses.size(); ++i)
        if (bin_hi(i) <= a || bin_lo(i) >= b) s += masses[i];
    return s;
}

EmpiricalMeasure measure_estimate(const FlowGeometry& geo, const Ladder& ladder, double gamma, MeasureMode mode, long n,
                                  int bins, std::uint64_t seed) {
    if (n < 1 || bins < 1) throw Error(ErrorCode::domain, "need positive sample and bin counts");
    const auto& fam = geo.family;
    const double native = fam.native<double>(gamma);
    EmpiricalMeasure m;
    m.source = mode;
    m.masses.assign(static_cast<size_t>(bins), 0.0);
    std::vector<long> counts(static_cast<size_t>(bins), 0);
    auto credit = [&](double x) {
        long i = static_cast<long>(std::floor(x * bins));
        counts[static_cast<size_t>(std::clamp(i, 0L, static_cast<long>(bins) - 1))] += 1;
    };
    double x = low_discrepancy_points(seed, 1, 0.05, 0.95).front();
    if (mode == MeasureMode::base) {
        for (long k = 0; k < 1000; ++k) x = fam.value(x, native);
        for (long k = 0; k < n; ++k) {
            credit(x);
            x = fam.value(x, native);
        }
        m.samples = n;
    } else {
        if (!(gamma > 0.0)) throw Error(ErrorCode::domain, "induced measures need gamma > 0");
        auto pos = theta_of_gamma(geo, ladder, gamma);
        auto ctx = build_induced_at(geo, pos.l, pos.theta, gamma);
        for (long k = 0; k < 1000; ++k) x = induced_step(ctx, x).y;
        if (mode == MeasureMode::induced) {
            for (long k = 0; k < n; ++k) {
                credit(x);
                x = induced_step(ctx, x).y;
            }
            m.samples = n;
        } else {
            long credited = 0;
            while (credited < n) {
                const long count = ctx.count_of(ctx.domain_of(x));
                for (long s = 0; s < count && credited < n; ++s, ++credited) {
                    credit(x);
                    x = fam.value(x, native);
                }
            }
            m.samples = credited;
        }
    }
    for (size_t i = 0; i < counts.size(); ++i) m.masses[i] = static_cast<double>(counts[i]) / static_cast<double>(m.samples);
    return m;
}

double total_variation(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
    if (a.masses.size() != b.masses.size() || a.lo != b.lo || a.hi != b.hi)
        throw Error(ErrorCode::domain, "total variation needs matched binnings");
    double s = 0.0;
    for (size_t i = 0; i < a.masses.size(); ++i) s += std::abs(a.masses[i] - b.masses[i]);
    return 0.5 * s;
}

double wasserstein_to_atoms(const EmpiricalMeasure& m, const std::vector<double>& atoms) {
    std::vector<double> pts = atoms;
    std::sort(pts.begin(), pts.end());
    const double wa = 1.0 / static_cast<double>(pts.size());
    constexpr int sub = 8;
    const double w = m.bin_width();
    double cdf = 0.0, total = 0.0;
    for (size_t i = 0; i < m.masses.size(); ++i) {
        for (int s = 0; s < sub; ++s) {
            double x = m.bin_lo(i) + (s + 0.5) * w / sub;
            double fm = cdf + m.masses[i] * (s + 0.5) / sub;
            double f0 = wa * static_cast<double>(std::upper_bound(pts.begin(), pts.end(), x) - pts.begin());
            total += std::abs(fm - f0) * w / sub;
        }
        cdf += m.masses[i];
    }
    return total;
}

double tail_constant(const EmpiricalMeasure& m, int count, std::uint64_t seed) {
    auto centers = low_discrepancy_points(seed, count, m.lo, m.hi);
    auto scales = low_discrepancy_points(seed + 1, count, std::log(4.0 * m.bin_width()), std::log(0.1));
    double k = 0.0;
    for (int i = 0; i < count; ++i) {
        double len = std::exp(scales[static_cast<size_t>(i)]);
        double a = std::clamp(centers[static_cast<size_t>(i)] - 0.5 * len, m.lo, m.hi - len);
        k = std::max(k, m.mass(a, a + len) / std::sqrt(len));
    }
    return k;
}

HittingTimes hitting_time_stats(const InducedContext& ctx, double v_lo, double v_hi, long n, std::uint64_t seed) {
    const auto& fam = ctx.geo->family;
    HittingTimes out;
    out.samples = n;
    auto mean_wait = [&](auto step, auto inside, double x) {
        // Along one orbit, a run of m points outside the target contributes waits m, m - 1, ..., 1.
        double sum = 0.0;
        long outside = 0, run = 0;
        for (long k = 0; k < n; ++k) {
            if (inside(x)) {
                sum += 0.5 * static_cast<double>(run) * static_cast<double>(run + 1);
                run = 0;
            } else {
                ++run;
                ++outside;
            }
            x = step(x);
        }
        sum += 0.5 * static_cast<double>(run) * static_cast<double>(run + 1);
        return outside > 0 ? sum / static_cast<double>(outside) : 0.0;
    };
    const double x0 = low_discrepancy_points(seed, 1, 0.05, 0.95).front();
    double x = x0;
    for (long k = 0; k < 1000; ++k) x = induced_step(ctx, x).y;
    out.induced_to_v = mean_wait([&](double y) { return induced_step(ctx, y).y; },
                                 [&](double y) { return y >= v_lo && y <= v_hi; }, x);
    x = x0;
    for (long k = 0; k < 1000; ++k) x = fam.value(x, ctx.native);
    out.base_to_tilde = mean_wait([&](double y) { return fam.value(y, ctx.native); },
                                  [&](double y) { return ctx.domain_of(y) >= 0; }, x);
    return out;
}

}  // namespace snlab
