#include "snlab/saddle_node.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "snlab/numerics.hpp"

namespace snlab {

namespace {

constexpr double param_step = 1e-7;

struct FoldResidual {
    double g1, g2;
};

FoldResidual fold_residual(const UnimodalFamily& fam, int q, double p, double x) {
    auto j = iterate_jet(fam, x, p, q);
    return {j.f - x, j.df - 1.0};
}

double distance_to_critical_of_fq(const UnimodalFamily& fam, double native, int q, double a) {
    // Nearest zero of Df^q to a, found by scanning outward.
    const double step = 1e-4;
    double best = 0.5;
    for (int dir : {-1, 1}) {
        double prev = iterate_jet(fam, a, native, q).df;
        for (double t = step; t < 0.5; t += step) {
            double x = a + dir * t;
            if (x <= 0.0 || x >= 1.0) break;
            double d = iterate_jet(fam, x, native, q).df;
            if ((d > 0.0) != (prev > 0.0)) {
                best = std::min(best, t);
                break;
            }
            prev = d;
        }
    }
    return best;
}

// Number of sign changes of f^q(x) - x on [lo, hi] and the smallest |f^q(x) - x|.
std::pair<int, double> displacement_profile(const UnimodalFamily& fam, double native, int q, double lo, double hi) {
    constexpr int samples = 4000;
    int changes = 0;
    double min_abs = INFINITY;
    double prev = 0.0;
    for (int i = 0; i <= samples; ++i) {
        double x = lo + (hi - lo) * i / samples;
        double v = iterate_value(fam, x, native, q) - x;
        min_abs = std::min(min_abs, std::abs(v));
        if (i > 0 && (v > 0.0) != (prev > 0.0)) ++changes;
        prev = v;
    }
    return {changes, min_abs};
}

}  // namespace

SaddleNodeData locate_saddle_node(const UnimodalFamily& family, int q, double native_seed, double x_seed) {
    if (q < 1) throw Error(ErrorCode::domain, "period must be positive");
    double p = native_seed, x = x_seed;
    int it = 0;
    bool converged = false;
    for (; it < 100; ++it) {
        if (!(p >= family.native_lo() && p <= family.native_hi()) || !(x >= 0.0 && x <= 1.0))
            throw Error(ErrorCode::no_convergence, "Newton left the parameter or phase domain");
        auto j = iterate_jet(family, x, p, q);
        auto plus = iterate_jet(family, x, p + param_step, q);
        auto minus = iterate_jet(family, x, p - param_step, q);
        Eigen::Matrix2d jac;
        jac << j.df - 1.0, (plus.f - minus.f) / (2 * param_step), j.d2f, (plus.df - minus.df) / (2 * param_step);
        Eigen::Vector2d g(j.f - x, j.df - 1.0);
        Eigen::Vector2d step = jac.fullPivLu().solve(g);
        if (!step.allFinite()) throw Error(ErrorCode::no_convergence, "singular Jacobian");
        x -= step(0);
        p -= step(1);
        if (std::abs(step(1)) < 1e-15 * std::max(1.0, std::abs(p)) && std::abs(step(0)) < 1e-15) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        auto r = fold_residual(family, q, p, x);
        if (!(std::abs(r.g1) < 1e-14 && std::abs(r.g2) < 1e-11))
            throw Error(ErrorCode::no_convergence, "fold Newton did not converge in 100 steps");
    }

    // Polish the parameter in double-double so gamma = 0 sits on the fold to working precision.
    DoubleDouble pd(p), xd(x);
    for (int k = 0; k < 8; ++k) {
        auto j = iterate_jet(family, xd, pd, q);
        auto plus = iterate_jet(family, xd, pd + DoubleDouble(param_step), q);
        auto minus = iterate_jet(family, xd, pd - DoubleDouble(param_step), q);
        double dpf = to_double((plus.f - minus.f) / DoubleDouble(2 * param_step));
        double dpd = to_double((plus.df - minus.df) / DoubleDouble(2 * param_step));
        double a11 = to_double(j.df) - 1.0, a21 = to_double(j.d2f);
        DoubleDouble g1 = j.f - xd, g2 = j.df - DoubleDouble(1.0);
        double det = a11 * dpd - dpf * a21;
        if (det == 0.0) break;
        DoubleDouble dx = (g1 * DoubleDouble(dpd) - g2 * DoubleDouble(dpf)) / DoubleDouble(det);
        DoubleDouble dp = (g2 * DoubleDouble(a11) - g1 * DoubleDouble(a21)) / DoubleDouble(det);
        xd -= dx;
        pd -= dp;
    }
    if (std::abs(to_double(pd) - p) < 1e-12) p = to_double(pd);
    else pd = DoubleDouble(p);

    SaddleNodeData sn{};
    sn.native = p;
    sn.native_dd = pd;
    sn.iterations = it + 1;
    sn.orbit.push_back(to_double(xd));
    for (int k = 1; k < q; ++k) sn.orbit.push_back(family.value(sn.orbit.back(), p));
    const double c = family.critical_point();
    int best = 0;
    for (int k = 1; k < q; ++k)
        if (std::abs(sn.orbit[k] - c) < std::abs(sn.orbit[best] - c)) best = k;
    std::rotate(sn.orbit.begin(), sn.orbit.begin() + best, sn.orbit.end());
    DoubleDouble ad = iterate_value(family, xd, pd, best);
    sn.a = to_double(ad);
    sn.orbit[0] = sn.a;

    auto ja = iterate_jet(family, ad, pd, q);
    sn.second_deriv = to_double(ja.d2f);
    sn.residual_fixed = std::abs(to_double(ja.f - ad));
    sn.residual_unit = std::abs(to_double(ja.df) - 1.0);
    auto plus = iterate_jet(family, sn.a, p + param_step, q);
    auto minus = iterate_jet(family, sn.a, p - param_step, q);
    double dpf = (plus.f - minus.f) / (2 * param_step);
    sn.param_deriv = -family.orientation() * dpf;

    if (std::abs(sn.second_deriv) < 1e-6) throw Error(ErrorCode::degenerate_saddle_node, "D^2 f^q(a) vanishes");
    if (std::abs(dpf) < 1e-8 || sn.a <= 0.0 || sn.a >= 1.0)
        throw Error(ErrorCode::no_convergence, "converged point is not a transversal fold");
    if (!(sn.residual_fixed < 1e-12 && sn.residual_unit < 1e-9))
        throw Error(ErrorCode::no_convergence, "fold residuals above tolerance");
    return sn;
}

UnimodalFamily gamma_convention(const UnimodalFamily& family, const SaddleNodeData& sn, double window) {
    const int q = static_cast<int>(sn.orbit.size());
    double w = std::min(0.05, 0.9 * distance_to_critical_of_fq(family, sn.native, q, sn.a));
    constexpr double probe = 1e-4;
    if (probe > window) throw Error(ErrorCode::domain, "gamma window smaller than the orientation probe");
    for (int s : {1, -1}) {
        auto [plus_changes, plus_min] = displacement_profile(family, sn.native - s * probe, q, sn.a - w, sn.a + w);
        auto [minus_changes, minus_min] = displacement_profile(family, sn.native + s * probe, q, sn.a - w, sn.a + w);
        (void)minus_min;
        if (plus_changes == 0 && plus_min > 0.0 && minus_changes >= 2) {
            DoubleDouble offset = sn.native_dd;
            // Keep an exact closed-form anchor when it agrees with the located fold.
            if (std::abs(to_double(family.gamma_offset() - offset)) < 1e-12) offset = family.gamma_offset();
            return family.with_gamma_convention(offset, s);
        }
    }
    throw Error(ErrorCode::orientation, "no orientation removes the period-q orbit for gamma > 0");
}

double native_of_gamma(const UnimodalFamily& family, double gamma, double window) {
    if (std::abs(gamma) > window) throw Error(ErrorCode::domain, "gamma outside the validated window");
    return family.native<double>(gamma);
}

double periodic_multiplier(const UnimodalFamily& family, double x, double native, int period) {
    double m = 1.0;
    for (int k = 0; k < period; ++k) {
        auto j = family.jet(x, native);
        m *= j.df;
        x = j.f;
    }
    return m;
}

DoubleDouble periodic_point_newton(const UnimodalFamily& family, int period, DoubleDouble x, DoubleDouble native) {
    for (int it = 0; it < 60; ++it) {
        auto j = iterate_jet(family, x, native, period);
        DoubleDouble g = j.f - x;
        DoubleDouble dg = j.df - DoubleDouble(1.0);
        if (dg.hi() == 0.0) break;
        DoubleDouble dx = g / dg;
        x -= dx;
        if (std::abs(dx.hi()) < 1e-30 || g.hi() == 0.0) return x;
        if (!(x.hi() >= -1e-12 && x.hi() <= 1.0 + 1e-12)) break;
    }
    auto j = iterate_jet(family, x, native, period);
    if (std::abs(to_double(j.f - x)) < 1e-25) return x;
    throw Error(ErrorCode::no_convergence, "periodic point Newton failed");
}

std::vector<PeriodicPointTrack> repelling_points_of_f0(const UnimodalFamily& family, int max_period,
                                                       const IntervalSet& excluded, int grid) {
    const DoubleDouble native_dd = family.native<DoubleDouble>(0.0);
    const double native = to_double(native_dd);
    std::vector<PeriodicPointTrack> out;
    std::vector<double> found;
    for (int p = 1; p <= max_period; ++p) {
        auto g = [&](double x) { return iterate_value(family, x, native, p) - x; };
        std::vector<double> roots;
        double x_prev = 0.0, g_prev = g(0.0);
        if (g_prev == 0.0) roots.push_back(0.0);
        for (int i = 1; i <= grid; ++i) {
            double x = static_cast<double>(i) / grid;
            double gx = g(x);
            if (gx == 0.0) {
                roots.push_back(x);
            } else if (g_prev != 0.0 && (gx > 0.0) != (g_prev > 0.0)) {
                auto [lo, hi] = bisect([&](double m) { return (g(m) > 0.0) == (g_prev > 0.0); }, x_prev, x, 80);
                roots.push_back(0.5 * (lo + hi));
            }
            x_prev = x;
            g_prev = gx;
        }
        for (double r : roots) {
            DoubleDouble xr;
            try {
                xr = periodic_point_newton(family, p, DoubleDouble(r), native_dd);
            } catch (const Error&) {
                continue;
            }
            double x = to_double(xr);
            bool minimal = true;
            for (int k = 1; k < p && minimal; ++k)
                if (p % k == 0 && std::abs(iterate_value(family, x, native, k) - x) < 1e-9) minimal = false;
            if (!minimal) continue;
            bool dup = std::any_of(found.begin(), found.end(), [&](double y) { return std::abs(y - x) < 1e-10; });
            if (dup) continue;
            double m = periodic_multiplier(family, x, native, p);
            if (!(std::abs(m) > 1.0 + 1e-9)) continue;
            bool avoids = true;
            double y = x;
            for (int k = 0; k < p && avoids; ++k) {
                if (excluded.contains(y)) avoids = false;
                y = family.value(y, native);
            }
            if (!avoids) continue;
            found.push_back(x);
            out.push_back({p, {0.0}, {x}, {m}, true});
        }
    }
    return out;
}

PeriodicPointTrack continue_periodic_point(const UnimodalFamily& family, int period, double x0, double gamma0,
                                           const std::vector<double>& gamma_grid) {
    PeriodicPointTrack track{period, {}, {}, {}, true};
    DoubleDouble x;
    try {
        x = periodic_point_newton(family, period, DoubleDouble(x0), family.native<DoubleDouble>(gamma0));
    } catch (const Error&) {
        throw Error(ErrorCode::continuation_lost, "seed is not a periodic point");
    }
    double m0 = periodic_multiplier(family, to_double(x), family.native<double>(gamma0), period);
    if (!(std::abs(m0 - 1.0) > 0.05)) throw Error(ErrorCode::continuation_lost, "seed is not hyperbolic");
    for (double g : gamma_grid) {
        DoubleDouble native = family.native<DoubleDouble>(g);
        DoubleDouble next;
        try {
            next = periodic_point_newton(family, period, x, native);
        } catch (const Error&) {
            track.complete = false;
            break;
        }
        double m = periodic_multiplier(family, to_double(next), to_double(native), period);
        if (!(std::abs(m - 1.0) > 0.05) || std::abs(to_double(next - x)) > 0.05) {
            track.complete = false;
            break;
        }
        x = next;
        track.gammas.push_back(g);
        track.points.push_back(to_double(x));
        track.multipliers.push_back(m);
    }
    return track;
}

}  // namespace snlab
