#include "snlab/phase_coords.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "snlab/numerics.hpp"

namespace snlab {

namespace {

constexpr long orbit_cap = 2000000;
constexpr long zero_chart_cache = 200000;
constexpr double reference_flatness = 1e-3;

DoubleDouble fq(const FlowGeometry& geo, DoubleDouble x, DoubleDouble native) {
    return iterate_value(geo.family, x, native, geo.q);
}

double dfq0(const FlowGeometry& geo, double x) {
    return iterate_jet(geo.family, x, geo.family.native<double>(0.0), geo.q).df;
}

// Nearest zero of Df^q_0 from a in direction dir.
double critical_of_fq(const FlowGeometry& geo, double a, int dir) {
    const double step = 1e-4;
    double prev_x = a, prev = dfq0(geo, a);
    for (double t = step; t < 1.0; t += step) {
        double x = a + dir * t;
        if (x <= 0.0 || x >= 1.0) return dir < 0 ? 0.0 : 1.0;
        double dv = dfq0(geo, x);
        if ((dv > 0.0) != (prev > 0.0)) {
            double lo = std::min(prev_x, x), hi = std::max(prev_x, x);
            double flo = dfq0(geo, lo), fhi = dfq0(geo, hi);
            return bracketed_root([&](double z) { return dfq0(geo, z); }, lo, hi, flo, fhi, 1e-15);
        }
        prev_x = x;
        prev = dv;
    }
    return dir < 0 ? 0.0 : 1.0;
}

// Preimage of y under f on the branch [0, c] (branch = 0) or [c, 1] (branch = 1).
std::optional<double> branch_preimage(const UnimodalFamily& fam, double native, double y, int branch) {
    const double c = fam.critical_point();
    double lo = branch == 0 ? 0.0 : c, hi = branch == 0 ? c : 1.0;
    auto g = [&](double x) { return fam.value(x, native) - y; };
    double glo = g(lo), ghi = g(hi);
    if ((glo > 0.0) == (ghi > 0.0) && glo != 0.0 && ghi != 0.0) return std::nullopt;
    return bracketed_root(g, lo, hi, glo, ghi, 1e-16);
}

std::pair<double, double> image_hull(const UnimodalFamily& fam, double native, double lo, double hi, int n) {
    double mn = INFINITY, mx = -INFINITY;
    constexpr int samples = 4000;
    for (int i = 0; i <= samples; ++i) {
        double x = lo + (hi - lo) * i / samples;
        double y = iterate_value(fam, x, native, n);
        mn = std::min(mn, y);
        mx = std::max(mx, y);
    }
    return {mn, mx};
}

}  // namespace

DoubleDouble fq_preimage(const FlowGeometry& geo, DoubleDouble native, DoubleDouble y, DoubleDouble lo,
                         DoubleDouble hi) {
    auto g = [&](DoubleDouble z) { return fq(geo, z, native) - y; };
    DoubleDouble glo = g(lo), ghi = g(hi);
    if (glo.hi() > 0.0 || ghi.hi() < 0.0) throw Error(ErrorCode::backward_solve, "target outside the branch image");
    DoubleDouble z = lo + (hi - lo) * (DoubleDouble(0.0) - glo) / (ghi - glo);
    for (int it = 0; it < 100; ++it) {
        auto j = iterate_jet(geo.family, z, native, geo.q);
        DoubleDouble gz = j.f - y;
        if (gz.hi() == 0.0) return z;
        if (gz.hi() < 0.0) lo = z; else hi = z;
        DoubleDouble next = z - gz / j.df;
        if (!(next > lo && next < hi)) next = (lo + hi) * DoubleDouble(0.5);
        DoubleDouble step = next - z;
        z = next;
        if (std::abs(step.hi()) < 1e-31 || to_double(hi - lo) < 1e-31) return z;
    }
    auto check = to_double(fq(geo, z, native) - y);
    if (std::abs(check) < 1e-25) return z;
    throw Error(ErrorCode::backward_solve, "preimage solve did not converge");
}

FlowGeometry make_geometry(const UnimodalFamily& family, const SaddleNodeData& sn, const GeometryOptions& opts) {
    FlowGeometry geo{family, sn};
    geo.q = static_cast<int>(sn.orbit.size());
    geo.c = family.critical_point();
    geo.a = sn.a;
    if (!(sn.second_deriv > 0.0 && sn.param_deriv > 0.0))
        throw Error(ErrorCode::unsupported_geometry, "expected D^2 f^q(a) > 0 and a positive gamma derivative");
    const double native0 = family.native<double>(0.0);
    const DoubleDouble native0_dd = family.native<DoubleDouble>(0.0);

    geo.left_bound = critical_of_fq(geo, geo.a, -1);
    geo.right_bound = critical_of_fq(geo, geo.a, 1);
    {
        auto g = [&](double x) { return iterate_value(family, x, native0, geo.q) - geo.right_bound; };
        double lo = geo.a + 1e-9, hi = geo.right_bound;
        double glo = g(lo), ghi = g(hi);
        geo.e_max = ghi > 0.0 ? bracketed_root(g, lo, hi, glo, ghi, 1e-15) : hi;
    }

    if (opts.d) {
        geo.d = *opts.d;
    } else {
        double fl = iterate_value(family, geo.left_bound, native0, geo.q);
        geo.d = (fl > geo.left_bound && fl < geo.a) ? 0.5 * (geo.left_bound + fl)
                                                    : geo.left_bound + 0.25 * (geo.a - geo.left_bound);
    }
    if (!(geo.d > geo.left_bound && geo.d < geo.a)) throw Error(ErrorCode::unsupported_geometry, "d outside (L, a)");

    {
        double d1 = to_double(fq(geo, DoubleDouble(geo.d), native0_dd));
        DoubleDouble x(geo.c);
        geo.entry_index = 0;
        for (int j = 1; j <= 500; ++j) {
            x = family.value(x, native0_dd);
            double xd = to_double(x);
            if (xd >= geo.d && xd < d1) {
                geo.entry_index = j;
                break;
            }
        }
        if (geo.entry_index == 0)
            throw Error(ErrorCode::unsupported_geometry, "critical orbit never enters the stable fundamental domain");
    }

    {
        IntervalSet none;
        auto fixed = repelling_points_of_f0(family, 1, none, 20000);
        double best = -1.0;
        for (const auto& t : fixed) {
            double x = t.points[0];
            double interior = std::min(x, 1.0 - x);
            if (interior > best) {
                best = interior;
                geo.z0 = x;
            }
        }
        if (best <= 0.0) throw Error(ErrorCode::unsupported_geometry, "no interior repelling fixed point");
    }

    if (opts.e) {
        geo.e = *opts.e;
        geo.e_depth = 0;
    } else {
        const double span = geo.e_max - geo.a;
        const double target = geo.a + opts.e_fraction * span;
        const double win_lo = geo.a + 0.3 * span, win_hi = geo.a + 0.95 * span;
        std::vector<double> level{geo.z0};
        bool found = false;
        for (int depth = 1; depth <= opts.max_preimage_depth && !found; ++depth) {
            std::vector<double> next;
            for (double y : level) {
                for (int br : {0, 1}) {
                    auto x = branch_preimage(family, native0, y, br);
                    if (!x || std::abs(*x - geo.z0) < 1e-12) continue;
                    next.push_back(*x);
                }
            }
            double best = INFINITY;
            for (double x : next) {
                if (x < win_lo || x > win_hi) continue;
                // The orbit of e must avoid the critical point.
                double y = x, closest = INFINITY;
                for (int k = 0; k < depth; ++k) {
                    closest = std::min(closest, std::abs(y - geo.c));
                    y = family.value(y, native0);
                }
                if (closest < 1e-9) continue;
                if (std::abs(x - target) < best) {
                    best = std::abs(x - target);
                    geo.e = x;
                    geo.e_depth = depth;
                    found = true;
                }
            }
            if (next.size() > (1u << 20)) break;
            level = std::move(next);
        }
        if (!found) throw Error(ErrorCode::unsupported_geometry, "no preimage of the fixed point near the target e");
    }
    if (!(geo.e > geo.a && geo.e < geo.e_max))
        throw Error(ErrorCode::unsupported_geometry, "e outside (a, e_max)");

    for (int i = 0; i < geo.q; ++i) {
        auto [lo, hi] = image_hull(family, native0, geo.d, geo.e, i);
        if (geo.c >= lo && geo.c <= hi && i > 0)
            throw Error(ErrorCode::unsupported_geometry, "laminar region contains the critical point");
        geo.laminar.parts.push_back({lo, hi});
    }
    return geo;
}

const FlowGeometry& quadratic_geometry() {
    static const FlowGeometry geo = [] {
        auto base = UnimodalFamily::quadratic();
        auto sn = locate_saddle_node(base, 3, 3.83, 0.16);
        return make_geometry(gamma_convention(base, sn), sn);
    }();
    return geo;
}

// ---------------------------------------------------------------------------
// PhaseChart

double PhaseChart::integrand(double t) const {
    DoubleDouble z = b0_ + DoubleDouble(t);
    double v = to_double(fq(*geo_, z, native_) - z);
    if (!(v > 0.0)) throw Error(ErrorCode::displacement_sign, "displacement is not positive on the reference domain");
    return 1.0 / v;
}

void PhaseChart::build_quadrature() {
    width_ = to_double(b1_ - b0_);
    if (!(width_ > 0.0)) throw Error(ErrorCode::displacement_sign, "empty reference domain");
    std::vector<double> cuts{0.0, width_};
    auto refine = [&](const std::vector<double>& in) {
        std::vector<double> out;
        for (size_t i = 0; i + 1 < in.size(); ++i) {
            double a = in[i], b = in[i + 1], m = 0.5 * (a + b);
            double whole = gl32([&](double t) { return integrand(t); }, a, b);
            double halves = gl32([&](double t) { return integrand(t); }, a, m) +
                            gl32([&](double t) { return integrand(t); }, m, b);
            out.push_back(a);
            if (std::abs(whole - halves) > 1e-13 * std::abs(halves)) out.push_back(m);
        }
        out.push_back(in.back());
        return out;
    };
    for (int round = 0; round < 30; ++round) {
        auto next = refine(cuts);
        if (next.size() == cuts.size()) break;
        cuts = std::move(next);
    }
    auto assemble = [&](const std::vector<double>& c) {
        panel_t_ = c;
        panel_cum_.assign(c.size(), 0.0);
        for (size_t i = 0; i + 1 < c.size(); ++i) {
            double piece = gl32([&](double t) { return integrand(t); }, c[i], c[i + 1]);
            if (!(piece > 0.0)) throw Error(ErrorCode::quadrature_nonmonotone, "non-positive panel integral");
            panel_cum_[i + 1] = panel_cum_[i] + piece;
        }
        log_v0_ = -std::log(integrand(0.0));
        total_ = panel_cum_.back() + 0.5 * (-std::log(integrand(width_)) - log_v0_);
        if (!(total_ > 0.0)) throw Error(ErrorCode::quadrature_nonmonotone, "non-positive total phase");
    };
    assemble(cuts);
    // Probe convergence: halve every panel until 20 probe fractions move by < 1e-8.
    std::vector<double> probes;
    for (int i = 0; i < 20; ++i) probes.push_back(b0_.hi() + (i + 0.5) / 20.0 * width_);
    auto probe_values = [&] {
        std::vector<double> v;
        for (int i = 0; i < 20; ++i) v.push_back(fraction(b0_ + DoubleDouble((i + 0.5) / 20.0 * width_)));
        return v;
    };
    auto before = probe_values();
    for (int round = 0; round < 6; ++round) {
        std::vector<double> finer;
        for (size_t i = 0; i + 1 < cuts.size(); ++i) {
            finer.push_back(cuts[i]);
            finer.push_back(0.5 * (cuts[i] + cuts[i + 1]));
        }
        finer.push_back(cuts.back());
        auto saved_t = panel_t_;
        auto saved_c = panel_cum_;
        assemble(finer);
        auto after = probe_values();
        double change = 0.0;
        for (int i = 0; i < 20; ++i) change = std::max(change, std::abs(after[i] - before[i]));
        if (change < 1e-8) {
            panel_t_ = std::move(saved_t);
            panel_cum_ = std::move(saved_c);
            assemble(cuts);
            return;
        }
        cuts = std::move(finer);
        before = std::move(after);
    }
    throw Error(ErrorCode::no_convergence, "phase quadrature did not settle");
}

void PhaseChart::build_forward_cache(long cap) {
    forward_.clear();
    forward_.push_back(b0_);
    DoubleDouble x = b0_;
    for (long k = 0; k < cap; ++k) {
        x = fq(*geo_, x, native_);
        forward_.push_back(x);
        if (x.hi() >= upper_) return;
        if (!(forward_[forward_.size() - 1] > forward_[forward_.size() - 2])) return;
    }
}

double PhaseChart::fraction(DoubleDouble y) const {
    double t = std::clamp(to_double(y - b0_), 0.0, width_);
    size_t p = static_cast<size_t>(std::upper_bound(panel_t_.begin(), panel_t_.end(), t) - panel_t_.begin());
    p = std::min(std::max<size_t>(p, 1), panel_t_.size() - 1) - 1;
    double phi = panel_cum_[p];
    if (t > panel_t_[p]) phi += gl32([&](double s) { return integrand(s); }, panel_t_[p], t);
    phi += 0.5 * (-std::log(integrand(t)) - log_v0_);
    return std::clamp(phi / total_, 0.0, 1.0);
}

double PhaseChart::fraction_inverse(double s) const {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return width_;
    auto g = [&](double t) { return fraction(b0_ + DoubleDouble(t)) - s; };
    return bracketed_root(g, 0.0, width_, -s, 1.0 - s, width_ * 1e-17);
}

PhaseChart PhaseChart::flow(const FlowGeometry& geo, double gamma) {
    if (!(gamma > 0.0)) throw Error(ErrorCode::domain, "flow chart needs gamma > 0");
    PhaseChart ch;
    ch.geo_ = &geo;
    ch.kind_ = ChartKind::flow;
    ch.gamma_ = gamma;
    ch.native_ = geo.native(gamma);
    ch.lower_ = geo.left_bound;
    ch.upper_ = geo.right_bound;
    DoubleDouble x(geo.a);
    for (int it = 0; it < 60; ++it) {
        auto j = iterate_jet(geo.family, x, ch.native_, geo.q);
        DoubleDouble step = (j.df - DoubleDouble(1.0)) / j.d2f;
        x -= step;
        if (std::abs(step.hi()) < 1e-30) break;
    }
    if (!(x.hi() > geo.d && x.hi() < geo.e)) throw Error(ErrorCode::no_convergence, "bottleneck outside E");
    ch.b0_ = x;
    ch.b1_ = fq(geo, x, ch.native_);
    ch.build_quadrature();
    ch.build_forward_cache(orbit_cap);
    ch.psi_d_ = ch.raw_phase(DoubleDouble(geo.d));
    ch.psi_e_ = ch.raw_phase(DoubleDouble(geo.e));
    return ch;
}

PhaseChart PhaseChart::stable_zero(const FlowGeometry& geo) {
    PhaseChart ch;
    ch.geo_ = &geo;
    ch.kind_ = ChartKind::stable_zero;
    ch.native_ = geo.native(0.0);
    ch.lower_ = geo.left_bound;
    ch.upper_ = geo.a;
    DoubleDouble x(geo.d);
    for (long k = 0; k < orbit_cap; ++k) {
        auto j = iterate_jet(geo.family, x, ch.native_, geo.q);
        if (std::abs(to_double(j.df) - 1.0) < reference_flatness) break;
        x = j.f;
    }
    ch.b0_ = x;
    ch.b1_ = fq(geo, x, ch.native_);
    ch.build_quadrature();
    ch.build_forward_cache(zero_chart_cache);
    ch.psi_d_ = ch.raw_phase(DoubleDouble(geo.d));
    return ch;
}

PhaseChart PhaseChart::unstable_zero(const FlowGeometry& geo) {
    PhaseChart ch;
    ch.geo_ = &geo;
    ch.kind_ = ChartKind::unstable_zero;
    ch.native_ = geo.native(0.0);
    ch.lower_ = geo.a;
    ch.upper_ = geo.right_bound;
    DoubleDouble z(geo.e);
    for (long k = 0; k < orbit_cap; ++k) {
        auto j = iterate_jet(geo.family, z, ch.native_, geo.q);
        if (std::abs(to_double(j.df) - 1.0) < reference_flatness) break;
        z = fq_preimage(geo, ch.native_, z, DoubleDouble(geo.a), z);
    }
    ch.b0_ = z;
    ch.b1_ = fq(geo, z, ch.native_);
    ch.build_quadrature();
    ch.build_forward_cache(orbit_cap);
    ch.psi_e_ = ch.raw_phase(DoubleDouble(geo.e));
    return ch;
}

Phase PhaseChart::raw_phase(DoubleDouble x) const {
    double xd = to_double(x);
    if (!(xd > lower_ && xd < upper_)) throw Error(ErrorCode::out_of_domain, "point outside the chart domain");
    if (x < b0_) {
        long k = 0;
        DoubleDouble y = x;
        while (y < b0_) {
            y = fq(*geo_, y, native_);
            if (++k > orbit_cap) throw Error(ErrorCode::out_of_domain, "orbit does not reach the reference domain");
        }
        if (y < b1_) return {-k, fraction(y)};
        x = y;  // rounding put the orbit on the far side of b1
        Phase p = raw_phase(x);
        p.k -= k;
        return p;
    }
    if (x < b1_) return {0, fraction(x)};
    auto it = std::upper_bound(forward_.begin(), forward_.end(), x);
    if (it == forward_.end()) throw Error(ErrorCode::out_of_domain, "point beyond the cached orbit of the reference domain");
    long k = static_cast<long>(it - forward_.begin()) - 1;
    DoubleDouble lo = b0_, hi = b1_;
    DoubleDouble bk = forward_[k], bk1 = forward_[k + 1];
    DoubleDouble y = b0_ + (b1_ - b0_) * (x - bk) / (bk1 - bk);
    for (int iter = 0; iter < 100; ++iter) {
        auto j = iterate_jet(geo_->family, y, native_, static_cast<long>(geo_->q) * k);
        DoubleDouble g = j.f - x;
        if (g.hi() == 0.0) break;
        if (g.hi() < 0.0) lo = y; else hi = y;
        DoubleDouble next = y - g / j.df;
        if (!(next >= lo && next <= hi)) next = (lo + hi) * DoubleDouble(0.5);
        DoubleDouble step = next - y;
        y = next;
        if (std::abs(step.hi()) < 1e-31 || to_double(hi - lo) < 1e-32) break;
    }
    double s = fraction(y);
    if (s >= 1.0) return {k + 1, 0.0};
    return {k, s};
}

DoubleDouble PhaseChart::raw_phase_inverse(Phase psi) const {
    DoubleDouble y = b0_ + DoubleDouble(fraction_inverse(psi.frac));
    if (psi.k >= 0) return iterate_value(geo_->family, y, native_, static_cast<long>(geo_->q) * psi.k);
    for (long i = 0; i < -psi.k; ++i) y = fq_preimage(*geo_, native_, y, DoubleDouble(lower_), y);
    return y;
}

namespace {
Phase shift(Phase p, double t) {
    double s = p.frac + t;
    double fl = std::floor(s);
    return {p.k + static_cast<long>(fl), s - fl};
}
}  // namespace

DoubleDouble PhaseChart::tau_bar_s_inverse(double t) const { return raw_phase_inverse(shift(psi_d(), t)); }
DoubleDouble PhaseChart::tau_bar_u_inverse(double t) const { return raw_phase_inverse(shift(psi_e(), t)); }

Phase PhaseChart::psi_d() const {
    if (!psi_d_) throw Error(ErrorCode::domain, "chart has no stable normalisation");
    return *psi_d_;
}

Phase PhaseChart::psi_e() const {
    if (!psi_e_) throw Error(ErrorCode::domain, "chart has no unstable normalisation");
    return *psi_e_;
}

PhaseChart build_chart(const FlowGeometry& geo, double gamma, ChartKind kind) {
    switch (kind) {
        case ChartKind::flow: return PhaseChart::flow(geo, gamma);
        case ChartKind::stable_zero: return PhaseChart::stable_zero(geo);
        case ChartKind::unstable_zero: return PhaseChart::unstable_zero(geo);
    }
    throw Error(ErrorCode::domain, "unknown chart kind");
}

double passage_time(const FlowGeometry& geo, double gamma) { return PhaseChart::flow(geo, gamma).passage_time(); }

double ladder_residual(const FlowGeometry& geo, int l, double gamma) {
    DoubleDouble x = iterate_value(geo.family, DoubleDouble(geo.d), geo.native(gamma), static_cast<long>(geo.q) * l);
    return to_double(x - DoubleDouble(geo.e));
}

double gamma_root(const FlowGeometry& geo, int l, std::optional<double> guess) {
    if (l < 1) throw Error(ErrorCode::domain, "rung index must be positive");
    const double k = 0.5 * geo.sn.second_deriv, p = geo.sn.param_deriv;
    double g0 = guess.value_or(std::numbers::pi * std::numbers::pi / (k * p) / (double(l) * l));
    auto t_minus = [&](double g) { return passage_time(geo, g) - l; };
    double lo = g0, hi = g0;
    double flo = t_minus(lo), fhi = flo;
    for (int i = 0; i < 200 && fhi > 0.0; ++i) fhi = t_minus(hi *= 1.1);
    for (int i = 0; i < 200 && flo < 0.0; ++i) flo = t_minus(lo /= 1.1);
    if (!(flo >= 0.0 && fhi <= 0.0)) throw Error(ErrorCode::bracket_loss, "could not bracket the passage time");
    double gt = bracketed_root(t_minus, lo, hi, flo, fhi, 1e-13 * g0);
    auto g = [&](double x) { return ladder_residual(geo, l, x); };
    double rel = 1e-8;
    for (int i = 0; i < 8; ++i, rel *= 10.0) {
        double a = gt * (1.0 - rel), b = gt * (1.0 + rel);
        double ga = g(a), gb = g(b);
        if (ga <= 0.0 && gb >= 0.0) return bracketed_root(g, a, b, ga, gb, 1e-17 * gt, 400);
    }
    throw Error(ErrorCode::bracket_loss, "ladder residual has no sign change near the passage-time root");
}

Ladder gamma_ladder(const FlowGeometry& geo, int l_min, int l_max) {
    if (l_min < 1 || l_max < l_min) throw Error(ErrorCode::domain, "invalid rung range");
    Ladder ladder{l_min, l_max, {}};
    std::optional<double> guess;
    for (int l = l_min; l <= l_max; ++l) {
        double g = gamma_root(geo, l, guess);
        ladder.gammas.push_back(g);
        guess = g * (double(l) / (l + 1)) * (double(l) / (l + 1));
    }
    return ladder;
}

namespace {
double rung_gamma(const FlowGeometry& geo, const Ladder& ladder, int l) {
    if (ladder.contains(l)) return ladder.gamma(l);
    std::optional<double> guess;
    if (ladder.contains(l - 1)) guess = ladder.gamma(l - 1) * std::pow(double(l - 1) / l, 2);
    if (ladder.contains(l + 1)) guess = ladder.gamma(l + 1) * std::pow(double(l + 1) / l, 2);
    return gamma_root(geo, l, guess);
}
}  // namespace

double theta_map(const FlowGeometry& geo, const Ladder& ladder, int l, double theta) {
    if (!(theta >= 0.0 && theta <= 1.0)) throw Error(ErrorCode::domain, "theta outside [0, 1]");
    double gl = rung_gamma(geo, ladder, l);
    if (theta == 0.0) return gl;
    double gl1 = rung_gamma(geo, ladder, l + 1);
    if (theta == 1.0) return gl1;
    auto f = [&](double g) { return passage_time(geo, g) - (l + theta); };
    return bracketed_root(f, gl1, gl, 1.0 - theta, -theta, 1e-16 * gl);
}

RungPosition theta_of_gamma(const FlowGeometry& geo, const Ladder& ladder, double gamma) {
    if (!(gamma > 0.0)) throw Error(ErrorCode::domain, "gamma must be positive");
    double t = passage_time(geo, gamma);
    int l = static_cast<int>(std::floor(t));
    if (ladder.contains(l) || ladder.contains(l + 1)) {
        for (int cand = std::max(ladder.l_min, l - 1); cand <= std::min(ladder.l_max - 1, l + 1); ++cand) {
            if (gamma <= ladder.gamma(cand) && gamma > ladder.gamma(cand + 1)) {
                l = cand;
                break;
            }
        }
    }
    double theta = std::clamp(t - l, 0.0, std::nextafter(1.0, 0.0));
    return {l, theta};
}

std::vector<double> normalized_distortion(const FlowGeometry& geo, const Ladder& ladder, int l, int grid) {
    if (grid < 2) throw Error(ErrorCode::insufficient_points, "distortion grid needs two points");
    const double width = rung_gamma(geo, ladder, l) - rung_gamma(geo, ladder, l + 1);
    const double h = 1e-4;
    std::vector<double> out;
    for (int i = 0; i < grid; ++i) {
        double th = static_cast<double>(i) / (grid - 1);
        double dg;
        if (th < h) {
            dg = (-3 * theta_map(geo, ladder, l, th) + 4 * theta_map(geo, ladder, l, th + h) -
                  theta_map(geo, ladder, l, th + 2 * h)) / (2 * h);
        } else if (th > 1.0 - h) {
            dg = (3 * theta_map(geo, ladder, l, th) - 4 * theta_map(geo, ladder, l, th - h) +
                  theta_map(geo, ladder, l, th - 2 * h)) / (2 * h);
        } else {
            dg = (theta_map(geo, ladder, l, th + h) - theta_map(geo, ladder, l, th - h)) / (2 * h);
        }
        out.push_back(std::abs(dg) / width);
    }
    return out;
}

FirstHit local_first_hit(const FlowGeometry& geo, double gamma, const PhaseChart& stable, const PhaseChart& unstable,
                         DoubleDouble x, double theta) {
    const DoubleDouble native = geo.native(gamma);
    DoubleDouble d1 = fq(geo, DoubleDouble(geo.d), native);
    if (x < DoubleDouble(geo.d) || !(x < d1)) throw Error(ErrorCode::out_of_domain, "x outside I^s");
    DoubleDouble y = x;
    int steps = 0;
    while (y < DoubleDouble(geo.e)) {
        y = fq(geo, y, native);
        if (++steps > orbit_cap) throw Error(ErrorCode::orbit_escape, "no passage to I^u");
    }
    double res = circle_distance(unstable.tau_bar_u(y), stable.tau_bar_s(x) - theta);
    return {y, steps, res};
}

}  // namespace snlab
