#pragma once

#include <optional>
#include <vector>

#include "snlab/map_core.hpp"
#include "snlab/saddle_node.hpp"

namespace snlab {

struct GeometryOptions {
    double e_fraction = 0.75;  // target position of e inside (a, e_max)
    int max_preimage_depth = 24;
    std::optional<double> d;
    std::optional<double> e;
};

// Data of the flow box E = [d, e] around the fold point a at gamma = 0.
struct FlowGeometry {
    UnimodalFamily family;
    SaddleNodeData sn;
    int q = 0;
    double c = 0.0;
    double a = 0.0;
    double d = 0.0;
    double e = 0.0;
    double left_bound = 0.0;   // critical point of f^q_0 left of a
    double right_bound = 0.0;  // critical point of f^q_0 right of a
    double e_max = 0.0;        // f^q_0(e_max) = right_bound
    int entry_index = 0;       // first j with f^j_0(c) in [d, f^q_0(d))
    double z0 = 0.0;           // repelling fixed point with f^{e_depth}_0(e) = z0
    int e_depth = 0;
    IntervalSet laminar;       // E, f(E), ..., f^{q-1}(E) at gamma = 0

    DoubleDouble native(double gamma) const { return family.native<DoubleDouble>(gamma); }
};

FlowGeometry make_geometry(const UnimodalFamily& family, const SaddleNodeData& sn, const GeometryOptions& opts = {});

// Quadratic family with q = 3 and default options.
const FlowGeometry& quadratic_geometry();

// Solution z in [lo, hi] of f^q(z) = y, with f^q increasing on [lo, hi].
DoubleDouble fq_preimage(const FlowGeometry& geo, DoubleDouble native, DoubleDouble y, DoubleDouble lo, DoubleDouble hi);

struct Phase {
    long k = 0;
    double frac = 0.0;
    double value() const { return static_cast<double>(k) + frac; }
    friend double operator-(Phase a, Phase b) { return static_cast<double>(a.k - b.k) + (a.frac - b.frac); }
};

enum class ChartKind { flow, stable_zero, unstable_zero };

// Fenchel-Nielsen type coordinate for f^q on a monotone branch around a.
// The raw phase psi satisfies psi(f^q x) = psi(x) + 1 exactly; inside a reference
// fundamental domain B it is the normalised integral of 1/v + v'/(2v), v = f^q - id.
class PhaseChart {
public:
    static PhaseChart flow(const FlowGeometry& geo, double gamma);
    static PhaseChart stable_zero(const FlowGeometry& geo);
    static PhaseChart unstable_zero(const FlowGeometry& geo);

    ChartKind kind() const { return kind_; }
    double gamma() const { return gamma_; }
    DoubleDouble native() const { return native_; }
    double lower() const { return lower_; }
    double upper() const { return upper_; }
    DoubleDouble reference_start() const { return b0_; }
    DoubleDouble reference_end() const { return b1_; }
    int panel_count() const { return static_cast<int>(panel_t_.size()) - 1; }

    Phase raw_phase(DoubleDouble x) const;
    DoubleDouble raw_phase_inverse(Phase psi) const;

    // Stable normalisation vanishes at d, unstable at e.
    double tau_bar_s(DoubleDouble x) const { return raw_phase(x) - psi_d(); }
    double tau_bar_u(DoubleDouble x) const { return raw_phase(x) - psi_e(); }
    DoubleDouble tau_bar_s_inverse(double t) const;
    DoubleDouble tau_bar_u_inverse(double t) const;

    Phase psi_d() const;
    Phase psi_e() const;
    double passage_time() const { return psi_e() - psi_d(); }

    // Fraction of B covered by [b0, y].
    double fraction(DoubleDouble y) const;

private:
    PhaseChart() = default;
    void build_quadrature();
    void build_forward_cache(long cap);
    double integrand(double t) const;
    double fraction_inverse(double s) const;

    const FlowGeometry* geo_ = nullptr;
    ChartKind kind_ = ChartKind::flow;
    double gamma_ = 0.0;
    DoubleDouble native_;
    double lower_ = 0.0;
    double upper_ = 0.0;
    DoubleDouble b0_;
    DoubleDouble b1_;
    double width_ = 0.0;
    std::vector<double> panel_t_;
    std::vector<double> panel_cum_;
    double log_v0_ = 0.0;
    double total_ = 0.0;
    std::vector<DoubleDouble> forward_;
    std::optional<Phase> psi_d_;
    std::optional<Phase> psi_e_;
};

PhaseChart build_chart(const FlowGeometry& geo, double gamma, ChartKind kind);

double passage_time(const FlowGeometry& geo, double gamma);

// G(gamma) = f^{ql}_gamma(d) - e evaluated in double-double.
double ladder_residual(const FlowGeometry& geo, int l, double gamma);

struct Ladder {
    int l_min = 0;
    int l_max = 0;
    std::vector<double> gammas;  // gamma_l for l = l_min .. l_max, decreasing

    double gamma(int l) const { return gammas.at(static_cast<size_t>(l - l_min)); }
    bool contains(int l) const { return l >= l_min && l <= l_max; }
};

double gamma_root(const FlowGeometry& geo, int l, std::optional<double> guess = {});
Ladder gamma_ladder(const FlowGeometry& geo, int l_min, int l_max);

// g_l(theta): the parameter with passage time l + theta.
double theta_map(const FlowGeometry& geo, const Ladder& ladder, int l, double theta);

struct RungPosition {
    int l;
    double theta;
};
RungPosition theta_of_gamma(const FlowGeometry& geo, const Ladder& ladder, double gamma);

// |Dg_l| / |gamma_l - gamma_{l+1}| on a uniform grid of theta in [0, 1].
std::vector<double> normalized_distortion(const FlowGeometry& geo, const Ladder& ladder, int l, int grid);

struct FirstHit {
    DoubleDouble y;
    int steps;
    double residual;
};

// Iterate f^q_gamma from x in I^s until the orbit enters I^u = [e, f^q(e)), and compare
// tau^u(y) with tau^s(x) - theta in the supplied charts.
FirstHit local_first_hit(const FlowGeometry& geo, double gamma, const PhaseChart& stable, const PhaseChart& unstable,
                         DoubleDouble x, double theta);

}  // namespace snlab
