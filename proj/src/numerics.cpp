#include "snlab/numerics.hpp"

#include <Eigen/Dense>
#include <numbers>

namespace snlab {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::domain: return "domain";
        case ErrorCode::singularity: return "singularity";
        case ErrorCode::no_convergence: return "no-convergence";
        case ErrorCode::degenerate_saddle_node: return "degenerate-saddle-node";
        case ErrorCode::orientation: return "orientation";
        case ErrorCode::continuation_lost: return "continuation-lost";
        case ErrorCode::displacement_sign: return "displacement-sign";
        case ErrorCode::quadrature_nonmonotone: return "quadrature-nonmonotone";
        case ErrorCode::out_of_domain: return "out-of-domain";
        case ErrorCode::bracket_loss: return "bracket-loss";
        case ErrorCode::backward_solve: return "backward-solve";
        case ErrorCode::empty_interval: return "empty-interval";
        case ErrorCode::orbit_escape: return "orbit-escape";
        case ErrorCode::sample_escape: return "sample-escape";
        case ErrorCode::no_root_in_rung: return "no-root-in-rung";
        case ErrorCode::insufficient_points: return "insufficient-points";
        case ErrorCode::unsupported_geometry: return "unsupported-geometry";
        case ErrorCode::parse: return "parse";
        case ErrorCode::validation: return "validation";
        case ErrorCode::io: return "io";
    }
    return "unknown";
}

namespace {

GaussLegendre build_gl32() {
    constexpr int n = 32;
    GaussLegendre rule{};
    for (int i = 0; i < n / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

}  // namespace

const GaussLegendre& gauss_legendre32() {
    static const GaussLegendre rule = build_gl32();
    return rule;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<Eigen::Index>(x.size());
    if (n < 2 || x.size() != y.size()) throw Error(ErrorCode::insufficient_points, "line fit needs two points");
    Eigen::MatrixXd a(n, 2);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        a(i, 0) = 1.0;
        a(i, 1) = x[i];
        b(i) = y[i];
    }
    Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
    double stderr_slope = 0.0;
    if (n > 2) {
        double rss = (a * coef - b).squaredNorm();
        Eigen::Matrix2d cov = (a.transpose() * a).inverse() * (rss / static_cast<double>(n - 2));
        stderr_slope = std::sqrt(std::max(cov(1, 1), 0.0));
    }
    return {coef(1), coef(0), stderr_slope};
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<double> low_discrepancy_points(std::uint64_t seed, int count, double lo, double hi) {
    std::uint64_t state = seed;
    double offset = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
    const double step = 1.0 / std::numbers::phi;
    std::vector<double> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) out.push_back(lo + (hi - lo) * wrap01(offset + k * step));
    return out;
}

std::vector<double> geometric_grid(double lo, double hi, int points) {
    std::vector<double> g;
    if (points <= 0) return g;
    if (points == 1) return {lo};
    double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < points; ++i) g.push_back(std::exp(a + (b - a) * i / (points - 1)));
    g.front() = lo;
    g.back() = hi;
    return g;
}

}  // namespace snlab
