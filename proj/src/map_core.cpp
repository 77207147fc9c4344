#include "snlab/map_core.hpp"

#include "snlab/numerics.hpp"

namespace snlab {

UnimodalFamily::UnimodalFamily(std::string name, double native_lo, double native_hi, double critical_point, int q,
                               Jet jet, JetDD jet_dd, Third third)
    : name_(std::move(name)),
      native_lo_(native_lo),
      native_hi_(native_hi),
      c_(critical_point),
      q_(q),
      jet_(std::move(jet)),
      jet_dd_(std::move(jet_dd)),
      third_(std::move(third)) {
    if (!jet_) throw Error(ErrorCode::validation, "family needs an evaluator");
    if (!(native_lo_ < native_hi_)) throw Error(ErrorCode::validation, "empty native parameter range");
    if (!(c_ > 0.0 && c_ < 1.0)) throw Error(ErrorCode::validation, "critical point must lie in (0, 1)");
    if (q_ < 1) throw Error(ErrorCode::validation, "period must be positive");
}

UnimodalFamily UnimodalFamily::quadratic() {
    auto jet = [](double x, double mu) -> MapJet<double> { return {mu * x * (1.0 - x), mu * (1.0 - 2.0 * x), -2.0 * mu}; };
    auto third = [](double, double) { return 0.0; };
    UnimodalFamily f("quadratic", 0.0, 4.0, 0.5, 3, jet, {}, third);
    f.quadratic_ = true;
    // 1 + 2 sqrt(2) to double-double accuracy.
    f.offset_ = DoubleDouble(1.0) + DoubleDouble(2.0) * sqrt(DoubleDouble(2.0));
    f.orientation_ = 1;
    return f;
}

UnimodalFamily UnimodalFamily::with_gamma_convention(DoubleDouble offset, int orientation) const {
    UnimodalFamily f = *this;
    f.offset_ = offset;
    f.orientation_ = orientation >= 0 ? 1 : -1;
    return f;
}

double UnimodalFamily::third_derivative(double x, double native) const {
    if (third_) return third_(x, native);
    constexpr double h = 1e-5;
    return (jet(x + h, native).d2f - jet(x - h, native).d2f) / (2.0 * h);
}

MapJet<double> evaluate(const UnimodalFamily& family, double x, double native) {
    if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorCode::domain, "x outside [0, 1]");
    if (!(native >= family.native_lo() && native <= family.native_hi()))
        throw Error(ErrorCode::domain, "parameter outside the native range");
    return family.jet(x, native);
}

OrbitRecord iterate(const UnimodalFamily& family, double x0, double native, long n) {
    if (n < 0) throw Error(ErrorCode::domain, "negative iterate count");
    evaluate(family, x0, native);
    OrbitRecord rec{x0, native, {}, {}};
    rec.samples.reserve(n + 1);
    rec.log_deriv_sums.reserve(n + 1);
    double x = x0;
    double s = 0.0;
    rec.samples.push_back(x);
    rec.log_deriv_sums.push_back(0.0);
    for (long i = 0; i < n; ++i) {
        auto j = family.jet(x, native);
        s += log_abs_deriv(j.df);
        x = j.f;
        rec.samples.push_back(x);
        rec.log_deriv_sums.push_back(s);
    }
    return rec;
}

double schwarzian_at(const UnimodalFamily& family, double x, double native) {
    auto j = evaluate(family, x, native);
    if (std::abs(j.df) < 1e-8) throw Error(ErrorCode::singularity, "Schwarzian at a critical point");
    double r2 = j.d2f / j.df;
    return family.third_derivative(x, native) / j.df - 1.5 * r2 * r2;
}

double lyapunov_slope(const UnimodalFamily& family, double x0, double native, long n, long burn_in) {
    if (n <= burn_in + 1) throw Error(ErrorCode::insufficient_points, "horizon shorter than burn-in");
    evaluate(family, x0, native);
    LineAccumulator acc;
    double x = x0;
    double s = 0.0;
    for (long k = 0; k <= n; ++k) {
        if (k >= burn_in) acc.add(static_cast<double>(k), s);
        auto j = family.jet(x, native);
        s += log_abs_deriv(j.df);
        x = j.f;
    }
    return acc.slope();
}

}  // namespace snlab
