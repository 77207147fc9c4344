#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "snlab/double_double.hpp"
#include "snlab/error.hpp"

namespace snlab {

template <class S>
struct MapJet {
    S f;
    S df;
    S d2f;
};

inline constexpr double log_deriv_floor = -690.0;

// One-parameter unimodal family on [0, 1]. The native parameter is
// native = gamma_offset - orientation * gamma, with gamma = 0 at the fold.
class UnimodalFamily {
public:
    using Jet = std::function<MapJet<double>(double x, double native)>;
    using JetDD = std::function<MapJet<DoubleDouble>(DoubleDouble x, DoubleDouble native)>;
    using Third = std::function<double(double x, double native)>;

    UnimodalFamily(std::string name, double native_lo, double native_hi, double critical_point, int q, Jet jet,
                   JetDD jet_dd = {}, Third third = {});

    static UnimodalFamily quadratic();

    const std::string& name() const { return name_; }
    double native_lo() const { return native_lo_; }
    double native_hi() const { return native_hi_; }
    double critical_point() const { return c_; }
    int period() const { return q_; }
    DoubleDouble gamma_offset() const { return offset_; }
    int orientation() const { return orientation_; }
    bool is_quadratic() const { return quadratic_; }

    UnimodalFamily with_gamma_convention(DoubleDouble offset, int orientation) const;

    template <class S>
    S native(double gamma) const {
        if constexpr (std::is_same_v<S, DoubleDouble>)
            return offset_ - DoubleDouble(orientation_ * gamma);
        else
            return static_cast<double>(offset_ - DoubleDouble(orientation_ * gamma));
    }

    template <class S>
    S value(S x, S native) const {
        if (quadratic_) return native * x * (S(1.0) - x);
        if constexpr (std::is_same_v<S, DoubleDouble>) {
            if (jet_dd_) return jet_dd_(x, native).f;
            return DoubleDouble(jet_(to_double(x), to_double(native)).f);
        } else {
            return jet_(x, native).f;
        }
    }

    template <class S>
    MapJet<S> jet(S x, S native) const {
        if (quadratic_) return {native * x * (S(1.0) - x), native * (S(1.0) - S(2.0) * x), S(-2.0) * native};
        if constexpr (std::is_same_v<S, DoubleDouble>) {
            if (jet_dd_) return jet_dd_(x, native);
            auto j = jet_(to_double(x), to_double(native));
            return {DoubleDouble(j.f), DoubleDouble(j.df), DoubleDouble(j.d2f)};
        } else {
            return jet_(x, native);
        }
    }

    double third_derivative(double x, double native) const;

private:
    std::string name_;
    double native_lo_;
    double native_hi_;
    double c_;
    int q_;
    Jet jet_;
    JetDD jet_dd_;
    Third third_;
    DoubleDouble offset_{0.0};
    int orientation_ = 1;
    bool quadratic_ = false;
};

// f, f', f'' at x with domain checks on x and the native parameter.
MapJet<double> evaluate(const UnimodalFamily& family, double x, double native);

template <class S>
S iterate_value(const UnimodalFamily& family, S x, S native, long n) {
    for (long i = 0; i < n; ++i) x = family.value(x, native);
    return x;
}

// Value, first and second derivative of f^n at x by the chain rule.
template <class S>
MapJet<S> iterate_jet(const UnimodalFamily& family, S x, S native, long n) {
    MapJet<S> acc{x, S(1.0), S(0.0)};
    for (long i = 0; i < n; ++i) {
        auto j = family.jet(acc.f, native);
        acc.d2f = j.d2f * acc.df * acc.df + j.df * acc.d2f;
        acc.df = j.df * acc.df;
        acc.f = j.f;
    }
    return acc;
}

inline double log_abs_deriv(double df) {
    double a = std::abs(df);
    return a < 1e-300 ? log_deriv_floor : std::log(a);
}

struct OrbitRecord {
    double x0;
    double native;
    std::vector<double> samples;        // x_0 .. x_n
    std::vector<double> log_deriv_sums; // ln|Df^k(x0)|, k = 0 .. n
};

OrbitRecord iterate(const UnimodalFamily& family, double x0, double native, long n);

double schwarzian_at(const UnimodalFamily& family, double x, double native);

// Least-squares slope of k -> ln|Df^k(x0)| over k in [burn_in, n].
double lyapunov_slope(const UnimodalFamily& family, double x0, double native, long n, long burn_in);

}  // namespace snlab
