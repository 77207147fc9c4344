#pragma once

#include <cmath>
#include <compare>

namespace snlab {

// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2. Requires -ffp-contract=off.
class DoubleDouble {
public:
    constexpr DoubleDouble() = default;
    constexpr DoubleDouble(double hi) : hi_(hi) {}
    constexpr DoubleDouble(double hi, double lo) : hi_(hi), lo_(lo) {}

    constexpr double hi() const { return hi_; }
    constexpr double lo() const { return lo_; }
    explicit constexpr operator double() const { return hi_ + lo_; }

    friend DoubleDouble operator-(DoubleDouble a) { return {-a.hi_, -a.lo_}; }

    friend DoubleDouble operator+(DoubleDouble a, DoubleDouble b) {
        auto [s, e] = two_sum(a.hi_, b.hi_);
        auto [t, f] = two_sum(a.lo_, b.lo_);
        e += t;
        auto [s1, e1] = quick_two_sum(s, e);
        e1 += f;
        auto [hi, lo] = quick_two_sum(s1, e1);
        return {hi, lo};
    }
    friend DoubleDouble operator-(DoubleDouble a, DoubleDouble b) { return a + (-b); }

    friend DoubleDouble operator*(DoubleDouble a, DoubleDouble b) {
        auto [p, e] = two_prod(a.hi_, b.hi_);
        e += a.hi_ * b.lo_ + a.lo_ * b.hi_;
        auto [hi, lo] = quick_two_sum(p, e);
        return {hi, lo};
    }

    friend DoubleDouble operator/(DoubleDouble a, DoubleDouble b) {
        double q1 = a.hi_ / b.hi_;
        DoubleDouble r = a - b * DoubleDouble(q1);
        double q2 = r.hi_ / b.hi_;
        r = r - b * DoubleDouble(q2);
        double q3 = r.hi_ / b.hi_;
        auto [hi, lo] = quick_two_sum(q1, q2);
        return DoubleDouble(hi, lo) + DoubleDouble(q3);
    }

    DoubleDouble& operator+=(DoubleDouble b) { return *this = *this + b; }
    DoubleDouble& operator-=(DoubleDouble b) { return *this = *this - b; }
    DoubleDouble& operator*=(DoubleDouble b) { return *this = *this * b; }
    DoubleDouble& operator/=(DoubleDouble b) { return *this = *this / b; }

    friend bool operator==(DoubleDouble a, DoubleDouble b) { return a.hi_ == b.hi_ && a.lo_ == b.lo_; }
    friend std::partial_ordering operator<=>(DoubleDouble a, DoubleDouble b) {
        if (auto c = a.hi_ <=> b.hi_; c != 0) return c;
        return a.lo_ <=> b.lo_;
    }

private:
    struct Pair {
        double s;
        double e;
    };

    static Pair two_sum(double a, double b) {
        double s = a + b;
        double bb = s - a;
        double e = (a - (s - bb)) + (b - bb);
        return {s, e};
    }
    static Pair quick_two_sum(double a, double b) {
        double s = a + b;
        return {s, b - (s - a)};
    }
    static Pair split(double a) {
        constexpr double splitter = 134217729.0;
        double t = splitter * a;
        double hi = t - (t - a);
        return {hi, a - hi};
    }
    static Pair two_prod(double a, double b) {
        double p = a * b;
        auto [ah, al] = split(a);
        auto [bh, bl] = split(b);
        double e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
        return {p, e};
    }

    double hi_ = 0.0;
    double lo_ = 0.0;
};

inline DoubleDouble abs(DoubleDouble a) { return a.hi() < 0.0 ? -a : a; }

inline DoubleDouble sqrt(DoubleDouble a) {
    if (a.hi() <= 0.0) return DoubleDouble(0.0);
    double y = std::sqrt(a.hi());
    DoubleDouble yy(y);
    return yy + (a - yy * yy) / DoubleDouble(2.0 * y);
}

inline double to_double(double x) { return x; }
inline double to_double(DoubleDouble x) { return x.hi(); }

template <class S>
S from_double(double x) {
    return S(x);
}

}  // namespace snlab
