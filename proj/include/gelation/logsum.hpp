#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

namespace gelation {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// log(e^a + e^b); tolerates -inf in either slot.
inline double log_add(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == neg_inf) return a;
    return a + std::log1p(std::exp(b - a));
}

// log(e^a - e^b) for a >= b; returns -inf when a == b.
inline double log_sub(double a, double b) {
    if (b == neg_inf) return a;
    if (!(a >= b)) throw std::domain_error("log_sub: a < b");
    double d = b - a;
    if (d == 0.0) return neg_inf;
    // log(-expm1(d)) is the stable branch when d is near 0.
    return a + (d > -0.6931471805599453 ? std::log(-std::expm1(d))
                                        : std::log1p(-std::exp(d)));
}

struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

// Two-pass max-shifted log of a sum of exponentials, compensated.
inline double log_sum_exp(std::span<const double> v) {
    double m = neg_inf;
    for (double x : v) m = std::max(m, x);
    if (m == neg_inf) return neg_inf;
    if (std::isinf(m)) return m;
    KahanSum s;
    for (double x : v) s.add(std::exp(x - m));
    return m + std::log(s.value());
}

inline double lfact(long k) { return std::lgamma(static_cast<double>(k) + 1.0); }

inline double lchoose(long n, long k) {
    if (k < 0 || k > n) return neg_inf;
    return lfact(n) - lfact(k) - lfact(n - k);
}

} // namespace gelation
