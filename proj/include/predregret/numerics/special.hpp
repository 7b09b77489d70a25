#pragma once

// Scalar special-function helpers and log-domain accumulation.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include <boost/math/special_functions/digamma.hpp>

namespace predregret {

inline double log_sum_exp(std::span<const double> args) {
    if (args.empty()) return -std::numeric_limits<double>::infinity();
    const double m = *std::max_element(args.begin(), args.end());
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double a : args) s += std::exp(a - m);
    return m + std::log(s);
}

inline double log_sum_exp(double a, double b) {
    const double m = std::max(a, b);
    if (!std::isfinite(m)) return m;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

inline double log_binom(int n, int k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

inline double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

inline double digamma(double x) { return boost::math::digamma(x); }

}  // namespace predregret
