#pragma once

// Closed-form finite-sample regret for the normal families.
//
// Unknown mean, unit variance: the predictive under a N(mu0, v0) or flat
// prior is Gaussian, and the expected KL has an elementary closed form.
//
// Unknown mean and scale with pi^a = sigma^{-a}: the chain rule gives
// d_{Y|X} = f(n+m, a) - f(n, a) with
//   f(n, a) = -log(2 pi)/2 - n/2 + log(n)/2 + log 2
//             - lgamma((n+a-2)/2) + ((n+a-2)/2) digamma((n-1)/2),
// independent of theta (the priors are relatively invariant under the
// affine group). Requires n >= 2 and n + a > 2 for a proper posterior.

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "predregret/numerics/special.hpp"

namespace predregret {

/// d_{Y|X}(theta, flat) for N(theta, 1): (1/2) log(1 + m/n).
inline double normal_mean_posterior_regret_flat(int n, int m) {
    if (n < 1) throw std::invalid_argument("normal-mean: need n >= 1 data points");
    return 0.5 * std::log1p(static_cast<double>(m) / n);
}

/// d_{Y|X}(theta, N(mu0, v0)) for N(theta, 1).
inline double normal_mean_posterior_regret(double theta, double mu0, double v0, int n,
                                           int m) {
    if (n < 0 || m < 1) throw std::invalid_argument("normal-mean: need n >= 0, m >= 1");
    const double vn = 1.0 / (n + 1.0 / v0);
    const double bias = vn * (mu0 - theta) / v0;
    const double mean_sq = n * vn * vn + bias * bias;
    const double mvn = m * vn;
    return 0.5 * (std::log1p(mvn) - mvn / (1.0 + mvn) + mean_sq * m / (1.0 + mvn));
}

/// d_X(theta, N(mu0, v0)) for N(theta, 1).
inline double normal_mean_prior_regret(double theta, double mu0, double v0, int n) {
    if (n == 0) return 0.0;
    const double nv = n * v0;
    const double d2 = (theta - mu0) * (theta - mu0);
    return 0.5 * (std::log1p(nv) - nv / (1.0 + nv) + d2 * n / (1.0 + nv));
}

/// d_X(theta, flat) for N(theta, 1) with the flat prior normalized as the
/// constant density 1: exactly (1/2) log(n / (2 pi e)).
inline double normal_mean_prior_regret_flat(int n) {
    if (n == 0) return 0.0;
    return 0.5 * std::log(n / (2.0 * std::numbers::pi)) - 0.5;
}

namespace detail {

inline double normal_ms_marginal_term(int n, double a) {
    return -0.5 * std::log(2.0 * std::numbers::pi) - 0.5 * n + 0.5 * std::log(n) +
           std::log(2.0) - std::lgamma(0.5 * (n + a - 2.0)) +
           0.5 * (n + a - 2.0) * digamma(0.5 * (n - 1.0));
}

}  // namespace detail

inline bool normal_ms_regret_defined(int n, double a) {
    return n >= 2 && n + a > 2.0;
}

/// d_{Y|X}(theta, sigma^{-a}) for N(beta, sigma^2); constant in theta.
inline double normal_ms_posterior_regret(double a, int n, int m) {
    if (!normal_ms_regret_defined(n, a))
        throw std::domain_error(
            "normal-ms: posterior predictive regret needs n >= 2 and n + a > 2");
    return detail::normal_ms_marginal_term(n + m, a) - detail::normal_ms_marginal_term(n, a);
}

/// d_X(theta, c sigma^{-a}) with the prior written as exp(log_const) sigma^{-a};
/// improper, so the value depends on the stated normalization.
inline double normal_ms_prior_regret(double sigma, double a, double log_const, int n) {
    if (!normal_ms_regret_defined(n, a))
        throw std::domain_error("normal-ms: prior predictive regret needs n >= 2, n + a > 2");
    return detail::normal_ms_marginal_term(n, a) + (a - 2.0) * std::log(sigma) - log_const;
}

/// Log joint marginal of a normal-ms sample under sigma^{-a}, as a function
/// of the sufficient statistics; used by the sequential predictive.
inline double normal_ms_log_marginal(int n, double sum, double sumsq, double a) {
    if (n < 2) throw std::domain_error("normal-ms marginal needs n >= 2");
    const double ss = sumsq - sum * sum / n;  // sum of squared deviations
    if (!(ss > 0.0)) throw std::domain_error("normal-ms marginal: degenerate sample");
    return -0.5 * (n - 1.0) * std::log(2.0 * std::numbers::pi) - 0.5 * std::log(n) +
           std::log(0.5) + std::lgamma(0.5 * (n + a - 2.0)) +
           0.5 * (n + a - 2.0) * (std::log(2.0) - std::log(ss));
}

}  // namespace predregret
