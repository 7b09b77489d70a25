#pragma once

// Exact finite-sample regret for the Bernoulli family. The predictive of Y
// given X depends on x only through its success count, so every double
// expectation collapses to an (n+1) x (m+1) weighted sum over sufficient
// counts; this is what makes n ~ 10^4 feasible on a desk machine.

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "predregret/numerics/quadrature.hpp"
#include "predregret/numerics/special.hpp"
#include "predregret/priors/prior.hpp"

namespace predregret {

/// log of the marginal probability of one specific binary sequence with s
/// ones among N trials, under some (possibly improper) prior on theta.
/// Improper priors are represented up to a fixed additive constant, which is
/// legal wherever only ratios of marginals enter.
struct BernoulliMarginal {
    std::string name;
    std::function<double(int s, int N)> log_seq_prob;
    bool normalized = true;
};

inline BernoulliMarginal bernoulli_marginal_beta(double a, double b) {
    return {"beta(" + std::to_string(a) + "," + std::to_string(b) + ")",
            [a, b](int s, int N) { return log_beta(a + s, b + N - s) - log_beta(a, b); },
            true};
}

inline BernoulliMarginal bernoulli_marginal_point(double theta) {
    return {"point(" + std::to_string(theta) + ")",
            [theta](int s, int N) {
                if (theta == 0.0)
                    return s == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
                if (theta == 1.0)
                    return s == N ? 0.0 : -std::numeric_limits<double>::infinity();
                return s * std::log(theta) + (N - s) * std::log1p(-theta);
            },
            true};
}

inline BernoulliMarginal bernoulli_marginal_atoms(const std::vector<double>& thetas,
                                                  const std::vector<double>& weights) {
    if (thetas.size() != weights.size() || thetas.empty())
        throw std::invalid_argument("bernoulli_marginal_atoms: atoms/weights mismatch");
    return {"atoms(" + std::to_string(thetas.size()) + ")",
            [thetas, weights](int s, int N) {
                std::vector<double> terms(thetas.size());
                for (std::size_t i = 0; i < thetas.size(); ++i)
                    terms[i] = std::log(weights[i]) + s * std::log(thetas[i]) +
                               (N - s) * std::log1p(-thetas[i]);
                return log_sum_exp(terms);
            },
            true};
}

/// Quadrature-backed marginal for an arbitrary smooth prior on (0,1).
/// Normalized when the prior is proper; otherwise defined up to a constant.
inline BernoulliMarginal bernoulli_marginal_quadrature(const PriorSpec& prior) {
    const double lo = prior.support.empty() ? 0.0 : prior.support[0].first;
    const double hi = prior.support.empty() ? 1.0 : prior.support[0].second;
    auto log_int = [=](int s, int N) {
        const double value = adaptive_integrate(
            [&](double t) {
                const double lp =
                    s * std::log(t) + (N - s) * std::log1p(-t) +
                    prior.log_pi(Vector::Constant(1, t));
                return std::exp(lp);
            },
            lo, hi, 1e-10);
        return std::log(value);
    };
    double log_norm = 0.0;
    bool norm = false;
    if (prior.proper) {
        log_norm = log_int(0, 0);
        norm = true;
    }
    return {"quadrature[" + prior.name + "]",
            [log_int, log_norm](int s, int N) { return log_int(s, N) - log_norm; },
            norm};
}

namespace detail {

inline double log_binomial_weight(int N, int s, double theta) {
    if (theta == 0.0)
        return s == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    if (theta == 1.0)
        return s == N ? 0.0 : -std::numeric_limits<double>::infinity();
    return log_binom(N, s) + s * std::log(theta) + (N - s) * std::log1p(-theta);
}

}  // namespace detail

/// d_X(theta, pi): relative entropy between the sampling distribution at
/// theta and the prior predictive, by exact sufficient-count summation.
inline double bernoulli_prior_regret(double theta, const BernoulliMarginal& pi, int n) {
    if (n == 0) return 0.0;
    double total = 0.0;
    for (int s = 0; s <= n; ++s) {
        const double lw = detail::log_binomial_weight(n, s, theta);
        if (lw == -std::numeric_limits<double>::infinity()) continue;
        const double log_ptheta =
            theta == 0.0 || theta == 1.0
                ? 0.0
                : s * std::log(theta) + (n - s) * std::log1p(-theta);
        total += std::exp(lw) * (log_ptheta - pi.log_seq_prob(s, n));
    }
    return total;
}

/// d_{Y|X}(theta, pi): posterior predictive regret at a parameter point,
/// valid also at the boundary theta in {0,1} where the sums collapse.
inline double bernoulli_posterior_regret(double theta, const BernoulliMarginal& pi,
                                         int n, int m) {
    double total = 0.0;
    for (int sx = 0; sx <= n; ++sx) {
        const double lwx = detail::log_binomial_weight(n, sx, theta);
        if (lwx == -std::numeric_limits<double>::infinity()) continue;
        const double log_mx = pi.log_seq_prob(sx, n);
        for (int sy = 0; sy <= m; ++sy) {
            const double lwy = detail::log_binomial_weight(m, sy, theta);
            if (lwy == -std::numeric_limits<double>::infinity()) continue;
            const double log_py =
                theta == 0.0 || theta == 1.0
                    ? 0.0
                    : sy * std::log(theta) + (m - sy) * std::log1p(-theta);
            const double log_pred = pi.log_seq_prob(sx + sy, n + m) - log_mx;
            total += std::exp(lwx + lwy) * (log_py - log_pred);
        }
    }
    return total;
}

/// d_{Y|X}(tau, pi) for a proper mixture tau: expected KL between the two
/// posterior predictives under tau's joint law.
inline double bernoulli_posterior_regret(const BernoulliMarginal& tau,
                                         const BernoulliMarginal& pi, int n, int m) {
    if (!tau.normalized)
        throw std::invalid_argument("bernoulli_posterior_regret: tau must be proper");
    double total = 0.0;
    for (int sx = 0; sx <= n; ++sx) {
        const double log_tau_x = tau.log_seq_prob(sx, n);
        const double log_pi_x = pi.log_seq_prob(sx, n);
        const double log_counts_x = log_binom(n, sx);
        for (int sy = 0; sy <= m; ++sy) {
            const double log_tau_xy = tau.log_seq_prob(sx + sy, n + m);
            const double lw = log_counts_x + log_binom(m, sy) + log_tau_xy;
            const double log_ratio = (log_tau_xy - log_tau_x) -
                                     (pi.log_seq_prob(sx + sy, n + m) - log_pi_x);
            total += std::exp(lw) * log_ratio;
        }
    }
    return total;
}

/// d_X(tau, pi) for a proper mixture tau.
inline double bernoulli_prior_regret(const BernoulliMarginal& tau,
                                     const BernoulliMarginal& pi, int n) {
    if (!tau.normalized)
        throw std::invalid_argument("bernoulli_prior_regret: tau must be proper");
    if (n == 0) return 0.0;
    double total = 0.0;
    for (int s = 0; s <= n; ++s) {
        const double log_tau = tau.log_seq_prob(s, n);
        total += std::exp(log_binom(n, s) + log_tau) * (log_tau - pi.log_seq_prob(s, n));
    }
    return total;
}

}  // namespace predregret
