#pragma once

// Integral forms of the asymptotic regret and predictive information for
// compact smooth priors tau:
//   d(tau, pi) = int i^{rs} (rho_r - mu_r)(rho_s - mu_s) tau dtheta
//   zeta(tau)  = d(tau, pi^J)
// evaluated by adaptive tensor Gauss-Legendre over tau's support box.

#include <cmath>
#include <stdexcept>

#include "predregret/asymptotics/loss.hpp"
#include "predregret/models/model.hpp"
#include "predregret/numerics/quadrature.hpp"
#include "predregret/priors/jeffreys.hpp"
#include "predregret/priors/prior.hpp"

namespace predregret {

namespace detail {

inline void require_compact_inside(const ModelFamily& model, const PriorSpec& tau) {
    if (tau.support.empty() || static_cast<int>(tau.support.size()) != model.dim)
        throw std::domain_error(
            "asymptotic_regret: tau must have a compact support box matching the "
            "parameter dimension");
    if (!tau.proper)
        throw std::domain_error("asymptotic_regret: tau must be proper");
    for (int j = 0; j < model.dim; ++j)
        if (!(tau.support[j].first > model.domain[j].lo &&
              tau.support[j].second < model.domain[j].hi))
            throw std::domain_error(
                "asymptotic_regret: tau support touches the parameter-set boundary");
}

}  // namespace detail

inline double asymptotic_regret(const ModelFamily& model, const PriorSpec& tau,
                                const PriorSpec& pi, double rel_tol = 1e-10) {
    detail::require_compact_inside(model, tau);
    auto integrand = [&](const ParameterPoint& theta) {
        const double log_tau = tau.log_pi(theta);
        if (log_tau < -700.0) return 0.0;
        const Vector mu = tau.grad ? tau.grad(theta) : fd_gradient(tau.log_pi, theta);
        const Vector rho = pi.grad ? pi.grad(theta) : fd_gradient(pi.log_pi, theta);
        const Vector diff = rho - mu;
        const Matrix inv = detail::inverse_fisher(model, theta);
        return diff.dot(inv * diff) * std::exp(log_tau);
    };
    const double value = adaptive_integrate_box(integrand, tau.support, rel_tol);
    if (value < -1e-10)
        throw std::runtime_error(
            "asymptotic_regret: negative value beyond tolerance (quadrature failure)");
    return value;
}

/// zeta(tau): distance of tau's predictive from the Jeffreys predictive,
/// with nu = log pi^J = (1/2) log|i|.
inline double predictive_information(const ModelFamily& model, const PriorSpec& tau,
                                     double rel_tol = 1e-10) {
    return asymptotic_regret(model, tau, jeffreys(model), rel_tol);
}

/// Expected loss int L(theta, pi) tau(theta) dtheta by direct quadrature of
/// the pointwise loss (used to cross-check the integral identities).
inline double expected_loss(const ModelFamily& model, const PriorSpec& tau,
                            const PriorSpec& pi, double rel_tol = 1e-8) {
    detail::require_compact_inside(model, tau);
    const PriorSpec jp = jeffreys(model);
    auto integrand = [&](const ParameterPoint& theta) {
        const double log_tau = tau.log_pi(theta);
        if (log_tau < -700.0) return 0.0;
        const double loss =
            a_functional(model, pi, theta) - a_functional(model, jp, theta);
        return loss * std::exp(log_tau);
    };
    return adaptive_integrate_box(integrand, tau.support, rel_tol);
}

}  // namespace predregret
