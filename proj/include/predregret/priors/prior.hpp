#pragma once

// Priors as log-density objects, defined up to an additive constant, with
// value/gradient/Hessian evaluation.

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "predregret/models/model.hpp"
#include "predregret/numerics/derivatives.hpp"
#include "predregret/numerics/special.hpp"

namespace predregret {

struct PriorSpec {
    std::string name;
    std::string family;  // "beta", "flat", "power-sigma", "exp-tilt", ...
    std::map<std::string, double> params;
    std::function<double(const ParameterPoint&)> log_pi;
    std::function<Vector(const ParameterPoint&)> grad;  // empty -> finite differences
    std::function<Matrix(const ParameterPoint&)> hess;  // empty -> finite differences
    Box support;  // empty means the full parameter set
    bool proper = false;
    std::optional<double> log_normalizer;  // log of the integral of exp(log_pi)
};

inline bool in_support_interior(const PriorSpec& prior, const ParameterPoint& theta) {
    for (std::size_t j = 0; j < prior.support.size(); ++j)
        if (!(theta[j] > prior.support[j].first + kBoundaryMargin &&
              theta[j] < prior.support[j].second - kBoundaryMargin))
            return false;
    return true;
}

inline void require_in_support(const PriorSpec& prior, const ParameterPoint& theta) {
    if (!in_support_interior(prior, theta))
        throw std::domain_error("prior '" + prior.name +
                                "': point outside the interior of the support");
}

struct RhoDerivatives {
    double value = 0.0;
    Vector grad;
    Matrix hess;
};

/// Value, gradient and Hessian of rho = log pi at theta; closed forms where
/// registered, central finite differences with Richardson otherwise.
inline RhoDerivatives rho_derivatives(const PriorSpec& prior,
                                      const ParameterPoint& theta) {
    require_in_support(prior, theta);
    RhoDerivatives out;
    out.value = prior.log_pi(theta);
    if (!std::isfinite(out.value))
        throw std::domain_error("prior '" + prior.name +
                                "': log density not finite at the requested point");
    out.grad = prior.grad ? prior.grad(theta) : fd_gradient(prior.log_pi, theta);
    out.hess = prior.hess ? prior.hess(theta) : fd_hessian(prior.log_pi, theta);
    return out;
}

inline PriorSpec flat_prior(int dim) {
    PriorSpec p;
    p.name = "flat";
    p.family = "flat";
    p.log_pi = [](const ParameterPoint&) { return 0.0; };
    p.grad = [dim](const ParameterPoint&) { return Vector::Zero(dim); };
    p.hess = [dim](const ParameterPoint&) { return Matrix::Zero(dim, dim); };
    return p;
}

/// Beta(a,b) on (0,1), normalized.
inline PriorSpec beta_prior(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("beta prior: shapes must be positive");
    PriorSpec p;
    p.name = "beta(" + std::to_string(a) + "," + std::to_string(b) + ")";
    p.family = "beta";
    p.params = {{"a", a}, {"b", b}};
    p.proper = true;
    p.log_normalizer = 0.0;
    p.support = {{0.0, 1.0}};
    p.log_pi = [a, b](const ParameterPoint& t) {
        return (a - 1.0) * std::log(t[0]) + (b - 1.0) * std::log1p(-t[0]) -
               log_beta(a, b);
    };
    p.grad = [a, b](const ParameterPoint& t) {
        return Vector::Constant(1, (a - 1.0) / t[0] - (b - 1.0) / (1.0 - t[0]));
    };
    p.hess = [a, b](const ParameterPoint& t) {
        return Matrix::Constant(1, 1,
                                -(a - 1.0) / (t[0] * t[0]) -
                                    (b - 1.0) / ((1.0 - t[0]) * (1.0 - t[0])));
    };
    return p;
}

/// Normal(mean, sd^2) prior on a scalar location parameter.
inline PriorSpec normal_prior(double mean, double sd) {
    if (!(sd > 0.0)) throw std::invalid_argument("normal prior: sd must be positive");
    PriorSpec p;
    p.name = "normal(" + std::to_string(mean) + "," + std::to_string(sd) + ")";
    p.family = "normal";
    p.params = {{"mean", mean}, {"sd", sd}};
    p.proper = true;
    p.log_normalizer = 0.0;
    p.log_pi = [mean, sd](const ParameterPoint& t) {
        const double z = (t[0] - mean) / sd;
        return -0.5 * std::log(2.0 * std::numbers::pi) - std::log(sd) - 0.5 * z * z;
    };
    p.grad = [mean, sd](const ParameterPoint& t) {
        return Vector::Constant(1, -(t[0] - mean) / (sd * sd));
    };
    p.hess = [sd](const ParameterPoint&) {
        return Matrix::Constant(1, 1, -1.0 / (sd * sd));
    };
    return p;
}

/// pi^a proportional to sigma^{-a}; sigma is the model's last coordinate.
inline PriorSpec power_sigma_prior(double a, int dim) {
    PriorSpec p;
    p.name = "power-sigma(" + std::to_string(a) + ")";
    p.family = "power-sigma";
    p.params = {{"a", a}};
    const int j = dim - 1;
    p.log_pi = [a, j](const ParameterPoint& t) { return -a * std::log(t[j]); };
    p.grad = [a, j, dim](const ParameterPoint& t) {
        Vector g = Vector::Zero(dim);
        g[j] = -a / t[j];
        return g;
    };
    p.hess = [a, j, dim](const ParameterPoint& t) {
        Matrix h = Matrix::Zero(dim, dim);
        h(j, j) = a / (t[j] * t[j]);
        return h;
    };
    return p;
}

/// Exponentially tilted flat prior exp{c (theta - theta0)} on R.
inline PriorSpec exp_tilt_prior(double c, double theta0 = 0.0) {
    PriorSpec p;
    p.name = "exp-tilt(" + std::to_string(c) + ")";
    p.family = "exp-tilt";
    p.params = {{"c", c}, {"theta0", theta0}};
    p.log_pi = [c, theta0](const ParameterPoint& t) { return c * (t[0] - theta0); };
    p.grad = [c](const ParameterPoint&) { return Vector::Constant(1, c); };
    p.hess = [](const ParameterPoint&) { return Matrix::Zero(1, 1); };
    return p;
}

/// pi^a proportional to |Sigma|^{-(q+2-a)/2} for the bivariate normal in the
/// triangular-precision coordinates: log pi = sum_i (2i - q - a - 1) log psi_i.
inline PriorSpec mvn_power_prior(double a, int q = 2) {
    PriorSpec p;
    p.name = "mvn-power(" + std::to_string(a) + ")";
    p.family = "mvn-power";
    p.params = {{"a", a}, {"q", static_cast<double>(q)}};
    const int dim = q + q * (q - 1) / 2 + q;
    p.log_pi = [a, q](const ParameterPoint& g) {
        double s = 0.0;
        for (int i = 1; i <= q; ++i) s += (2.0 * i - q - a - 1.0) * std::log(g[i - 1]);
        return s;
    };
    p.grad = [a, q, dim](const ParameterPoint& g) {
        Vector out = Vector::Zero(dim);
        for (int i = 1; i <= q; ++i) out[i - 1] = (2.0 * i - q - a - 1.0) / g[i - 1];
        return out;
    };
    p.hess = [a, q, dim](const ParameterPoint& g) {
        Matrix out = Matrix::Zero(dim, dim);
        for (int i = 1; i <= q; ++i)
            out(i - 1, i - 1) = -(2.0 * i - q - a - 1.0) / (g[i - 1] * g[i - 1]);
        return out;
    };
    return p;
}

/// Finitely supported prior (atoms with weights), used by the proper-scoring
/// checks; not differentiable, so it carries no log-density evaluators.
struct DiscretePrior {
    std::vector<ParameterPoint> atoms;
    std::vector<double> weights;

    void validate() const {
        if (atoms.empty() || atoms.size() != weights.size())
            throw std::invalid_argument("discrete prior: atoms/weights mismatch");
        double s = 0.0;
        for (double w : weights) {
            if (!(w > 0.0)) throw std::invalid_argument("discrete prior: weights > 0");
            s += w;
        }
        if (std::abs(s - 1.0) > 1e-12)
            throw std::invalid_argument("discrete prior: weights must sum to one");
    }
};

}  // namespace predregret
