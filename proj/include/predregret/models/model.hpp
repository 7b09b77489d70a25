#pragma once

// Parametric sampling families: per-observation log density, sampler,
// Fisher information (closed form or expected-negative-Hessian fallback)
// and the scalar skewness/curvature functionals.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "predregret/numerics/derivatives.hpp"
#include "predregret/numerics/quadrature.hpp"
#include "predregret/numerics/rng.hpp"

namespace predregret {

using ParameterPoint = Eigen::VectorXd;
using Observation = Eigen::VectorXd;

enum class SupportKind { DiscreteFinite, RealLine, RealVector };

/// Observation-space descriptor. Discrete supports enumerate their atoms;
/// continuous supports provide a Gaussian hint (center, lower-triangular
/// transform) used to re-center Hermite quadrature when taking expectations.
struct ObservationSpace {
    SupportKind kind = SupportKind::RealLine;
    int dim = 1;
    std::vector<Observation> atoms;
    std::function<void(const ParameterPoint&, Vector& center, Matrix& transform)>
        gauss_hint;
};

struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
};

struct ModelFamily {
    std::string name;
    int dim = 1;  // parameter dimension p
    ObservationSpace obs;
    std::vector<Interval> domain;  // open parameter set, one interval per coordinate
    std::function<double(const Observation&, const ParameterPoint&)> log_f;
    std::function<std::vector<Observation>(const ParameterPoint&, int, SeededStream)>
        sampler;
    std::function<Matrix(const ParameterPoint&)> fisher_closed;  // may be empty
    std::string conjugacy;  // "", "bernoulli-beta", "normal-mean", "normal-ms"

    // Replaces the generic observation expectation when the observation
    // carries deterministic components (fixed-design regression).
    std::function<double(const ParameterPoint&,
                         const std::function<double(const Observation&)>&)>
        expect_override;

    // Closed-form gradient/Hessian of log pi^J = (1/2) log|i|, when known.
    std::function<Vector(const ParameterPoint&)> jeffreys_grad;
    std::function<Matrix(const ParameterPoint&)> jeffreys_hess;

    // Default interior evaluation box for grids/reports (finite, inside domain).
    Box default_box;
};

inline constexpr double kBoundaryMargin = 1e-12;

inline bool is_interior(const ModelFamily& model, const ParameterPoint& theta) {
    if (theta.size() != model.dim) return false;
    for (int j = 0; j < model.dim; ++j) {
        const Interval& iv = model.domain[j];
        if (!(theta[j] > iv.lo + kBoundaryMargin && theta[j] < iv.hi - kBoundaryMargin))
            return false;
    }
    return true;
}

inline void require_interior(const ModelFamily& model, const ParameterPoint& theta) {
    if (theta.size() != model.dim)
        throw std::domain_error(model.name + ": parameter dimension mismatch");
    if (!is_interior(model, theta))
        throw std::domain_error(model.name +
                                ": parameter outside the open parameter set (points "
                                "within 1e-12 of a boundary are rejected)");
}

inline double log_density(const ModelFamily& model, const Observation& x,
                          const ParameterPoint& theta) {
    require_interior(model, theta);
    const double v = model.log_f(x, theta);
    if (!std::isfinite(v))
        throw std::domain_error(model.name + ": observation outside the support");
    return v;
}

/// Expectation of g(X) under f(.|theta): exact sum over atoms for discrete
/// supports, re-centered Gauss-Hermite for continuous ones.
template <class G>
double expect_observation(const ModelFamily& model, const ParameterPoint& theta,
                          const G& g, int hermite_nodes = 64) {
    if (model.expect_override) return model.expect_override(theta, g);
    if (model.obs.kind == SupportKind::DiscreteFinite) {
        double s = 0.0;
        for (const Observation& x : model.obs.atoms)
            s += std::exp(model.log_f(x, theta)) * g(x);
        return s;
    }
    Vector center;
    Matrix transform;
    model.obs.gauss_hint(theta, center, transform);
    const int d = model.obs.dim;
    if (d == 1) {
        const double sd = transform(0, 0);
        return expect_normal(
            [&](double x) {
                Observation ox = Vector::Constant(1, x);
                const double w = std::exp(model.log_f(ox, theta)) * sd *
                                 std::sqrt(2.0 * std::numbers::pi) *
                                 std::exp(0.5 * std::pow((x - center[0]) / sd, 2));
                return w * g(ox);
            },
            center[0], sd, hermite_nodes);
    }
    // Tensor Hermite over the hint Gaussian N(center, AA'), reweighted by the
    // model density: E[g] = pi^{-d/2} sum_i w_i f(x_i) g(x_i) / phi_hint(x_i).
    const QuadratureRule& rule = gauss_hermite(std::min(hermite_nodes, 32));
    const double log_det =
        transform.diagonal().array().abs().log().sum() +
        0.5 * d * std::log(2.0 * std::numbers::pi);
    std::vector<int> idx(d, 0);
    double total = 0.0;
    Vector z(d);
    while (true) {
        double w = 1.0, z2 = 0.0;
        for (int j = 0; j < d; ++j) {
            z[j] = rule.nodes[idx[j]];
            w *= rule.weights[idx[j]];
            z2 += z[j] * z[j];
        }
        const Observation x = center + std::numbers::sqrt2 * (transform * z);
        const double log_hint = -z2 - log_det;
        total += w * std::exp(model.log_f(x, theta) - log_hint) * g(x);
        int j = 0;
        for (; j < d; ++j) {
            if (++idx[j] < rule.nodes.size()) break;
            idx[j] = 0;
        }
        if (j == d) break;
    }
    return total * std::pow(std::numbers::pi, -0.5 * d);
}

/// Fisher information per observation: closed form when registered,
/// otherwise the expected negative Hessian of log f computed by
/// quadrature/summation over the observation space.
inline Matrix fisher_info(const ModelFamily& model, const ParameterPoint& theta,
                          bool force_numeric = false) {
    require_interior(model, theta);
    if (model.fisher_closed && !force_numeric) return model.fisher_closed(theta);
    const int p = model.dim;
    Matrix info = Matrix::Zero(p, p);
    for (int r = 0; r < p; ++r) {
        for (int s = r; s < p; ++s) {
            const double v = expect_observation(model, theta, [&](const Observation& x) {
                Matrix h = fd_hessian([&](const Vector& t) { return model.log_f(x, t); },
                                      theta);
                return -0.5 * (h(r, s) + h(s, r));
            });
            info(r, s) = v;
            info(s, r) = v;
        }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(info);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw std::runtime_error(model.name +
                                 ": numeric Fisher information is not positive definite");
    return info;
}

struct AlphaTensors {
    double alpha111 = 0.0;  // standardized third moment of the score
    double alpha12 = 0.0;
    double alpha22 = 0.0;
    double curvature() const { return alpha22 - alpha12 * alpha12 - 1.0; }
};

/// Standardized score-derivative moments for p = 1 (exact summation on
/// discrete supports, Hermite quadrature otherwise).
inline AlphaTensors alpha_tensors(const ModelFamily& model, const ParameterPoint& theta) {
    if (model.dim != 1)
        throw std::invalid_argument("alpha_tensors: only p = 1 is supported");
    require_interior(model, theta);
    const double info = fisher_info(model, theta)(0, 0);
    auto l1 = [&](const Observation& x) {
        return central_diff_1([&](double t) { return model.log_f(x, Vector::Constant(1, t)); },
                              theta[0]);
    };
    auto l2 = [&](const Observation& x) {
        return central_diff_2([&](double t) { return model.log_f(x, Vector::Constant(1, t)); },
                              theta[0]);
    };
    AlphaTensors a;
    a.alpha111 = std::pow(info, -1.5) *
                 expect_observation(model, theta, [&](const Observation& x) {
                     const double v = l1(x);
                     return v * v * v;
                 });
    a.alpha12 = std::pow(info, -1.5) *
                expect_observation(model, theta,
                                   [&](const Observation& x) { return l1(x) * l2(x); });
    a.alpha22 = std::pow(info, -2.0) *
                expect_observation(model, theta, [&](const Observation& x) {
                    const double v = l2(x);
                    return v * v;
                });
    return a;
}

/// Numeric check that exp(log_f) integrates/sums to one.
inline double normalization(const ModelFamily& model, const ParameterPoint& theta) {
    return expect_observation(model, theta, [](const Observation&) { return 1.0; });
}

}  // namespace predregret
