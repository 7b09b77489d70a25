#pragma once

// Asymptotic predictive loss machinery:
//   A(theta, pi)  = i^{rs} rho_r rho_s + 2 D_s(i^{rs} rho_r)
//   L(theta, pi)  = A(theta, pi) - A(theta, pi^J)
//   Mbar(theta)   = alpha111^2 / 12 + curvature / 2          (p = 1)
// The divergence term is differentiated as a product by default; the
// expanded route i^{rs}(rho_r rho_s + 2 rho_rs) + 2 D_s(i^{rs}) rho_r is
// kept as an independent cross-check.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "predregret/models/model.hpp"
#include "predregret/models/reparam.hpp"
#include "predregret/numerics/derivatives.hpp"
#include "predregret/priors/jeffreys.hpp"
#include "predregret/priors/prior.hpp"

namespace predregret {

namespace detail {

inline Matrix inverse_fisher(const ModelFamily& model, const ParameterPoint& theta) {
    const Matrix info = fisher_info(model, theta);
    Eigen::FullPivLU<Matrix> lu(info);
    if (!lu.isInvertible())
        throw std::domain_error(model.name + ": singular Fisher information");
    return lu.inverse();
}

}  // namespace detail

inline double a_functional(const ModelFamily& model, const PriorSpec& prior,
                           const ParameterPoint& theta) {
    require_interior(model, theta);
    const Matrix inv = detail::inverse_fisher(model, theta);
    const Vector grad = rho_derivatives(prior, theta).grad;
    const double quad = grad.dot(inv * grad);

    // v^s(theta) = i^{rs} rho_r; divergence by central differences on the
    // assembled product.
    auto v = [&](const ParameterPoint& t, int s) {
        const Matrix inv_t = detail::inverse_fisher(model, t);
        const Vector g_t = prior.grad ? prior.grad(t) : fd_gradient(prior.log_pi, t);
        return inv_t.row(s).dot(g_t);
    };
    double divergence = 0.0;
    for (int s = 0; s < model.dim; ++s) {
        ParameterPoint t = theta;
        divergence += central_diff_1(
            [&](double x) {
                t[s] = x;
                return v(t, s);
            },
            theta[s]);
        t[s] = theta[s];
    }
    return quad + 2.0 * divergence;
}

/// Expanded form of the same functional; agrees with a_functional to
/// finite-difference accuracy.
inline double a_functional_expanded(const ModelFamily& model, const PriorSpec& prior,
                                    const ParameterPoint& theta) {
    require_interior(model, theta);
    const Matrix inv = detail::inverse_fisher(model, theta);
    const RhoDerivatives rho = rho_derivatives(prior, theta);
    double value = rho.grad.dot(inv * rho.grad) + 2.0 * (inv * rho.hess).trace();
    for (int s = 0; s < model.dim; ++s) {
        ParameterPoint t = theta;
        for (int r = 0; r < model.dim; ++r) {
            value += 2.0 * rho.grad[r] *
                     central_diff_1(
                         [&](double x) {
                             t[s] = x;
                             return detail::inverse_fisher(model, t)(r, s);
                         },
                         theta[s]);
            t[s] = theta[s];
        }
    }
    return value;
}

/// L(theta, pi) = A(theta, pi) - A(theta, pi^J); free of the additive
/// constant in log pi.
inline double predictive_loss(const ModelFamily& model, const PriorSpec& prior,
                              const ParameterPoint& theta) {
    const PriorSpec jp = jeffreys(model);
    return a_functional(model, prior, theta) - a_functional(model, jp, theta);
}

/// Scalar invariant Mbar(theta) = alpha111^2/12 + gamma^2/2 for p = 1.
/// Diagnostic only: it cancels out of the predictive loss.
inline double mbar_scalar(const ModelFamily& model, const ParameterPoint& theta) {
    if (model.dim != 1)
        throw std::invalid_argument("mbar_scalar: only p = 1 is supported");
    const AlphaTensors a = alpha_tensors(model, theta);
    return a.alpha111 * a.alpha111 / 12.0 + 0.5 * a.curvature();
}

/// Rectangular grid over a box, margin-shrunk away from the edges.
inline std::vector<ParameterPoint> make_grid(const Box& box, int points_per_dim,
                                             double rel_margin = 0.0) {
    const int dim = static_cast<int>(box.size());
    std::vector<double> lo(dim), step(dim);
    for (int d = 0; d < dim; ++d) {
        const double width = box[d].second - box[d].first;
        const double a = box[d].first + rel_margin * width;
        const double b = box[d].second - rel_margin * width;
        lo[d] = a;
        step[d] = points_per_dim > 1 ? (b - a) / (points_per_dim - 1) : 0.0;
    }
    std::vector<ParameterPoint> grid;
    std::vector<int> idx(dim, 0);
    while (true) {
        ParameterPoint p(dim);
        for (int d = 0; d < dim; ++d) p[d] = lo[d] + idx[d] * step[d];
        grid.push_back(p);
        int d = 0;
        for (; d < dim; ++d) {
            if (++idx[d] < points_per_dim) break;
            idx[d] = 0;
        }
        if (d == dim) break;
    }
    return grid;
}

/// Default interior grid for a model; grids keep a 2% relative margin from
/// the box edges since the loss can blow up at the boundary.
inline std::vector<ParameterPoint> default_grid(const ModelFamily& model,
                                                int points_per_dim = 0) {
    if (points_per_dim <= 0) points_per_dim = model.dim <= 1 ? 19 : (model.dim <= 2 ? 7 : 3);
    return make_grid(model.default_box, points_per_dim, 0.02);
}

struct LossSurface {
    std::vector<ParameterPoint> grid;
    std::vector<double> values;
    double mean = 0.0;
    double max_abs_dev = 0.0;  // max |value - mean| over the grid
};

inline LossSurface loss_surface(const ModelFamily& model, const PriorSpec& prior,
                                const std::vector<ParameterPoint>& grid) {
    LossSurface out;
    out.grid = grid;
    out.values.reserve(grid.size());
    const PriorSpec jp = jeffreys(model);
    double sum = 0.0;
    for (const ParameterPoint& theta : grid) {
        const double v =
            a_functional(model, prior, theta) - a_functional(model, jp, theta);
        if (!std::isfinite(v))
            throw std::runtime_error("loss_surface: non-finite loss value");
        out.values.push_back(v);
        sum += v;
    }
    out.mean = sum / static_cast<double>(grid.size());
    for (double v : out.values)
        out.max_abs_dev = std::max(out.max_abs_dev, std::abs(v - out.mean));
    return out;
}

/// Max discrepancy of L(theta, pi) computed in the original and transformed
/// coordinates over a grid (grid given in original coordinates; the prior is
/// transported with the Jacobian factor).
inline double invariance_check(const ModelFamily& model, const PriorSpec& prior,
                               const ReparamMap& map,
                               const std::vector<ParameterPoint>& grid) {
    if (!map.to_eta)
        throw std::invalid_argument("invariance_check: map must provide an inverse");
    const ModelFamily transformed = reparameterize(model, map);
    const PriorSpec moved = transform_prior(prior, map);
    const PriorSpec jp = jeffreys(model);
    const PriorSpec jp_t = jeffreys(transformed);
    double worst = 0.0;
    for (const ParameterPoint& theta : grid) {
        const ParameterPoint eta = map.to_eta(theta);
        const double original =
            a_functional(model, prior, theta) - a_functional(model, jp, theta);
        const double moved_loss = a_functional(transformed, moved, eta) -
                                  a_functional(transformed, jp_t, eta);
        worst = std::max(worst, std::abs(original - moved_loss));
    }
    return worst;
}

}  // namespace predregret
