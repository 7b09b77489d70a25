#pragma once

// Compact-support prior sequences tau_k built from an H-class density:
//   line-scale        theta = k U                   on Theta = R
//   halfline-shift    theta = k (U + 1) + 1         on Theta = (0, inf)
//   location-logscale (beta, lambda) = (k1 U1, k2 U2), k1 = k e^k, k2 = k
//   regression-logscale  beta_r = k1 U_r, lambda = k2 U_{q+1}
// Each tau_k is proper, twice continuously differentiable and supported on a
// compact box strictly inside the parameter set.

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

#include "predregret/priors/hclass.hpp"
#include "predregret/priors/prior.hpp"

namespace predregret {

enum class TauConstruction { LineScale, HalflineShift, LocationLogscale, RegressionLogscale };

inline const char* to_string(TauConstruction c) {
    switch (c) {
        case TauConstruction::LineScale: return "line-scale";
        case TauConstruction::HalflineShift: return "halfline-shift";
        case TauConstruction::LocationLogscale: return "location-logscale";
        case TauConstruction::RegressionLogscale: return "regression-logscale";
    }
    return "?";
}

inline TauConstruction tau_construction_from_string(const std::string& s) {
    if (s == "line-scale") return TauConstruction::LineScale;
    if (s == "halfline-shift") return TauConstruction::HalflineShift;
    if (s == "location-logscale") return TauConstruction::LocationLogscale;
    if (s == "regression-logscale") return TauConstruction::RegressionLogscale;
    throw std::invalid_argument("unknown tau construction '" + s + "'");
}

struct CompactPriorSequence {
    TauConstruction construction = TauConstruction::LineScale;
    HClassDensity h{4.0, 4.0};
    double k = 1.0;
    int q = 1;  // regressor count for the regression construction
};

namespace detail {

// Product of independent coordinates theta_j = c_j + s_j U_j, U_j ~ h.
inline PriorSpec product_tau(const std::string& name, const HClassDensity& h,
                             const std::vector<double>& center,
                             const std::vector<double>& scale) {
    const int dim = static_cast<int>(center.size());
    PriorSpec p;
    p.name = name;
    p.family = "tau-k";
    p.proper = true;
    p.log_normalizer = 0.0;
    p.support.resize(dim);
    for (int j = 0; j < dim; ++j)
        p.support[j] = {center[j] - scale[j], center[j] + scale[j]};
    auto hp = std::make_shared<HClassDensity>(h);
    p.log_pi = [hp, center, scale, dim](const ParameterPoint& t) {
        double s = 0.0;
        for (int j = 0; j < dim; ++j)
            s += hp->log_h((t[j] - center[j]) / scale[j]) - std::log(scale[j]);
        return s;
    };
    p.grad = [hp, center, scale, dim](const ParameterPoint& t) {
        Vector g(dim);
        for (int j = 0; j < dim; ++j)
            g[j] = hp->g_prime((t[j] - center[j]) / scale[j]) / scale[j];
        return g;
    };
    p.hess = [hp, center, scale, dim](const ParameterPoint& t) {
        Matrix hsn = Matrix::Zero(dim, dim);
        for (int j = 0; j < dim; ++j)
            hsn(j, j) = hp->g_second((t[j] - center[j]) / scale[j]) / (scale[j] * scale[j]);
        return hsn;
    };
    return p;
}

}  // namespace detail

inline PriorSpec tau_k(const CompactPriorSequence& seq) {
    if (!(seq.k > 0.0)) throw std::invalid_argument("tau_k: need k > 0");
    const double k = seq.k;
    const std::string name =
        std::string("tau[") + to_string(seq.construction) + ",k=" + std::to_string(k) + "]";
    switch (seq.construction) {
        case TauConstruction::LineScale:
            return detail::product_tau(name, seq.h, {0.0}, {k});
        case TauConstruction::HalflineShift:
            // theta = k(U+1)+1: support [1, 2k+1]
            return detail::product_tau(name, seq.h, {k + 1.0}, {k});
        case TauConstruction::LocationLogscale:
            // (beta, lambda) with k1 = k e^k, k2 = k
            return detail::product_tau(name, seq.h, {0.0, 0.0}, {k * std::exp(k), k});
        case TauConstruction::RegressionLogscale: {
            if (seq.q < 1) throw std::invalid_argument("tau_k: need q >= 1 regressors");
            std::vector<double> center(seq.q + 1, 0.0), scale(seq.q + 1, k * std::exp(k));
            scale[seq.q] = k;
            return detail::product_tau(name, seq.h, center, scale);
        }
    }
    throw std::logic_error("tau_k: unreachable");
}

/// Checks the construction against a model's parameter-space shape.
inline void require_compatible(const CompactPriorSequence& seq, const ModelFamily& model) {
    const PriorSpec tau = tau_k(seq);
    if (static_cast<int>(tau.support.size()) != model.dim)
        throw std::invalid_argument("tau_k construction '" +
                                    std::string(to_string(seq.construction)) +
                                    "' does not match the parameter dimension of " +
                                    model.name);
    for (int j = 0; j < model.dim; ++j) {
        if (!(tau.support[j].first > model.domain[j].lo &&
              tau.support[j].second < model.domain[j].hi))
            throw std::invalid_argument(
                "tau_k support is not strictly inside the parameter set of " +
                model.name);
    }
}

}  // namespace predregret
