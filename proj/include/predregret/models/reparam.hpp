#pragma once

// Smooth reparameterizations of a model family. The new family composes the
// map into every evaluator; Fisher information transforms by the Jacobian
// sandwich i(eta) = J' i(theta(eta)) J.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

#include "predregret/models/model.hpp"
#include "predregret/priors/prior.hpp"

namespace predregret {

/// Diffeomorphism eta -> theta between open boxes, with derivative evaluator.
struct ReparamMap {
    std::string name;
    std::function<ParameterPoint(const ParameterPoint&)> to_theta;
    std::function<Matrix(const ParameterPoint&)> jacobian;  // d theta / d eta
    std::function<ParameterPoint(const ParameterPoint&)> to_eta;  // optional
    std::vector<Interval> eta_domain;
    Box eta_box;  // default evaluation box in the new coordinates
};

inline ModelFamily reparameterize(const ModelFamily& model, const ReparamMap& map) {
    ModelFamily out;
    out.name = model.name + "[" + map.name + "]";
    out.dim = model.dim;
    out.obs = model.obs;
    out.domain = map.eta_domain;
    out.default_box = map.eta_box;
    out.conjugacy = model.conjugacy;
    out.log_f = [log_f = model.log_f, to_theta = map.to_theta](
                    const Observation& x, const ParameterPoint& eta) {
        return log_f(x, to_theta(eta));
    };
    if (model.sampler)
        out.sampler = [sampler = model.sampler, to_theta = map.to_theta](
                          const ParameterPoint& eta, int count, SeededStream s) {
            return sampler(to_theta(eta), count, s);
        };
    if (model.obs.gauss_hint)
        out.obs.gauss_hint = [hint = model.obs.gauss_hint, to_theta = map.to_theta](
                                 const ParameterPoint& eta, Vector& c, Matrix& a) {
            hint(to_theta(eta), c, a);
        };
    if (model.expect_override)
        out.expect_override = [expect = model.expect_override, to_theta = map.to_theta](
                                  const ParameterPoint& eta,
                                  const std::function<double(const Observation&)>& g) {
            return expect(to_theta(eta), g);
        };
    auto base_fisher = [model](const ParameterPoint& theta) {
        return fisher_info(model, theta);
    };
    out.fisher_closed = [base_fisher, map](const ParameterPoint& eta) {
        const Matrix jac = map.jacobian(eta);
        if (std::abs(jac.determinant()) < 1e-14)
            throw std::domain_error("reparameterize: singular Jacobian");
        return Matrix(jac.transpose() * base_fisher(map.to_theta(eta)) * jac);
    };
    // log pi^J transforms by the log-Jacobian shift, so a closed base
    // gradient stays closed up to one (non-nested) finite difference.
    if (model.jeffreys_grad)
        out.jeffreys_grad = [jg = model.jeffreys_grad, map](const ParameterPoint& eta) {
            Vector g = map.jacobian(eta).transpose() * jg(map.to_theta(eta));
            g += fd_gradient(
                [&map](const ParameterPoint& e) {
                    return std::log(std::abs(map.jacobian(e).determinant()));
                },
                eta);
            return g;
        };
    return out;
}

/// Density transform pi_eta(eta) = pi(theta(eta)) |det J(eta)|, as a log prior.
inline PriorSpec transform_prior(const PriorSpec& prior, const ReparamMap& map) {
    PriorSpec out;
    out.name = prior.name + "[" + map.name + "]";
    out.family = prior.family;
    out.params = prior.params;
    out.proper = prior.proper;
    out.log_normalizer = prior.log_normalizer;
    out.support = map.eta_box.empty() ? prior.support : Box{};
    out.log_pi = [log_pi = prior.log_pi, map](const ParameterPoint& eta) {
        const double det = map.jacobian(eta).determinant();
        if (std::abs(det) < 1e-300)
            throw std::domain_error("transform_prior: singular Jacobian");
        return log_pi(map.to_theta(eta)) + std::log(std::abs(det));
    };
    if (prior.grad)
        out.grad = [grad = prior.grad, map](const ParameterPoint& eta) {
            Vector g = map.jacobian(eta).transpose() * grad(map.to_theta(eta));
            g += fd_gradient(
                [&map](const ParameterPoint& e) {
                    return std::log(std::abs(map.jacobian(e).determinant()));
                },
                eta);
            return g;
        };
    // Support in the new coordinates, when the prior restricted one.
    if (!prior.support.empty()) {
        if (!map.to_eta)
            throw std::invalid_argument(
                "transform_prior: compact-support prior needs an invertible map");
        Vector lo(prior.support.size()), hi(prior.support.size());
        for (std::size_t j = 0; j < prior.support.size(); ++j) {
            lo[j] = prior.support[j].first;
            hi[j] = prior.support[j].second;
        }
        const Vector a = map.to_eta(lo), b = map.to_eta(hi);
        Box support(prior.support.size());
        for (std::size_t j = 0; j < prior.support.size(); ++j)
            support[j] = {std::min(a[j], b[j]), std::max(a[j], b[j])};
        out.support = support;
    }
    return out;
}

/// log sigma in the last coordinate, identity elsewhere; the standard map to
/// the location/log-scale parameterization.
inline ReparamMap log_scale_map(const ModelFamily& model) {
    const int p = model.dim;
    ReparamMap map;
    map.name = "log-scale";
    map.to_theta = [p](const ParameterPoint& eta) {
        ParameterPoint theta = eta;
        theta[p - 1] = std::exp(eta[p - 1]);
        return theta;
    };
    map.to_eta = [p](const ParameterPoint& theta) {
        ParameterPoint eta = theta;
        eta[p - 1] = std::log(theta[p - 1]);
        return eta;
    };
    map.jacobian = [p](const ParameterPoint& eta) {
        Matrix jac = Matrix::Identity(p, p);
        jac(p - 1, p - 1) = std::exp(eta[p - 1]);
        return jac;
    };
    map.eta_domain.assign(p, Interval{});
    map.eta_box = model.default_box;
    if (!map.eta_box.empty())
        map.eta_box[p - 1] = {std::log(model.default_box[p - 1].first),
                              std::log(model.default_box[p - 1].second)};
    return map;
}

}  // namespace predregret
