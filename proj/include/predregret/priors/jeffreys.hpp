#pragma once

// Jeffreys' prior: log pi^J(theta) = (1/2) log |i(theta)|, unnormalized
// except for the Bernoulli family where it is the proper beta(1/2,1/2).

#include <cmath>
#include <stdexcept>

#include "predregret/models/model.hpp"
#include "predregret/priors/prior.hpp"

namespace predregret {

inline PriorSpec jeffreys(const ModelFamily& model) {
    PriorSpec p;
    p.name = "jeffreys[" + model.name + "]";
    p.family = "jeffreys";
    p.log_pi = [model](const ParameterPoint& theta) {
        const Matrix info = fisher_info(model, theta);
        const double det = info.determinant();
        if (!(det > 0.0))
            throw std::domain_error("jeffreys: singular Fisher information");
        return 0.5 * std::log(det);
    };
    if (model.jeffreys_grad) p.grad = model.jeffreys_grad;
    if (model.jeffreys_hess) p.hess = model.jeffreys_hess;
    if (model.name == "bernoulli") {
        // beta(1/2,1/2) in disguise; normalizer of theta^-1/2 (1-theta)^-1/2.
        p.proper = true;
        p.log_normalizer = log_beta(0.5, 0.5);
        p.params = {{"a", 0.5}, {"b", 0.5}};
    }
    return p;
}

}  // namespace predregret
