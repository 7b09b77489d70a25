#pragma once

// Prior mini-language used by the CLI and config files:
//   jeffreys | flat | beta:a,b | normal:mean,sd | power-sigma:a
//   exp-tilt:c[,theta0] | mvn-power:a | tau-k:<construction>,<k>[,<a>,<b>]

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "predregret/models/model.hpp"
#include "predregret/priors/jeffreys.hpp"
#include "predregret/priors/prior.hpp"
#include "predregret/priors/tau.hpp"

namespace predregret {

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

inline double parse_real(const std::string& s, const std::string& what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("could not parse " + what + " from '" + s + "'");
    }
    if (pos != s.size())
        throw std::invalid_argument("trailing characters in " + what + " '" + s + "'");
    return v;
}

}  // namespace detail

/// Builds a PriorSpec for `model` from its mini-language name.
inline PriorSpec parse_prior(const ModelFamily& model, const std::string& text) {
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::vector<std::string> args =
        colon == std::string::npos ? std::vector<std::string>{}
                                   : detail::split(text.substr(colon + 1), ',');
    auto arity = [&](std::size_t lo, std::size_t hi) {
        if (args.size() < lo || args.size() > hi)
            throw std::invalid_argument("prior '" + text + "': wrong number of arguments");
    };
    if (head == "jeffreys") {
        arity(0, 0);
        return jeffreys(model);
    }
    if (head == "flat") {
        arity(0, 0);
        return flat_prior(model.dim);
    }
    if (head == "beta") {
        arity(2, 2);
        if (model.name != "bernoulli")
            throw std::invalid_argument("beta prior applies to the bernoulli model");
        return beta_prior(detail::parse_real(args[0], "beta shape"),
                          detail::parse_real(args[1], "beta shape"));
    }
    if (head == "normal") {
        arity(2, 2);
        if (model.dim != 1)
            throw std::invalid_argument("normal prior applies to scalar parameters");
        return normal_prior(detail::parse_real(args[0], "normal mean"),
                            detail::parse_real(args[1], "normal sd"));
    }
    if (head == "power-sigma") {
        arity(1, 1);
        if (model.name != "normal-ms" && model.name != "linreg")
            throw std::invalid_argument(
                "power-sigma prior applies to normal-ms or linreg");
        return power_sigma_prior(detail::parse_real(args[0], "power-sigma exponent"),
                                 model.dim);
    }
    if (head == "exp-tilt") {
        arity(1, 2);
        if (model.dim != 1)
            throw std::invalid_argument("exp-tilt prior applies to scalar parameters");
        return exp_tilt_prior(detail::parse_real(args[0], "tilt"),
                              args.size() > 1 ? detail::parse_real(args[1], "center")
                                              : 0.0);
    }
    if (head == "mvn-power") {
        arity(1, 1);
        if (model.name != "mvn2")
            throw std::invalid_argument("mvn-power prior applies to the mvn2 model");
        return mvn_power_prior(detail::parse_real(args[0], "mvn-power exponent"), 2);
    }
    if (head == "tau-k") {
        arity(2, 4);
        CompactPriorSequence seq;
        seq.construction = tau_construction_from_string(args[0]);
        seq.k = detail::parse_real(args[1], "tau-k index");
        const double a = args.size() > 2 ? detail::parse_real(args[2], "h shape") : 4.0;
        const double b = args.size() > 3 ? detail::parse_real(args[3], "h shape") : a;
        seq.h = HClassDensity(a, b);
        if (seq.construction == TauConstruction::RegressionLogscale) seq.q = model.dim - 1;
        return tau_k(seq);
    }
    throw std::invalid_argument("unknown prior '" + text + "'");
}

}  // namespace predregret
