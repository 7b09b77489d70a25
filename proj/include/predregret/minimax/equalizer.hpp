#pragma once

// Equalizer scans: sweep a parameterized prior family, test whether the
// asymptotic predictive loss is constant over the parameter grid, and pick
// the equalizer with the smallest constant.

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "predregret/asymptotics/loss.hpp"
#include "predregret/models/model.hpp"
#include "predregret/priors/prior.hpp"

namespace predregret {

/// A prior family indexed by a scalar a (beta(a,a), sigma^{-a}, ...).
struct PriorFamily {
    std::string name;
    std::function<PriorSpec(double a)> make;
};

inline PriorFamily prior_family(const ModelFamily& model, const std::string& name) {
    if (name == "beta-symmetric" && model.name == "bernoulli")
        return {name, [](double a) { return beta_prior(a, a); }};
    if (name == "power-sigma" && (model.name == "normal-ms" || model.name == "linreg")) {
        const int dim = model.dim;
        return {name, [dim](double a) { return power_sigma_prior(a, dim); }};
    }
    if (name == "mvn-power" && model.name == "mvn2")
        return {name, [](double a) { return mvn_power_prior(a, 2); }};
    if (name == "exp-tilt" && model.dim == 1)
        return {name, [](double a) { return exp_tilt_prior(a); }};
    throw std::invalid_argument("no prior family '" + name + "' for model " + model.name);
}

struct EqualizerEntry {
    double a = 0.0;
    double mean_loss = 0.0;
    double max_abs_dev = 0.0;
    bool equalizer = false;
};

struct EqualizerReport {
    std::string family;
    std::vector<EqualizerEntry> entries;
    bool found_equalizer = false;
    double argmin_a = 0.0;        // among the equalizers only
    double min_constant = 0.0;
    double tolerance = 0.0;
};

inline constexpr double kEqualizerRelTol = 1e-6;

/// Scans L(theta, pi_a) over the grid for each a; an entry is declared an
/// equalizer when its max deviation from the mean is below
/// 1e-6 * max(1, |mean|).
inline EqualizerReport equalizer_scan(const ModelFamily& model, const PriorFamily& family,
                                      const std::vector<double>& a_grid,
                                      const std::vector<ParameterPoint>& theta_grid) {
    if (a_grid.empty() || theta_grid.empty())
        throw std::invalid_argument("equalizer_scan: empty grid");
    EqualizerReport report;
    report.family = family.name;
    report.tolerance = kEqualizerRelTol;
    double best = std::numeric_limits<double>::infinity();
    for (double a : a_grid) {
        const PriorSpec prior = family.make(a);
        const LossSurface surface = loss_surface(model, prior, theta_grid);
        EqualizerEntry entry{a, surface.mean, surface.max_abs_dev, false};
        entry.equalizer =
            surface.max_abs_dev < kEqualizerRelTol * std::max(1.0, std::abs(surface.mean));
        if (entry.equalizer && surface.mean < best) {
            best = surface.mean;
            report.argmin_a = a;
            report.found_equalizer = true;
        }
        report.entries.push_back(entry);
    }
    report.min_constant = best;
    return report;
}

}  // namespace predregret
