#pragma once

// Finite-sample boundedness diagnostic: track sup_theta c_n L_{Y|X}(theta, pi)
// along a schedule of n and classify the trend as bounded or diverging.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "predregret/exact/engine.hpp"
#include "predregret/models/model.hpp"

namespace predregret {

struct UClassRow {
    int n = 0;
    int m = 0;
    double sup_scaled_loss = 0.0;
};

struct UClassReport {
    std::vector<UClassRow> rows;
    double slope = 0.0;        // fitted on the largest three n
    double slope_se = 0.0;
    bool diverging = false;
    std::string classification;
};

/// m-rule for the schedule: "n" (replicate prediction), "sqrt", or a fixed
/// integer given as a string.
inline int apply_m_rule(const std::string& rule, int n) {
    if (rule == "n") return n;
    if (rule == "sqrt") return static_cast<int>(std::ceil(std::sqrt(n)));
    const int m = std::stoi(rule);
    if (m < 1) throw std::invalid_argument("m-rule must give m >= 1");
    return m;
}

/// Fits sup-values against n on the last three rows and declares divergence
/// when the slope exceeds ten times its standard error.
inline UClassReport u_class_diagnostic(const ModelFamily& model, const PriorSpec& prior,
                                       const std::vector<ParameterPoint>& theta_grid,
                                       const std::vector<int>& n_values,
                                       const std::string& m_rule) {
    if (n_values.size() < 3)
        throw std::invalid_argument("u_class_diagnostic: need at least three n values");
    UClassReport report;
    for (int n : n_values) {
        const int m = apply_m_rule(m_rule, n);
        double sup = -std::numeric_limits<double>::infinity();
        for (const ParameterPoint& theta : theta_grid) {
            const RegretValue loss = predictive_loss_finite(model, prior, theta, n, m);
            sup = std::max(sup, c_n_factor(n, m) * loss.value);
        }
        report.rows.push_back({n, m, sup});
    }
    // OLS of sup against n on the largest three n.
    const std::size_t count = report.rows.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = count - 3; i < count; ++i) {
        const double x = report.rows[i].n, y = report.rows[i].sup_scaled_loss;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = 3.0 * sxx - sx * sx;
    report.slope = (3.0 * sxy - sx * sy) / denom;
    const double intercept = (sy - report.slope * sx) / 3.0;
    double rss = 0.0;
    for (std::size_t i = count - 3; i < count; ++i) {
        const double r = report.rows[i].sup_scaled_loss -
                         (intercept + report.slope * report.rows[i].n);
        rss += r * r;
    }
    report.slope_se = std::sqrt(rss / 1.0 * 3.0 / denom);
    report.diverging = std::abs(report.slope) > 1e-9 &&
                       std::abs(report.slope) > 10.0 * report.slope_se;
    report.classification = report.diverging ? "diverging" : "bounded";
    return report;
}

}  // namespace predregret
