#pragma once

// Finite-sample engine: exact or Monte-Carlo posterior/prior predictive
// regret, predictive loss, chain-rule decompositions, Clarke-Barron
// expansion residuals and the normalized-loss convergence study.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "predregret/asymptotics/loss.hpp"
#include "predregret/exact/bernoulli.hpp"
#include "predregret/exact/normal.hpp"
#include "predregret/models/model.hpp"
#include "predregret/numerics/rng.hpp"
#include "predregret/priors/jeffreys.hpp"
#include "predregret/priors/prior.hpp"

namespace predregret {

/// Exactly computable posterior predictive for a conjugate model/prior pair.
struct PredictiveKernel {
    std::string pair;
    std::vector<double> hyper;  // posterior hyperparameters after observing x
    int m = 1;
    std::function<double(const std::vector<Observation>&)> log_predictive;
};

namespace detail {

struct BetaParams {
    double a, b;
};

// Beta shape parameters encoded by a prior, when it has them.
inline std::optional<BetaParams> beta_params(const PriorSpec& prior) {
    if (prior.family == "beta")
        return BetaParams{prior.params.at("a"), prior.params.at("b")};
    if (prior.family == "jeffreys" && prior.params.count("a"))
        return BetaParams{prior.params.at("a"), prior.params.at("b")};
    return std::nullopt;
}

// Exponent a with log_pi(theta) = log_const - a log sigma, for the scale
// priors on normal-ms; jeffreys is a = 2 with log_const = log sqrt(2).
inline std::optional<double> power_sigma_exponent(const PriorSpec& prior) {
    if (prior.family == "power-sigma") return prior.params.at("a");
    if (prior.family == "jeffreys") return 2.0;
    return std::nullopt;
}

inline double power_sigma_log_const(const PriorSpec& prior, double a) {
    Vector probe(2);
    probe << 0.0, 1.0;
    (void)a;
    return prior.log_pi(probe);  // -a log(1) + log_const
}

inline std::optional<std::pair<double, double>> normal_mean_params(
    const PriorSpec& prior) {
    // (mean, sd); flat and jeffreys are the sd -> infinity limit.
    if (prior.family == "normal")
        return std::make_pair(prior.params.at("mean"), prior.params.at("sd"));
    if (prior.family == "flat" || prior.family == "jeffreys")
        return std::make_pair(0.0, std::numeric_limits<double>::infinity());
    return std::nullopt;
}

inline int success_count(const std::vector<Observation>& xs) {
    int s = 0;
    for (const Observation& x : xs) s += x[0] == 1.0 ? 1 : 0;
    return s;
}

}  // namespace detail

/// Exact m-step-ahead posterior predictive for a registered conjugate pair;
/// throws std::invalid_argument for unsupported pairs (callers fall back to
/// the Monte Carlo path).
inline PredictiveKernel posterior_predictive(const ModelFamily& model,
                                             const PriorSpec& prior,
                                             const std::vector<Observation>& x, int m) {
    const int n = static_cast<int>(x.size());
    if (model.conjugacy == "bernoulli-beta") {
        if (auto bp = detail::beta_params(prior)) {
            const int sx = detail::success_count(x);
            const double a_post = bp->a + sx, b_post = bp->b + (n - sx);
            PredictiveKernel k{"bernoulli-beta", {a_post, b_post}, m, nullptr};
            k.log_predictive = [a_post, b_post, m](const std::vector<Observation>& y) {
                const int sy = detail::success_count(y);
                return log_beta(a_post + sy, b_post + (m - sy)) -
                       log_beta(a_post, b_post);
            };
            return k;
        }
    }
    if (model.conjugacy == "normal-mean") {
        if (auto np = detail::normal_mean_params(prior)) {
            double sum = 0.0;
            for (const Observation& xi : x) sum += xi[0];
            const bool flat = std::isinf(np->second);
            if (flat && n < 1)
                throw std::domain_error("normal-mean: flat prior needs n >= 1");
            const double prior_prec = flat ? 0.0 : 1.0 / (np->second * np->second);
            const double v_post = 1.0 / (n + prior_prec);
            const double mu_post = v_post * (sum + (flat ? 0.0 : np->first * prior_prec));
            PredictiveKernel k{"normal-mean", {mu_post, v_post}, m, nullptr};
            k.log_predictive = [mu_post, v_post, m](const std::vector<Observation>& y) {
                // Sequential one-step predictives, each N(mu_k, 1 + v_k).
                double mu = mu_post, v = v_post, lp = 0.0;
                for (int j = 0; j < m; ++j) {
                    const double s2 = 1.0 + v;
                    const double z = y[j][0] - mu;
                    lp += -0.5 * std::log(2.0 * std::numbers::pi * s2) -
                          0.5 * z * z / s2;
                    mu = (mu / v + y[j][0]) / (1.0 / v + 1.0);
                    v = 1.0 / (1.0 / v + 1.0);
                }
                return lp;
            };
            return k;
        }
    }
    if (model.conjugacy == "normal-ms") {
        if (auto a = detail::power_sigma_exponent(prior)) {
            if (!normal_ms_regret_defined(n, *a))
                throw std::domain_error(
                    "normal-ms predictive needs n >= 2 and n + a > 2");
            double sum = 0.0, sumsq = 0.0;
            for (const Observation& xi : x) {
                sum += xi[0];
                sumsq += xi[0] * xi[0];
            }
            PredictiveKernel k{"normal-ms", {static_cast<double>(n), sum, sumsq, *a}, m,
                               nullptr};
            k.log_predictive = [n, sum, sumsq, a = *a](const std::vector<Observation>& y) {
                double s = sum, s2 = sumsq;
                for (const Observation& yj : y) {
                    s += yj[0];
                    s2 += yj[0] * yj[0];
                }
                return normal_ms_log_marginal(n + static_cast<int>(y.size()), s, s2, a) -
                       normal_ms_log_marginal(n, sum, sumsq, a);
            };
            return k;
        }
    }
    throw std::invalid_argument("posterior_predictive: no conjugate structure for (" +
                                model.name + ", " + prior.name + ")");
}

struct RegretOptions {
    SeededStream stream{};
    long replicates = 20000;
    bool force_mc = false;
};

struct RegretValue {
    double value = 0.0;
    double standard_error = 0.0;  // zero on the exact path
    bool exact = true;
    bool diverged = false;
    std::string note;
};

namespace detail {

// Marginal evaluator backing the exact Bernoulli path for any usable prior.
inline BernoulliMarginal bernoulli_marginal(const PriorSpec& prior) {
    if (auto bp = beta_params(prior)) return bernoulli_marginal_beta(bp->a, bp->b);
    return bernoulli_marginal_quadrature(prior);
}

// Joint predictive log density of y given x: the conjugate kernel when one
// exists, otherwise the quadrature-backed marginal (bernoulli only).
inline double log_predictive_value(const ModelFamily& model, const PriorSpec& prior,
                                   const std::vector<Observation>& x,
                                   const std::vector<Observation>& y) {
    try {
        const PredictiveKernel kernel =
            posterior_predictive(model, prior, x, static_cast<int>(y.size()));
        return kernel.log_predictive(y);
    } catch (const std::invalid_argument&) {
        if (model.conjugacy != "bernoulli-beta") throw;
        const BernoulliMarginal marg = bernoulli_marginal_quadrature(prior);
        int sx = success_count(x), sy = success_count(y);
        return marg.log_seq_prob(sx + sy,
                                 static_cast<int>(x.size() + y.size())) -
               marg.log_seq_prob(sx, static_cast<int>(x.size()));
    }
}

inline double mc_statistic(const ModelFamily& model, const PriorSpec& prior,
                           const ParameterPoint& theta, int n, int m, RandomStream& rs) {
    SeededStream draw{rs.next_u64(), rs.next_u64()};
    const std::vector<Observation> x = model.sampler(theta, n, draw.child(0));
    const std::vector<Observation> y = model.sampler(theta, m, draw.child(1));
    double log_true = 0.0;
    for (const Observation& yj : y) log_true += model.log_f(yj, theta);
    return log_true - log_predictive_value(model, prior, x, y);
}

}  // namespace detail

/// d_{Y|X}(theta, pi): exact where a sufficient-count or conjugate closed
/// form exists, seeded Monte Carlo otherwise.
inline RegretValue posterior_predictive_regret(const ModelFamily& model,
                                               const PriorSpec& prior,
                                               const ParameterPoint& theta, int n, int m,
                                               const RegretOptions& options = {}) {
    if (m < 1) throw std::invalid_argument("posterior_predictive_regret: need m >= 1");
    if (!options.force_mc) {
        if (model.conjugacy == "bernoulli-beta") {
            // Boundary theta is a legitimate exact path here: the data are
            // deterministic and the sums collapse.
            const BernoulliMarginal marg = detail::bernoulli_marginal(prior);
            return {bernoulli_posterior_regret(theta[0], marg, n, m), 0.0, true};
        }
        if (model.conjugacy == "normal-mean") {
            if (auto np = detail::normal_mean_params(prior)) {
                require_interior(model, theta);
                const double v = std::isinf(np->second)
                                     ? normal_mean_posterior_regret_flat(n, m)
                                     : normal_mean_posterior_regret(theta[0], np->first,
                                                                    np->second * np->second,
                                                                    n, m);
                return {v, 0.0, true};
            }
        }
        if (model.conjugacy == "normal-ms") {
            if (auto a = detail::power_sigma_exponent(prior)) {
                require_interior(model, theta);
                if (!normal_ms_regret_defined(n, *a))
                    return {std::numeric_limits<double>::infinity(), 0.0, true, true,
                            "marginal not finite: needs n >= 2 and n + a > 2"};
                return {normal_ms_posterior_regret(*a, n, m), 0.0, true};
            }
        }
    }
    require_interior(model, theta);
    const MonteCarloEstimate est =
        mc_mean(options.stream, options.replicates, [&](RandomStream& rs) {
            return detail::mc_statistic(model, prior, theta, n, m, rs);
        });
    return {est.mean, est.standard_error, false};
}

/// L_{Y|X}(theta, pi) = d_{Y|X}(theta, pi) - d_{Y|X}(theta, pi^J).
inline RegretValue predictive_loss_finite(const ModelFamily& model,
                                          const PriorSpec& prior,
                                          const ParameterPoint& theta, int n, int m,
                                          const RegretOptions& options = {}) {
    const RegretValue d_pi = posterior_predictive_regret(model, prior, theta, n, m, options);
    const RegretValue d_j =
        posterior_predictive_regret(model, jeffreys(model), theta, n, m, options);
    RegretValue out;
    out.value = d_pi.value - d_j.value;
    out.standard_error = std::sqrt(d_pi.standard_error * d_pi.standard_error +
                                   d_j.standard_error * d_j.standard_error);
    out.exact = d_pi.exact && d_j.exact;
    out.diverged = d_pi.diverged || d_j.diverged;
    return out;
}

/// d_X(theta, pi): prior predictive (Clarke-Barron) regret. For improper
/// priors the value depends on the declared normalization of log_pi.
inline RegretValue prior_predictive_regret(const ModelFamily& model,
                                           const PriorSpec& prior,
                                           const ParameterPoint& theta, int n) {
    if (n == 0) return {0.0, 0.0, true};
    if (model.conjugacy == "bernoulli-beta") {
        const BernoulliMarginal marg = detail::bernoulli_marginal(prior);
        if (!marg.normalized)
            return {std::numeric_limits<double>::infinity(), 0.0, true, true,
                    "improper prior without declared normalization"};
        return {bernoulli_prior_regret(theta[0], marg, n), 0.0, true};
    }
    require_interior(model, theta);
    if (model.conjugacy == "normal-mean") {
        if (auto np = detail::normal_mean_params(prior)) {
            if (std::isinf(np->second)) {
                // Flat density normalized as the constant exp(log_pi).
                const double log_const = prior.log_pi(theta);
                return {normal_mean_prior_regret_flat(n) - log_const, 0.0, true};
            }
            return {normal_mean_prior_regret(theta[0], np->first,
                                             np->second * np->second, n),
                    0.0, true};
        }
    }
    if (model.conjugacy == "normal-ms") {
        if (auto a = detail::power_sigma_exponent(prior)) {
            if (!normal_ms_regret_defined(n, *a))
                return {std::numeric_limits<double>::infinity(), 0.0, true, true,
                        "marginal not finite: needs n >= 2 and n + a > 2"};
            const double log_const = detail::power_sigma_log_const(prior, *a);
            return {normal_ms_prior_regret(theta[1], *a, log_const, n), 0.0, true};
        }
    }
    throw std::invalid_argument("prior_predictive_regret: no exact path for (" +
                                model.name + ", " + prior.name + ")");
}

/// d_{X,Y}(theta, pi): joint-regret form of the chain rule, i.e. the prior
/// predictive regret of the extended sample of size n + m.
inline RegretValue joint_predictive_regret(const ModelFamily& model,
                                           const PriorSpec& prior,
                                           const ParameterPoint& theta, int n, int m) {
    return prior_predictive_regret(model, prior, theta, n + m);
}

struct ClarkeBarronResidual {
    double first_order = 0.0;   // d_X minus the leading-term expansion
    double second_order = 0.0;  // n * (first_order(pi) - first_order(pi^J)) + L/2
};

/// Residuals of the prior predictive regret against its expansion. The
/// second-order form subtracts the Jeffreys residual so the model-dependent
/// (prior-free) term cancels.
inline ClarkeBarronResidual clarke_barron_residual(const ModelFamily& model,
                                                   const PriorSpec& prior,
                                                   const ParameterPoint& theta, int n) {
    require_interior(model, theta);
    const PriorSpec jp = jeffreys(model);
    auto first = [&](const PriorSpec& p) {
        const RegretValue d = prior_predictive_regret(model, p, theta, n);
        if (d.diverged) throw std::domain_error("clarke_barron_residual: divergent d_X");
        double log_density = p.log_pi(theta);
        if (p.log_normalizer) log_density -= *p.log_normalizer;
        const double lead =
            0.5 * model.dim * std::log(n / (2.0 * std::numbers::pi * std::numbers::e)) +
            0.5 * std::log(fisher_info(model, theta).determinant()) - log_density;
        return d.value - lead;
    };
    ClarkeBarronResidual out;
    out.first_order = first(prior);
    const double loss = predictive_loss(model, prior, theta);
    out.second_order = n * (out.first_order - first(jp)) + 0.5 * loss;
    return out;
}

struct RegretPoint {
    int n = 0;
    int m = 0;
    double c_n = 0.0;  // 2 n (n + m) / m
    double d_post = 0.0;
    double loss_post = 0.0;    // L_{Y|X}
    double scaled_loss = 0.0;  // c_n * L_{Y|X}
};

inline double c_n_factor(int n, int m) {
    return 2.0 * n * (n + static_cast<double>(m)) / m;
}

struct ConvergenceRow {
    RegretPoint point;
    double limit = 0.0;
    double abs_error = 0.0;
};

/// c_n-normalized finite-sample loss along a schedule of (n, m_n), with the
/// asymptotic loss as the comparison column.
inline std::vector<ConvergenceRow> convergence_table(
    const ModelFamily& model, const PriorSpec& prior, const ParameterPoint& theta,
    const std::vector<std::pair<int, int>>& schedule,
    std::optional<double> limit = std::nullopt) {
    const double target = limit ? *limit : predictive_loss(model, prior, theta);
    std::vector<ConvergenceRow> rows;
    rows.reserve(schedule.size());
    for (auto [n, m] : schedule) {
        const RegretValue d = posterior_predictive_regret(model, prior, theta, n, m);
        const RegretValue loss = predictive_loss_finite(model, prior, theta, n, m);
        RegretPoint p{n, m, c_n_factor(n, m), d.value, loss.value,
                      c_n_factor(n, m) * loss.value};
        rows.push_back({p, target, std::abs(p.scaled_loss - target)});
    }
    return rows;
}

struct ScoringRuleEntry {
    std::string name;
    double expected_regret = 0.0;  // int d_{Y|X}(theta, pi) dtau(theta)
};

struct ScoringRuleReport {
    std::vector<ScoringRuleEntry> ranking;  // sorted, smallest first
    bool tau_is_minimal = false;
    double decomposition_residual = 0.0;  // (2.3) with pi = first candidate
};

/// Proper-scoring-rule check: the expected posterior predictive regret under
/// a finitely supported tau is minimized by predicting with tau itself.
inline ScoringRuleReport scoring_rule_check(const ModelFamily& model,
                                            const DiscretePrior& tau,
                                            const std::vector<PriorSpec>& candidates,
                                            int n, int m) {
    if (model.conjugacy != "bernoulli-beta")
        throw std::invalid_argument("scoring_rule_check: exact path needs bernoulli");
    tau.validate();
    std::vector<double> atoms(tau.atoms.size());
    for (std::size_t i = 0; i < tau.atoms.size(); ++i) atoms[i] = tau.atoms[i][0];
    const BernoulliMarginal tau_marg = bernoulli_marginal_atoms(atoms, tau.weights);

    auto expected_regret = [&](const BernoulliMarginal& pi) {
        double s = 0.0;
        for (std::size_t i = 0; i < atoms.size(); ++i)
            s += tau.weights[i] * bernoulli_posterior_regret(atoms[i], pi, n, m);
        return s;
    };

    ScoringRuleReport report;
    report.ranking.push_back({"tau", expected_regret(tau_marg)});
    for (const PriorSpec& c : candidates)
        report.ranking.push_back({c.name, expected_regret(detail::bernoulli_marginal(c))});
    std::stable_sort(report.ranking.begin(), report.ranking.end(),
                     [](const ScoringRuleEntry& x, const ScoringRuleEntry& y) {
                         return x.expected_regret < y.expected_regret;
                     });
    report.tau_is_minimal = report.ranking.front().name == "tau";

    if (!candidates.empty()) {
        const BernoulliMarginal pi = detail::bernoulli_marginal(candidates.front());
        const double lhs = expected_regret(pi);
        const double mid = bernoulli_posterior_regret(tau_marg, pi, n, m);
        const double self = expected_regret(tau_marg);
        report.decomposition_residual = lhs - mid - self;
    }
    return report;
}

}  // namespace predregret
