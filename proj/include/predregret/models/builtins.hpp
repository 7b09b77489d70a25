#pragma once

// Registered parametric families. Observations are vectors; scalar models
// use length-1 observations, the regression model packs (y, z_1..z_q) and
// the bivariate normal packs (x_1, x_2).

#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "predregret/models/model.hpp"

namespace predregret {

namespace detail {

inline double log_normal_pdf(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return -0.5 * std::log(2.0 * std::numbers::pi) - std::log(sd) - 0.5 * z * z;
}

}  // namespace detail

/// Bernoulli(theta) on {0,1}, Theta = (0,1).
inline ModelFamily bernoulli() {
    ModelFamily m;
    m.name = "bernoulli";
    m.dim = 1;
    m.obs.kind = SupportKind::DiscreteFinite;
    m.obs.dim = 1;
    m.obs.atoms = {Vector::Constant(1, 0.0), Vector::Constant(1, 1.0)};
    m.domain = {{0.0, 1.0}};
    m.default_box = {{0.02, 0.98}};
    m.log_f = [](const Observation& x, const ParameterPoint& t) {
        const double v = x[0];
        if (v != 0.0 && v != 1.0) return -std::numeric_limits<double>::infinity();
        return v * std::log(t[0]) + (1.0 - v) * std::log1p(-t[0]);
    };
    m.sampler = [](const ParameterPoint& t, int count, SeededStream s) {
        RandomStream rs(s);
        std::vector<Observation> out(count);
        for (int i = 0; i < count; ++i)
            out[i] = Vector::Constant(1, rs.bernoulli(t[0]) ? 1.0 : 0.0);
        return out;
    };
    m.fisher_closed = [](const ParameterPoint& t) {
        return Matrix::Constant(1, 1, 1.0 / (t[0] * (1.0 - t[0])));
    };
    m.jeffreys_grad = [](const ParameterPoint& t) {
        return Vector::Constant(1, -0.5 / t[0] + 0.5 / (1.0 - t[0]));
    };
    m.jeffreys_hess = [](const ParameterPoint& t) {
        return Matrix::Constant(1, 1, 0.5 / (t[0] * t[0]) +
                                          0.5 / ((1.0 - t[0]) * (1.0 - t[0])));
    };
    m.conjugacy = "bernoulli-beta";
    return m;
}

/// N(theta, 1) with unknown mean, Theta = R.
inline ModelFamily normal_mean() {
    ModelFamily m;
    m.name = "normal-mean";
    m.dim = 1;
    m.obs.kind = SupportKind::RealLine;
    m.obs.dim = 1;
    m.obs.gauss_hint = [](const ParameterPoint& t, Vector& c, Matrix& a) {
        c = Vector::Constant(1, t[0]);
        a = Matrix::Constant(1, 1, 1.0);
    };
    m.domain = {{}};
    m.default_box = {{-3.0, 3.0}};
    m.log_f = [](const Observation& x, const ParameterPoint& t) {
        return detail::log_normal_pdf(x[0], t[0], 1.0);
    };
    m.sampler = [](const ParameterPoint& t, int count, SeededStream s) {
        RandomStream rs(s);
        std::vector<Observation> out(count);
        for (int i = 0; i < count; ++i) out[i] = Vector::Constant(1, t[0] + rs.normal());
        return out;
    };
    m.fisher_closed = [](const ParameterPoint&) { return Matrix::Constant(1, 1, 1.0); };
    m.jeffreys_grad = [](const ParameterPoint&) { return Vector::Zero(1); };
    m.jeffreys_hess = [](const ParameterPoint&) { return Matrix::Zero(1, 1); };
    m.conjugacy = "normal-mean";
    return m;
}

/// N(beta, sigma^2) with theta = (beta, sigma), Theta = R x (0, inf).
inline ModelFamily normal_ms() {
    ModelFamily m;
    m.name = "normal-ms";
    m.dim = 2;
    m.obs.kind = SupportKind::RealLine;
    m.obs.dim = 1;
    m.obs.gauss_hint = [](const ParameterPoint& t, Vector& c, Matrix& a) {
        c = Vector::Constant(1, t[0]);
        a = Matrix::Constant(1, 1, t[1]);
    };
    m.domain = {{}, {0.0, std::numeric_limits<double>::infinity()}};
    m.default_box = {{-2.0, 2.0}, {0.5, 2.5}};
    m.log_f = [](const Observation& x, const ParameterPoint& t) {
        return detail::log_normal_pdf(x[0], t[0], t[1]);
    };
    m.sampler = [](const ParameterPoint& t, int count, SeededStream s) {
        RandomStream rs(s);
        std::vector<Observation> out(count);
        for (int i = 0; i < count; ++i)
            out[i] = Vector::Constant(1, t[0] + t[1] * rs.normal());
        return out;
    };
    // i(beta, sigma) = diag(sigma^-2, 2 sigma^-2)
    m.fisher_closed = [](const ParameterPoint& t) {
        Matrix info = Matrix::Zero(2, 2);
        info(0, 0) = 1.0 / (t[1] * t[1]);
        info(1, 1) = 2.0 / (t[1] * t[1]);
        return info;
    };
    // log pi^J = -2 log sigma + const
    m.jeffreys_grad = [](const ParameterPoint& t) {
        Vector g = Vector::Zero(2);
        g[1] = -2.0 / t[1];
        return g;
    };
    m.jeffreys_hess = [](const ParameterPoint& t) {
        Matrix h = Matrix::Zero(2, 2);
        h(1, 1) = 2.0 / (t[1] * t[1]);
        return h;
    };
    m.conjugacy = "normal-ms";
    return m;
}

/// Fixed-design normal linear regression: observation (y, z_1..z_q),
/// X_i ~ N(z_i' beta, sigma^2), theta = (beta_1..beta_q, sigma).
/// Fisher information is averaged over the design rows.
inline ModelFamily linear_regression(const Matrix& design) {
    if (design.rows() < 1 || design.cols() < 1)
        throw std::invalid_argument("linear_regression: empty design matrix");
    const int q = static_cast<int>(design.cols());
    auto rows = std::make_shared<Matrix>(design);
    Matrix vn = design.transpose() * design / static_cast<double>(design.rows());
    Eigen::SelfAdjointEigenSolver<Matrix> es(vn);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("linear_regression: design matrix is rank deficient");
    auto v = std::make_shared<Matrix>(vn);

    ModelFamily m;
    m.name = "linreg";
    m.dim = q + 1;
    m.obs.kind = SupportKind::RealLine;
    m.obs.dim = 1 + q;
    m.domain.assign(q, Interval{});
    m.domain.push_back({0.0, std::numeric_limits<double>::infinity()});
    m.default_box.assign(q, {-2.0, 2.0});
    m.default_box.push_back({0.5, 2.5});
    m.log_f = [q](const Observation& x, const ParameterPoint& t) {
        if (x.size() != 1 + q)
            throw std::domain_error("linreg: observation must pack (y, z_1..z_q)");
        const double mean = x.tail(q).dot(t.head(q));
        return detail::log_normal_pdf(x[0], mean, t[q]);
    };
    // Regressors are deterministic: average the y-expectation over design rows.
    m.expect_override = [rows, q](const ParameterPoint& t,
                                  const std::function<double(const Observation&)>& g) {
        double total = 0.0;
        for (int i = 0; i < rows->rows(); ++i) {
            Observation ob(1 + q);
            ob.tail(q) = rows->row(i).transpose();
            total += expect_normal(
                [&](double y) {
                    ob[0] = y;
                    return g(ob);
                },
                rows->row(i).dot(t.head(q)), t[q]);
        }
        return total / static_cast<double>(rows->rows());
    };
    m.sampler = [rows, q](const ParameterPoint& t, int count, SeededStream s) {
        RandomStream rs(s);
        std::vector<Observation> out(count);
        for (int i = 0; i < count; ++i) {
            const auto z = rows->row(i % rows->rows());
            Observation ob(1 + q);
            ob.tail(q) = z.transpose();
            ob[0] = z.dot(t.head(q)) + t[q] * rs.normal();
            out[i] = ob;
        }
        return out;
    };
    // i(theta) = diag(sigma^-2 V, 2 sigma^-2) with V = Z'Z / n
    m.fisher_closed = [v, q](const ParameterPoint& t) {
        const double s2 = t[q] * t[q];
        Matrix info = Matrix::Zero(q + 1, q + 1);
        info.topLeftCorner(q, q) = *v / s2;
        info(q, q) = 2.0 / s2;
        return info;
    };
    // |i| = 2 |V| sigma^{-2(q+1)}: log pi^J = -(q+1) log sigma + const
    m.jeffreys_grad = [q](const ParameterPoint& t) {
        Vector g = Vector::Zero(q + 1);
        g[q] = -(q + 1.0) / t[q];
        return g;
    };
    m.jeffreys_hess = [q](const ParameterPoint& t) {
        Matrix h = Matrix::Zero(q + 1, q + 1);
        h(q, q) = (q + 1.0) / (t[q] * t[q]);
        return h;
    };
    return m;
}

/// Default two-regressor design (intercept plus centered covariate).
inline Matrix default_regression_design(int rows = 8) {
    Matrix z(rows, 2);
    for (int i = 0; i < rows; ++i) {
        z(i, 0) = 1.0;
        z(i, 1) = i - 0.5 * (rows - 1);
    }
    return z;
}

/// Bivariate normal N_2(mu, Sigma) in the triangular-precision coordinates
/// gamma = (psi_1, psi_2, b_21, mu_1, mu_2) where Sigma^{-1} = T'T,
/// T = [[psi_1, 0], [psi_2 b_21, psi_2]], psi_i > 0.
inline ModelFamily mvn2() {
    ModelFamily m;
    m.name = "mvn2";
    m.dim = 5;
    m.obs.kind = SupportKind::RealVector;
    m.obs.dim = 2;
    auto tmatrix = [](const ParameterPoint& g) {
        Matrix t = Matrix::Zero(2, 2);
        t(0, 0) = g[0];
        t(1, 0) = g[1] * g[2];
        t(1, 1) = g[1];
        return t;
    };
    m.obs.gauss_hint = [tmatrix](const ParameterPoint& g, Vector& c, Matrix& a) {
        c = g.tail(2);
        // X = mu + T^{-1} Z, so T^{-1} is an exact transform for the hint.
        a = tmatrix(g).inverse();
    };
    const double inf = std::numeric_limits<double>::infinity();
    m.domain = {{0.0, inf}, {0.0, inf}, {}, {}, {}};
    m.default_box = {{0.6, 1.8}, {0.6, 1.8}, {-0.8, 0.8}, {-1.0, 1.0}, {-1.0, 1.0}};
    m.log_f = [tmatrix](const Observation& x, const ParameterPoint& g) {
        const Matrix t = tmatrix(g);
        const Vector u = t * (x - g.tail(2));
        return -std::log(2.0 * std::numbers::pi) + std::log(g[0]) + std::log(g[1]) -
               0.5 * u.squaredNorm();
    };
    m.sampler = [tmatrix](const ParameterPoint& g, int count, SeededStream s) {
        RandomStream rs(s);
        const Matrix t = tmatrix(g);
        std::vector<Observation> out(count);
        for (int i = 0; i < count; ++i) {
            Vector z(2);
            z << rs.normal(), rs.normal();
            out[i] = g.tail(2) + t.triangularView<Eigen::Lower>().solve(z);
        }
        return out;
    };
    // Block diagonal: diag(2 psi_1^-2, 2 psi_2^-2, psi_2^2 Sigma_11, Sigma^-1)
    // with Sigma_11 = psi_1^-2.
    m.fisher_closed = [tmatrix](const ParameterPoint& g) {
        Matrix info = Matrix::Zero(5, 5);
        info(0, 0) = 2.0 / (g[0] * g[0]);
        info(1, 1) = 2.0 / (g[1] * g[1]);
        info(2, 2) = g[1] * g[1] / (g[0] * g[0]);
        const Matrix t = tmatrix(g);
        info.bottomRightCorner(2, 2) = t.transpose() * t;
        return info;
    };
    // |i(gamma)| = 4 psi_1^-2 psi_2^2: log pi^J = -log psi_1 + log psi_2 + const
    m.jeffreys_grad = [](const ParameterPoint& g) {
        Vector grad = Vector::Zero(5);
        grad[0] = -1.0 / g[0];
        grad[1] = 1.0 / g[1];
        return grad;
    };
    m.jeffreys_hess = [](const ParameterPoint& g) {
        Matrix h = Matrix::Zero(5, 5);
        h(0, 0) = 1.0 / (g[0] * g[0]);
        h(1, 1) = -1.0 / (g[1] * g[1]);
        return h;
    };
    return m;
}

/// Look up a registered family by its CLI name.
inline ModelFamily make_model(const std::string& name,
                              const Matrix* design = nullptr) {
    if (name == "bernoulli") return bernoulli();
    if (name == "normal-mean") return normal_mean();
    if (name == "normal-ms") return normal_ms();
    if (name == "linreg")
        return linear_regression(design ? *design : default_regression_design());
    if (name == "mvn2") return mvn2();
    throw std::invalid_argument("unknown model '" + name +
                                "' (expected bernoulli, normal-mean, normal-ms, "
                                "linreg or mvn2)");
}

}  // namespace predregret
