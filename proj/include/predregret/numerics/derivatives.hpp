#pragma once

// Central finite differences with optional Richardson extrapolation.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace predregret {

namespace fd {

inline double step_gradient(double x) {
    static const double h0 = std::cbrt(std::numeric_limits<double>::epsilon());
    return h0 * std::max(1.0, std::abs(x));
}

inline double step_hessian(double x) {
    static const double h0 = std::pow(std::numeric_limits<double>::epsilon(), 0.25);
    return h0 * std::max(1.0, std::abs(x));
}

// Wider step for the fourth-order stencil: balances its h^6 truncation
// against the eps/h^2 rounding floor.
inline double step_hessian_refined(double x) {
    static const double h0 =
        std::pow(std::numeric_limits<double>::epsilon(), 1.0 / 6.0);
    return h0 * std::max(1.0, std::abs(x));
}

inline void require_finite(double v, const char* where) {
    if (!std::isfinite(v)) throw std::domain_error(std::string(where) + ": non-finite stencil value");
}

}  // namespace fd

/// d/dx f at x; Richardson combines the h and h/2 central differences.
template <class F>
double central_diff_1(const F& f, double x, bool richardson = true) {
    const double h = fd::step_gradient(x);
    auto slope = [&](double hh) {
        const double a = f(x + hh), b = f(x - hh);
        fd::require_finite(a, "central_diff_1");
        fd::require_finite(b, "central_diff_1");
        return (a - b) / (2.0 * hh);
    };
    const double d1 = slope(h);
    if (!richardson) return d1;
    const double d2 = slope(0.5 * h);
    return (4.0 * d2 - d1) / 3.0;
}

/// d^2/dx^2 f at x. The refined path is the five-point fourth-order stencil
/// (equivalent to one Richardson step on the three-point rule).
template <class F>
double central_diff_2(const F& f, double x, bool richardson = true) {
    const double fx = f(x);
    fd::require_finite(fx, "central_diff_2");
    if (!richardson) {
        const double h = fd::step_hessian(x);
        const double a = f(x + h), b = f(x - h);
        fd::require_finite(a, "central_diff_2");
        fd::require_finite(b, "central_diff_2");
        return (a - 2.0 * fx + b) / (h * h);
    }
    const double h = fd::step_hessian_refined(x);
    const double p1 = f(x + h), m1 = f(x - h);
    const double p2 = f(x + 2.0 * h), m2 = f(x - 2.0 * h);
    fd::require_finite(p1, "central_diff_2");
    fd::require_finite(m1, "central_diff_2");
    fd::require_finite(p2, "central_diff_2");
    fd::require_finite(m2, "central_diff_2");
    return (-p2 + 16.0 * p1 - 30.0 * fx + 16.0 * m1 - m2) / (12.0 * h * h);
}

template <class F>
Eigen::VectorXd fd_gradient(const F& f, const Eigen::VectorXd& x, bool richardson = true) {
    Eigen::VectorXd g(x.size());
    for (int j = 0; j < x.size(); ++j) {
        Eigen::VectorXd p = x;
        g[j] = central_diff_1([&](double t) { p[j] = t; return f(p); }, x[j], richardson);
        p[j] = x[j];
    }
    return g;
}

/// Symmetrized central-difference Hessian.
template <class F>
Eigen::MatrixXd fd_hessian(const F& f, const Eigen::VectorXd& x, bool richardson = true) {
    const int p = static_cast<int>(x.size());
    Eigen::MatrixXd hess(p, p);
    for (int j = 0; j < p; ++j) {
        Eigen::VectorXd pt = x;
        hess(j, j) =
            central_diff_2([&](double t) { pt[j] = t; return f(pt); }, x[j], richardson);
        pt[j] = x[j];
    }
    for (int j = 0; j < p; ++j) {
        for (int k = j + 1; k < p; ++k) {
            auto mixed = [&](double hj, double hk) {
                Eigen::VectorXd pt = x;
                auto eval = [&](double sj, double sk) {
                    pt[j] = x[j] + sj * hj;
                    pt[k] = x[k] + sk * hk;
                    const double v = f(pt);
                    fd::require_finite(v, "fd_hessian");
                    return v;
                };
                return (eval(1, 1) - eval(1, -1) - eval(-1, 1) + eval(-1, -1)) /
                       (4.0 * hj * hk);
            };
            const double hj = richardson ? fd::step_hessian_refined(x[j])
                                         : fd::step_hessian(x[j]);
            const double hk = richardson ? fd::step_hessian_refined(x[k])
                                         : fd::step_hessian(x[k]);
            double d = mixed(hj, hk);
            if (richardson) d = (4.0 * mixed(0.5 * hj, 0.5 * hk) - d) / 3.0;
            hess(j, k) = hess(k, j) = d;
        }
    }
    return hess;
}

}  // namespace predregret
