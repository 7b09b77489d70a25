#pragma once

// Deterministic Gauss quadrature: Legendre and Hermite rules via
// Golub-Welsch, plus adaptive refinement on intervals and boxes.

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace predregret {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Thrown when adaptive refinement hits its node cap before the requested
/// tolerance; carries the last two estimates so callers can inspect them.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double coarse, double fine)
        : std::runtime_error(what), coarse_estimate(coarse), fine_estimate(fine) {}
    double coarse_estimate;
    double fine_estimate;
};

struct QuadratureRule {
    enum class Kind { Legendre, Hermite };
    Kind kind;
    Vector nodes;
    Vector weights;
};

namespace detail {

// Nodes/weights from the symmetric tridiagonal Jacobi matrix of the
// orthogonal-polynomial recurrence (Golub-Welsch).
inline QuadratureRule golub_welsch(QuadratureRule::Kind kind, int n, double mu0,
                                   const std::function<double(int)>& off_diag) {
    Matrix jacobi = Matrix::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) {
        const double b = off_diag(i + 1);
        jacobi(i, i + 1) = b;
        jacobi(i + 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(jacobi);
    QuadratureRule rule{kind, es.eigenvalues(), Vector(n)};
    for (int i = 0; i < n; ++i) {
        const double first = es.eigenvectors()(0, i);
        rule.weights[i] = mu0 * first * first;
    }
    return rule;
}

inline const QuadratureRule& cached_rule(QuadratureRule::Kind kind, int n) {
    static std::map<std::pair<int, int>, QuadratureRule> cache;
    auto key = std::make_pair(static_cast<int>(kind), n);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    QuadratureRule rule =
        kind == QuadratureRule::Kind::Legendre
            ? golub_welsch(kind, n, 2.0,
                           [](int k) {
                               return k / std::sqrt(4.0 * k * k - 1.0);
                           })
            : golub_welsch(kind, n, std::sqrt(std::numbers::pi),
                           [](int k) { return std::sqrt(0.5 * k); });
    return cache.emplace(key, std::move(rule)).first->second;
}

}  // namespace detail

/// n-point rule on (-1,1) with unit weight.
inline const QuadratureRule& gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
    return detail::cached_rule(QuadratureRule::Kind::Legendre, n);
}

/// n-point rule on R with weight exp(-x^2).
inline const QuadratureRule& gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: need n >= 1");
    return detail::cached_rule(QuadratureRule::Kind::Hermite, n);
}

template <class F>
double integrate(const QuadratureRule& rule, F&& f) {
    double s = 0.0;
    for (int i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(rule.nodes[i]);
    return s;
}

/// Integral of f over [a,b] with an n-point Legendre rule.
template <class F>
double integrate(const F& f, double a, double b, int n) {
    const QuadratureRule& rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < rule.nodes.size(); ++i)
        s += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * s;
}

/// E[f(Z)] for Z ~ N(mean, sd^2) by an n-point Hermite rule.
template <class F>
double expect_normal(const F& f, double mean, double sd, int n = 64) {
    const QuadratureRule& rule = gauss_hermite(n);
    const double scale = std::numbers::sqrt2 * sd;
    double s = 0.0;
    for (int i = 0; i < rule.nodes.size(); ++i)
        s += rule.weights[i] * f(mean + scale * rule.nodes[i]);
    return s / std::sqrt(std::numbers::pi);
}

inline constexpr long kQuadratureNodeCap = 1L << 14;

/// Legendre integration on [a,b], doubling the node count from 8 until two
/// successive estimates agree to rel_tol (plus a tiny absolute floor).
template <class F>
double adaptive_integrate(const F& f, double a, double b, double rel_tol = 1e-10,
                          long node_cap = kQuadratureNodeCap) {
    const double abs_floor = 1e-14;
    int n = 8;
    double prev = integrate(f, a, b, n);
    while (2 * n <= node_cap) {
        n *= 2;
        const double cur = integrate(f, a, b, n);
        if (std::abs(cur - prev) <= rel_tol * std::abs(cur) + abs_floor) return cur;
        prev = cur;
    }
    const double fine = integrate(f, a, b, n);
    throw QuadratureError("adaptive_integrate: node cap reached without convergence",
                          prev, fine);
}

using Box = std::vector<std::pair<double, double>>;

namespace detail {

template <class F>
double tensor_integrate(const F& f, const Box& box, const std::vector<int>& counts) {
    const int dim = static_cast<int>(box.size());
    std::vector<const QuadratureRule*> rules(dim);
    std::vector<double> mid(dim), half(dim);
    for (int d = 0; d < dim; ++d) {
        rules[d] = &gauss_legendre(counts[d]);
        mid[d] = 0.5 * (box[d].first + box[d].second);
        half[d] = 0.5 * (box[d].second - box[d].first);
    }
    Vector x(dim);
    std::vector<int> idx(dim, 0);
    double total = 0.0;
    while (true) {
        double w = 1.0;
        for (int d = 0; d < dim; ++d) {
            x[d] = mid[d] + half[d] * rules[d]->nodes[idx[d]];
            w *= half[d] * rules[d]->weights[idx[d]];
        }
        total += w * f(x);
        int d = 0;
        for (; d < dim; ++d) {
            if (++idx[d] < counts[d]) break;
            idx[d] = 0;
        }
        if (d == dim) break;
    }
    return total;
}

}  // namespace detail

/// Tensor-product Legendre integration over a box. Starts at 8 nodes per
/// dimension and doubles one dimension at a time (the one whose refinement
/// moves the estimate most) until all directions are stable to rel_tol,
/// keeping the total node count under node_cap.
template <class F>
double adaptive_integrate_box(const F& f, const Box& box, double rel_tol = 1e-10,
                              long node_cap = kQuadratureNodeCap) {
    if (box.empty()) throw std::invalid_argument("adaptive_integrate_box: empty box");
    if (box.size() == 1)
        return adaptive_integrate([&](double t) { return f(Vector::Constant(1, t)); },
                                  box[0].first, box[0].second, rel_tol, node_cap);
    const double abs_floor = 1e-14;
    const int dim = static_cast<int>(box.size());
    std::vector<int> counts(dim, 8);
    double current = detail::tensor_integrate(f, box, counts);
    while (true) {
        int worst = -1;
        double worst_delta = 0.0, worst_value = current;
        bool converged = true;
        for (int d = 0; d < dim; ++d) {
            std::vector<int> trial = counts;
            trial[d] *= 2;
            const double refined = detail::tensor_integrate(f, box, trial);
            const double delta = std::abs(refined - current);
            if (delta > rel_tol * std::abs(refined) + abs_floor) converged = false;
            if (delta >= worst_delta) {
                worst_delta = delta;
                worst = d;
                worst_value = refined;
            }
        }
        if (converged) return current;
        long total = 1;
        for (int d = 0; d < dim; ++d) total *= counts[d];
        if (2 * total > node_cap)
            throw QuadratureError(
                "adaptive_integrate_box: node cap reached without convergence", current,
                worst_value);
        counts[worst] *= 2;
        current = worst_value;
    }
}

}  // namespace predregret
