#pragma once

// Smooth compactly supported densities on (-1,1) built from beta(a,b) with
// a,b > 3: h and its first two derivatives vanish at the endpoints and the
// Fisher information alpha = int g'(u)^2 h(u) du is finite (g = log h).

#include <cmath>
#include <stdexcept>

#include "predregret/numerics/quadrature.hpp"
#include "predregret/numerics/special.hpp"

namespace predregret {

class HClassDensity {
public:
    HClassDensity(double a, double b) : a_(a), b_(b) {
        if (!(a > 3.0) || !(b > 3.0))
            throw std::invalid_argument(
                "H-class density: beta shapes must satisfy a, b > 3 (endpoint "
                "smoothness fails otherwise)");
        log_norm_ = log_beta(a, b) + std::log(2.0) * (a + b - 1.0);
    }

    double a() const { return a_; }
    double b() const { return b_; }

    /// log h(u) on (-1,1).
    double log_h(double u) const {
        return (a_ - 1.0) * std::log1p(u) + (b_ - 1.0) * std::log1p(-u) - log_norm_;
    }

    double h(double u) const {
        if (u <= -1.0 || u >= 1.0) return 0.0;
        return std::exp(log_h(u));
    }

    /// g'(u) = d/du log h(u).
    double g_prime(double u) const {
        return (a_ - 1.0) / (1.0 + u) - (b_ - 1.0) / (1.0 - u);
    }

    double g_second(double u) const {
        return -(a_ - 1.0) / ((1.0 + u) * (1.0 + u)) -
               (b_ - 1.0) / ((1.0 - u) * (1.0 - u));
    }

private:
    double a_, b_, log_norm_;
};

/// alpha = int_{-1}^{1} g'(u)^2 h(u) du, by adaptive quadrature.
inline double h_class_alpha(const HClassDensity& h) {
    const double alpha = adaptive_integrate(
        [&](double u) {
            const double gp = h.g_prime(u);
            return gp * gp * h.h(u);
        },
        -1.0, 1.0, 1e-10);
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::runtime_error("h_class_alpha: integral not finite and positive");
    return alpha;
}

}  // namespace predregret
