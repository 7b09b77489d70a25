#include <doctest.h>

#include <cmath>

#include "predregret/models/builtins.hpp"
#include "predregret/models/reparam.hpp"
#include "predregret/numerics/quadrature.hpp"
#include "predregret/priors/hclass.hpp"
#include "predregret/priors/jeffreys.hpp"
#include "predregret/priors/parse.hpp"
#include "predregret/priors/prior.hpp"
#include "predregret/priors/tau.hpp"

using namespace predregret;

namespace {

ParameterPoint pt1(double x) { return Vector::Constant(1, x); }

// Two-resolution composite Legendre oracle for int g'(u)^2 h(u) du.
double alpha_oracle(const HClassDensity& h, int panels) {
    double total = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double a = -1.0 + 2.0 * i / panels, b = -1.0 + 2.0 * (i + 1) / panels;
        total += integrate(
            [&](double u) { return h.g_prime(u) * h.g_prime(u) * h.h(u); }, a, b, 32);
    }
    return total;
}

}  // namespace

TEST_CASE("rho_derivatives closed forms and finite differences") {
    SUBCASE("exponential tilt has constant slope") {
        const PriorSpec p = exp_tilt_prior(1.7);
        const RhoDerivatives d = rho_derivatives(p, pt1(0.4));
        CHECK(d.grad[0] == doctest::Approx(1.7));
        CHECK(d.hess(0, 0) == doctest::Approx(0.0));
    }
    SUBCASE("flat prior") {
        const RhoDerivatives d = rho_derivatives(flat_prior(1), pt1(-2.0));
        CHECK(d.grad[0] == doctest::Approx(0.0));
        CHECK(d.hess(0, 0) == doctest::Approx(0.0));
    }
    SUBCASE("beta(3/2,3/2) slope at 0.3") {
        const RhoDerivatives d = rho_derivatives(beta_prior(1.5, 1.5), pt1(0.3));
        CHECK(d.grad[0] == doctest::Approx(0.5 * (1.0 / 0.3 - 1.0 / 0.7)).epsilon(1e-12));
        // Finite-difference oracle on the raw log density.
        PriorSpec fd_only = beta_prior(1.5, 1.5);
        fd_only.grad = nullptr;
        fd_only.hess = nullptr;
        const RhoDerivatives e = rho_derivatives(fd_only, pt1(0.3));
        CHECK(e.grad[0] == doctest::Approx(d.grad[0]).epsilon(1e-9));
        CHECK(e.hess(0, 0) == doctest::Approx(d.hess(0, 0)).epsilon(1e-8));
    }
    SUBCASE("finite differences match closed forms on an interior grid") {
        for (double theta : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            PriorSpec closed = beta_prior(2.0, 3.0);
            PriorSpec fd = closed;
            fd.grad = nullptr;
            fd.hess = nullptr;
            const RhoDerivatives a = rho_derivatives(closed, pt1(theta));
            const RhoDerivatives b = rho_derivatives(fd, pt1(theta));
            CHECK(std::abs(a.grad[0] - b.grad[0]) /
                      std::max(1.0, std::abs(a.grad[0])) < 1e-6);
            CHECK(std::abs(a.hess(0, 0) - b.hess(0, 0)) /
                      std::max(1.0, std::abs(a.hess(0, 0))) < 1e-6);
        }
    }
    SUBCASE("boundary and outside-support points are rejected") {
        CHECK_THROWS_AS(rho_derivatives(beta_prior(2, 2), pt1(0.0)), std::domain_error);
        CHECK_THROWS_AS(rho_derivatives(beta_prior(2, 2), pt1(1.2)), std::domain_error);
        CompactPriorSequence seq;
        seq.k = 2.0;
        CHECK_THROWS_AS(rho_derivatives(tau_k(seq), pt1(2.5)), std::domain_error);
    }
}

TEST_CASE("jeffreys priors") {
    SUBCASE("bernoulli: beta(1/2,1/2) up to an additive constant") {
        const PriorSpec j = jeffreys(bernoulli());
        CHECK(j.proper);
        const PriorSpec ref = beta_prior(0.5, 0.5);
        double first_diff = 0.0;
        bool first = true;
        for (double theta = 0.05; theta < 0.96; theta += 0.05) {
            const double diff = j.log_pi(pt1(theta)) - ref.log_pi(pt1(theta));
            if (first) {
                first_diff = diff;
                first = false;
            }
            CHECK(std::abs(diff - first_diff) < 1e-8);
        }
    }
    SUBCASE("normal-mean: constant density") {
        const PriorSpec j = jeffreys(normal_mean());
        CHECK(j.log_pi(pt1(0.0)) == doctest::Approx(j.log_pi(pt1(5.0))));
    }
    SUBCASE("normal-ms in log-scale coordinates: log pi = -lambda + const") {
        const ModelFamily phi = reparameterize(normal_ms(), log_scale_map(normal_ms()));
        const PriorSpec j = jeffreys(phi);
        ParameterPoint a(2), b(2);
        a << 0.3, -0.5;
        b << -1.0, 0.75;
        CHECK(j.log_pi(a) + a[1] == doctest::Approx(j.log_pi(b) + b[1]).epsilon(1e-9));
    }
    SUBCASE("mvn2 matches the a = 0 member of the power family") {
        const PriorSpec j = jeffreys(mvn2());
        const PriorSpec p0 = mvn_power_prior(0.0, 2);
        ParameterPoint g(5), g2(5);
        g << 1.2, 0.7, 0.3, 0.0, -0.4;
        g2 << 0.8, 1.5, -0.2, 0.6, 0.1;
        const double c1 = j.log_pi(g) - p0.log_pi(g);
        const double c2 = j.log_pi(g2) - p0.log_pi(g2);
        CHECK(c1 == doctest::Approx(c2).epsilon(1e-10));
    }
}

TEST_CASE("H-class densities") {
    SUBCASE("endpoint smoothness for a = b = 4") {
        const HClassDensity h(4.0, 4.0);
        auto h_second = [&](double u) {
            // h'' = h (g'' + g'^2), exact given the closed-form derivatives.
            const double gp = h.g_prime(u);
            return h.h(u) * (h.g_second(u) + gp * gp);
        };
        for (double u : {-(1.0 - 1e-4), 1.0 - 1e-4}) {
            CHECK(std::abs(h.h(u)) < 1e-6);
            const double h1 = central_diff_1([&](double t) { return h.h(t); }, u);
            CHECK(std::abs(h1) < 1e-6);
            // h'' vanishes only linearly in the distance to the endpoint
            // (h''(1-d) ~ 52.5 d for these shapes), so probe much closer in.
            CHECK(std::abs(h_second(u)) < 1e-2);
        }
        for (double u : {-(1.0 - 1e-9), 1.0 - 1e-9}) CHECK(std::abs(h_second(u)) < 1e-6);
    }
    SUBCASE("normalization and finite fisher information") {
        const HClassDensity h(4.0, 4.0);
        CHECK(adaptive_integrate([&](double u) { return h.h(u); }, -1.0, 1.0) ==
              doctest::Approx(1.0).epsilon(1e-10));
        const double alpha = h_class_alpha(h);
        CHECK(alpha == doctest::Approx(alpha_oracle(h, 64)).epsilon(1e-8));
        CHECK(alpha_oracle(h, 64) == doctest::Approx(alpha_oracle(h, 128)).epsilon(1e-8));
        // Beta(4,4) gives alpha = 21/2 in closed form.
        CHECK(alpha == doctest::Approx(10.5).epsilon(1e-9));
    }
    SUBCASE("symmetric h has odd g'") {
        const HClassDensity h(5.0, 5.0);
        CHECK(adaptive_integrate([&](double u) { return h.g_prime(u) * h.h(u); }, -1.0,
                                 1.0) == doctest::Approx(0.0).epsilon(1e-10));
    }
    SUBCASE("shapes at or below 3 are rejected") {
        CHECK_THROWS_AS(HClassDensity(3.0, 3.0), std::invalid_argument);
        CHECK_THROWS_AS(HClassDensity(4.0, 2.9), std::invalid_argument);
    }
}

TEST_CASE("tau_k constructions") {
    SUBCASE("line-scale k=2: support and slope") {
        CompactPriorSequence seq;
        seq.construction = TauConstruction::LineScale;
        seq.k = 2.0;
        const PriorSpec tau = tau_k(seq);
        CHECK(tau.support[0].first == doctest::Approx(-2.0));
        CHECK(tau.support[0].second == doctest::Approx(2.0));
        // mu'(theta) = g'(theta/k)/k
        const double theta = 0.6;
        CHECK(rho_derivatives(tau, pt1(theta)).grad[0] ==
              doctest::Approx(seq.h.g_prime(theta / 2.0) / 2.0).epsilon(1e-12));
    }
    SUBCASE("halfline-shift k=1: support [1,3]") {
        CompactPriorSequence seq;
        seq.construction = TauConstruction::HalflineShift;
        seq.k = 1.0;
        const PriorSpec tau = tau_k(seq);
        CHECK(tau.support[0].first == doctest::Approx(1.0));
        CHECK(tau.support[0].second == doctest::Approx(3.0));
    }
    SUBCASE("location-logscale k=1: box [-e,e] x [-1,1]") {
        CompactPriorSequence seq;
        seq.construction = TauConstruction::LocationLogscale;
        seq.k = 1.0;
        const PriorSpec tau = tau_k(seq);
        CHECK(tau.support[0].second == doctest::Approx(std::exp(1.0)));
        CHECK(tau.support[1].second == doctest::Approx(1.0));
    }
    SUBCASE("every construction integrates to one") {
        for (TauConstruction c :
             {TauConstruction::LineScale, TauConstruction::HalflineShift,
              TauConstruction::LocationLogscale}) {
            CompactPriorSequence seq;
            seq.construction = c;
            seq.k = 3.0;
            const PriorSpec tau = tau_k(seq);
            const double mass = adaptive_integrate_box(
                [&](const Vector& x) { return std::exp(tau.log_pi(x)); }, tau.support,
                1e-9);
            INFO(to_string(c));
            CHECK(std::abs(mass - 1.0) < 1e-6);
        }
    }
    SUBCASE("construction/model compatibility") {
        CompactPriorSequence seq;
        seq.construction = TauConstruction::LineScale;
        seq.k = 2.0;
        CHECK_NOTHROW(require_compatible(seq, normal_mean()));
        CHECK_THROWS_AS(require_compatible(seq, normal_ms()), std::invalid_argument);
        // line-scale support [-k,k] is not inside Theta = (0,1).
        CHECK_THROWS_AS(require_compatible(seq, bernoulli()), std::invalid_argument);
    }
}

TEST_CASE("prior mini-language") {
    const ModelFamily bern = bernoulli();
    CHECK(parse_prior(bern, "beta:1.5,1.5").family == "beta");
    CHECK(parse_prior(bern, "jeffreys").family == "jeffreys");
    CHECK(parse_prior(bern, "flat").family == "flat");
    CHECK(parse_prior(normal_ms(), "power-sigma:1").params.at("a") == 1.0);
    CHECK(parse_prior(normal_mean(), "exp-tilt:2").params.at("c") == 2.0);
    CHECK(parse_prior(mvn2(), "mvn-power:1").family == "mvn-power");
    const PriorSpec tau = parse_prior(normal_mean(), "tau-k:line-scale,2,4,4");
    CHECK(tau.support[0].second == doctest::Approx(2.0));
    CHECK_THROWS_AS(parse_prior(bern, "beta:1.5"), std::invalid_argument);
    CHECK_THROWS_AS(parse_prior(bern, "power-sigma:1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_prior(bern, "spike"), std::invalid_argument);
    CHECK_THROWS_AS(parse_prior(bern, "beta:1.5,oops"), std::invalid_argument);
}

TEST_CASE("improper priors stay constant-free downstream") {
    // Adding a constant to log_pi must not change rho derivatives.
    PriorSpec p = power_sigma_prior(1.0, 2);
    PriorSpec shifted = p;
    auto lp = p.log_pi;
    shifted.log_pi = [lp](const ParameterPoint& t) { return lp(t) + 123.0; };
    shifted.grad = nullptr;
    shifted.hess = nullptr;
    ParameterPoint theta(2);
    theta << 0.4, 1.3;
    const RhoDerivatives a = rho_derivatives(p, theta);
    const RhoDerivatives b = rho_derivatives(shifted, theta);
    CHECK(a.grad[1] == doctest::Approx(b.grad[1]).epsilon(1e-8));
    CHECK(a.hess(1, 1) == doctest::Approx(b.hess(1, 1)).epsilon(1e-7));
}
