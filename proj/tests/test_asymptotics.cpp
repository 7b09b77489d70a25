#include <doctest.h>

#include <cmath>
#include <numbers>

#include "predregret/asymptotics/loss.hpp"
#include "predregret/asymptotics/regret.hpp"
#include "predregret/models/builtins.hpp"
#include "predregret/models/reparam.hpp"
#include "predregret/priors/parse.hpp"

using namespace predregret;

namespace {

ParameterPoint pt1(double x) { return Vector::Constant(1, x); }
ParameterPoint pt2(double x, double y) {
    ParameterPoint p(2);
    p << x, y;
    return p;
}

double bernoulli_loss_closed(double theta, double a) {
    return (a - 0.5) * (-4.0 * (a - 0.5) + (a - 1.5) / (theta * (1.0 - theta)));
}

}  // namespace

TEST_CASE("a_functional closed cases") {
    SUBCASE("location model: A = (rho')^2 + 2 rho''") {
        const ModelFamily nm = normal_mean();
        for (double c : {0.0, 1.0, -2.5}) {
            const PriorSpec tilt = exp_tilt_prior(c);
            for (double theta : {-1.0, 0.0, 2.0})
                CHECK(a_functional(nm, tilt, pt1(theta)) ==
                      doctest::Approx(c * c).epsilon(1e-8));
        }
        // A generic smooth prior: rho = -theta^2/2 gives A = theta^2 - 2.
        const PriorSpec gauss = normal_prior(0.0, 1.0);
        CHECK(a_functional(nm, gauss, pt1(0.7)) ==
              doctest::Approx(0.49 - 2.0).epsilon(1e-8));
    }
    SUBCASE("location/log-scale model: A(phi, pi^a) = (a-1)^2 / 2") {
        const ModelFamily phi = reparameterize(normal_ms(), log_scale_map(normal_ms()));
        for (double a : {0.0, 1.0, 2.0, 3.0}) {
            PriorSpec prior;  // log pi = -(a-1) lambda in the phi coordinates
            prior.name = "phi-power";
            prior.log_pi = [a](const ParameterPoint& p) { return -(a - 1.0) * p[1]; };
            CHECK(a_functional(phi, prior, pt2(0.3, -0.2)) ==
                  doctest::Approx(0.5 * (a - 1.0) * (a - 1.0)).epsilon(1e-7));
        }
    }
    SUBCASE("flat prior with constant information gives zero") {
        CHECK(a_functional(normal_mean(), flat_prior(1), pt1(0.4)) ==
              doctest::Approx(0.0));
    }
    SUBCASE("product and expanded routes agree") {
        struct Case {
            ModelFamily model;
            PriorSpec prior;
            ParameterPoint theta;
        };
        const std::vector<Case> cases = {
            {bernoulli(), beta_prior(2.0, 3.0), pt1(0.35)},
            {normal_ms(), power_sigma_prior(1.0, 2), pt2(0.5, 1.2)},
            {mvn2(), mvn_power_prior(1.0, 2),
             (Vector(5) << 1.1, 0.9, 0.2, -0.1, 0.3).finished()},
        };
        for (const Case& c : cases) {
            const double product = a_functional(c.model, c.prior, c.theta);
            const double expanded = a_functional_expanded(c.model, c.prior, c.theta);
            INFO(c.model.name);
            CHECK(product == doctest::Approx(expanded).epsilon(1e-6));
        }
    }
}

TEST_CASE("predictive loss") {
    SUBCASE("bernoulli beta(a,a) closed form") {
        const ModelFamily bern = bernoulli();
        for (double a : {0.5, 1.0, 1.5, 2.0}) {
            const PriorSpec prior = beta_prior(a, a);
            for (double theta = 0.05; theta < 0.96; theta += 0.09) {
                CHECK(predictive_loss(bern, prior, pt1(theta)) ==
                      doctest::Approx(bernoulli_loss_closed(theta, a))
                          .epsilon(1e-8)
                          .scale(1.0));
            }
        }
        CHECK(predictive_loss(bern, beta_prior(1.5, 1.5), pt1(0.3)) ==
              doctest::Approx(-4.0).epsilon(1e-9));
    }
    SUBCASE("jeffreys prior has identically zero loss") {
        for (const ModelFamily& model : {bernoulli(), normal_mean(), normal_ms()}) {
            const PriorSpec j = jeffreys(model);
            for (const ParameterPoint& theta : default_grid(model, 3))
                CHECK(std::abs(predictive_loss(model, j, theta)) < 1e-12);
        }
    }
    SUBCASE("additive constants in log pi do not move the loss") {
        PriorSpec base = beta_prior(2.0, 2.0);
        PriorSpec shifted = base;
        auto lp = base.log_pi;
        shifted.log_pi = [lp](const ParameterPoint& t) { return lp(t) + 41.5; };
        const double a = predictive_loss(bernoulli(), base, pt1(0.3));
        const double b = predictive_loss(bernoulli(), shifted, pt1(0.3));
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
}

TEST_CASE("mbar scalar") {
    CHECK(mbar_scalar(normal_mean(), pt1(0.3)) == doctest::Approx(0.0).epsilon(1e-8));
    // Exact two-point oracle: alpha111 = (1-2t)/sqrt(v), curvature = 0.
    auto oracle = [](double t) {
        const double v = t * (1.0 - t);
        const double a111 = (1.0 - 2.0 * t) / std::sqrt(v);
        return a111 * a111 / 12.0;
    };
    CHECK(mbar_scalar(bernoulli(), pt1(0.5)) == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(mbar_scalar(bernoulli(), pt1(0.3)) ==
          doctest::Approx(oracle(0.3)).epsilon(1e-6));
    CHECK(mbar_scalar(bernoulli(), pt1(0.3)) ==
          doctest::Approx(mbar_scalar(bernoulli(), pt1(0.7))).epsilon(1e-8));
    CHECK_THROWS_AS(mbar_scalar(normal_ms(), pt2(0.0, 1.0)), std::invalid_argument);
}

TEST_CASE("asymptotic regret integrals") {
    SUBCASE("d(tau, tau) = 0") {
        for (const std::string& text :
             {std::string("tau-k:line-scale,2"), std::string("tau-k:line-scale,8")}) {
            const PriorSpec tau = parse_prior(normal_mean(), text);
            CHECK(std::abs(asymptotic_regret(normal_mean(), tau, tau)) < 1e-10);
        }
        const PriorSpec tau2 = parse_prior(normal_ms(), "tau-k:location-logscale,2");
        const ModelFamily phi = reparameterize(normal_ms(), log_scale_map(normal_ms()));
        CHECK(std::abs(asymptotic_regret(phi, tau2, tau2)) < 1e-10);
    }
    SUBCASE("line-scale against the flat prior: alpha / k^2 exactly") {
        const HClassDensity h(4.0, 4.0);
        const double alpha = h_class_alpha(h);
        for (double k : {2.0, 4.0, 8.0, 16.0, 32.0}) {
            CompactPriorSequence seq;
            seq.construction = TauConstruction::LineScale;
            seq.h = h;
            seq.k = k;
            const PriorSpec tau = tau_k(seq);
            const double d = asymptotic_regret(normal_mean(), tau, flat_prior(1));
            CHECK(d == doctest::Approx(alpha / (k * k)).epsilon(1e-8));
        }
    }
    SUBCASE("location-logscale against the right Haar prior: below 3 alpha / (2k^2)") {
        const ModelFamily phi = reparameterize(normal_ms(), log_scale_map(normal_ms()));
        const double alpha = h_class_alpha(HClassDensity(4.0, 4.0));
        double prev = std::numeric_limits<double>::infinity();
        for (double k : {2.0, 4.0, 8.0}) {
            CompactPriorSequence seq;
            seq.construction = TauConstruction::LocationLogscale;
            seq.k = k;
            const PriorSpec tau = tau_k(seq);
            const double d = asymptotic_regret(phi, tau, flat_prior(2));
            CHECK(d <= 1.5 * alpha / (k * k));
            CHECK(d < prev);
            CHECK(d >= 0.0);
            prev = d;
        }
    }
    SUBCASE("zeta equals the regret against jeffreys") {
        const PriorSpec tau = parse_prior(normal_mean(), "tau-k:line-scale,4");
        const double alpha = h_class_alpha(HClassDensity(4.0, 4.0));
        const double zeta = predictive_information(normal_mean(), tau);
        CHECK(zeta == doctest::Approx(alpha / 16.0).epsilon(1e-8));
        CHECK(zeta ==
              doctest::Approx(asymptotic_regret(normal_mean(), tau, jeffreys(normal_mean())))
                  .epsilon(1e-12));
    }
    SUBCASE("information identity for the location/log-scale sequence") {
        // zeta(tau_k) = d(tau_k, pi0) + 1/2, exactly, for every k.
        const ModelFamily phi = reparameterize(normal_ms(), log_scale_map(normal_ms()));
        for (double k : {2.0, 4.0}) {
            CompactPriorSequence seq;
            seq.construction = TauConstruction::LocationLogscale;
            seq.k = k;
            const PriorSpec tau = tau_k(seq);
            const double d = asymptotic_regret(phi, tau, flat_prior(2));
            const double zeta = predictive_information(phi, tau);
            CHECK(zeta == doctest::Approx(d + 0.5).epsilon(1e-8));
        }
    }
    SUBCASE("support touching the boundary is rejected") {
        CompactPriorSequence seq;
        seq.construction = TauConstruction::LineScale;
        seq.k = 2.0;
        PriorSpec tau = tau_k(seq);
        tau.support = {{0.0, 1.0}};  // fake support touching Theta's edge
        CHECK_THROWS_AS(asymptotic_regret(bernoulli(), tau, flat_prior(1)),
                        std::domain_error);
    }
}

TEST_CASE("expected-loss bridge: int L dtau - int L(.,tau) dtau = d(tau, pi)") {
    const ModelFamily nm = normal_mean();
    const PriorSpec tau = parse_prior(nm, "tau-k:line-scale,3");
    const PriorSpec pi = exp_tilt_prior(0.8);
    const double lhs = expected_loss(nm, tau, pi) - expected_loss(nm, tau, tau);
    const double rhs = asymptotic_regret(nm, tau, pi);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
}

TEST_CASE("equalizer constancy of the known families") {
    SUBCASE("bernoulli beta(3/2,3/2): constant -4") {
        const LossSurface s =
            loss_surface(bernoulli(), beta_prior(1.5, 1.5), default_grid(bernoulli(), 19));
        CHECK(s.mean == doctest::Approx(-4.0).epsilon(1e-8));
        CHECK(s.max_abs_dev < 1e-6);
    }
    SUBCASE("normal-ms power priors are equalizers in both parameterizations") {
        for (double a : {0.0, 1.0, 2.0, 3.0}) {
            const double want = 0.5 * ((a - 1.0) * (a - 1.0) - 1.0);
            const LossSurface s = loss_surface(normal_ms(), power_sigma_prior(a, 2),
                                               default_grid(normal_ms(), 4));
            CHECK(s.mean == doctest::Approx(want).epsilon(1e-7));
            CHECK(s.max_abs_dev < 1e-6);
        }
    }
    SUBCASE("regression q=2: constant ((a-1)^2 - 4)/2") {
        const ModelFamily lr = linear_regression(default_regression_design());
        for (double a : {0.0, 1.0, 3.0}) {
            const double want = 0.5 * ((a - 1.0) * (a - 1.0) - 4.0);
            const LossSurface s =
                loss_surface(lr, power_sigma_prior(a, 3), default_grid(lr, 3));
            CHECK(s.mean == doctest::Approx(want).epsilon(1e-6));
            CHECK(s.max_abs_dev < 1e-6);
        }
    }
    SUBCASE("bivariate normal: constant (q/2)((a-1)^2 - 1)") {
        for (double a : {0.0, 1.0, 2.0}) {
            const double want = (a - 1.0) * (a - 1.0) - 1.0;
            const LossSurface s =
                loss_surface(mvn2(), mvn_power_prior(a, 2), default_grid(mvn2(), 2));
            CHECK(s.mean == doctest::Approx(want).epsilon(1e-6));
            CHECK(s.max_abs_dev < 1e-5);
        }
    }
}

TEST_CASE("loss is invariant under reparameterization") {
    SUBCASE("identity map") {
        ReparamMap id;
        id.name = "identity";
        id.to_theta = [](const ParameterPoint& t) { return t; };
        id.to_eta = [](const ParameterPoint& t) { return t; };
        id.jacobian = [](const ParameterPoint& t) {
            return Matrix(Matrix::Identity(t.size(), t.size()));
        };
        id.eta_domain = bernoulli().domain;
        id.eta_box = bernoulli().default_box;
        CHECK(invariance_check(bernoulli(), beta_prior(2, 2), id,
                               default_grid(bernoulli(), 7)) < 1e-10);
    }
    SUBCASE("sigma versus log sigma") {
        const double worst =
            invariance_check(normal_ms(), power_sigma_prior(2.5, 2),
                             log_scale_map(normal_ms()), default_grid(normal_ms(), 4));
        CHECK(worst < 1e-5);
    }
    SUBCASE("theta versus arcsine") {
        ReparamMap arcsine;
        arcsine.name = "arcsine";
        arcsine.to_theta = [](const ParameterPoint& e) {
            const double s = std::sin(e[0]);
            return ParameterPoint(Vector::Constant(1, s * s));
        };
        arcsine.to_eta = [](const ParameterPoint& t) {
            return ParameterPoint(Vector::Constant(1, std::asin(std::sqrt(t[0]))));
        };
        arcsine.jacobian = [](const ParameterPoint& e) {
            return Matrix(Matrix::Constant(1, 1, std::sin(2.0 * e[0])));
        };
        arcsine.eta_domain = {{0.0, 0.5 * std::numbers::pi}};
        arcsine.eta_box = {{0.15, 1.4}};
        const double worst = invariance_check(bernoulli(), beta_prior(1.0, 1.0), arcsine,
                                              default_grid(bernoulli(), 9));
        CHECK(worst < 1e-5);
    }
}
