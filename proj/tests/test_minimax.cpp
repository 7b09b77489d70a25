#include <doctest.h>

#include <cmath>

#include "predregret/minimax/certificate.hpp"
#include "predregret/minimax/equalizer.hpp"
#include "predregret/minimax/uclass.hpp"
#include "predregret/models/builtins.hpp"
#include "predregret/priors/parse.hpp"

using namespace predregret;

TEST_CASE("equalizer scans") {
    SUBCASE("normal-ms power family: c(a) = ((a-1)^2 - 1)/2, min at a = 1") {
        const ModelFamily ms = normal_ms();
        const EqualizerReport r =
            equalizer_scan(ms, prior_family(ms, "power-sigma"), {0.0, 1.0, 2.0, 3.0},
                           default_grid(ms, 4));
        CHECK(r.found_equalizer);
        CHECK(r.argmin_a == doctest::Approx(1.0));
        CHECK(r.min_constant == doctest::Approx(-0.5).epsilon(1e-7));
        for (const EqualizerEntry& e : r.entries) {
            CHECK(e.equalizer);
            CHECK(e.mean_loss ==
                  doctest::Approx(0.5 * ((e.a - 1) * (e.a - 1) - 1)).epsilon(1e-6));
        }
    }
    SUBCASE("regression q=2: c(a) = ((a-1)^2 - 4)/2, min at a = 1") {
        const ModelFamily lr = linear_regression(default_regression_design());
        const EqualizerReport r = equalizer_scan(
            lr, prior_family(lr, "power-sigma"), {0.0, 1.0, 2.0, 3.0}, default_grid(lr, 3));
        CHECK(r.found_equalizer);
        CHECK(r.argmin_a == doctest::Approx(1.0));
        CHECK(r.min_constant == doctest::Approx(-2.0).epsilon(1e-6));
    }
    SUBCASE("bivariate normal power family: c(a) = (a-1)^2 - 1") {
        const ModelFamily m = mvn2();
        const EqualizerReport r = equalizer_scan(m, prior_family(m, "mvn-power"),
                                                 {0.0, 1.0, 2.0}, default_grid(m, 2));
        CHECK(r.found_equalizer);
        CHECK(r.argmin_a == doctest::Approx(1.0));
        CHECK(r.min_constant == doctest::Approx(-1.0).epsilon(1e-6));
    }
    SUBCASE("bernoulli symmetric betas: only a = 1/2 and a = 3/2 equalize") {
        const ModelFamily bern = bernoulli();
        const EqualizerReport r =
            equalizer_scan(bern, prior_family(bern, "beta-symmetric"),
                           {0.5, 1.0, 1.5, 2.0}, default_grid(bern, 19));
        REQUIRE(r.entries.size() == 4);
        CHECK(r.entries[0].equalizer);   // jeffreys, constant 0
        CHECK(!r.entries[1].equalizer);  // uniform: theta-dependent
        CHECK(r.entries[2].equalizer);   // beta(3/2,3/2), constant -4
        CHECK(!r.entries[3].equalizer);
        CHECK(r.entries[2].mean_loss == doctest::Approx(-4.0).epsilon(1e-8));
        CHECK(r.argmin_a == doctest::Approx(1.5));
    }
    SUBCASE("jeffreys is always an equalizer with zero constant") {
        for (const ModelFamily& model :
             {bernoulli(), normal_mean(), normal_ms(),
              linear_regression(default_regression_design()), mvn2()}) {
            const LossSurface s =
                loss_surface(model, jeffreys(model), default_grid(model, model.dim <= 2 ? 5 : 2));
            INFO(model.name);
            CHECK(std::abs(s.mean) < 1e-8);
            CHECK(s.max_abs_dev < 1e-8);
        }
    }
}

TEST_CASE("minimax certificates") {
    SUBCASE("normal-mean line-scale: d = alpha/k^2 to quadrature accuracy") {
        const ModelFamily nm = normal_mean();
        const double alpha = h_class_alpha(HClassDensity(4, 4));
        const MinimaxCertificate cert =
            minimax_verify(nm, jeffreys(nm), 0.0, "line-scale", {2, 4, 8, 16, 32});
        CHECK(cert.verified);
        CHECK(cert.decaying);
        for (std::size_t i = 0; i < cert.k_values.size(); ++i) {
            const double k = cert.k_values[i];
            CHECK(cert.d_values[i] ==
                  doctest::Approx(alpha / (k * k)).epsilon(1e-8));
            CHECK(cert.bound_values[i] == doctest::Approx(alpha / (k * k)));
        }
        // d * k^2 stays bounded (1/k^2 decay rate).
        for (std::size_t i = 0; i < cert.k_values.size(); ++i)
            CHECK(cert.d_values[i] * cert.k_values[i] * cert.k_values[i] <
                  2.0 * alpha);
    }
    SUBCASE("location-logscale: decay under the 3 alpha/(2k^2) bound") {
        const ModelFamily ms = normal_ms();
        const PriorSpec haar = power_sigma_prior(1.0, 2);
        const MinimaxCertificate cert =
            minimax_verify(ms, haar, -0.5, "location-logscale", {2, 4, 8, 16});
        CHECK(cert.verified);
        CHECK(cert.bounds_hold);
        for (std::size_t i = 0; i < cert.k_values.size(); ++i)
            CHECK(cert.d_values[i] <=
                  1.5 * h_class_alpha(HClassDensity(4, 4)) /
                      (cert.k_values[i] * cert.k_values[i]) + 1e-10);
        // identity (information = regret - constant) holds at every k
        const auto rows = information_limit_check(cert);
        for (const InformationLimitRow& row : rows) CHECK(row.identity_gap < 1e-8);
        CHECK(rows.back().limit_gap < 0.05);
    }
    SUBCASE("regression-logscale q=2: decay toward zero, zeta -> 2") {
        const ModelFamily lr = linear_regression(default_regression_design());
        const PriorSpec haar = power_sigma_prior(1.0, 3);
        const MinimaxCertificate cert =
            minimax_verify(lr, haar, -2.0, "regression-logscale", {2, 4, 8});
        CHECK(cert.verified);
        const auto rows = information_limit_check(cert);
        for (const InformationLimitRow& row : rows) CHECK(row.identity_gap < 1e-8);
        CHECK(rows.back().zeta == doctest::Approx(2.0).epsilon(0.2));
    }
    SUBCASE("proper equalizer self-sequence (bernoulli jeffreys)") {
        const ModelFamily bern = bernoulli();
        const MinimaxCertificate cert =
            minimax_verify(bern, jeffreys(bern), 0.0, "self", {1, 2, 3});
        CHECK(cert.verified);
        for (double d : cert.d_values) CHECK(d == 0.0);
        for (double z : cert.zeta_values) CHECK(std::abs(z + 0.0) < 1e-12);
    }
    SUBCASE("incompatible constructions are rejected") {
        CHECK_THROWS_AS(minimax_verify(normal_ms(), power_sigma_prior(1.0, 2), -0.5,
                                       "line-scale", {2, 4}),
                        std::invalid_argument);
        CHECK_THROWS_AS(minimax_verify(bernoulli(), jeffreys(bernoulli()), 0.0,
                                       "line-scale", {2, 4}),
                        std::invalid_argument);
    }
    SUBCASE("a non-decaying sequence fails verification, not throws") {
        // Against a wildly tilted prior the line-scale distance grows in k.
        const ModelFamily nm = normal_mean();
        const MinimaxCertificate cert =
            minimax_verify(nm, exp_tilt_prior(2.0), 4.0, "line-scale", {2, 4, 8});
        CHECK(!cert.verified);
        CHECK(!cert.decaying);
    }
}

TEST_CASE("u-class diagnostic") {
    const ModelFamily bern = bernoulli();
    const std::vector<int> ns{50, 100, 200, 400};
    SUBCASE("beta(3/2,3/2) diverges linearly at the boundary") {
        std::vector<ParameterPoint> grid;
        for (double t : {1e-4, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0 - 1e-4})
            grid.push_back(Vector::Constant(1, t));
        const UClassReport r = u_class_diagnostic(bern, beta_prior(1.5, 1.5), grid, ns, "1");
        CHECK(r.diverging);
        // sup values grow roughly like 2n.
        CHECK(r.slope == doctest::Approx(2.0).epsilon(0.1));
    }
    SUBCASE("jeffreys prior is identically zero") {
        std::vector<ParameterPoint> grid;
        for (double t : {0.001, 0.5, 0.999}) grid.push_back(Vector::Constant(1, t));
        const UClassReport r = u_class_diagnostic(bern, jeffreys(bern), grid, ns, "1");
        CHECK(!r.diverging);
        for (const UClassRow& row : r.rows) CHECK(std::abs(row.sup_scaled_loss) < 1e-10);
    }
    SUBCASE("normal-ms right Haar prior is bounded and theta-free") {
        const ModelFamily ms = normal_ms();
        const UClassReport r = u_class_diagnostic(ms, power_sigma_prior(1.0, 2),
                                                  default_grid(ms, 3), ns, "1");
        CHECK(!r.diverging);
        CHECK(r.classification == "bounded");
    }
}
