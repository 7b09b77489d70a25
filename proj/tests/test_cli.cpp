#include <doctest.h>

#include <sstream>
#include <string>

#include "predregret/cli/run.hpp"

using namespace predregret;

namespace {

std::pair<int, std::string> run_to_string(const ExperimentConfig& config) {
    std::ostringstream out, err;
    const int rc = run(config, out, err);
    return {rc, out.str() + err.str()};
}

}  // namespace

TEST_CASE("loss command emits the grid with config header") {
    ExperimentConfig c;
    c.command = "loss";
    c.model = "bernoulli";
    c.prior = "beta:1.5,1.5";
    c.grid_points = 5;
    auto [rc, text] = run_to_string(c);
    CHECK(rc == kExitOk);
    CHECK(text.find("# command=loss") != std::string::npos);
    CHECK(text.find("# prior=beta:1.5,1.5") != std::string::npos);
    CHECK(text.find("theta1,loss") != std::string::npos);
    CHECK(text.find("-4") != std::string::npos);
}

TEST_CASE("identical config produces byte-identical output") {
    ExperimentConfig c;
    c.command = "converge";
    c.model = "bernoulli";
    c.prior = "beta:1.5,1.5";
    c.theta = {0.3};
    c.n_values = {32, 64};
    c.m_rule = "n";
    c.seed = 424242;
    const auto a = run_to_string(c);
    const auto b = run_to_string(c);
    CHECK(a.first == kExitOk);
    CHECK(a.second == b.second);
    CHECK(a.second.find("n,m,c_n,cnL,L_limit,abs_err") != std::string::npos);
}

TEST_CASE("json format mirrors the csv fields") {
    ExperimentConfig c;
    c.command = "equalizer";
    c.model = "normal-ms";
    c.family = "power-sigma";
    c.a_values = {0.0, 1.0, 2.0};
    c.grid_points = 3;
    c.format = "json";
    auto [rc, text] = run_to_string(c);
    CHECK(rc == kExitOk);
    const Json j = Json::parse(text);
    CHECK(j["config"]["command"] == "equalizer");
    CHECK(j["columns"][0] == "a");
    CHECK(j["rows"].size() == 3);
    CHECK(j["argmin_a"].get<double>() == doctest::Approx(1.0));
    CHECK(j["min_constant"].get<double>() == doctest::Approx(-0.5).epsilon(1e-6));
}

TEST_CASE("minimax command: verified certificate on normal-mean") {
    ExperimentConfig c;
    c.command = "minimax";
    c.model = "normal-mean";
    c.prior = "jeffreys";
    c.sequence = "line-scale";
    c.k_values = {2, 4, 8};
    c.format = "json";
    auto [rc, text] = run_to_string(c);
    CHECK(rc == kExitOk);
    const Json j = Json::parse(text);
    CHECK(j["certificate"]["verified"] == true);
    CHECK(j["certificate"]["k_values"].size() == 3);
    CHECK(j["certificate"]["d_values"].size() == 3);
    CHECK(j["certificate"]["bound_values"].size() == 3);
}

TEST_CASE("minimax command: refusal on the bivariate normal") {
    ExperimentConfig c;
    c.command = "minimax";
    c.model = "mvn2";
    c.prior = "mvn-power:1";
    c.sequence = "location-logscale";
    c.grid_points = 2;
    auto [rc, text] = run_to_string(c);
    CHECK(rc == kExitVerificationFailed);
    CHECK(text.find("not certifiable") != std::string::npos);
}

TEST_CASE("minimax command: non-equalizer prior is refused") {
    ExperimentConfig c;
    c.command = "minimax";
    c.model = "bernoulli";
    c.prior = "beta:2,2";
    c.sequence = "self";
    auto [rc, text] = run_to_string(c);
    CHECK(rc == kExitVerificationFailed);
    CHECK(text.find("not an equalizer") != std::string::npos);
}

TEST_CASE("uclass command classifies divergence") {
    ExperimentConfig c;
    c.command = "uclass";
    c.model = "bernoulli";
    c.prior = "beta:1.5,1.5";
    c.n_values = {50, 100, 200, 400};
    c.m_rule = "1";
    c.format = "json";
    auto [rc, text] = run_to_string(c);
    CHECK(rc == kExitOk);
    const Json j = Json::parse(text);
    CHECK(j["classification"] == "diverging");

    c.prior = "jeffreys";
    auto [rc2, text2] = run_to_string(c);
    CHECK(rc2 == kExitOk);
    CHECK(Json::parse(text2)["classification"] == "bounded");
}

TEST_CASE("identity-checks command passes") {
    ExperimentConfig c;
    c.command = "identity-checks";
    auto [rc, text] = run_to_string(c);
    CHECK(rc == kExitOk);
    CHECK(text.find("chain-rule") != std::string::npos);
    CHECK(text.find("constant-shift") != std::string::npos);
}

TEST_CASE("config errors exit with code 2") {
    ExperimentConfig c;
    c.command = "converge";
    c.model = "bernoulli";
    c.prior = "beta:1.5,1.5";
    // --theta missing
    auto [rc, text] = run_to_string(c);
    CHECK(rc == kExitConfigError);
    CHECK(text.find("theta") != std::string::npos);

    c.command = "nonsense";
    CHECK(run_to_string(c).first == kExitConfigError);

    c.command = "loss";
    c.prior = "beta:bad,1";
    CHECK(run_to_string(c).first == kExitConfigError);

    c.command = "reproduce";
    c.prior = "jeffreys";
    c.example = "9.9";
    CHECK(run_to_string(c).first == kExitConfigError);
}

TEST_CASE("reproduce catalog") {
    for (const std::string& example : {"5.1", "6.1", "6.2", "6.4"}) {
        ExperimentConfig c;
        c.command = "reproduce";
        c.example = example;
        INFO(example);
        auto [rc, text] = run_to_string(c);
        CHECK(rc == kExitOk);
        CHECK(!text.empty());
    }
}

TEST_CASE("converge command: doubling schedule toward the limit") {
    ExperimentConfig c;
    c.command = "converge";
    c.model = "bernoulli";
    c.prior = "beta:1.5,1.5";
    c.theta = {0.3};
    c.n_values = {32, 64, 128};
    c.m_rule = "n";
    c.format = "json";
    auto [rc, text] = run_to_string(c);
    CHECK(rc == kExitOk);
    const Json j = Json::parse(text);
    REQUIRE(j["rows"].size() == 3);
    // abs_err column shrinks down the schedule.
    const double e0 = std::stod(j["rows"][0][5].get<std::string>());
    const double e2 = std::stod(j["rows"][2][5].get<std::string>());
    CHECK(e2 < e0);
    CHECK(std::stod(j["rows"][0][4].get<std::string>()) ==
          doctest::Approx(-4.0).epsilon(1e-8));
}
