// Command-line front end. Configuration comes from a JSON file and/or flags
// (flags win); every report embeds the resolved configuration.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "predregret/cli/run.hpp"

namespace {

using predregret::ExperimentConfig;

std::vector<int> parse_n_range(const std::string& text) {
    // "32:512" doubles from 32 to 512; "32,64,100" is an explicit list.
    std::vector<int> out;
    if (text.find(':') != std::string::npos) {
        const auto sep = text.find(':');
        int lo = std::stoi(text.substr(0, sep));
        const int hi = std::stoi(text.substr(sep + 1));
        if (lo < 1 || hi < lo) throw CLI::ValidationError("--n", "bad range");
        for (int n = lo; n <= hi; n *= 2) out.push_back(n);
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    return out;
}

void load_json_config(const std::string& path, ExperimentConfig& config) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    nlohmann::json j;
    in >> j;
    for (const auto& [key, value] : j.items()) {
        if (key == "command") config.command = value.get<std::string>();
        else if (key == "model") config.model = value.get<std::string>();
        else if (key == "prior") config.prior = value.get<std::string>();
        else if (key == "family") config.family = value.get<std::string>();
        else if (key == "a_values") config.a_values = value.get<std::vector<double>>();
        else if (key == "n_values") config.n_values = value.get<std::vector<int>>();
        else if (key == "m_rule") config.m_rule = value.get<std::string>();
        else if (key == "k_values") config.k_values = value.get<std::vector<double>>();
        else if (key == "theta") config.theta = value.get<std::vector<double>>();
        else if (key == "grid_points") config.grid_points = value.get<int>();
        else if (key == "sequence") config.sequence = value.get<std::string>();
        else if (key == "h_a") config.h_a = value.get<double>();
        else if (key == "h_b") config.h_b = value.get<double>();
        else if (key == "example") config.example = value.get<std::string>();
        else if (key == "seed") config.seed = value.get<std::uint64_t>();
        else if (key == "output") config.output = value.get<std::string>();
        else if (key == "format") config.format = value.get<std::string>();
        else if (key == "design_csv") config.design_csv = value.get<std::string>();
        else throw CLI::ValidationError("--config", "unknown field '" + key + "'");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "predregret: predictive relative-entropy regret, asymptotic predictive "
        "loss and equalizer/minimax prior verification"};
    app.require_subcommand(1);

    ExperimentConfig config;
    if (const char* env_seed = std::getenv("PREDREGRET_SEED"))
        config.seed = std::strtoull(env_seed, nullptr, 10);

    std::string config_path, n_range, theta_csv, a_csv, k_csv;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file (flags override)");
        cmd->add_option("--model", config.model,
                        "bernoulli | normal-mean | normal-ms | linreg | mvn2");
        cmd->add_option("--prior", config.prior,
                        "prior mini-language, e.g. jeffreys, beta:1.5,1.5, flat, "
                        "power-sigma:1, exp-tilt:2, mvn-power:1, "
                        "tau-k:line-scale,4,4,4");
        cmd->add_option("--theta", theta_csv, "evaluation point, comma separated");
        cmd->add_option("--grid-points", config.grid_points, "grid points per dimension");
        cmd->add_option("--seed", config.seed, "master seed (default: PREDREGRET_SEED)");
        cmd->add_option("--output", config.output, "output path (default: stdout)");
        cmd->add_option("--format", config.format, "csv | json")
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("--design", config.design_csv,
                        "design matrix CSV for linreg (rows = observations)");
    };

    CLI::App* loss = app.add_subcommand("loss", "asymptotic predictive loss on a grid");
    add_common(loss);

    CLI::App* converge = app.add_subcommand(
        "converge", "c_n-normalized finite-sample loss against the asymptotic loss");
    add_common(converge);
    converge->add_option("--n", n_range, "sample sizes: lo:hi (doubling) or list");
    converge->add_option("--mrule", config.m_rule, "m_n rule: n | sqrt | <int>");

    CLI::App* equalizer =
        app.add_subcommand("equalizer", "constant-loss scan over a prior family");
    add_common(equalizer);
    equalizer->add_option("--family", config.family,
                          "beta-symmetric | power-sigma | mvn-power | exp-tilt");
    equalizer->add_option("--a", a_csv, "family parameters, comma separated");

    CLI::App* minimax = app.add_subcommand(
        "minimax", "compact-sequence certificate for an equalizer prior");
    add_common(minimax);
    minimax->add_option("--sequence", config.sequence,
                        "line-scale | halfline-shift | location-logscale | "
                        "regression-logscale | self");
    minimax->add_option("--k", k_csv, "sequence indices, comma separated");
    minimax->add_option("--h-a", config.h_a, "H-class beta shape a (> 3)");
    minimax->add_option("--h-b", config.h_b, "H-class beta shape b (> 3)");

    CLI::App* uclass = app.add_subcommand(
        "uclass", "finite-sample boundedness diagnostic over a near-boundary grid");
    add_common(uclass);
    uclass->add_option("--n", n_range, "sample sizes: lo:hi (doubling) or list");
    uclass->add_option("--mrule", config.m_rule, "m_n rule: n | sqrt | <int>");

    CLI::App* identity =
        app.add_subcommand("identity-checks", "chain-rule / decomposition / "
                                              "constant-shift verification suites");
    add_common(identity);

    CLI::App* reproduce =
        app.add_subcommand("reproduce", "one-command reproduction of a catalog case");
    add_common(reproduce);
    reproduce->add_option("--example", config.example, "5.1 | 6.1 | 6.2 | 6.3 | 6.4");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : predregret::kExitConfigError;
    }

    try {
        if (!config_path.empty()) load_json_config(config_path, config);
        auto parse_csv_doubles = [](const std::string& text) {
            std::vector<double> out;
            std::stringstream ss(text);
            std::string item;
            while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
            return out;
        };
        if (!theta_csv.empty()) config.theta = parse_csv_doubles(theta_csv);
        if (!a_csv.empty()) config.a_values = parse_csv_doubles(a_csv);
        if (!k_csv.empty()) config.k_values = parse_csv_doubles(k_csv);
        if (!n_range.empty()) config.n_values = parse_n_range(n_range);
        if (loss->parsed()) config.command = "loss";
        if (converge->parsed()) config.command = "converge";
        if (equalizer->parsed()) config.command = "equalizer";
        if (minimax->parsed()) config.command = "minimax";
        if (uclass->parsed()) config.command = "uclass";
        if (identity->parsed()) config.command = "identity-checks";
        if (reproduce->parsed()) config.command = "reproduce";
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return predregret::kExitConfigError;
    }

    return predregret::run(config, std::cout, std::cerr);
}
