// Command-line runner for the reduction-dynamics scenario suite.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "redsim/scenarios.hpp"

using redsim::scenarios::ScenarioFile;

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::string> output;
    std::optional<std::string> forced;
    std::vector<std::string> params; // key=value JSON fragments
};

int run(const std::string& name, const CommonFlags& flags) {
    ScenarioFile file;
    file.scenario = name;

    if (!flags.config_path.empty()) {
        std::ifstream is(flags.config_path);
        if (!is) {
            std::cerr << "error: cannot read config file " << flags.config_path << '\n';
            return redsim::scenarios::kConfigError;
        }
        std::stringstream buf;
        buf << is.rdbuf();
        try {
            file = redsim::scenarios::parse_scenario_file(buf.str());
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return redsim::scenarios::kConfigError;
        }
        if (file.scenario != name && !name.empty()) {
            std::cerr << "error: config file names scenario '" << file.scenario
                      << "' but the subcommand is '" << name << "'\n";
            return redsim::scenarios::kConfigError;
        }
    }

    if (flags.seed) file.seed = flags.seed;
    if (flags.trials) file.trials = *flags.trials;
    if (flags.output) file.output = *flags.output;

    nlohmann::json params = nlohmann::json::parse(file.params_json);
    if (flags.forced) {
        nlohmann::json triple = nlohmann::json::array();
        std::stringstream ss(*flags.forced);
        std::string item;
        while (std::getline(ss, item, ',')) triple.push_back(std::stoi(item));
        params["forced"] = triple;
    }
    for (const auto& kv : flags.params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::cerr << "error: --param expects key=value, got '" << kv << "'\n";
            return redsim::scenarios::kConfigError;
        }
        const std::string key = kv.substr(0, eq);
        const std::string value = kv.substr(eq + 1);
        try {
            params[key] = nlohmann::json::parse(value);
        } catch (...) {
            params[key] = value; // bare strings are fine
        }
    }
    file.params_json = params.dump();

    const auto result = redsim::scenarios::run_scenario(file);
    if (result.exit_code != redsim::scenarios::kOk) {
        std::cerr << "error: " << result.message << '\n';
    } else if (!result.trace.summary_json.empty()) {
        std::cout << result.trace.summary_json << '\n';
    }
    return result.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"redsim — stochastic state reduction and nonlocal measurement scenarios"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string picked;
    for (const auto& name : redsim::scenarios::scenario_names()) {
        auto* sub = app.add_subcommand(name, "run the '" + name + "' scenario");
        sub->add_option("--config", flags.config_path, "scenario file (JSON)");
        sub->add_option("--seed", flags.seed, "random seed (required for stochastic runs)");
        sub->add_option("--trials", flags.trials, "number of trials / ensemble members");
        sub->add_option("--output", flags.output, "trace output: path or '-' for stdout");
        sub->add_option("--forced", flags.forced,
                        "forced right-wing outcomes, e.g. \"0,0,0\" (relativistic-t2)");
        sub->add_option("--param", flags.params, "extra scenario parameter as key=value")
            ->take_all();
        sub->callback([&picked, name] { picked = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : redsim::scenarios::kConfigError;
    }
    return run(picked, flags);
}
