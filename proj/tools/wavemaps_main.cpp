#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "wavemaps/experiments.hpp"

using namespace wavemaps;

int main(int argc, char** argv) {
    CLI::App app{"wavemaps: damped and controlled wave maps experiments on the circle"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::string sweep_param;
    std::string sweep_values;
    std::string chosen;

    for (const auto& name : experiment_names()) {
        CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("--config", config_path, "key = value config file");
        sub->add_option("--set", overrides, "override config fields (key=value)");
        sub->callback([&chosen, name]() { chosen = name; });
    }
    CLI::App* sweep = app.add_subcommand("sweep", "run one experiment over a parameter range");
    sweep->add_option("--config", config_path, "key = value config file")->required();
    sweep->add_option("--param", sweep_param, "config field to sweep")->required();
    sweep->add_option("--values", sweep_values, "comma-separated values")->required();
    sweep->add_option("--set", overrides, "override config fields (key=value)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
        apply_overrides(cfg, overrides);
        if (sweep->parsed()) {
            std::vector<std::string> values;
            std::stringstream ss(sweep_values);
            std::string item;
            while (std::getline(ss, item, ',')) values.push_back(item);
            return run_sweep(cfg, sweep_param, values);
        }
        cfg.experiment = chosen;
        RunResult r = run_experiment(cfg);
        for (const auto& [k, v] : r.metrics) std::cout << k << '=' << v << "\n";
        return r.status;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
