#pragma once

#include "wavemaps/config.hpp"

namespace wavemaps {

struct RunResult {
    int status = 0; // 0 ok, 1 invariant violation
    std::vector<std::pair<std::string, std::string>> metrics;

    double num(const std::string& key) const;
    std::string str(const std::string& key) const;
};

/// Executes the named experiment, writing its artifacts (headed by the full
/// config echo) into cfg.out_dir. Raises ConfigError for invalid configs;
/// returns status 1 when a run violates its contract.
RunResult run_experiment(const ExperimentConfig& cfg);

/// Independent runs of the base config with `param` set to each value, in
/// parallel; writes an aggregated CSV (`sweep.csv`) plus a partial-failure
/// report into base.out_dir. Returns 0 on full success, 1 on any failure.
int run_sweep(const ExperimentConfig& base, const std::string& param,
              const std::vector<std::string>& values);

} // namespace wavemaps
