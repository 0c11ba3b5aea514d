#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace wavemaps {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat key = value experiment configuration (diffable text format, `#`
/// comments). Field names double as config keys and sweep parameters.
struct ExperimentConfig {
    std::string experiment;
    int n_points = 256;
    int k = 2;
    double dt_ratio = 0.5;
    double T = 20.0;
    int save_every = 1;
    std::uint64_t seed = 20260808;
    std::string out_dir = ".";

    double damping_start = 0.0;
    double damping_length = 4.71238898038469; // 3 pi / 2
    double damping_amplitude = 1.0;
    double control_start = 0.0;
    double control_length = 6.283185307179586; // full circle

    double e0 = -1.0;          // initial energy (damp-decay, harmonic-detect)
    double epsilon = 0.05;     // drop size
    std::string perturb = "none"; // energy-drop initial perturbation: none|tilt|mode2|velocity
    double perturb_size = 0.0;    // H1 x L2 size of the perturbation

    std::vector<double> eps_schedule = {0.1, 0.1, 0.05, 0.025};
    double budget = 4000.0;
    double max_energy = 100.0;

    double theta_f = 1.5707963267948966; // radial tilt target, pi/2
    double energy_target = 0.1;
    double t_max = 200.0;
    double s = -1.0; // single-parameter override for nonuniform-decay
    std::vector<double> s_values = {0.0, 0.39269908169872414, 0.7853981633974483,
                                    1.1780972450961724, 1.3744467859455345,
                                    1.5707963267948966};

    int n_samples = 100;
    double half_width = 0.7853981633974483;      // pi/4 (small-time positive)
    double half_width_neg = 2.356194490192345;   // 3 pi/4 (small-time negative)
    double T_pos = 0.39269908169872414;          // pi/8
    double T_neg = 1.0;

    int m = 256;
    std::string family = "A"; // A | A2 | A3

    int degree_N = 1;      // s1-control winding / pipeline initial level
    double s1_amp = 0.3;   // final-state perturbation amplitude
    double s1_dT = 0.2;    // T = sharp_time + s1_dT
    bool expect_converged = true;

    /// Set a field by key (string value, parsed per field type). Unknown
    /// keys and malformed values raise ConfigError.
    void set(const std::string& key, const std::string& value);

    /// Full echo in a fixed order, as `cfg key = value` lines.
    std::vector<std::string> echo() const;

    /// Checks numeric fields against module preconditions; raises ConfigError.
    void validate() const;
};

/// Names of the experiments run_experiment understands.
const std::vector<std::string>& experiment_names();

ExperimentConfig load_config(const std::string& path);
void apply_overrides(ExperimentConfig& cfg, const std::vector<std::string>& key_value_pairs);

} // namespace wavemaps
