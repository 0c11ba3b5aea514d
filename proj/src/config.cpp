#include "wavemaps/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "wavemaps/grid.hpp"
#include "wavemaps/serialize.hpp"

namespace wavemaps {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (...) {
        throw ConfigError("config field '" + key + "': expected a number, got '" + v + "'");
    }
}

long parse_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (...) {
        throw ConfigError("config field '" + key + "': expected an integer, got '" + v + "'");
    }
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(key, item));
    }
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += fmt_double(v[i]);
    }
    return s;
}

} // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {
        "damp-decay", "harmonic-detect", "energy-drop", "radial", "kg-control",
        "pipeline",   "s1-control",      "degree",      "nonuniform-decay", "small-time"};
    return names;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    if (key == "experiment") experiment = value;
    else if (key == "n_points") n_points = static_cast<int>(parse_int(key, value));
    else if (key == "k") k = static_cast<int>(parse_int(key, value));
    else if (key == "dt_ratio") dt_ratio = parse_double(key, value);
    else if (key == "T") T = parse_double(key, value);
    else if (key == "save_every") save_every = static_cast<int>(parse_int(key, value));
    else if (key == "seed") seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "out_dir") out_dir = value;
    else if (key == "damping_start") damping_start = parse_double(key, value);
    else if (key == "damping_length") damping_length = parse_double(key, value);
    else if (key == "damping_amplitude") damping_amplitude = parse_double(key, value);
    else if (key == "control_start") control_start = parse_double(key, value);
    else if (key == "control_length") control_length = parse_double(key, value);
    else if (key == "e0") e0 = parse_double(key, value);
    else if (key == "epsilon") epsilon = parse_double(key, value);
    else if (key == "perturb") perturb = value;
    else if (key == "perturb_size") perturb_size = parse_double(key, value);
    else if (key == "eps_schedule") eps_schedule = parse_list(key, value);
    else if (key == "budget") budget = parse_double(key, value);
    else if (key == "max_energy") max_energy = parse_double(key, value);
    else if (key == "theta_f") theta_f = parse_double(key, value);
    else if (key == "energy_target") energy_target = parse_double(key, value);
    else if (key == "t_max") t_max = parse_double(key, value);
    else if (key == "s") s = parse_double(key, value);
    else if (key == "s_values") s_values = parse_list(key, value);
    else if (key == "n_samples") n_samples = static_cast<int>(parse_int(key, value));
    else if (key == "half_width") half_width = parse_double(key, value);
    else if (key == "half_width_neg") half_width_neg = parse_double(key, value);
    else if (key == "T_pos") T_pos = parse_double(key, value);
    else if (key == "T_neg") T_neg = parse_double(key, value);
    else if (key == "m") m = static_cast<int>(parse_int(key, value));
    else if (key == "family") family = value;
    else if (key == "degree_N") degree_N = static_cast<int>(parse_int(key, value));
    else if (key == "s1_amp") s1_amp = parse_double(key, value);
    else if (key == "s1_dT") s1_dT = parse_double(key, value);
    else if (key == "expect_converged") expect_converged = parse_int(key, value) != 0;
    else throw ConfigError("unknown config field '" + key + "'");
}

std::vector<std::string> ExperimentConfig::echo() const {
    std::vector<std::string> out;
    auto add = [&](const std::string& k2, const std::string& v) {
        out.push_back("cfg " + k2 + " = " + v);
    };
    add("experiment", experiment);
    add("n_points", std::to_string(n_points));
    add("k", std::to_string(k));
    add("dt_ratio", fmt_double(dt_ratio));
    add("T", fmt_double(T));
    add("save_every", std::to_string(save_every));
    add("seed", std::to_string(seed));
    add("damping_start", fmt_double(damping_start));
    add("damping_length", fmt_double(damping_length));
    add("damping_amplitude", fmt_double(damping_amplitude));
    add("control_start", fmt_double(control_start));
    add("control_length", fmt_double(control_length));
    add("e0", fmt_double(e0));
    add("epsilon", fmt_double(epsilon));
    add("perturb", perturb);
    add("perturb_size", fmt_double(perturb_size));
    add("eps_schedule", join(eps_schedule));
    add("budget", fmt_double(budget));
    add("max_energy", fmt_double(max_energy));
    add("theta_f", fmt_double(theta_f));
    add("energy_target", fmt_double(energy_target));
    add("t_max", fmt_double(t_max));
    add("s", fmt_double(s));
    add("s_values", join(s_values));
    add("n_samples", std::to_string(n_samples));
    add("half_width", fmt_double(half_width));
    add("half_width_neg", fmt_double(half_width_neg));
    add("T_pos", fmt_double(T_pos));
    add("T_neg", fmt_double(T_neg));
    add("m", std::to_string(m));
    add("family", family);
    add("degree_N", std::to_string(degree_N));
    add("s1_amp", fmt_double(s1_amp));
    add("s1_dT", fmt_double(s1_dT));
    add("expect_converged", expect_converged ? "1" : "0");
    return out;
}

void ExperimentConfig::validate() const {
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), experiment) == names.end())
        throw ConfigError("unknown experiment name '" + experiment + "'");
    if (n_points < 8 || n_points % 2 != 0)
        throw ConfigError("n_points must be even and >= 8");
    if (k < 1) throw ConfigError("k must be >= 1");
    if (!(dt_ratio > 0.0 && dt_ratio <= defaults::cfl_ratio + 1e-12))
        throw ConfigError("dt_ratio must lie in (0, 0.5]");
    if (T <= 0.0) throw ConfigError("T must be > 0");
    if (save_every < 1) throw ConfigError("save_every must be >= 1");
    if (damping_length <= 0.0 || damping_length > two_pi)
        throw ConfigError("damping_length must lie in (0, 2pi]");
    if (damping_amplitude <= 0.0) throw ConfigError("damping_amplitude must be > 0");
    if (control_length <= 0.0 || control_length > two_pi)
        throw ConfigError("control_length must lie in (0, 2pi]");
    if (experiment == "energy-drop" || experiment == "pipeline") {
        if (!(epsilon > 0.0 && epsilon <= 0.25)) throw ConfigError("epsilon must lie in (0, 0.25]");
        for (double e : eps_schedule)
            if (!(e > 0.0 && e <= 0.25)) throw ConfigError("eps_schedule entries must lie in (0, 0.25]");
    }
    if (experiment == "energy-drop" &&
        !(perturb == "none" || perturb == "tilt" || perturb == "mode2" || perturb == "velocity"))
        throw ConfigError("perturb must be one of none|tilt|mode2|velocity");
    if (experiment == "radial" && !(theta_f > 0.0 && theta_f < std::numbers::pi))
        throw ConfigError("theta_f must lie in (0, pi)");
    if (experiment == "nonuniform-decay") {
        if (!(energy_target > 0.0 && energy_target < two_pi))
            throw ConfigError("energy_target must lie in (0, 2pi)");
        if (t_max <= 0.0) throw ConfigError("t_max must be > 0");
    }
    if (experiment == "small-time") {
        if (!(half_width > 0.0 && half_width < std::numbers::pi / 2))
            throw ConfigError("half_width must lie in (0, pi/2)");
        if (!(half_width_neg > std::numbers::pi / 2 && half_width_neg < std::numbers::pi))
            throw ConfigError("half_width_neg must lie in (pi/2, pi)");
        if (n_samples < 1) throw ConfigError("n_samples must be >= 1");
        if (T_pos <= 0.0 || T_neg <= 0.0) throw ConfigError("T_pos and T_neg must be > 0");
    }
    if (experiment == "degree") {
        if (family != "A" && family != "A2" && family != "A3")
            throw ConfigError("family must be one of A|A2|A3");
        if (m < 8) throw ConfigError("m must be >= 8");
        if (family == "A" && m < 64) throw ConfigError("family A requires m >= 64");
    }
    if (experiment == "pipeline") {
        if (k < 2) throw ConfigError("pipeline requires k >= 2");
        if (budget <= 0.0) throw ConfigError("budget must be > 0");
        if (eps_schedule.empty()) throw ConfigError("eps_schedule must not be empty");
    }
    if (experiment == "s1-control" && degree_N < 0)
        throw ConfigError("degree_N must be >= 0");
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        cfg.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return cfg;
}

void apply_overrides(ExperimentConfig& cfg, const std::vector<std::string>& kvs) {
    for (const auto& kv : kvs) {
        size_t eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        cfg.set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
    }
}

} // namespace wavemaps
