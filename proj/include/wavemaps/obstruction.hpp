#pragma once

#include <functional>
#include <vector>

#include "wavemaps/degree.hpp"
#include "wavemaps/solver.hpp"

namespace wavemaps {

/// The loop family A : S^1_s x S^1_x -> S^2 with the sign flip across s = pi.
void family_A(double s, double x, std::span<double> out3);

/// Suspension families A_k : (S^1)^{k+1} -> S^{k+1}, with A_1 = A.
/// s has k entries; out has k+2 entries.
void family_Ak(int k, std::span<const double> s, double x, std::span<double> out);

/// Parameterized family of loops gamma(s)(x) on S^k with |gamma| = 1.
struct HomotopyFamily {
    int k = 2;          // target dimension
    int param_dim = 1;  // number of loop parameters
    std::function<void(std::span<const double>, double, std::span<double>)> eval;

    static HomotopyFamily suspension(int k);
};

/// Energies E((gamma(s), 0)) at the given parameter samples (each a
/// param_dim-vector), by grid quadrature.
std::vector<double> family_energy_curve(const HomotopyFamily& family,
                                        const std::vector<std::vector<double>>& s_samples,
                                        const Grid& grid);

/// Degree of the family's full parameter-torus-times-space map.
DegreeReport family_degree(const HomotopyFamily& family, int m);

/// Normalized linear interpolation from a sampled flow slice toward the
/// anchor loop a(s): slices H(r) = ((1-r) flow + r a) / |...| on S^2.
/// flow: m_s x n_x x 3, anchor: m_s x 3. Throws "cap undefined" when the
/// proximity condition sup |flow - a| < 2 fails.
struct CappedHomotopy {
    std::vector<std::vector<double>> slices; // one m_s x n_x x 3 buffer per r
    std::vector<double> r_values;
    double min_denominator = 0.0;
};
CappedHomotopy capped_homotopy(std::span<const double> flow, std::span<const double> anchor,
                               int m_s, int n_x, const std::vector<double>& r_values);

/// Damped-flow hitting times of the energy threshold for the family A(s, .):
/// one row per parameter sample.
struct DecayRow {
    double s = 0.0;
    double initial_energy = 0.0;
    double hit_time = 0.0;
    bool censored = false;
};
std::vector<DecayRow> nonuniform_decay_experiment(const DampingProfile& damping,
                                                  const std::vector<double>& s_values,
                                                  double energy_target, double t_max,
                                                  double dt = 0.0);

} // namespace wavemaps
