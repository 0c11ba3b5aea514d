#pragma once

#include <vector>

#include "wavemaps/field_state.hpp"
#include "wavemaps/solver.hpp"

namespace wavemaps {

/// Closed geodesic gamma(x) = mu cos(N x) - nu sin(N x) on S^k, the
/// harmonic-map normal form. N = 0 encodes the constant map mu (nu unused).
struct GeodesicMap {
    std::vector<double> mu;
    std::vector<double> nu;
    int N = 0;

    int dim() const { return static_cast<int>(mu.size()); }
    void validate() const;

    /// Sampled positions on a grid (flat n x dim).
    std::vector<double> sample(const Grid& grid) const;

    FieldState state(const Grid& grid) const;
};

/// Smooth nonnegative bump on [t_a, t_b] with unit integral:
/// psi(t) = c (1 - u^2)^3, u = (2t - t_a - t_b)/(t_b - t_a).
struct BumpWindow {
    double t_a = 0.0;
    double t_b = 1.0;

    BumpWindow(double a, double b);
    double psi(double t) const;
    /// Fine Simpson quadrature of psi over [t_a, t_b] (invariant check).
    double integral(int panels = 1 << 14) const;
};

/// Bump-weighted time average of the saved trajectory states:
/// phi_tilde_j = sum_i w_i phi(t_i, x_j) with w_i proportional to psi(t_i)
/// and normalized to sum 1. Requires >= 32 saved samples inside the window.
std::vector<double> time_average(const Trajectory& traj, const BumpWindow& window);

/// Distance from E to the discrete energy spectrum {2 pi n^2}: returns
/// (delta_star, achieving n), ties toward the smaller n.
std::pair<double, int> energy_gap(double E);

struct HarmonicFit {
    GeodesicMap map;
    double distance = 0.0; // H1 x L2 distance of the state to (gamma, 0)
};

/// Nearest harmonic map via the dominant Fourier mode: selects
/// n0 = argmax_{n>=1} |a_n|^2 + |a_{-n}|^2, reconstructs (mu, nu) from
/// a_{n0} = alpha + i beta by normalized Gram-Schmidt, and measures the
/// full H1 x L2 distance. States with energy <= harmonic_floor map to the
/// constant branch (N = 0 at the mean direction). The stored map flips
/// (mu, nu) jointly so the first nonzero component of mu is positive; the
/// distance always refers to the raw best-fit phase.
HarmonicFit nearest_harmonic(const FieldState& state,
                             double harmonic_floor = defaults::harmonic_floor,
                             double mode_floor = defaults::mode_floor);

/// True iff nearest_harmonic's distance is <= eps. A "degenerate mode"
/// failure counts as false (such states are provably farther than any eps
/// of interest from every geodesic).
bool is_approx_harmonic(const FieldState& state, double eps);

/// max_j |phi_tilde_xx + (E0 / 2pi) phi_tilde|_j with central differences,
/// for a flat n x dim averaged field.
double approximate_kg_residual(std::span<const double> avg, int n, int dim, double E0);

} // namespace wavemaps
