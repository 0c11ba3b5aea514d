#pragma once

#include <span>
#include <vector>

#include "wavemaps/grid.hpp"

namespace wavemaps {

/// Discretized pair (phi, phi_t) on a periodic grid, with values in the
/// tangent bundle of S^k: |phi_j| = 1 and phi_j . phit_j = 0 at every node.
/// Layout: row-major n x (k+1).
struct FieldState {
    Grid grid;
    int k = 1;
    std::vector<double> phi;
    std::vector<double> phi_t;
    double time = 0.0;

    FieldState(Grid g, int target_dim)
        : grid(g), k(target_dim),
          phi(static_cast<size_t>(g.n()) * (target_dim + 1), 0.0),
          phi_t(static_cast<size_t>(g.n()) * (target_dim + 1), 0.0) {
        if (target_dim < 1) throw std::invalid_argument("FieldState: k must be >= 1");
    }

    int dim() const { return k + 1; }
    int n() const { return grid.n(); }

    std::span<double> node(int j) { return {phi.data() + static_cast<size_t>(j) * dim(), static_cast<size_t>(dim())}; }
    std::span<const double> node(int j) const { return {phi.data() + static_cast<size_t>(j) * dim(), static_cast<size_t>(dim())}; }
    std::span<double> node_t(int j) { return {phi_t.data() + static_cast<size_t>(j) * dim(), static_cast<size_t>(dim())}; }
    std::span<const double> node_t(int j) const { return {phi_t.data() + static_cast<size_t>(j) * dim(), static_cast<size_t>(dim())}; }

    /// Node-wise renormalization of phi and tangential projection of phi_t.
    void project_to_sphere();

    /// max_j of ||phi_j| - 1| and |phi_j . phit_j|.
    double constraint_error() const;

    /// Throws if the sphere/tangency invariants are violated beyond tol.
    void validate(double tol = defaults::tang_tol) const;

    /// Constant state phi == p (|p| normalized), phi_t == 0.
    static FieldState constant(const Grid& g, int k, std::span<const double> p);

    /// Geodesic-type state phi(x) = mu cos(N x) - nu sin(N x), phi_t = 0.
    /// mu, nu must be orthonormal when N >= 1; for N = 0 this is constant(mu).
    static FieldState circle(const Grid& g, int k, std::span<const double> mu,
                             std::span<const double> nu, int N);

    /// The reference equator (cos x, sin x, 0, ...) for k >= 1.
    static FieldState equator(const Grid& g, int k);
};

/// Orthogonal projection of f onto the tangent plane at the unit vector phi:
/// f - <f, phi> phi. Rejects |phi| far from 1.
std::vector<double> project_orthogonal(std::span<const double> f, std::span<const double> phi);

/// Discrete energy sum_j (|phi_x|^2 + |phi_t|^2)_j * spacing, with phi_x by
/// second-order central differences. Validates the state invariants.
double energy(const FieldState& state);

/// Same as energy() but without the invariant check (solver-internal).
double energy_unchecked(const FieldState& state);

/// H1 x L2 norm of a state difference against a reference position field
/// (velocity reference zero): sqrt(sum (|u|^2 + |u_x|^2 + |phi_t|^2) dx)
/// where u = phi - ref.
double h1l2_distance(const FieldState& state, std::span<const double> ref_phi);

/// H1 x L2 distance between two states on the same grid.
double h1l2_distance(const FieldState& a, const FieldState& b);

/// Time-indexed energy/dissipation traces of a run.
struct EnergyTrace {
    std::vector<double> times;
    std::vector<double> energy;
    std::vector<double> dissipation;   // cumulative 2 int int a |phi_t|^2
    std::vector<double> forcing_work;  // cumulative 2 int int phi_t . f_perp
    std::vector<double> tangency;      // constraint error per instant

    void validate() const;
};

} // namespace wavemaps
