#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "wavemaps/field_state.hpp"

namespace wavemaps {

/// Nonnegative damping coefficient a(x) supported in a control region.
class DampingProfile {
public:
    /// Default profile a(x) = amplitude * chi_region(x) (C2 cutoff).
    DampingProfile(const Grid& grid, const ControlRegion& region, double amplitude = 1.0);

    /// Arbitrary samples; must be >= 0, vanish outside the region, not all 0.
    DampingProfile(const Grid& grid, const ControlRegion& region, std::vector<double> samples);

    const Grid& grid() const { return grid_; }
    const ControlRegion& region() const { return region_; }
    const std::vector<double>& a() const { return a_; }

private:
    void validate() const;
    Grid grid_;
    ControlRegion region_;
    std::vector<double> a_;
};

/// Time-sampled forcing f(t_i, x_j) with compact support in [t0, t0+span] x region.
/// Values between samples are interpolated linearly in t; outside the time
/// window the forcing is zero. dim = k+1 for vector forcings, 1 for scalars.
class ControlSignal {
public:
    struct premasked_t {};
    static constexpr premasked_t premasked{};

    /// Public constructor: multiplies the supplied values by the region's C2
    /// cutoff so the support constraint holds by construction.
    ControlSignal(const Grid& grid, const ControlRegion& region, int dim, double dt,
                  std::vector<double> values);

    /// For internally synthesized controls whose support is already exact:
    /// verifies vanishing outside the region instead of re-masking.
    ControlSignal(premasked_t, const Grid& grid, const ControlRegion& region, int dim, double dt,
                  std::vector<double> values);

    const Grid& grid() const { return grid_; }
    const ControlRegion& region() const { return region_; }
    int dim() const { return dim_; }
    double dt() const { return dt_; }
    int instants() const { return m_; }
    double time_at(int i) const { return dt_ * i; }
    double span() const { return dt_ * (m_ - 1); }
    const std::vector<double>& values() const { return values_; }

    /// Sample at instant i (no interpolation).
    std::span<const double> at(int i) const {
        return {values_.data() + static_cast<size_t>(i) * grid_.n() * dim_,
                static_cast<size_t>(grid_.n()) * dim_};
    }

    /// Linear-in-time interpolation into `out` (size n*dim); zero outside the window.
    void value_at(double t, std::span<double> out) const;

    /// sum_i sum_j |f|^2 dx dt with trapezoid weights in time.
    double squared_l2() const;

private:
    Grid grid_;
    ControlRegion region_;
    int dim_;
    double dt_;
    int m_;
    std::vector<double> values_; // m x n x dim
};

/// Stored run: states at a saving stride plus per-step energy traces.
struct Trajectory {
    std::vector<FieldState> states;
    EnergyTrace trace;
    double dt = 0.0;
    int n_points = 0;
    int save_every = 1;

    const FieldState& initial() const { return states.front(); }
    const FieldState& final() const { return states.back(); }
};

/// One constrained leapfrog update of the damped/forced wave maps system
///   phi_tt = phi_xx - (|phi_t|^2 - |phi_x|^2) phi - f^{phi perp} - a phi_t,
/// followed by node-wise renormalization and tangential projection.
/// `forcing_now`/`forcing_next` are optional flat n x (k+1) samples at the
/// step endpoints.
FieldState step(const FieldState& state, double dt,
                std::span<const double> forcing_now, std::span<const double> forcing_next,
                const DampingProfile* damping, double cfl = defaults::cfl_ratio);

/// Convenience single-step without forcing.
FieldState step(const FieldState& state, double dt, const DampingProfile* damping = nullptr);

/// Repeated step() to time T (last step shortened), recording per-step traces
/// and states every save_every steps. `cfl` bounds dt/spacing; the default
/// keeps a robust margin for the nonlinear multiplier, while the k = 1
/// system (linear in polar form) admits the dispersion-free bound 1.
Trajectory evolve(const FieldState& initial, double T, const ControlSignal* forcing,
                  const DampingProfile* damping, double dt, int save_every = 1,
                  double cfl = defaults::cfl_ratio);

/// max over recorded instants of |E(t) - E(0) + cumulative dissipation|.
double energy_balance_residual(const Trajectory& traj, const DampingProfile& damping);

/// max over recorded instants of |E(t) - E(0) + 2 int int phi_t . f_perp|.
double forced_energy_rate_residual(const Trajectory& traj, const ControlSignal& forcing);

/// Smooth polar tilt schedule theta(t) with theta(0) = theta'(0) = theta'(T) = 0
/// and theta(T) = theta_f in (0, pi). Default shape: smoothstep
/// theta_f (3 (t/T)^2 - 2 (t/T)^3).
class RadialSchedule {
public:
    RadialSchedule(double T, double theta_f);
    double T() const { return T_; }
    double theta_final() const { return theta_f_; }
    double theta(double t) const;
    double dtheta(double t) const;
    double ddtheta(double t) const;

private:
    double T_;
    double theta_f_;
};

/// Exact full-circle radial trajectory
///   phi(t,x) = (cos th cos x, cos th sin x, sin th),
///   f(t,x)   = (-w sin th cos x, -w sin th sin x, w cos th),
///   w(t)     = -theta_tt + sin th cos th,
/// sampled on the grid with step dt; the energy trace holds the closed form
/// E(t) = 2 pi (theta_t^2 + cos^2 th).
std::pair<Trajectory, ControlSignal> closed_form_radial(const RadialSchedule& schedule,
                                                        const Grid& grid, double dt,
                                                        int save_every = 1);

} // namespace wavemaps
