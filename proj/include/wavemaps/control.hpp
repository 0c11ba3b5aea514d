#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wavemaps/harmonic.hpp"
#include "wavemaps/hum.hpp"
#include "wavemaps/solver.hpp"

namespace wavemaps {

/// Orthogonal matrix A (row-major d x d, d = k+1) mapping the geodesic's
/// samples onto the reference u_N(x) = (cos Nx, sin Nx, 0, ...):
/// A gamma(x) = u_N(x) for all x, verified to 1e-10. Requires N >= 1.
std::vector<double> rotation_align(const GeodesicMap& g);

struct KgControlResult {
    ControlSignal control;
    GramianSolveReport report;
};

/// Least-norm steering of -v_tt + v_xx + mass_sq v = g from (0,0) to the
/// given target pair at time T with g supported in `region`. Throws
/// NotConvergedError (carrying the report) if the defect stays above
/// ctrl_tol.
KgControlResult kg_exact_control(const Grid& grid, std::span<const double> target_v,
                                 std::span<const double> target_q, const ControlRegion& region,
                                 double T = two_pi, double mass_sq = 1.0,
                                 double dt_hint = 1e9, // synthesis clamps to the scalar CFL
                                 int max_iter = defaults::max_iter);

/// Energy-lowering control near a closed geodesic: f = eps * A^T (0,..,0,g)
/// supported in [0, T] x region, where g steers the mass-N^2 scalar
/// equation to (-1, 0) and A = rotation_align(harmonic). Simulating from
/// (gamma, 0) drops the energy by 2 pi N^2 eps^2 + O(eps^3); the law is
/// independent of the window T (any T above the region's sharp time), and
/// short windows curb the level's instability amplification. Requires
/// k >= 2 and N >= 1.
ControlSignal energy_drop_control(const Grid& grid, const GeodesicMap& harmonic, double eps,
                                  const ControlRegion& region, double T = two_pi);

/// Run of the linearization about the reference equator:
///   -u_tt + u_xx + u = -2 (e0x . u_x) e0 + f1 - (f1 . e0) e0,  u[0] = 0,
/// with e0(x) = (cos x, sin x, 0). Records the quadratic form
/// Fbar(t) = int (|u_t|^2 + |u_x|^2 - |u|^2) per step.
struct LinearizedRun {
    std::vector<double> times;
    std::vector<double> quad_form;
    std::vector<double> u;   // final position, flat n x 3
    std::vector<double> u_t; // final velocity
    double dt = 0.0;
};
LinearizedRun linearized_solve(const Grid& grid, const ControlSignal& f1, double T, double dt);

/// Ensemble study of the small-time quadratic form with controls supported
/// in the arc (-a, a): band-limited random controls (Fourier modes <= 8,
/// unit-normal coefficients, smooth time envelope, fixed seed). Returns the
/// minimum Fbar(T) over nontrivial samples and the largest |u(T)| at arc
/// distance > T + cone_buffer from the control region.
struct SmallTimeEnsemble {
    double min_quad_form = 0.0;
    double max_outside_cone = 0.0;
    int samples_used = 0;
    int samples_discarded = 0;
    std::vector<double> per_sample;
};
SmallTimeEnsemble small_time_positive_check(const Grid& grid, double half_width, double T,
                                            int n_samples, std::uint64_t seed, double dt,
                                            double cone_buffer = 0.25);

/// Explicit negative-form construction for a > pi/2: the trajectory
/// u^3 = b(t) phi1(x) with phi1 a mollified half-cosine profile supported in
/// (-a, a), b a smoothstep with b(0)=b'(0)=0, b(T)=amplitude, b'(T)=0, and
/// its defining control f1^3 = -(u^3)_tt + (u^3)_xx + u^3. Returns the grid
/// quadrature of Fbar(T) = int (phi1_x^2 - phi1^2) < 0.
struct SmallTimeNegative {
    ControlSignal f1;
    double quad_form_T = 0.0;
    std::vector<double> profile; // phi1 on the grid
};
SmallTimeNegative small_time_negative_construction(const Grid& grid, double half_width, double T,
                                                   double dt, double amplitude = 1.0);

/// Quadrature of int (phi0_x^2 - phi0^2) over the raw half-cosine profile
/// phi0(x) = cos(pi x / a1) on (-a1/2, a1/2); equals (a1/2)(pi^2/a1^2 - 1).
double raw_profile_integral(double a1, int panels = 1 << 14);

/// Sharp control time T0 = max_x min{alpha >= 0 : x + alpha in region};
/// equals 2 pi - arc length for a single arc, 0 for the full circle.
double sharp_time(const ControlRegion& region);

struct PipelinePhase {
    enum class Kind { damp, drop, final_damp };
    Kind kind = Kind::damp;
    double t_start = 0.0, t_end = 0.0;
    double e_start = 0.0, e_end = 0.0;
    int detected_N = 0;
    double eps = 0.0;
    bool retried = false;
    GeodesicMap map; // drop phases: the detected geodesic (defines the rotation)
};

struct PipelineReport {
    std::vector<PipelinePhase> phases;
    bool success = false;
    double total_time = 0.0;
    double final_energy = 0.0;
    int drop_phases = 0;
};

struct PipelineOptions {
    double nu1 = 0.05;          // approximate-harmonic gate
    double margin = 0.1;        // stop drops once E < 2 pi - margin
    double final_tol = 1e-2;    // terminal energy
    std::vector<double> eps_schedule = {0.1, 0.1, 0.05, 0.025};
    double budget = 4000.0;     // max total simulated time
    double chunk = 2.0;         // damping chunk between detector checks
    double max_energy = 100.0;  // admissible E(initial)
    double dt = 0.0;            // 0: cfl_ratio * spacing
    // drops use the damping's region unless one is supplied here
    std::optional<ControlRegion> control_region;
    // drop window: 2 pi at N = 1; at N >= 2 shortened to curb the level's
    // exponential instability (rate N) while staying above the sharp time
    double drop_window_high = 0.5;
};

/// Three-stage steering loop: damp until the state is an approximate
/// harmonic map, apply the rotated energy-lowering control at the detected
/// level, repeat until E < 2 pi - margin, then damp to final_tol.
std::pair<Trajectory, PipelineReport> global_pipeline(const FieldState& initial,
                                                      const DampingProfile& damping,
                                                      const PipelineOptions& opts = {});

struct S1ControlResult {
    ControlSignal h;            // scalar forcing for the polar wave equation
    GramianSolveReport report;  // residual = end-to-end replay defect (H1 x L2)
    Trajectory replay;          // simulated controlled k=1 run
};

/// Sharp-time control for the S^1 target: lifts both states to polar
/// coordinates, removes the common winding N, steers the flat wave equation
/// by discrete HUM, and replays f = h (-sin theta, cos theta) through the
/// nonlinear system. Throws "degree mismatch" for states of different
/// winding and NotConvergedError when the defect exceeds ctrl_tol (expected
/// for T below the sharp time).
S1ControlResult s1_polar_control(const FieldState& initial, const FieldState& final_state,
                                 double T, const ControlRegion& region);

} // namespace wavemaps
