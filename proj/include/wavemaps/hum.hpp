#pragma once

#include <vector>

#include "wavemaps/solver.hpp"

namespace wavemaps {

/// State of the scalar equation -v_tt + v_xx + mass_sq v = g on the circle.
struct ScalarField {
    Grid grid;
    std::vector<double> v;
    std::vector<double> v_t;
    double time = 0.0;

    explicit ScalarField(const Grid& g)
        : grid(g), v(g.n(), 0.0), v_t(g.n(), 0.0) {}
};

/// Saved scalar run with the quadratic-form trace
/// F(t) = int (v_x^2 + v_t^2 - mass_sq v^2) dx.
struct ScalarRun {
    std::vector<ScalarField> states;
    std::vector<double> times;     // per step
    std::vector<double> quad_form; // per step
    double dt = 0.0;
    double mass_sq = 1.0;

    const ScalarField& final() const { return states.back(); }
};

/// Leapfrog solve of v_tt = v_xx + mass_sq v - g to time T. g (dim 1) is
/// interpolated linearly in time; may be null.
ScalarRun kg_solve(const ScalarField& initial, const ControlSignal* g, double T, double dt,
                   double mass_sq = 1.0, int save_every = 1);

/// Quadratic form of a scalar state.
double scalar_quad_form(const ScalarField& s, double mass_sq);

/// Convergence record of a Gramian solve.
struct GramianSolveReport {
    int iterations = 0;
    double residual = 0.0;               // H1 x L2 norm of the steering defect
    double control_norm = 0.0;           // L2_{t,x} norm of the synthesized control
    double min_curvature_estimate = 0.0; // smallest Rayleigh quotient observed
    bool converged = false;
};

struct NotConvergedError : std::runtime_error {
    GramianSolveReport report;
    explicit NotConvergedError(const GramianSolveReport& r)
        : std::runtime_error("not converged: steering defect " + std::to_string(r.residual)),
          report(r) {}
};

struct HumResult {
    ControlSignal control;
    GramianSolveReport report;
};

/// Least-norm steering of -v_tt + v_xx + mass_sq v = g from (0, 0) to
/// (target_v, target_q) at time T, with g supported in `region`, by
/// conjugate gradient on the control-to-state normal equations (discrete
/// HUM with the exact discrete adjoint and a Tikhonov floor). Never throws
/// on non-convergence; inspect report.converged.
HumResult hum_steer(const Grid& grid, const ControlRegion& region, double T,
                    std::span<const double> target_v, std::span<const double> target_q,
                    double mass_sq, double dt_hint,
                    double tol = defaults::ctrl_tol, int max_iter = defaults::max_iter,
                    double reg = defaults::reg_eps);

/// H1 x L2 norm of a scalar pair (v, q).
double scalar_h1l2_norm(const Grid& grid, std::span<const double> v, std::span<const double> q);

namespace detail {
/// Forward map of the zero-data controlled system: control samples
/// g[(M+1) x n] -> final (v, q). Exposed for adjoint verification in tests.
/// The scalar leapfrog is stable up to dt = spacing (the dispersion-free
/// step for the mass-0 wave), so these runs may exceed the nonlinear
/// solver's cfl_ratio.
void scalar_forward(const Grid& grid, double dt, int steps, double mass_sq,
                    std::span<const double> g, std::span<double> v_out,
                    std::span<double> q_out);
/// Exact transpose of scalar_forward.
void scalar_adjoint(const Grid& grid, double dt, int steps, double mass_sq,
                    std::span<const double> vbar, std::span<const double> qbar,
                    std::span<double> g_out);
/// General stepping with initial data; optionally records v at every
/// instant into record[(steps+1) x n].
void scalar_run(const Grid& grid, double dt, int steps, double mass_sq,
                std::span<const double> g, std::span<double> v_io, std::span<double> q_io,
                std::span<double> record);
}

} // namespace wavemaps
