#include "wavemaps/control.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "wavemaps/degree.hpp"

namespace wavemaps {

std::vector<double> rotation_align(const GeodesicMap& g) {
    g.validate();
    if (g.N < 1) throw std::invalid_argument("rotation_align: requires N >= 1");
    const int d = g.dim();
    std::vector<double> A(static_cast<size_t>(d) * d, 0.0);
    // rows: mu, -nu, then an orthonormal completion of span{mu, nu}^perp
    for (int c = 0; c < d; ++c) {
        A[c] = g.mu[c];
        A[d + c] = -g.nu[c];
    }
    int row = 2;
    for (int e = 0; e < d && row < d; ++e) {
        std::vector<double> cand(d, 0.0);
        cand[e] = 1.0;
        for (int r = 0; r < row; ++r) {
            double dot = 0.0;
            for (int c = 0; c < d; ++c) dot += cand[c] * A[static_cast<size_t>(r) * d + c];
            for (int c = 0; c < d; ++c) cand[c] -= dot * A[static_cast<size_t>(r) * d + c];
        }
        double norm = 0.0;
        for (double c : cand) norm += c * c;
        norm = std::sqrt(norm);
        if (norm < 1e-7) continue;
        for (int c = 0; c < d; ++c) A[static_cast<size_t>(row) * d + c] = cand[c] / norm;
        ++row;
    }
    if (row != d) throw std::invalid_argument("rotation_align: degenerate (mu, nu) pair");

    // verification against the reference circle
    double worst = 0.0;
    for (int j = 0; j < 64; ++j) {
        double x = two_pi * j / 64.0;
        double cs = std::cos(g.N * x), sn = std::sin(g.N * x);
        for (int r = 0; r < d; ++r) {
            double y = 0.0;
            for (int c = 0; c < d; ++c)
                y += A[static_cast<size_t>(r) * d + c] * (g.mu[c] * cs - g.nu[c] * sn);
            double ref = r == 0 ? cs : (r == 1 ? sn : 0.0);
            worst = std::max(worst, std::abs(y - ref));
        }
    }
    if (worst > 1e-10)
        throw std::runtime_error("rotation_align: verification failed, error " +
                                 std::to_string(worst));
    return A;
}

KgControlResult kg_exact_control(const Grid& grid, std::span<const double> target_v,
                                 std::span<const double> target_q, const ControlRegion& region,
                                 double T, double mass_sq, double dt_hint, int max_iter) {
    HumResult r = hum_steer(grid, region, T, target_v, target_q, mass_sq, dt_hint,
                            defaults::ctrl_tol, max_iter);
    if (!r.report.converged) throw NotConvergedError(r.report);
    return {std::move(r.control), r.report};
}

ControlSignal energy_drop_control(const Grid& grid, const GeodesicMap& harmonic, double eps,
                                  const ControlRegion& region, double T) {
    constexpr double eps_max = 0.25;
    if (!(eps > 0.0 && eps <= eps_max))
        throw std::invalid_argument("energy_drop_control: eps outside (0, 0.25]");
    if (T <= sharp_time(region))
        throw std::invalid_argument("energy_drop_control: window below the region's sharp time");
    const int d = harmonic.dim();
    if (d < 3) throw std::invalid_argument("energy_drop_control: requires k >= 2");
    const int N = harmonic.N;
    std::vector<double> A = rotation_align(harmonic);

    const int n = grid.n();
    std::vector<double> tv(n, -1.0), tq(n, 0.0);
    KgControlResult kg = kg_exact_control(grid, tv, tq, region, T,
                                          static_cast<double>(N) * N, 1e9,
                                          4 * defaults::max_iter);

    // f = eps * A^T e3 g: pick up the third row of A
    const double* a3 = A.data() + 2 * static_cast<size_t>(d);
    const ControlSignal& g = kg.control;
    std::vector<double> values(static_cast<size_t>(g.instants()) * n * d, 0.0);
    for (int i = 0; i < g.instants(); ++i) {
        auto gi = g.at(i);
        for (int j = 0; j < n; ++j)
            for (int c = 0; c < d; ++c)
                values[(static_cast<size_t>(i) * n + j) * d + c] = eps * gi[j] * a3[c];
    }
    return ControlSignal(ControlSignal::premasked, grid, region, d, g.dt(), std::move(values));
}

namespace {

// acceleration of the linearization about the reference equator:
//   u_tt = u_xx + u + 2 (e0x . u_x) e0 - (f1 - (f1 . e0) e0)
void linearized_acc(const Grid& grid, std::span<const double> u, std::span<const double> f1,
                    std::span<double> out) {
    const int n = grid.n();
    const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    const double inv_2h = 1.0 / (2.0 * grid.spacing());
    for (int j = 0; j < n; ++j) {
        int jm = (j + n - 1) % n, jp = (j + 1) % n;
        double cx = std::cos(grid.x(j)), sx = std::sin(grid.x(j));
        const double e0[3] = {cx, sx, 0.0};
        const double e0x[3] = {-sx, cx, 0.0};
        double coupling = 0.0, fdot = 0.0;
        for (int c = 0; c < 3; ++c) {
            double ux = (u[static_cast<size_t>(jp) * 3 + c] - u[static_cast<size_t>(jm) * 3 + c]) * inv_2h;
            coupling += e0x[c] * ux;
            if (!f1.empty()) fdot += f1[static_cast<size_t>(j) * 3 + c] * e0[c];
        }
        for (int c = 0; c < 3; ++c) {
            size_t i = static_cast<size_t>(j) * 3 + c;
            double lap = (u[static_cast<size_t>(jp) * 3 + c] - 2.0 * u[i] +
                          u[static_cast<size_t>(jm) * 3 + c]) *
                         inv_h2;
            double fperp = f1.empty() ? 0.0 : f1[i] - fdot * e0[c];
            out[i] = lap + u[i] + 2.0 * coupling * e0[c] - fperp;
        }
    }
}

double vec_quad_form(const Grid& grid, std::span<const double> u, std::span<const double> ut) {
    const int n = grid.n();
    const double inv_2h = 1.0 / (2.0 * grid.spacing());
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
        int jm = (j + n - 1) % n, jp = (j + 1) % n;
        for (int c = 0; c < 3; ++c) {
            double ux = (u[static_cast<size_t>(jp) * 3 + c] - u[static_cast<size_t>(jm) * 3 + c]) * inv_2h;
            size_t i = static_cast<size_t>(j) * 3 + c;
            total += ut[i] * ut[i] + ux * ux - u[i] * u[i];
        }
    }
    return total * grid.spacing();
}

} // namespace

LinearizedRun linearized_solve(const Grid& grid, const ControlSignal& f1, double T, double dt) {
    if (dt > defaults::cfl_ratio * grid.spacing() * (1.0 + 1e-12))
        throw std::runtime_error("CFL violated: dt exceeds cfl_ratio * spacing");
    if (f1.grid() != grid || f1.dim() != 3)
        throw std::invalid_argument("linearized_solve: forcing grid/dim mismatch");
    const int n = grid.n();
    const size_t sz = static_cast<size_t>(n) * 3;
    LinearizedRun run;
    run.dt = dt;
    run.u.assign(sz, 0.0);
    run.u_t.assign(sz, 0.0);
    std::vector<double> acc(sz), qh(sz), fnow(sz), fnext(sz);
    f1.value_at(0.0, fnow);

    run.times.push_back(0.0);
    run.quad_form.push_back(0.0);
    double t = 0.0;
    while (t < T - 1e-12) {
        double dts = std::min(dt, T - t);
        f1.value_at(t + dts, fnext);
        linearized_acc(grid, run.u, fnow, acc);
        for (size_t p = 0; p < sz; ++p) qh[p] = run.u_t[p] + 0.5 * dts * acc[p];
        for (size_t p = 0; p < sz; ++p) run.u[p] += dts * qh[p];
        linearized_acc(grid, run.u, fnext, acc);
        for (size_t p = 0; p < sz; ++p) run.u_t[p] = qh[p] + 0.5 * dts * acc[p];
        std::swap(fnow, fnext);
        t += dts;
        run.times.push_back(t);
        run.quad_form.push_back(vec_quad_form(grid, run.u, run.u_t));
    }
    for (double x : run.u)
        if (!std::isfinite(x)) throw std::runtime_error("NaN detected: linearized solve blow-up");
    return run;
}

SmallTimeEnsemble small_time_positive_check(const Grid& grid, double half_width, double T,
                                            int n_samples, std::uint64_t seed, double dt,
                                            double cone_buffer) {
    if (!(half_width > 0.0 && half_width < std::numbers::pi / 2))
        throw std::invalid_argument("small_time_positive_check: half_width outside (0, pi/2)");
    if (!(T > 0.0)) throw std::invalid_argument("small_time_positive_check: T must be > 0");
    const int n = grid.n();
    ControlRegion region(two_pi - half_width, half_width);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    int steps = static_cast<int>(std::ceil(T / dt - 1e-12));
    double dts = T / steps;
    constexpr int max_mode = 8;

    SmallTimeEnsemble result;
    result.min_quad_form = std::numeric_limits<double>::infinity();

    for (int s = 0; s < n_samples; ++s) {
        // band-limited spatial profile per component
        std::vector<double> coef_c(3 * (max_mode + 1)), coef_s(3 * (max_mode + 1));
        for (auto& c : coef_c) c = gauss(rng);
        for (auto& c : coef_s) c = gauss(rng);
        std::vector<double> values(static_cast<size_t>(steps + 1) * n * 3, 0.0);
        for (int i = 0; i <= steps; ++i) {
            double tt = dts * i;
            double u = tt / T;
            double env = u * u * (1.0 - u) * (1.0 - u) * 16.0; // smooth in/out envelope
            for (int j = 0; j < n; ++j) {
                double x = grid.x(j);
                for (int c = 0; c < 3; ++c) {
                    double val = 0.0;
                    for (int m = 0; m <= max_mode; ++m)
                        val += coef_c[static_cast<size_t>(c) * (max_mode + 1) + m] * std::cos(m * x) +
                               coef_s[static_cast<size_t>(c) * (max_mode + 1) + m] * std::sin(m * x);
                    values[(static_cast<size_t>(i) * n + j) * 3 + c] = env * val;
                }
            }
        }
        ControlSignal f1(grid, region, 3, dts, std::move(values)); // ctor applies the cutoff
        if (std::sqrt(f1.squared_l2()) < 1e-6) {
            ++result.samples_discarded;
            continue;
        }
        LinearizedRun run = linearized_solve(grid, f1, T, dts);
        result.per_sample.push_back(run.quad_form.back());
        result.min_quad_form = std::min(result.min_quad_form, run.quad_form.back());
        ++result.samples_used;

        // finite-speed check on this sample's final state
        for (int j = 0; j < n; ++j) {
            double x = grid.x(j);
            // arc distance from the control arc (-a, a)
            double dist = std::abs(std::remainder(x, two_pi));
            dist = std::max(0.0, dist - half_width);
            if (dist <= T + cone_buffer) continue;
            double norm2 = 0.0;
            for (int c = 0; c < 3; ++c) {
                double v = run.u[static_cast<size_t>(j) * 3 + c];
                norm2 += v * v;
            }
            result.max_outside_cone = std::max(result.max_outside_cone, std::sqrt(norm2));
        }
    }
    if (result.samples_used == 0)
        throw std::runtime_error("small_time_positive_check: all samples trivial");
    return result;
}

double raw_profile_integral(double a1, int panels) {
    // integrand of the half-cosine profile, smooth on [-a1/2, a1/2]
    auto f = [a1](double x) {
        double w = std::numbers::pi / a1;
        double dphi = -w * std::sin(w * x);
        double phi = std::cos(w * x);
        return dphi * dphi - phi * phi;
    };
    double lo = -a1 / 2, hi = a1 / 2;
    double h = (hi - lo) / panels;
    double sum = f(lo) + f(hi);
    for (int i = 1; i < panels; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
    return sum * h / 3.0;
}

SmallTimeNegative small_time_negative_construction(const Grid& grid, double half_width, double T,
                                                   double dt, double amplitude) {
    if (!(half_width > std::numbers::pi / 2 && half_width < std::numbers::pi))
        throw std::invalid_argument(
            "small_time_negative_construction: half_width outside (pi/2, pi)");
    if (!(T > 0.0)) throw std::invalid_argument("small_time_negative_construction: T must be > 0");
    if (amplitude == 0.0)
        throw std::invalid_argument("small_time_negative_construction: trivial trajectory rejected");

    const double a = half_width;
    const double a1 = a + std::numbers::pi / 2;
    const double r = (a - a1 / 2) / 2; // mollification radius
    if (a1 / 2 + r >= a)
        throw std::runtime_error("mollification failure: support would exceed (-a, a)");

    const int n = grid.n();
    // phi1 = phi0 * rho_r with a C2 bump kernel, by Simpson quadrature per node
    auto phi0 = [a1](double x) {
        return std::abs(x) < a1 / 2 ? std::cos(std::numbers::pi * x / a1) : 0.0;
    };
    auto rho = [r](double y) {
        double u = y / r;
        if (std::abs(u) >= 1.0) return 0.0;
        double q = 1.0 - u * u;
        return q * q * q * (35.0 / 32.0) / r; // unit mass
    };
    const int panels = 1 << 10;
    std::vector<double> phi1(n, 0.0);
    for (int j = 0; j < n; ++j) {
        double x = std::remainder(grid.x(j), two_pi); // symmetric coordinate around 0
        if (std::abs(x) >= a1 / 2 + r) continue;
        double h = 2.0 * r / panels;
        double sum = phi0(x - (-r)) * rho(-r) + phi0(x - r) * rho(r);
        for (int i = 1; i < panels; ++i) {
            double y = -r + i * h;
            sum += (i % 2 ? 4.0 : 2.0) * phi0(x - y) * rho(y);
        }
        phi1[j] = sum * h / 3.0;
    }

    // defining control for the trajectory u3(t, x) = b(t) phi1(x):
    // f1^3 = -b'' phi1 + b (phi1'' + phi1)
    int steps = static_cast<int>(std::ceil(T / dt - 1e-12));
    double dts = T / steps;
    const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    std::vector<double> lap(n);
    for (int j = 0; j < n; ++j) {
        int jm = (j + n - 1) % n, jp = (j + 1) % n;
        lap[j] = (phi1[jp] - 2.0 * phi1[j] + phi1[jm]) * inv_h2;
    }
    std::vector<double> values(static_cast<size_t>(steps + 1) * n * 3, 0.0);
    for (int i = 0; i <= steps; ++i) {
        double u = dts * i / T;
        double b = amplitude * u * u * (3.0 - 2.0 * u);
        double bpp = amplitude * 6.0 * (1.0 - 2.0 * u) / (T * T);
        for (int j = 0; j < n; ++j)
            values[(static_cast<size_t>(i) * n + j) * 3 + 2] =
                -bpp * phi1[j] + b * (lap[j] + phi1[j]);
    }
    ControlRegion region(two_pi - a, a);
    ControlSignal f1(ControlSignal::premasked, grid, region, 3, dts, std::move(values));

    double qf = 0.0;
    const double inv_2h = 1.0 / (2.0 * grid.spacing());
    for (int j = 0; j < n; ++j) {
        int jm = (j + n - 1) % n, jp = (j + 1) % n;
        double px = (phi1[jp] - phi1[jm]) * inv_2h;
        qf += px * px - phi1[j] * phi1[j];
    }
    qf *= grid.spacing() * amplitude * amplitude;
    return {std::move(f1), qf, std::move(phi1)};
}

double sharp_time(const ControlRegion& region) {
    if (region.is_full()) return 0.0;
    return two_pi - region.length();
}

std::pair<Trajectory, PipelineReport> global_pipeline(const FieldState& initial,
                                                      const DampingProfile& damping,
                                                      const PipelineOptions& opts) {
    if (initial.k < 2) throw std::invalid_argument("global_pipeline: requires k >= 2");
    const Grid& grid = initial.grid;
    double E0 = energy(initial);
    if (E0 > opts.max_energy)
        throw std::invalid_argument("global_pipeline: initial energy exceeds configured bound");
    const double dt = opts.dt > 0.0 ? opts.dt : defaults::cfl_ratio * grid.spacing();
    const ControlRegion region = opts.control_region.value_or(damping.region());

    PipelineReport report;
    Trajectory full;
    full.dt = dt;
    full.n_points = grid.n();
    full.save_every = 1 << 30;

    FieldState state = initial;
    double t_accum = 0.0;
    full.states.push_back(state);

    auto append_trace = [&](const Trajectory& piece) {
        size_t start = full.trace.times.empty() ? 0 : 1; // drop duplicated boundary instant
        for (size_t i = start; i < piece.trace.times.size(); ++i) {
            full.trace.times.push_back(t_accum + piece.trace.times[i] - piece.trace.times.front());
            full.trace.energy.push_back(piece.trace.energy[i]);
            full.trace.dissipation.push_back(piece.trace.dissipation[i]);
            full.trace.forcing_work.push_back(piece.trace.forcing_work[i]);
            full.trace.tangency.push_back(piece.trace.tangency[i]);
        }
        if (full.trace.times.size() == piece.trace.times.size() && start == 0) return;
    };
    auto seed_trace = [&](const FieldState& s) {
        if (!full.trace.times.empty()) return;
        full.trace.times.push_back(0.0);
        full.trace.energy.push_back(energy_unchecked(s));
        full.trace.dissipation.push_back(0.0);
        full.trace.forcing_work.push_back(0.0);
        full.trace.tangency.push_back(s.constraint_error());
    };
    seed_trace(state);

    int drop_count = 0;
    auto next_eps = [&]() {
        if (opts.eps_schedule.empty()) return 0.05;
        size_t i = std::min<size_t>(drop_count, opts.eps_schedule.size() - 1);
        return opts.eps_schedule[i];
    };

    auto damp_until = [&](auto&& stop, PipelinePhase::Kind kind) -> HarmonicFit {
        PipelinePhase phase;
        phase.kind = kind;
        phase.t_start = t_accum;
        phase.e_start = energy_unchecked(state);
        HarmonicFit fit;
        while (true) {
            if (stop(state, fit)) break;
            if (t_accum >= opts.budget) throw std::runtime_error("budget exceeded");
            Trajectory piece = evolve(state, opts.chunk, nullptr, &damping, dt, 1 << 30);
            state = piece.final();
            append_trace(piece);
            t_accum += opts.chunk;
        }
        phase.t_end = t_accum;
        phase.e_end = energy_unchecked(state);
        report.phases.push_back(phase);
        full.states.push_back(state);
        return fit;
    };

    while (true) {
        double E = energy_unchecked(state);
        if (E < two_pi - opts.margin) break;

        double eps = next_eps();
        // a state within nu1 of a level-N geodesic automatically has its
        // energy pinned near 2 pi N^2, so the distance gate suffices
        auto gate = [&](const FieldState& s, HarmonicFit& fit) {
            double e = energy_unchecked(s);
            if (e < two_pi - opts.margin) return true;
            try {
                fit = nearest_harmonic(s);
            } catch (const std::runtime_error&) {
                return false;
            }
            return fit.map.N >= 1 && fit.distance <= opts.nu1;
        };
        HarmonicFit fit = damp_until(gate, PipelinePhase::Kind::damp);
        E = energy_unchecked(state);
        if (E < two_pi - opts.margin) break;

        // drop phase at the detected level
        double window = fit.map.N == 1
                            ? two_pi
                            : std::max(opts.drop_window_high, sharp_time(region) + 0.5);
        bool retried = false;
        while (true) {
            if (t_accum + window > opts.budget) throw std::runtime_error("budget exceeded");
            ControlSignal f = energy_drop_control(grid, fit.map, eps, region, window);
            Trajectory piece = evolve(state, window, &f, nullptr, dt, 1 << 30);
            double e_after = energy_unchecked(piece.final());
            double e_before = energy_unchecked(state);
            double drop = two_pi * fit.map.N * fit.map.N * eps * eps;
            if (e_after <= e_before - 0.2 * drop) {
                PipelinePhase phase;
                phase.kind = PipelinePhase::Kind::drop;
                phase.t_start = t_accum;
                phase.e_start = energy_unchecked(state);
                phase.detected_N = fit.map.N;
                phase.eps = eps;
                phase.retried = retried;
                phase.map = fit.map;
                state = piece.final();
                append_trace(piece);
                t_accum += window;
                phase.t_end = t_accum;
                phase.e_end = e_after;
                report.phases.push_back(phase);
                full.states.push_back(state);
                ++drop_count;
                ++report.drop_phases;
                break;
            }
            if (retried) throw std::runtime_error("drop ineffective: energy level not reduced");
            retried = true;
            eps *= 0.5;
        }
    }

    // approximate steering to a constant state: damp to final_tol
    damp_until([&](const FieldState& s, HarmonicFit&) {
        return energy_unchecked(s) < opts.final_tol;
    }, PipelinePhase::Kind::final_damp);

    report.success = true;
    report.total_time = t_accum;
    report.final_energy = energy_unchecked(state);
    full.trace.validate();
    return {std::move(full), std::move(report)};
}

S1ControlResult s1_polar_control(const FieldState& initial, const FieldState& final_state,
                                 double T, const ControlRegion& region) {
    if (initial.k != 1 || final_state.k != 1)
        throw std::invalid_argument("s1_polar_control: requires k = 1");
    if (initial.grid != final_state.grid)
        throw std::invalid_argument("s1_polar_control: grid mismatch");
    const Grid& grid = initial.grid;
    const int n = grid.n();

    int N0 = winding_number(initial);
    int N1 = winding_number(final_state);
    if (N0 != N1) throw std::runtime_error("degree mismatch: windings " + std::to_string(N0) +
                                           " vs " + std::to_string(N1));
    const int N = N0;

    // lift to polar coordinates and remove the winding part
    auto polar = [&](const FieldState& s, std::vector<double>& th, std::vector<double>& tht) {
        th = lift_angle(s);
        tht.resize(n);
        for (int j = 0; j < n; ++j) {
            auto p = s.node(j);
            auto v = s.node_t(j);
            tht[j] = p[0] * v[1] - p[1] * v[0]; // phi_t . (-sin, cos)
            th[j] -= N * grid.x(j);
        }
    };
    std::vector<double> th0, th0t, th1, th1t;
    polar(initial, th0, th0t);
    polar(final_state, th1, th1t);

    // scalar synthesis runs near the dispersion-free step dt = spacing
    int steps = static_cast<int>(std::ceil(T / grid.spacing() - 1e-12));
    double dt = T / steps;

    // free evolution of the initial polar data (no control)
    std::vector<double> vfree = th0, qfree = th0t;
    std::vector<double> free_record(static_cast<size_t>(steps + 1) * n);
    detail::scalar_run(grid, dt, steps, 0.0, {}, vfree, qfree, free_record);
    std::vector<double> yv(n), yq(n);
    for (int j = 0; j < n; ++j) {
        yv[j] = th1[j] - vfree[j];
        yq[j] = th1t[j] - qfree[j];
    }

    HumResult hum = hum_steer(grid, region, T, yv, yq, 0.0, dt, defaults::ctrl_tol,
                              4 * defaults::max_iter);
    if (!hum.report.converged) throw NotConvergedError(hum.report);

    // rebuild the synthesized theta trajectory (free part + controlled part)
    std::vector<double> vctrl(n, 0.0), qctrl(n, 0.0);
    std::vector<double> ctrl_record(static_cast<size_t>(steps + 1) * n);
    {
        std::vector<double> gsamples(static_cast<size_t>(steps + 1) * n);
        std::vector<double> hbuf(n);
        for (int i = 0; i <= steps; ++i) {
            hum.control.value_at(dt * i, hbuf);
            std::copy(hbuf.begin(), hbuf.end(), gsamples.begin() + static_cast<size_t>(i) * n);
        }
        detail::scalar_run(grid, dt, steps, 0.0, gsamples, vctrl, qctrl, ctrl_record);
    }

    // replay control f = h (-sin theta, cos theta) through the nonlinear system
    std::vector<double> fvals(static_cast<size_t>(steps + 1) * n * 2, 0.0);
    std::vector<double> hbuf(n);
    for (int i = 0; i <= steps; ++i) {
        hum.control.value_at(dt * i, hbuf);
        for (int j = 0; j < n; ++j) {
            double theta = free_record[static_cast<size_t>(i) * n + j] +
                           ctrl_record[static_cast<size_t>(i) * n + j] + N * grid.x(j);
            fvals[(static_cast<size_t>(i) * n + j) * 2 + 0] = -hbuf[j] * std::sin(theta);
            fvals[(static_cast<size_t>(i) * n + j) * 2 + 1] = hbuf[j] * std::cos(theta);
        }
    }
    ControlSignal f(ControlSignal::premasked, grid, region, 2, dt, std::move(fvals));
    // replay at the synthesis step: the k = 1 system is the linear wave
    // equation in polar coordinates and stays dispersion-free at this dt
    Trajectory replay = evolve(initial, T, &f, nullptr, dt, std::max(1, steps / 32), 1.0);

    GramianSolveReport report = hum.report;
    report.residual = h1l2_distance(replay.final(), final_state);
    report.converged = report.residual <= defaults::ctrl_tol;
    if (!report.converged) throw NotConvergedError(report);
    return {std::move(hum.control), report, std::move(replay)};
}

} // namespace wavemaps
