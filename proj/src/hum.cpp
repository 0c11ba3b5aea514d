#include "wavemaps/hum.hpp"

#include <cmath>
#include <limits>

namespace wavemaps {

namespace {

// out = D2 v + mass_sq v - g  (periodic central second difference)
void scalar_acc(const Grid& grid, double mass_sq, std::span<const double> v,
                std::span<const double> g, std::span<double> out) {
    const int n = grid.n();
    const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    for (int j = 0; j < n; ++j) {
        int jm = (j + n - 1) % n, jp = (j + 1) % n;
        out[j] = (v[jp] - 2.0 * v[j] + v[jm]) * inv_h2 + mass_sq * v[j];
        if (!g.empty()) out[j] -= g[j];
    }
}

// y += scale * A2 x with A2 = D2 + mass_sq I (symmetric)
void add_a2(const Grid& grid, double mass_sq, std::span<const double> x, double scale,
            std::span<double> y) {
    const int n = grid.n();
    const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    for (int j = 0; j < n; ++j) {
        int jm = (j + n - 1) % n, jp = (j + 1) % n;
        y[j] += scale * ((x[jp] - 2.0 * x[j] + x[jm]) * inv_h2 + mass_sq * x[j]);
    }
}

} // namespace

double scalar_quad_form(const ScalarField& s, double mass_sq) {
    const int n = s.grid.n();
    const double inv_2h = 1.0 / (2.0 * s.grid.spacing());
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
        int jm = (j + n - 1) % n, jp = (j + 1) % n;
        double vx = (s.v[jp] - s.v[jm]) * inv_2h;
        total += vx * vx + s.v_t[j] * s.v_t[j] - mass_sq * s.v[j] * s.v[j];
    }
    return total * s.grid.spacing();
}

double scalar_h1l2_norm(const Grid& grid, std::span<const double> v, std::span<const double> q) {
    const int n = grid.n();
    const double inv_2h = 1.0 / (2.0 * grid.spacing());
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
        int jm = (j + n - 1) % n, jp = (j + 1) % n;
        double vx = (v[jp] - v[jm]) * inv_2h;
        total += v[j] * v[j] + vx * vx + q[j] * q[j];
    }
    return std::sqrt(total * grid.spacing());
}

ScalarRun kg_solve(const ScalarField& initial, const ControlSignal* g, double T, double dt,
                   double mass_sq, int save_every) {
    const Grid& grid = initial.grid;
    if (dt > defaults::cfl_ratio * grid.spacing() * (1.0 + 1e-12))
        throw std::runtime_error("CFL violated: dt exceeds cfl_ratio * spacing");
    if (g && (g->grid() != grid || g->dim() != 1))
        throw std::invalid_argument("kg_solve: forcing grid/dim mismatch");

    const int n = grid.n();
    ScalarRun run;
    run.dt = dt;
    run.mass_sq = mass_sq;

    ScalarField cur = initial;
    std::vector<double> acc(n), g_now(g ? n : 0), g_next(g ? n : 0), qh(n);
    if (g) g->value_at(0.0, g_now);

    run.states.push_back(cur);
    run.times.push_back(cur.time);
    run.quad_form.push_back(scalar_quad_form(cur, mass_sq));

    double t_local = 0.0;
    long step_index = 0;
    while (t_local < T - 1e-12) {
        double dts = std::min(dt, T - t_local);
        if (g) g->value_at(t_local + dts, g_next);
        scalar_acc(grid, mass_sq, cur.v, g_now, acc);
        for (int j = 0; j < n; ++j) qh[j] = cur.v_t[j] + 0.5 * dts * acc[j];
        for (int j = 0; j < n; ++j) cur.v[j] += dts * qh[j];
        scalar_acc(grid, mass_sq, cur.v, g_next, acc);
        for (int j = 0; j < n; ++j) cur.v_t[j] = qh[j] + 0.5 * dts * acc[j];
        cur.time += dts;
        t_local += dts;
        ++step_index;
        if (g) std::swap(g_now, g_next);

        run.times.push_back(cur.time);
        run.quad_form.push_back(scalar_quad_form(cur, mass_sq));
        if (step_index % save_every == 0 || t_local >= T - 1e-12) run.states.push_back(cur);
        for (double x : cur.v)
            if (!std::isfinite(x)) throw std::runtime_error("NaN detected: scalar solve blow-up");
    }
    return run;
}

namespace detail {

void scalar_run(const Grid& grid, double dt, int steps, double mass_sq,
                std::span<const double> g, std::span<double> v_io, std::span<double> q_io,
                std::span<double> record) {
    const int n = grid.n();
    std::vector<double> acc(n), qh(n);
    if (!record.empty()) std::copy(v_io.begin(), v_io.end(), record.begin());
    for (int i = 0; i < steps; ++i) {
        auto gi = g.empty() ? g : g.subspan(static_cast<size_t>(i) * n, n);
        auto gi1 = g.empty() ? g : g.subspan(static_cast<size_t>(i + 1) * n, n);
        scalar_acc(grid, mass_sq, v_io, gi, acc);
        for (int j = 0; j < n; ++j) qh[j] = q_io[j] + 0.5 * dt * acc[j];
        for (int j = 0; j < n; ++j) v_io[j] += dt * qh[j];
        scalar_acc(grid, mass_sq, v_io, gi1, acc);
        for (int j = 0; j < n; ++j) q_io[j] = qh[j] + 0.5 * dt * acc[j];
        if (!record.empty())
            std::copy(v_io.begin(), v_io.end(),
                      record.begin() + static_cast<size_t>(i + 1) * n);
    }
}

void scalar_forward(const Grid& grid, double dt, int steps, double mass_sq,
                    std::span<const double> g, std::span<double> v_out,
                    std::span<double> q_out) {
    const int n = grid.n();
    std::vector<double> v(n, 0.0), q(n, 0.0);
    scalar_run(grid, dt, steps, mass_sq, g, v, q, {});
    std::copy(v.begin(), v.end(), v_out.begin());
    std::copy(q.begin(), q.end(), q_out.begin());
}

void scalar_adjoint(const Grid& grid, double dt, int steps, double mass_sq,
                    std::span<const double> vbar_in, std::span<const double> qbar_in,
                    std::span<double> g_out) {
    const int n = grid.n();
    std::vector<double> vbar(vbar_in.begin(), vbar_in.end());
    std::vector<double> qbar(qbar_in.begin(), qbar_in.end());
    std::vector<double> aux(n);
    std::fill(g_out.begin(), g_out.end(), 0.0);
    for (int i = steps - 1; i >= 0; --i) {
        double* gb1 = g_out.data() + static_cast<size_t>(i + 1) * n;
        double* gb0 = g_out.data() + static_cast<size_t>(i) * n;
        for (int j = 0; j < n; ++j) aux[j] = 0.5 * dt * qbar[j];
        add_a2(grid, mass_sq, aux, 1.0, vbar);
        for (int j = 0; j < n; ++j) gb1[j] -= aux[j];
        for (int j = 0; j < n; ++j) qbar[j] += dt * vbar[j];
        for (int j = 0; j < n; ++j) aux[j] = 0.5 * dt * qbar[j];
        add_a2(grid, mass_sq, aux, 1.0, vbar);
        for (int j = 0; j < n; ++j) gb0[j] -= aux[j];
    }
}

} // namespace detail

HumResult hum_steer(const Grid& grid, const ControlRegion& region, double T,
                    std::span<const double> target_v, std::span<const double> target_q,
                    double mass_sq, double dt_hint, double tol, int max_iter, double reg) {
    const int n = grid.n();
    if (static_cast<int>(target_v.size()) != n || static_cast<int>(target_q.size()) != n)
        throw std::invalid_argument("hum_steer: target size mismatch");
    if (T <= 0.0) throw std::invalid_argument("hum_steer: T must be > 0");
    double dt_cap = std::min(dt_hint, grid.spacing());
    int steps = static_cast<int>(std::ceil(T / dt_cap - 1e-12));
    double dt = T / steps;

    std::vector<double> chi(n);
    for (int j = 0; j < n; ++j) chi[j] = region.cutoff(grid.x(j));

    const size_t gsz = static_cast<size_t>(steps + 1) * n;
    std::vector<double> gbuf(gsz), lam_v(n, 0.0), lam_q(n, 0.0);

    // Gramian apply: (v,q) -> L(chi^2 L^T (v,q)) + reg (v,q)
    auto apply = [&](std::span<const double> in_v, std::span<const double> in_q,
                     std::span<double> out_v, std::span<double> out_q) {
        detail::scalar_adjoint(grid, dt, steps, mass_sq, in_v, in_q, gbuf);
        for (int i = 0; i <= steps; ++i)
            for (int j = 0; j < n; ++j) gbuf[static_cast<size_t>(i) * n + j] *= chi[j] * chi[j];
        detail::scalar_forward(grid, dt, steps, mass_sq, gbuf, out_v, out_q);
        for (int j = 0; j < n; ++j) {
            out_v[j] += reg * in_v[j];
            out_q[j] += reg * in_q[j];
        }
    };

    auto dot2 = [&](std::span<const double> av, std::span<const double> aq,
                    std::span<const double> bv, std::span<const double> bq) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += av[j] * bv[j] + aq[j] * bq[j];
        return s;
    };

    GramianSolveReport report;
    report.min_curvature_estimate = std::numeric_limits<double>::infinity();

    std::vector<double> rv(target_v.begin(), target_v.end());
    std::vector<double> rq(target_q.begin(), target_q.end());
    std::vector<double> pv = rv, pq = rq, apv(n), apq(n), dv(n), dq(n);

    double target_norm = scalar_h1l2_norm(grid, target_v, target_q);
    double r2 = dot2(rv, rq, rv, rq);
    double defect_norm = target_norm;
    int it = 0;
    if (target_norm <= 1e-14) {
        report.converged = true;
        report.residual = 0.0;
        report.min_curvature_estimate = 0.0;
    } else {
        while (it < max_iter) {
            ++it;
            apply(pv, pq, apv, apq);
            double p2 = dot2(pv, pq, pv, pq);
            double pap = dot2(pv, pq, apv, apq);
            if (p2 > 0.0)
                report.min_curvature_estimate = std::min(report.min_curvature_estimate, pap / p2);
            if (pap <= 0.0) break;
            double alpha = r2 / pap;
            for (int j = 0; j < n; ++j) {
                lam_v[j] += alpha * pv[j];
                lam_q[j] += alpha * pq[j];
                rv[j] -= alpha * apv[j];
                rq[j] -= alpha * apq[j];
            }
            double r2n = dot2(rv, rq, rv, rq);
            // steering defect = target - Lambda lam = r_cg + reg * lam
            for (int j = 0; j < n; ++j) {
                dv[j] = rv[j] + reg * lam_v[j];
                dq[j] = rq[j] + reg * lam_q[j];
            }
            defect_norm = scalar_h1l2_norm(grid, dv, dq);
            if (defect_norm <= 0.15 * tol) break;
            double beta = r2n / r2;
            r2 = r2n;
            for (int j = 0; j < n; ++j) {
                pv[j] = rv[j] + beta * pv[j];
                pq[j] = rq[j] + beta * pq[j];
            }
        }
        report.residual = defect_norm;
        report.converged = defect_norm <= tol;
        if (!std::isfinite(report.min_curvature_estimate)) report.min_curvature_estimate = 0.0;
    }
    report.iterations = it;

    // pre-mask control u = chi * L^T lam; the masking constructor applies the
    // second chi factor, so the stored signal is the physical g = chi^2 L^T lam.
    detail::scalar_adjoint(grid, dt, steps, mass_sq, lam_v, lam_q, gbuf);
    for (int i = 0; i <= steps; ++i)
        for (int j = 0; j < n; ++j) gbuf[static_cast<size_t>(i) * n + j] *= chi[j];
    ControlSignal sig(grid, region, 1, dt, std::move(gbuf));
    report.control_norm = std::sqrt(sig.squared_l2());
    return {std::move(sig), report};
}

} // namespace wavemaps
