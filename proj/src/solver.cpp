#include "wavemaps/solver.hpp"

#include <cmath>

namespace wavemaps {

DampingProfile::DampingProfile(const Grid& grid, const ControlRegion& region, double amplitude)
    : grid_(grid), region_(region), a_(grid.n()) {
    if (amplitude <= 0.0) throw std::invalid_argument("DampingProfile: amplitude must be > 0");
    for (int j = 0; j < grid.n(); ++j) a_[j] = amplitude * region.cutoff(grid.x(j));
    validate();
}

DampingProfile::DampingProfile(const Grid& grid, const ControlRegion& region,
                               std::vector<double> samples)
    : grid_(grid), region_(region), a_(std::move(samples)) {
    if (static_cast<int>(a_.size()) != grid.n())
        throw std::invalid_argument("DampingProfile: sample count mismatch");
    validate();
}

void DampingProfile::validate() const {
    bool any = false;
    for (int j = 0; j < grid_.n(); ++j) {
        if (a_[j] < 0.0) throw std::invalid_argument("DampingProfile: negative sample");
        if (a_[j] != 0.0) {
            if (!region_.contains(grid_.x(j)))
                throw std::invalid_argument("DampingProfile: support exceeds region");
            any = true;
        }
    }
    if (!any) throw std::invalid_argument("DampingProfile: profile is identically zero");
}

ControlSignal::ControlSignal(const Grid& grid, const ControlRegion& region, int dim, double dt,
                             std::vector<double> values)
    : grid_(grid), region_(region), dim_(dim), dt_(dt), values_(std::move(values)) {
    if (dt <= 0.0) throw std::invalid_argument("ControlSignal: dt must be > 0");
    size_t per = static_cast<size_t>(grid.n()) * dim;
    if (values_.empty() || values_.size() % per != 0)
        throw std::invalid_argument("ControlSignal: value buffer size mismatch");
    m_ = static_cast<int>(values_.size() / per);
    for (int i = 0; i < m_; ++i)
        for (int j = 0; j < grid.n(); ++j) {
            double chi = region.cutoff(grid.x(j));
            for (int c = 0; c < dim; ++c) values_[(static_cast<size_t>(i) * grid.n() + j) * dim + c] *= chi;
        }
}

ControlSignal::ControlSignal(premasked_t, const Grid& grid, const ControlRegion& region, int dim,
                             double dt, std::vector<double> values)
    : grid_(grid), region_(region), dim_(dim), dt_(dt), values_(std::move(values)) {
    if (dt <= 0.0) throw std::invalid_argument("ControlSignal: dt must be > 0");
    size_t per = static_cast<size_t>(grid.n()) * dim;
    if (values_.empty() || values_.size() % per != 0)
        throw std::invalid_argument("ControlSignal: value buffer size mismatch");
    m_ = static_cast<int>(values_.size() / per);
    for (int i = 0; i < m_; ++i)
        for (int j = 0; j < grid.n(); ++j) {
            if (region.contains(grid.x(j))) continue;
            for (int c = 0; c < dim; ++c)
                if (values_[(static_cast<size_t>(i) * grid.n() + j) * dim + c] != 0.0)
                    throw std::invalid_argument("ControlSignal: values do not vanish outside region");
        }
}

void ControlSignal::value_at(double t, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    if (t < -1e-12 || t > span() + 1e-12) return;
    double pos = t / dt_;
    int i0 = static_cast<int>(std::floor(pos));
    if (i0 < 0) i0 = 0;
    if (i0 >= m_ - 1) i0 = m_ - 2;
    if (m_ == 1) i0 = 0;
    double w = pos - i0;
    auto lo = at(i0);
    if (m_ == 1 || w <= 0.0) {
        std::copy(lo.begin(), lo.end(), out.begin());
        return;
    }
    auto hi = at(std::min(i0 + 1, m_ - 1));
    for (size_t p = 0; p < out.size(); ++p) out[p] = (1.0 - w) * lo[p] + w * hi[p];
}

double ControlSignal::squared_l2() const {
    double sum = 0.0;
    size_t per = static_cast<size_t>(grid_.n()) * dim_;
    for (int i = 0; i < m_; ++i) {
        double wt = (i == 0 || i == m_ - 1) ? 0.5 : 1.0;
        auto v = at(i);
        double s = 0.0;
        for (size_t p = 0; p < per; ++p) s += v[p] * v[p];
        sum += wt * s;
    }
    return sum * grid_.spacing() * dt_;
}

namespace {

// Acceleration of the constrained system:
//   phi_tt = D2 phi - (|phi_t|^2 - |D phi|^2) phi - f^{phi perp} - a phi_t.
void acceleration(const Grid& grid, int dim, std::span<const double> phi,
                  std::span<const double> vel, std::span<const double> forcing,
                  const DampingProfile* damping, std::span<double> out) {
    const int n = grid.n();
    const double h = grid.spacing();
    const double inv_h2 = 1.0 / (h * h);
    const double inv_2h = 1.0 / (2.0 * h);
    for (int j = 0; j < n; ++j) {
        const double* p = phi.data() + static_cast<size_t>(j) * dim;
        const double* pm = phi.data() + static_cast<size_t>(grid.wrap(j - 1)) * dim;
        const double* pp = phi.data() + static_cast<size_t>(grid.wrap(j + 1)) * dim;
        const double* v = vel.data() + static_cast<size_t>(j) * dim;
        double* o = out.data() + static_cast<size_t>(j) * dim;

        double v2 = 0.0, dx2 = 0.0;
        for (int c = 0; c < dim; ++c) {
            double dx = (pp[c] - pm[c]) * inv_2h;
            v2 += v[c] * v[c];
            dx2 += dx * dx;
        }
        double mult = v2 - dx2;
        double fdot = 0.0;
        if (!forcing.empty()) {
            const double* f = forcing.data() + static_cast<size_t>(j) * dim;
            for (int c = 0; c < dim; ++c) fdot += f[c] * p[c];
        }
        double aj = damping ? damping->a()[j] : 0.0;
        for (int c = 0; c < dim; ++c) {
            double lap = (pp[c] - 2.0 * p[c] + pm[c]) * inv_h2;
            double fperp = forcing.empty()
                               ? 0.0
                               : forcing[static_cast<size_t>(j) * dim + c] - fdot * p[c];
            o[c] = lap - mult * p[c] - fperp - aj * v[c];
        }
    }
}

bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace

FieldState step(const FieldState& state, double dt, std::span<const double> forcing_now,
                std::span<const double> forcing_next, const DampingProfile* damping, double cfl) {
    const Grid& grid = state.grid;
    const int dim = state.dim();
    if (dt > cfl * grid.spacing() * (1.0 + 1e-12))
        throw std::runtime_error("CFL violated: dt exceeds cfl_ratio * spacing");
    if (damping && damping->grid() != grid)
        throw std::invalid_argument("step: damping grid mismatch");

    const size_t sz = state.phi.size();
    std::vector<double> acc(sz), vhalf(sz), vpred(sz);

    acceleration(grid, dim, state.phi, state.phi_t, forcing_now, damping, acc);
    for (size_t p = 0; p < sz; ++p) vhalf[p] = state.phi_t[p] + 0.5 * dt * acc[p];

    FieldState next(grid, state.k);
    next.time = state.time + dt;
    for (size_t p = 0; p < sz; ++p) next.phi[p] = state.phi[p] + dt * vhalf[p];
    // renormalize positions before the closing kick
    {
        for (int j = 0; j < grid.n(); ++j) {
            double* q = next.phi.data() + static_cast<size_t>(j) * dim;
            double n2 = 0.0;
            for (int c = 0; c < dim; ++c) n2 += q[c] * q[c];
            double inv = 1.0 / std::sqrt(n2);
            for (int c = 0; c < dim; ++c) q[c] *= inv;
        }
    }

    // closing kick with one corrector pass for the velocity-dependent terms
    acceleration(grid, dim, next.phi, vhalf, forcing_next, damping, acc);
    for (size_t p = 0; p < sz; ++p) vpred[p] = vhalf[p] + 0.5 * dt * acc[p];
    acceleration(grid, dim, next.phi, vpred, forcing_next, damping, acc);
    for (size_t p = 0; p < sz; ++p) next.phi_t[p] = vhalf[p] + 0.5 * dt * acc[p];

    // tangential projection of the velocity
    for (int j = 0; j < grid.n(); ++j) {
        double* q = next.phi.data() + static_cast<size_t>(j) * dim;
        double* v = next.phi_t.data() + static_cast<size_t>(j) * dim;
        double dot = 0.0;
        for (int c = 0; c < dim; ++c) dot += q[c] * v[c];
        for (int c = 0; c < dim; ++c) v[c] -= dot * q[c];
    }

    if (!all_finite(next.phi) || !all_finite(next.phi_t))
        throw std::runtime_error("NaN detected: numerical blow-up in step");
    return next;
}

FieldState step(const FieldState& state, double dt, const DampingProfile* damping) {
    return step(state, dt, {}, {}, damping);
}

Trajectory evolve(const FieldState& initial, double T, const ControlSignal* forcing,
                  const DampingProfile* damping, double dt, int save_every, double cfl) {
    if (T <= 0.0) throw std::invalid_argument("evolve: T must be > 0");
    if (dt <= 0.0) throw std::invalid_argument("evolve: dt must be > 0");
    if (save_every < 1) throw std::invalid_argument("evolve: save_every must be >= 1");
    const Grid& grid = initial.grid;
    if (forcing && (forcing->grid() != grid || forcing->dim() != initial.dim()))
        throw std::invalid_argument("evolve: forcing grid/dimension mismatch");
    initial.validate(1e-8);

    Trajectory traj;
    traj.dt = dt;
    traj.n_points = grid.n();
    traj.save_every = save_every;

    const int n = grid.n();
    const int dim = initial.dim();
    const size_t sz = initial.phi.size();
    std::vector<double> f_now, f_next, fperp(forcing ? sz : 0);

    FieldState cur = initial;
    cur.validate(1e-8);

    auto dissipation_rate = [&](const FieldState& s) {
        if (!damping) return 0.0;
        double r = 0.0;
        for (int j = 0; j < n; ++j) {
            double v2 = 0.0;
            auto v = s.node_t(j);
            for (int c = 0; c < dim; ++c) v2 += v[c] * v[c];
            r += damping->a()[j] * v2;
        }
        return 2.0 * r * grid.spacing();
    };
    auto forcing_power = [&](const FieldState& s, std::span<const double> f) {
        // 2 int phi_t . f^{phi perp} dx (equals 2 int phi_t . f since phi_t is tangent)
        if (f.empty()) return 0.0;
        double r = 0.0;
        for (size_t p = 0; p < sz; ++p) r += s.phi_t[p] * f[p];
        return 2.0 * r * grid.spacing();
    };

    if (forcing) {
        f_now.resize(sz);
        f_next.resize(sz);
        forcing->value_at(cur.time - initial.time, f_now);
    }

    traj.trace.times.push_back(cur.time);
    traj.trace.energy.push_back(energy_unchecked(cur));
    traj.trace.dissipation.push_back(0.0);
    traj.trace.forcing_work.push_back(0.0);
    traj.trace.tangency.push_back(cur.constraint_error());
    traj.states.push_back(cur);

    double t_local = 0.0;
    double cum_diss = 0.0, cum_work = 0.0;
    double rate_prev = dissipation_rate(cur);
    double work_prev = forcing_power(cur, f_now);
    long step_index = 0;
    const double t_end = T;
    while (t_local < t_end - 1e-12) {
        double dt_step = std::min(dt, t_end - t_local);
        if (forcing) forcing->value_at(t_local + dt_step, f_next);
        FieldState nxt = step(cur, dt_step, f_now, f_next, damping, cfl);
        double rate_next = dissipation_rate(nxt);
        cum_diss += 0.5 * (rate_prev + rate_next) * dt_step;
        double work_next = forcing_power(nxt, f_next);
        cum_work += 0.5 * (work_prev + work_next) * dt_step;
        rate_prev = rate_next;
        work_prev = work_next;
        cur = std::move(nxt);
        if (forcing) std::swap(f_now, f_next);
        t_local += dt_step;
        ++step_index;

        traj.trace.times.push_back(cur.time);
        traj.trace.energy.push_back(energy_unchecked(cur));
        traj.trace.dissipation.push_back(cum_diss);
        traj.trace.forcing_work.push_back(cum_work);
        traj.trace.tangency.push_back(cur.constraint_error());
        if (step_index % save_every == 0 || t_local >= t_end - 1e-12) traj.states.push_back(cur);
    }
    traj.trace.validate();
    traj.final().validate(1e-8);
    return traj;
}

double energy_balance_residual(const Trajectory& traj, const DampingProfile& damping) {
    if (damping.grid().n() != traj.n_points)
        throw std::invalid_argument("energy_balance_residual: grid mismatch");
    const double e0 = traj.trace.energy.front();
    double worst = 0.0;
    for (size_t i = 0; i < traj.trace.times.size(); ++i)
        worst = std::max(worst,
                         std::abs(traj.trace.energy[i] - e0 + traj.trace.dissipation[i]));
    return worst;
}

double forced_energy_rate_residual(const Trajectory& traj, const ControlSignal& forcing) {
    if (forcing.grid().n() != traj.n_points)
        throw std::invalid_argument("forced_energy_rate_residual: grid mismatch");
    const double e0 = traj.trace.energy.front();
    double worst = 0.0;
    for (size_t i = 0; i < traj.trace.times.size(); ++i)
        worst = std::max(worst,
                         std::abs(traj.trace.energy[i] - e0 + traj.trace.forcing_work[i]));
    return worst;
}

RadialSchedule::RadialSchedule(double T, double theta_f) : T_(T), theta_f_(theta_f) {
    if (T <= 0.0) throw std::invalid_argument("RadialSchedule: T must be > 0");
    // theta_f = 0 is the degenerate static-equator schedule
    if (!(theta_f >= 0.0 && theta_f < std::numbers::pi))
        throw std::invalid_argument("RadialSchedule: theta_f must lie in [0, pi)");
}

double RadialSchedule::theta(double t) const {
    double u = std::clamp(t / T_, 0.0, 1.0);
    return theta_f_ * u * u * (3.0 - 2.0 * u);
}

double RadialSchedule::dtheta(double t) const {
    double u = std::clamp(t / T_, 0.0, 1.0);
    return theta_f_ * 6.0 * u * (1.0 - u) / T_;
}

double RadialSchedule::ddtheta(double t) const {
    double u = std::clamp(t / T_, 0.0, 1.0);
    return theta_f_ * 6.0 * (1.0 - 2.0 * u) / (T_ * T_);
}

std::pair<Trajectory, ControlSignal> closed_form_radial(const RadialSchedule& schedule,
                                                        const Grid& grid, double dt,
                                                        int save_every) {
    const double T = schedule.T();
    if (std::abs(schedule.theta(0.0)) > 1e-14 || std::abs(schedule.dtheta(0.0)) > 1e-12 ||
        std::abs(schedule.dtheta(T)) > 1e-12 || schedule.theta(T) < 0.0 ||
        !(schedule.theta(T) < std::numbers::pi))
        throw std::invalid_argument("closed_form_radial: schedule boundary conditions violated");

    const int n = grid.n();
    int steps = static_cast<int>(std::ceil(T / dt - 1e-12));
    double dt_eff = T / steps;

    Trajectory traj;
    traj.dt = dt_eff;
    traj.n_points = n;
    traj.save_every = save_every;
    std::vector<double> control(static_cast<size_t>(steps + 1) * n * 3, 0.0);

    for (int i = 0; i <= steps; ++i) {
        double t = dt_eff * i;
        double th = schedule.theta(t), dth = schedule.dtheta(t), ddth = schedule.ddtheta(t);
        double w = -ddth + std::sin(th) * std::cos(th);
        FieldState s(grid, 2);
        s.time = t;
        for (int j = 0; j < n; ++j) {
            double cx = std::cos(grid.x(j)), sx = std::sin(grid.x(j));
            double* p = s.phi.data() + static_cast<size_t>(j) * 3;
            double* v = s.phi_t.data() + static_cast<size_t>(j) * 3;
            p[0] = std::cos(th) * cx;
            p[1] = std::cos(th) * sx;
            p[2] = std::sin(th);
            v[0] = -std::sin(th) * dth * cx;
            v[1] = -std::sin(th) * dth * sx;
            v[2] = std::cos(th) * dth;
            double* f = control.data() + (static_cast<size_t>(i) * n + j) * 3;
            f[0] = -w * std::sin(th) * cx;
            f[1] = -w * std::sin(th) * sx;
            f[2] = w * std::cos(th);
        }
        traj.trace.times.push_back(t);
        traj.trace.energy.push_back(two_pi * (dth * dth + std::cos(th) * std::cos(th)));
        traj.trace.dissipation.push_back(0.0);
        traj.trace.forcing_work.push_back(traj.trace.energy.front() - traj.trace.energy.back());
        traj.trace.tangency.push_back(s.constraint_error());
        if (i % save_every == 0 || i == steps) traj.states.push_back(std::move(s));
    }
    ControlSignal sig(ControlSignal::premasked, grid, ControlRegion::full(), 3, dt_eff,
                      std::move(control));
    return {std::move(traj), std::move(sig)};
}

} // namespace wavemaps
