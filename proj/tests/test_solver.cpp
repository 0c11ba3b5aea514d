#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "wavemaps/solver.hpp"

using namespace wavemaps;

namespace {

FieldState rotating_phase(const Grid& g, double t) {
    FieldState s(g, 1);
    s.time = t;
    for (int j = 0; j < g.n(); ++j) {
        s.node(j)[0] = std::cos(g.x(j) + t);
        s.node(j)[1] = std::sin(g.x(j) + t);
        s.node_t(j)[0] = -std::sin(g.x(j) + t);
        s.node_t(j)[1] = std::cos(g.x(j) + t);
    }
    return s;
}

double rotating_phase_error(int n, double T) {
    Grid g(n);
    Trajectory traj = evolve(rotating_phase(g, 0.0), T, nullptr, nullptr, 0.5 * g.spacing(), 1 << 30);
    FieldState ref = rotating_phase(g, T);
    double worst = 0.0;
    for (size_t p = 0; p < ref.phi.size(); ++p)
        worst = std::max(worst, std::abs(traj.final().phi[p] - ref.phi[p]));
    return worst;
}

std::vector<double> random_orthogonal3(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::vector<double> A(9);
    for (int r = 0; r < 3; ++r) {
        double v[3];
        for (auto& x : v) x = gauss(rng);
        for (int p = 0; p < r; ++p) {
            double dot = 0;
            for (int c = 0; c < 3; ++c) dot += v[c] * A[p * 3 + c];
            for (int c = 0; c < 3; ++c) v[c] -= dot * A[p * 3 + c];
        }
        double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        for (int c = 0; c < 3; ++c) A[r * 3 + c] = v[c] / norm;
    }
    return A;
}

} // namespace

TEST_CASE("damping profile validation") {
    Grid g(64);
    ControlRegion region(0.0, 3.0);
    DampingProfile d(g, region, 1.0);
    for (int j = 0; j < g.n(); ++j) {
        CHECK(d.a()[j] >= 0.0);
        if (!region.contains(g.x(j))) CHECK(d.a()[j] == 0.0);
    }
    CHECK_THROWS(DampingProfile(g, region, std::vector<double>(g.n(), 0.0)));
    std::vector<double> bad(g.n(), 0.0);
    bad[0] = 1.0; // x = 0 is outside the open arc (0, 3)
    CHECK_THROWS(DampingProfile(g, region, bad));
}

TEST_CASE("control signal masking and interpolation") {
    Grid g(64);
    ControlRegion region(1.0, 4.0);
    std::vector<double> vals(static_cast<size_t>(3) * g.n(), 1.0);
    ControlSignal sig(g, region, 1, 0.5, vals);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < g.n(); ++j)
            if (!region.contains(g.x(j))) CHECK(sig.at(i)[j] == 0.0);

    std::vector<double> out(g.n());
    sig.value_at(0.25, out); // halfway between the first two instants
    int mid = g.n() / 4;     // a node well inside the region
    CHECK(out[mid] == doctest::Approx(sig.at(0)[mid]));
    sig.value_at(5.0, out); // beyond the window
    for (double v : out) CHECK(v == 0.0);

    CHECK_THROWS(ControlSignal(ControlSignal::premasked, g, region, 1, 0.5,
                               std::vector<double>(static_cast<size_t>(3) * g.n(), 1.0)));
}

TEST_CASE("constant states are stationary") {
    Grid g(64);
    std::vector<double> p = {0.3, -0.4, 0.8660254037844387};
    FieldState s = FieldState::constant(g, 2, p);
    FieldState next = step(s, 0.4 * g.spacing(), nullptr);
    for (size_t q = 0; q < s.phi.size(); ++q) {
        CHECK(next.phi[q] == doctest::Approx(s.phi[q]).epsilon(1e-15));
        CHECK(std::abs(next.phi_t[q]) < 1e-15);
    }
}

TEST_CASE("equator is exactly stationary, with and without damping") {
    Grid g(128);
    FieldState eq = FieldState::equator(g, 2);
    DampingProfile damp(g, ControlRegion(0.5, 2.5), 1.0);
    Trajectory traj = evolve(eq, 2.0, nullptr, &damp, 0.5 * g.spacing(), 1 << 30);
    CHECK(h1l2_distance(traj.final(), eq) < 1e-12);
    CHECK(traj.trace.energy.back() == doctest::Approx(traj.trace.energy.front()).epsilon(1e-14));
}

TEST_CASE("rotating-phase solution: second-order convergence") {
    double e1 = rotating_phase_error(64, 3.0);
    double e2 = rotating_phase_error(128, 3.0);
    double e3 = rotating_phase_error(256, 3.0);
    CHECK(e1 / e2 > 3.5);
    CHECK(e1 / e2 < 4.5);
    CHECK(e2 / e3 > 3.5);
    CHECK(e2 / e3 < 4.5);
}

TEST_CASE("CFL violation and NaN detection") {
    Grid g(64);
    FieldState eq = FieldState::equator(g, 2);
    CHECK_THROWS_WITH_AS(static_cast<void>(step(eq, g.spacing(), nullptr)),
                         doctest::Contains("CFL"), std::runtime_error);
    FieldState bad = eq;
    bad.phi_t[0] = 1e200;
    bad.phi_t[1] = 0.0; // keep tangency at node 0: phi = (1, 0, 0)
    CHECK_THROWS_WITH_AS(static_cast<void>(step(bad, 0.4 * g.spacing(), nullptr)),
                         doctest::Contains("NaN detected"), std::runtime_error);
}

TEST_CASE("free evolution conserves energy to scheme accuracy") {
    Grid g(128);
    FieldState s = FieldState::equator(g, 2);
    for (int j = 0; j < g.n(); ++j) s.node_t(j)[2] = 0.4 * std::sin(2.0 * g.x(j));
    s.project_to_sphere();
    Trajectory traj = evolve(s, 5.0, nullptr, nullptr, 0.5 * g.spacing(), 1 << 30);
    double e0 = traj.trace.energy.front();
    for (double e : traj.trace.energy) CHECK(std::abs(e - e0) < 5e-4 * e0);
}

TEST_CASE("damped runs: monotone decay and energy balance") {
    Grid g(256);
    FieldState s = FieldState::equator(g, 2);
    for (int j = 0; j < g.n(); ++j) s.node_t(j)[2] = 0.5 * std::sin(g.x(j));
    s.project_to_sphere();
    DampingProfile damp(g, ControlRegion(0.0, 4.5), 1.0);
    Trajectory traj = evolve(s, 10.0, nullptr, &damp, 0.5 * g.spacing(), 1 << 30);

    SUBCASE("energy is nonincreasing up to mono_tol") {
        for (size_t i = 1; i < traj.trace.energy.size(); ++i)
            CHECK(traj.trace.energy[i] <= traj.trace.energy[i - 1] + defaults::mono_tol);
        CHECK(traj.trace.energy.back() < 0.9 * traj.trace.energy.front());
    }
    SUBCASE("balance residual quarters under refinement") {
        double r1 = energy_balance_residual(traj, damp);
        Grid g2(512);
        FieldState s2 = FieldState::equator(g2, 2);
        for (int j = 0; j < g2.n(); ++j) s2.node_t(j)[2] = 0.5 * std::sin(g2.x(j));
        s2.project_to_sphere();
        DampingProfile damp2(g2, ControlRegion(0.0, 4.5), 1.0);
        Trajectory traj2 = evolve(s2, 10.0, nullptr, &damp2, 0.5 * g2.spacing(), 1 << 30);
        double r2 = energy_balance_residual(traj2, damp2);
        CHECK(r1 / r2 > 2.5);
        CHECK(r1 / r2 < 6.0);
    }
    SUBCASE("zero-velocity stationary run balances exactly") {
        FieldState eq = FieldState::equator(g, 2);
        Trajectory still = evolve(eq, 1.0, nullptr, &damp, 0.5 * g.spacing(), 1 << 30);
        CHECK(energy_balance_residual(still, damp) < 1e-12);
    }
}

TEST_CASE("forced energy rate residual") {
    Grid g(128);
    FieldState eq = FieldState::equator(g, 2);
    double dt = 0.5 * g.spacing();
    SUBCASE("forcing parallel to phi does no work") {
        int steps = static_cast<int>(std::ceil(2.0 / dt));
        std::vector<double> vals(static_cast<size_t>(steps + 1) * g.n() * 3, 0.0);
        for (int i = 0; i <= steps; ++i)
            for (int j = 0; j < g.n(); ++j) {
                vals[(static_cast<size_t>(i) * g.n() + j) * 3 + 0] = 0.5 * std::cos(g.x(j));
                vals[(static_cast<size_t>(i) * g.n() + j) * 3 + 1] = 0.5 * std::sin(g.x(j));
            }
        ControlSignal f(g, ControlRegion::full(), 3, 2.0 / steps, std::move(vals));
        Trajectory traj = evolve(eq, 2.0, &f, nullptr, dt, 1 << 30);
        CHECK(forced_energy_rate_residual(traj, f) < 1e-10);
        CHECK(h1l2_distance(traj.final(), eq) < 1e-10); // f^perp = 0: nothing happens
    }
    SUBCASE("zero forcing reduces to the conservation check") {
        std::vector<double> vals(static_cast<size_t>(2) * g.n() * 3, 0.0);
        ControlSignal f(g, ControlRegion::full(), 3, 2.0, std::move(vals));
        Trajectory traj = evolve(eq, 2.0, &f, nullptr, dt, 1 << 30);
        CHECK(forced_energy_rate_residual(traj, f) < 1e-12);
    }
}

TEST_CASE("equivariance under orthogonal maps") {
    Grid g(64);
    FieldState s = FieldState::equator(g, 2);
    for (int j = 0; j < g.n(); ++j) s.node_t(j)[2] = 0.3 * std::cos(2.0 * g.x(j));
    s.project_to_sphere();
    DampingProfile damp(g, ControlRegion(1.0, 4.0), 1.0);

    auto A = random_orthogonal3(42);
    auto rotate = [&](const FieldState& in) {
        FieldState out(in.grid, in.k);
        out.time = in.time;
        for (int j = 0; j < in.n(); ++j)
            for (int r = 0; r < 3; ++r) {
                double pv = 0, vv = 0;
                for (int c = 0; c < 3; ++c) {
                    pv += A[r * 3 + c] * in.phi[static_cast<size_t>(j) * 3 + c];
                    vv += A[r * 3 + c] * in.phi_t[static_cast<size_t>(j) * 3 + c];
                }
                out.phi[static_cast<size_t>(j) * 3 + r] = pv;
                out.phi_t[static_cast<size_t>(j) * 3 + r] = vv;
            }
        return out;
    };

    Trajectory a = evolve(rotate(s), 3.0, nullptr, &damp, 0.5 * g.spacing(), 1 << 30);
    Trajectory b = evolve(s, 3.0, nullptr, &damp, 0.5 * g.spacing(), 1 << 30);
    FieldState rb = rotate(b.final());
    double worst = 0.0;
    for (size_t p = 0; p < rb.phi.size(); ++p) {
        worst = std::max(worst, std::abs(a.final().phi[p] - rb.phi[p]));
        worst = std::max(worst, std::abs(a.final().phi_t[p] - rb.phi_t[p]));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("tangency drift stays below 1e-8 over 1e5 steps") {
    Grid g(64);
    FieldState s = FieldState::equator(g, 2);
    for (int j = 0; j < g.n(); ++j) s.node_t(j)[2] = 0.3 * std::sin(g.x(j));
    s.project_to_sphere();
    double dt = 0.5 * g.spacing();
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) {
        s = step(s, dt, nullptr);
        if (i % 1000 == 0) worst = std::max(worst, s.constraint_error());
    }
    worst = std::max(worst, s.constraint_error());
    CHECK(worst < 1e-8);
}

TEST_CASE("closed-form radial trajectory") {
    Grid g(128);
    double dt = 0.5 * g.spacing();
    SUBCASE("schedule boundary conditions are enforced") {
        CHECK_THROWS(RadialSchedule(2.0, -0.1));
        CHECK_THROWS(RadialSchedule(2.0, std::numbers::pi));
        RadialSchedule ok(2.0, 1.0);
        CHECK(ok.theta(0.0) == 0.0);
        CHECK(ok.dtheta(0.0) == 0.0);
        CHECK(ok.dtheta(2.0) == doctest::Approx(0.0));
        CHECK(ok.theta(2.0) == doctest::Approx(1.0));
    }
    SUBCASE("theta == 0 is the static equator with zero control") {
        RadialSchedule still(2.0, 0.0);
        auto [traj, control] = closed_form_radial(still, g, dt);
        for (double e : traj.trace.energy) CHECK(e == doctest::Approx(two_pi));
        for (double v : control.values()) CHECK(v == 0.0);
        CHECK(h1l2_distance(traj.final(), FieldState::equator(g, 2)) < 1e-12);
    }
    SUBCASE("theta_f = pi/2 ends at zero energy") {
        RadialSchedule sched(two_pi, std::numbers::pi / 2);
        auto [traj, control] = closed_form_radial(sched, g, dt);
        CHECK(traj.trace.energy.front() == doctest::Approx(two_pi));
        CHECK(traj.trace.energy.back() == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(traj.trace.energy.back() < two_pi);
        // control third component w cos(theta) vanishes at T where theta = pi/2
        auto last = control.at(control.instants() - 1);
        CHECK(std::abs(last[2]) < 1e-12);
    }
    SUBCASE("replaying the control through the solver tracks the closed form") {
        RadialSchedule sched(two_pi, std::numbers::pi / 2);
        auto [closed, control] = closed_form_radial(sched, g, dt);
        Trajectory sim = evolve(FieldState::equator(g, 2), two_pi, &control, nullptr,
                                control.dt(), 1 << 30);
        double worst = 0.0;
        for (size_t p = 0; p < sim.final().phi.size(); ++p)
            worst = std::max(worst, std::abs(sim.final().phi[p] - closed.final().phi[p]));
        double h = g.spacing(), dts = control.dt();
        CHECK(worst <= 20.0 * (h * h + dts * dts));
    }
}
