#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include "wavemaps/obstruction.hpp"

using namespace wavemaps;

namespace {

double simpson(double lo, double hi, int panels, const std::function<double(double)>& f) {
    double h = (hi - lo) / panels;
    double sum = f(lo) + f(hi);
    for (int i = 1; i < panels; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
    return sum * h / 3.0;
}

} // namespace

TEST_CASE("family A slices") {
    double out[3];
    SUBCASE("s = pi/2 is the equator") {
        for (double x : {0.0, 1.0, 2.5}) {
            family_A(std::numbers::pi / 2, x, std::span<double>(out, 3));
            CHECK(out[0] == doctest::Approx(std::cos(x)));
            CHECK(out[1] == doctest::Approx(std::sin(x)));
            CHECK(out[2] == doctest::Approx(0.0));
        }
    }
    SUBCASE("s = 0 collapses to the pole") {
        for (double x : {0.0, 2.0}) {
            family_A(0.0, x, std::span<double>(out, 3));
            CHECK(out[0] == doctest::Approx(0.0));
            CHECK(out[1] == doctest::Approx(0.0));
            CHECK(out[2] == doctest::Approx(1.0));
        }
    }
    SUBCASE("samples stay on the sphere, including across the seams") {
        for (double s : {0.0, 0.1, std::numbers::pi - 1e-9, std::numbers::pi + 1e-9, 4.0,
                         two_pi - 1e-9}) {
            for (double x : {0.3, 2.7}) {
                family_A(s, x, std::span<double>(out, 3));
                double n2 = out[0] * out[0] + out[1] * out[1] + out[2] * out[2];
                CHECK(std::abs(std::sqrt(n2) - 1.0) <= 1e-12);
            }
        }
    }
    SUBCASE("continuity across s = pi and s = 0") {
        double lo[3], hi[3];
        for (double seam : {std::numbers::pi, 0.0}) {
            family_A(wrap_angle(seam - 1e-9), 1.3, std::span<double>(lo, 3));
            family_A(wrap_angle(seam + 1e-9), 1.3, std::span<double>(hi, 3));
            for (int c = 0; c < 3; ++c) CHECK(std::abs(lo[c] - hi[c]) < 1e-8);
        }
    }
    SUBCASE("energy of the s = pi/3 slice is 3 pi / 2 (quadrature oracle)") {
        Grid g(256);
        HomotopyFamily fam = HomotopyFamily::suspension(1);
        auto energies = family_energy_curve(fam, {{std::numbers::pi / 3}}, g);
        double expected = two_pi * std::pow(std::sin(std::numbers::pi / 3), 2);
        CHECK(expected == doctest::Approx(1.5 * std::numbers::pi));
        CHECK(energies[0] == doctest::Approx(expected).epsilon(1e-3));
        // independent fine-quadrature oracle of |d/dx A(pi/3, x)|^2
        double oracle = simpson(0.0, two_pi, 1 << 12, [](double x) {
            double sv = std::sin(std::numbers::pi / 3);
            return sv * sv * (std::sin(x) * std::sin(x) + std::cos(x) * std::cos(x));
        });
        CHECK(energies[0] == doctest::Approx(oracle).epsilon(1e-3));
    }
}

TEST_CASE("suspension families") {
    SUBCASE("A2 samples lie on S^3 and bound the energy by 2 pi") {
        Grid g(128);
        HomotopyFamily fam = HomotopyFamily::suspension(2);
        std::vector<std::vector<double>> samples = {
            {std::numbers::pi / 2, std::numbers::pi / 2},
            {std::numbers::pi / 2, std::numbers::pi / 4},
            {0.7, 2.9},
            {4.0, 5.5}};
        auto energies = family_energy_curve(fam, samples, g);
        CHECK(energies[0] == doctest::Approx(two_pi).epsilon(1e-3));
        CHECK(energies[1] == doctest::Approx(std::numbers::pi).epsilon(1e-3));
        for (double e : energies) CHECK(e <= two_pi + 1e-3);
        // closed form 2 pi sin^2 s1 sin^2 s2
        for (size_t i = 0; i < samples.size(); ++i) {
            double expect = two_pi * std::pow(std::sin(samples[i][0]) * std::sin(samples[i][1]), 2);
            CHECK(energies[i] == doctest::Approx(expect).epsilon(1e-3));
        }
    }
    SUBCASE("degrees double at each suspension") {
        auto a = family_degree(HomotopyFamily::suspension(1), 128);
        CHECK(a.rounded == 2);
        auto a2 = family_degree(HomotopyFamily::suspension(2), 64);
        CHECK(a2.rounded == 4);
    }
}

TEST_CASE("capped homotopy") {
    const int m_s = 32, n_x = 32;
    std::vector<double> anchor(static_cast<size_t>(m_s) * 3);
    for (int i = 0; i < m_s; ++i) {
        double s = two_pi * i / m_s;
        anchor[static_cast<size_t>(i) * 3 + 0] = std::cos(s);
        anchor[static_cast<size_t>(i) * 3 + 1] = std::sin(s);
        anchor[static_cast<size_t>(i) * 3 + 2] = 0.0;
    }
    SUBCASE("flow equal to the anchor is constant in r") {
        std::vector<double> flow(static_cast<size_t>(m_s) * n_x * 3);
        for (int i = 0; i < m_s; ++i)
            for (int j = 0; j < n_x; ++j)
                for (int c = 0; c < 3; ++c)
                    flow[(static_cast<size_t>(i) * n_x + j) * 3 + c] =
                        anchor[static_cast<size_t>(i) * 3 + c];
        auto cap = capped_homotopy(flow, anchor, m_s, n_x, {0.0, 0.5, 1.0});
        CHECK(cap.min_denominator == doctest::Approx(1.0));
        for (const auto& slice : cap.slices)
            for (size_t p = 0; p < slice.size(); ++p)
                CHECK(slice[p] == doctest::Approx(flow[p]).epsilon(1e-14));
    }
    SUBCASE("antipodal pairs are rejected") {
        std::vector<double> flow(static_cast<size_t>(m_s) * n_x * 3);
        for (int i = 0; i < m_s; ++i)
            for (int j = 0; j < n_x; ++j)
                for (int c = 0; c < 3; ++c)
                    flow[(static_cast<size_t>(i) * n_x + j) * 3 + c] =
                        -anchor[static_cast<size_t>(i) * 3 + c];
        CHECK_THROWS_WITH_AS(
            static_cast<void>(capped_homotopy(flow, anchor, m_s, n_x, {0.5})),
            doctest::Contains("cap undefined"), std::runtime_error);
    }
    SUBCASE("near-constant flows cap to an x-independent degree-0 slice") {
        const int m = 64;
        std::vector<double> anchor2(static_cast<size_t>(m) * 3), flow(static_cast<size_t>(m) * m * 3);
        for (int i = 0; i < m; ++i) {
            double s = two_pi * i / m;
            anchor2[static_cast<size_t>(i) * 3 + 0] = std::cos(s);
            anchor2[static_cast<size_t>(i) * 3 + 1] = 0.0;
            anchor2[static_cast<size_t>(i) * 3 + 2] = std::sin(s);
        }
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                // small x-dependent wobble around the anchor, renormalized
                double w[3];
                for (int c = 0; c < 3; ++c)
                    w[c] = anchor2[static_cast<size_t>(i) * 3 + c] +
                           0.2 * std::sin(two_pi * j / m + c);
                double nrm = std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
                for (int c = 0; c < 3; ++c)
                    flow[(static_cast<size_t>(i) * m + j) * 3 + c] = w[c] / nrm;
            }
        auto cap = capped_homotopy(flow, anchor2, m, m, {1.0});
        CHECK(cap.min_denominator > 0.0);
        auto rep = surface_degree(cap.slices[0], m);
        CHECK(rep.rounded == 0);
    }
}

TEST_CASE("capped homotopy on the damped flow exhibits the obstruction") {
    // Damped evolution of the loop family: slices away from the equator
    // contract toward constants and cap cleanly to a degree-0 family, while
    // any family containing the stationary equator keeps an antipodal pair
    // and the cap is undefined. This is the mechanism that rules out uniform
    // stabilization at the 2 pi energy level.
    Grid g(64);
    DampingProfile damp(g, ControlRegion(0.0, 4.5), 1.0);
    const int m_s = 16;
    auto flow_at = [&](double s_lo, double s_hi, double T) {
        std::vector<double> flow(static_cast<size_t>(m_s) * g.n() * 3);
        std::vector<double> anchor(static_cast<size_t>(m_s) * 3);
        for (int i = 0; i < m_s; ++i) {
            double s = s_lo + (s_hi - s_lo) * i / (m_s - 1);
            FieldState st(g, 2);
            for (int j = 0; j < g.n(); ++j)
                family_A(s, g.x(j), std::span<double>(st.phi.data() + static_cast<size_t>(j) * 3, 3));
            Trajectory traj = evolve(st, T, nullptr, &damp, 0.5 * g.spacing(), 1 << 30);
            for (int j = 0; j < g.n(); ++j)
                for (int c = 0; c < 3; ++c)
                    flow[(static_cast<size_t>(i) * g.n() + j) * 3 + c] =
                        traj.final().phi[static_cast<size_t>(j) * 3 + c];
            for (int c = 0; c < 3; ++c)
                anchor[static_cast<size_t>(i) * 3 + c] = traj.final().phi[c]; // x = 0 sample
        }
        return std::make_pair(flow, anchor);
    };
    SUBCASE("contracted sub-equatorial slices cap to a constant family") {
        auto [flow, anchor] = flow_at(0.0, std::numbers::pi / 4, 40.0);
        auto cap = capped_homotopy(flow, anchor, m_s, g.n(), {1.0});
        CHECK(cap.min_denominator > 0.0);
        // the r = 1 slice depends on s only
        for (int i = 0; i < m_s; ++i)
            for (int j = 0; j < g.n(); ++j)
                for (int c = 0; c < 3; ++c)
                    CHECK(cap.slices[0][(static_cast<size_t>(i) * g.n() + j) * 3 + c] ==
                          doctest::Approx(anchor[static_cast<size_t>(i) * 3 + c]));
    }
    SUBCASE("the stationary equator keeps antipodal pairs: cap undefined") {
        auto [flow, anchor] = flow_at(std::numbers::pi / 2, std::numbers::pi / 2, 40.0);
        CHECK_THROWS_WITH_AS(
            static_cast<void>(capped_homotopy(flow, anchor, m_s, g.n(), {1.0})),
            doctest::Contains("cap undefined"), std::runtime_error);
    }
}

TEST_CASE("nonuniform decay hitting times") {
    Grid g(96);
    DampingProfile damp(g, ControlRegion(0.0, 4.5), 1.0);
    std::vector<double> svals = {0.0, std::numbers::pi / 4, std::numbers::pi / 2};
    auto rows = nonuniform_decay_experiment(damp, svals, 0.1, 25.0);
    REQUIRE(rows.size() == 3);
    // s = 0: zero energy, hits immediately
    CHECK(rows[0].initial_energy == doctest::Approx(0.0));
    CHECK(rows[0].hit_time == 0.0);
    CHECK(!rows[0].censored);
    // s = pi/4: finite hitting time
    CHECK(rows[1].initial_energy == doctest::Approx(std::numbers::pi).epsilon(2e-3));
    CHECK(!rows[1].censored);
    CHECK(rows[1].hit_time > 0.0);
    // s = pi/2: the equator is a damped-flow equilibrium -> censored
    CHECK(rows[2].censored);
    CHECK(rows[2].hit_time == 25.0);
    // winding of the k = 1 analogue is conserved along a damped run
    {
        Grid g1(128);
        FieldState loop(g1, 1);
        for (int j = 0; j < g1.n(); ++j) {
            double th = g1.x(j) + 0.2 * std::sin(g1.x(j));
            loop.node(j)[0] = std::cos(th);
            loop.node(j)[1] = std::sin(th);
        }
        DampingProfile d1(g1, ControlRegion(0.0, 4.0), 1.0);
        Trajectory traj = evolve(loop, 5.0, nullptr, &d1, 0.5 * g1.spacing(),
                                 static_cast<int>(1.0 / (0.5 * g1.spacing())));
        for (const auto& s : traj.states) CHECK(winding_number(s) == 1);
    }
}
