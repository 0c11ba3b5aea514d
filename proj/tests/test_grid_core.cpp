#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "wavemaps/degree.hpp"
#include "wavemaps/field_state.hpp"
#include "wavemaps/fourier.hpp"
#include "wavemaps/obstruction.hpp"
#include "wavemaps/serialize.hpp"

using namespace wavemaps;

namespace {

// independent quadrature oracle: composite Simpson of a smooth integrand
double simpson(double lo, double hi, int panels, const std::function<double(double)>& f) {
    double h = (hi - lo) / panels;
    double sum = f(lo) + f(hi);
    for (int i = 1; i < panels; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
    return sum * h / 3.0;
}

// deterministic random orthogonal matrix via Gram-Schmidt of Gaussians
std::vector<double> random_orthogonal(int d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::vector<double> A(static_cast<size_t>(d) * d);
    for (int r = 0; r < d; ++r) {
        std::vector<double> v(d);
        for (auto& x : v) x = gauss(rng);
        for (int p = 0; p < r; ++p) {
            double dot = 0;
            for (int c = 0; c < d; ++c) dot += v[c] * A[static_cast<size_t>(p) * d + c];
            for (int c = 0; c < d; ++c) v[c] -= dot * A[static_cast<size_t>(p) * d + c];
        }
        double norm = 0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        for (int c = 0; c < d; ++c) A[static_cast<size_t>(r) * d + c] = v[c] / norm;
    }
    return A;
}

FieldState apply_orthogonal(const FieldState& s, const std::vector<double>& A) {
    FieldState out(s.grid, s.k);
    out.time = s.time;
    const int d = s.dim();
    for (int j = 0; j < s.n(); ++j)
        for (int r = 0; r < d; ++r) {
            double pv = 0, vv = 0;
            for (int c = 0; c < d; ++c) {
                pv += A[static_cast<size_t>(r) * d + c] * s.phi[static_cast<size_t>(j) * d + c];
                vv += A[static_cast<size_t>(r) * d + c] * s.phi_t[static_cast<size_t>(j) * d + c];
            }
            out.phi[static_cast<size_t>(j) * d + r] = pv;
            out.phi_t[static_cast<size_t>(j) * d + r] = vv;
        }
    return out;
}

} // namespace

TEST_CASE("grid invariants") {
    Grid g(64);
    CHECK(g.spacing() * g.n() == doctest::Approx(two_pi).epsilon(1e-15));
    CHECK_THROWS(Grid(7));
    CHECK_THROWS(Grid(6));
    CHECK(g.wrap(-1) == 63);
    CHECK(g.wrap(64) == 0);
}

TEST_CASE("control region arcs and cutoff") {
    ControlRegion arc(5.0, 1.0); // wraps through 0
    CHECK(arc.length() == doctest::Approx(two_pi - 4.0));
    CHECK(arc.contains(6.0));
    CHECK(arc.contains(0.5));
    CHECK(!arc.contains(3.0));
    CHECK(arc.cutoff(3.0) == 0.0);
    double mid = wrap_angle(5.0 + arc.length() / 2);
    CHECK(arc.cutoff(mid) == 1.0);

    ControlRegion full = ControlRegion::full();
    CHECK(full.is_full());
    CHECK(full.cutoff(1.234) == 1.0);
}

TEST_CASE("energy: constant state is zero") {
    Grid g(64);
    std::vector<double> p = {0.0, 0.0, 1.0};
    FieldState s = FieldState::constant(g, 2, p);
    CHECK(energy(s) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("energy: equator map is 2pi up to O(h^2)") {
    for (int n : {64, 128}) {
        Grid g(n);
        FieldState s = FieldState::equator(g, 2);
        double h = g.spacing();
        CHECK(std::abs(energy(s) - two_pi) < 1.1 * two_pi * h * h / 3.0);
    }
}

TEST_CASE("energy: family loop at s = pi/4 has energy pi (quadrature oracle)") {
    Grid g(128);
    FieldState s(g, 2);
    for (int j = 0; j < g.n(); ++j)
        family_A(std::numbers::pi / 4, g.x(j), std::span<double>(s.phi.data() + j * 3, 3));
    // oracle: integrate |d/dx A(pi/4, x)|^2 by fine Simpson quadrature
    double oracle = simpson(0.0, two_pi, 1 << 12, [](double x) {
        double sv = std::sin(std::numbers::pi / 4);
        double dx[3] = {-sv * std::sin(x), sv * std::cos(x), 0.0};
        return dx[0] * dx[0] + dx[1] * dx[1] + dx[2] * dx[2];
    });
    CHECK(oracle == doctest::Approx(std::numbers::pi).epsilon(1e-12));
    CHECK(energy(s) == doctest::Approx(std::numbers::pi).epsilon(1e-3));
}

TEST_CASE("energy is invariant under orthogonal maps") {
    Grid g(64);
    FieldState s = FieldState::equator(g, 2);
    for (int j = 0; j < g.n(); ++j) {
        s.node_t(j)[2] = 0.3 * std::sin(2.0 * g.x(j));
    }
    s.project_to_sphere();
    double e = energy(s);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        FieldState rotated = apply_orthogonal(s, random_orthogonal(3, seed));
        CHECK(std::abs(energy(rotated) - e) <= 1e-12 * e);
    }
}

TEST_CASE("project_orthogonal") {
    std::vector<double> phi = {1.0, 0.0, 0.0};
    SUBCASE("parallel input maps to zero") {
        std::vector<double> f = {2.0, 0.0, 0.0};
        auto r = project_orthogonal(f, phi);
        for (double c : r) CHECK(c == doctest::Approx(0.0));
    }
    SUBCASE("orthogonal input is unchanged") {
        std::vector<double> f = {0.0, 3.0, -1.0};
        auto r = project_orthogonal(f, phi);
        CHECK(r[1] == doctest::Approx(3.0));
        CHECK(r[2] == doctest::Approx(-1.0));
    }
    SUBCASE("hand-evaluated example") {
        std::vector<double> f = {1.0, 2.0, 3.0};
        auto r = project_orthogonal(f, phi);
        CHECK(r[0] == doctest::Approx(0.0));
        CHECK(r[1] == doctest::Approx(2.0));
        CHECK(r[2] == doctest::Approx(3.0));
    }
    SUBCASE("rejects non-unit phi") {
        std::vector<double> bad = {2.0, 0.0, 0.0};
        std::vector<double> f = {1.0, 2.0, 3.0};
        CHECK_THROWS(project_orthogonal(f, bad));
    }
}

TEST_CASE("winding numbers") {
    Grid g(128);
    auto loop = [&](int N) {
        FieldState s(g, 1);
        for (int j = 0; j < g.n(); ++j) {
            s.node(j)[0] = std::cos(N * g.x(j));
            s.node(j)[1] = std::sin(N * g.x(j));
        }
        return s;
    };
    CHECK(winding_number(loop(0)) == 0);
    CHECK(winding_number(loop(1)) == 1);
    CHECK(winding_number(loop(3)) == 3);
    CHECK(winding_number(loop(5)) == 5);

    SUBCASE("lift oracle: total increment of the degree-3 loop is 6 pi") {
        auto th = lift_angle(loop(3));
        CHECK(th.back() - th.front() == doctest::Approx(6.0 * std::numbers::pi * (g.n() - 1) / g.n()));
    }
    SUBCASE("unresolved loop error") {
        Grid coarse(8);
        FieldState s(coarse, 1);
        for (int j = 0; j < 8; ++j) {
            s.node(j)[0] = std::cos(4 * coarse.x(j)); // jump 4*2pi/8 = pi >= pi - margin
            s.node(j)[1] = std::sin(4 * coarse.x(j));
        }
        CHECK_THROWS_WITH_AS(static_cast<void>(winding_number(s)),
                             doctest::Contains("unresolved loop"), std::runtime_error);
    }
    SUBCASE("winding stable under sub-margin perturbations") {
        FieldState s = loop(2);
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(-0.2, 0.2); // < jump_margin / 2
        for (int j = 0; j < g.n(); ++j) {
            double th = 2 * g.x(j) + u(rng);
            s.node(j)[0] = std::cos(th);
            s.node(j)[1] = std::sin(th);
        }
        CHECK(winding_number(s) == 2);
    }
}

TEST_CASE("surface degree of sampled maps") {
    const int m = 128;
    SUBCASE("family A has degree 2") {
        std::vector<double> samples(static_cast<size_t>(m) * m * 3);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                family_A(two_pi * i / m, two_pi * j / m,
                         std::span<double>(samples.data() + (static_cast<size_t>(i) * m + j) * 3, 3));
        auto rep = surface_degree(samples, m);
        CHECK(rep.rounded == 2);
        CHECK(rep.residual < 0.01);
    }
    SUBCASE("constant map has degree 0") {
        std::vector<double> samples(static_cast<size_t>(m) * m * 3, 0.0);
        for (size_t p = 2; p < samples.size(); p += 3) samples[p] = 1.0;
        auto rep = surface_degree(samples, m);
        CHECK(rep.rounded == 0);
        CHECK(rep.raw == doctest::Approx(0.0));
    }
    SUBCASE("x-independent map B(s,x) = a(s) has degree 0") {
        std::vector<double> samples(static_cast<size_t>(m) * m * 3);
        for (int i = 0; i < m; ++i) {
            double s = two_pi * i / m;
            double a[3] = {std::sin(s), 0.0, std::cos(s)};
            for (int j = 0; j < m; ++j)
                for (int c = 0; c < 3; ++c)
                    samples[(static_cast<size_t>(i) * m + j) * 3 + c] = a[c];
        }
        auto rep = surface_degree(samples, m);
        CHECK(rep.rounded == 0);
        CHECK(rep.raw == doctest::Approx(0.0));
    }
    SUBCASE("m below 64 rejected") {
        std::vector<double> samples(static_cast<size_t>(32) * 32 * 3, 0.0);
        for (size_t p = 2; p < samples.size(); p += 3) samples[p] = 1.0;
        CHECK_THROWS(surface_degree(samples, 32));
    }
}

TEST_CASE("fourier coefficients") {
    SUBCASE("constant field concentrates at mode 0") {
        Grid g(16);
        std::vector<double> field(static_cast<size_t>(16) * 2, 0.0);
        for (int j = 0; j < 16; ++j) {
            field[j * 2] = 0.7;
            field[j * 2 + 1] = -0.3;
        }
        auto t = fourier_coefficients(field, 16, 2);
        CHECK(t.coeff(0, 0).real() == doctest::Approx(0.7));
        CHECK(t.coeff(0, 1).real() == doctest::Approx(-0.3));
        for (int mode = t.min_mode(); mode <= t.max_mode(); ++mode) {
            if (mode == 0) continue;
            CHECK(std::abs(t.coeff(mode, 0)) < 1e-14);
        }
    }
    SUBCASE("equator at n = 16 matches the direct DFT oracle") {
        Grid g(16);
        FieldState s = FieldState::equator(g, 2);
        auto t = fourier_coefficients(s);
        // oracle: naive DFT evaluated independently
        for (int mode : {-2, -1, 0, 1, 2}) {
            for (int c = 0; c < 3; ++c) {
                std::complex<double> oracle = 0.0;
                for (int j = 0; j < 16; ++j) {
                    double ang = -mode * g.x(j);
                    oracle += std::complex<double>(std::cos(ang), std::sin(ang)) *
                              s.phi[static_cast<size_t>(j) * 3 + c];
                }
                oracle /= 16.0;
                CHECK(std::abs(t.coeff(mode, c) - oracle) < 1e-14);
            }
        }
        CHECK(t.coeff(1, 0).real() == doctest::Approx(0.5));
        CHECK(t.coeff(1, 1).imag() == doctest::Approx(-0.5));
        CHECK(t.coeff(-1, 1).imag() == doctest::Approx(0.5));
        CHECK(std::abs(t.coeff(1, 2)) < 1e-14);
    }
    SUBCASE("real fields have conjugate-symmetric tables") {
        Grid g(32);
        std::vector<double> field(32, 0.0);
        std::mt19937_64 rng(5);
        std::normal_distribution<double> gauss;
        for (auto& x : field) x = gauss(rng);
        auto t = fourier_coefficients(field, 32, 1);
        for (int mode = 1; mode <= t.max_mode(); ++mode)
            CHECK(std::abs(t.coeff(-mode, 0) - std::conj(t.coeff(mode, 0))) < 1e-13);
    }
    SUBCASE("inverse reconstruction round-trip") {
        Grid g(64);
        FieldState s = FieldState::equator(g, 2);
        for (int j = 0; j < g.n(); ++j) s.node(j)[2] += 0.2 * std::sin(3 * g.x(j));
        s.project_to_sphere();
        auto t = fourier_coefficients(s);
        auto back = inverse_fourier(t);
        double scale = 0.0, err = 0.0;
        for (size_t p = 0; p < back.size(); ++p) {
            err = std::max(err, std::abs(back[p] - s.phi[p]));
            scale = std::max(scale, std::abs(s.phi[p]));
        }
        CHECK(err <= 1e-12 * scale);
    }
}

TEST_CASE("state deserialization rejects malformed input") {
    {
        std::istringstream is("not a state file\n");
        CHECK_THROWS(read_state(is));
    }
    {
        std::istringstream is("# wavemap-state k=2 n=32 t=0\n1 2 3\n");
        CHECK_THROWS(read_state(is));
    }
}

TEST_CASE("state serialization round-trip") {
    Grid g(32);
    FieldState s = FieldState::equator(g, 2);
    s.time = 1.75;
    std::ostringstream os;
    write_state(os, s, {"cfg demo = 1"});
    std::istringstream is(os.str());
    FieldState back = read_state(is);
    CHECK(back.k == 2);
    CHECK(back.time == doctest::Approx(1.75));
    for (size_t p = 0; p < s.phi.size(); ++p) {
        CHECK(back.phi[p] == s.phi[p]);
        CHECK(back.phi_t[p] == s.phi_t[p]);
    }
}
