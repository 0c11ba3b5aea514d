#include "wavemaps/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "wavemaps/fourier.hpp"

namespace wavemaps {

void GeodesicMap::validate() const {
    if (mu.empty()) throw std::invalid_argument("GeodesicMap: empty mu");
    double mn = 0.0;
    for (double c : mu) mn += c * c;
    if (std::abs(std::sqrt(mn) - 1.0) > 1e-12)
        throw std::invalid_argument("GeodesicMap: |mu| != 1");
    if (N < 0) throw std::invalid_argument("GeodesicMap: negative winding");
    if (N >= 1) {
        if (nu.size() != mu.size()) throw std::invalid_argument("GeodesicMap: nu size mismatch");
        double nn = 0.0, dot = 0.0;
        for (size_t c = 0; c < mu.size(); ++c) {
            nn += nu[c] * nu[c];
            dot += mu[c] * nu[c];
        }
        if (std::abs(std::sqrt(nn) - 1.0) > 1e-12 || std::abs(dot) > 1e-12)
            throw std::invalid_argument("GeodesicMap: (mu, nu) not orthonormal");
    }
}

std::vector<double> GeodesicMap::sample(const Grid& grid) const {
    const int d = dim();
    std::vector<double> out(static_cast<size_t>(grid.n()) * d, 0.0);
    for (int j = 0; j < grid.n(); ++j) {
        double c = std::cos(N * grid.x(j)), s = std::sin(N * grid.x(j));
        for (int comp = 0; comp < d; ++comp)
            out[static_cast<size_t>(j) * d + comp] =
                N == 0 ? mu[comp] : mu[comp] * c - nu[comp] * s;
    }
    return out;
}

FieldState GeodesicMap::state(const Grid& grid) const {
    if (N == 0) return FieldState::constant(grid, dim() - 1, mu);
    return FieldState::circle(grid, dim() - 1, mu, nu, N);
}

BumpWindow::BumpWindow(double a, double b) : t_a(a), t_b(b) {
    if (!(b > a)) throw std::invalid_argument("BumpWindow: empty interval");
}

double BumpWindow::psi(double t) const {
    if (t <= t_a || t >= t_b) return 0.0;
    double u = (2.0 * t - t_a - t_b) / (t_b - t_a);
    double q = 1.0 - u * u;
    // int_{-1}^{1} (1-u^2)^3 du = 32/35, times the half-width scaling
    double norm = (32.0 / 35.0) * 0.5 * (t_b - t_a);
    return q * q * q / norm;
}

double BumpWindow::integral(int panels) const {
    double h = (t_b - t_a) / panels;
    double sum = psi(t_a) + psi(t_b);
    for (int i = 1; i < panels; ++i) sum += (i % 2 ? 4.0 : 2.0) * psi(t_a + i * h);
    return sum * h / 3.0;
}

std::vector<double> time_average(const Trajectory& traj, const BumpWindow& window) {
    if (traj.states.empty()) throw std::invalid_argument("time_average: empty trajectory");
    if (window.t_a < traj.states.front().time - 1e-12 ||
        window.t_b > traj.states.back().time + 1e-12)
        throw std::invalid_argument("time_average: window outside trajectory span");

    std::vector<size_t> inside;
    for (size_t i = 0; i < traj.states.size(); ++i) {
        double t = traj.states[i].time;
        if (t > window.t_a && t < window.t_b) inside.push_back(i);
    }
    if (inside.size() < 32) throw std::runtime_error("window unresolved: too few saved samples");

    double wsum = 0.0;
    std::vector<double> w(inside.size());
    for (size_t p = 0; p < inside.size(); ++p) {
        w[p] = window.psi(traj.states[inside[p]].time);
        wsum += w[p];
    }
    // discrete normalization so a stationary trajectory averages to itself
    std::vector<double> out(traj.states.front().phi.size(), 0.0);
    for (size_t p = 0; p < inside.size(); ++p) {
        const auto& phi = traj.states[inside[p]].phi;
        double wp = w[p] / wsum;
        for (size_t q = 0; q < out.size(); ++q) out[q] += wp * phi[q];
    }
    return out;
}

std::pair<double, int> energy_gap(double E) {
    if (E < 0.0) throw std::invalid_argument("energy_gap: negative energy");
    int n_hi = static_cast<int>(std::ceil(std::sqrt(E / two_pi))) + 1;
    double best = std::abs(E);
    int best_n = 0;
    for (int n = 1; n <= n_hi; ++n) {
        double d = std::abs(E - two_pi * n * n);
        if (d < best - 1e-15) {
            best = d;
            best_n = n;
        }
    }
    return {best, best_n};
}

HarmonicFit nearest_harmonic(const FieldState& state, double harmonic_floor, double mode_floor) {
    state.validate(1e-8);
    const int d = state.dim();
    const double E = energy_unchecked(state);

    if (E <= harmonic_floor) {
        // constant branch: mean direction
        std::vector<double> mean(d, 0.0);
        for (int j = 0; j < state.n(); ++j) {
            auto p = state.node(j);
            for (int c = 0; c < d; ++c) mean[c] += p[c];
        }
        double norm = 0.0;
        for (double c : mean) norm += c * c;
        norm = std::sqrt(norm);
        if (norm < 1e-12) throw std::runtime_error("degenerate mode: vanishing mean direction");
        for (double& c : mean) c /= norm;
        GeodesicMap g{mean, std::vector<double>(d, 0.0), 0};
        std::vector<double> ref(static_cast<size_t>(state.n()) * d);
        for (int j = 0; j < state.n(); ++j)
            for (int c = 0; c < d; ++c) ref[static_cast<size_t>(j) * d + c] = mean[c];
        return {std::move(g), h1l2_distance(state, ref)};
    }

    FourierTable ft = fourier_coefficients(state);
    int n0 = 0;
    double best = -1.0;
    for (int mode = 1; mode <= ft.n / 2 - 1; ++mode) {
        double mass = 0.0;
        for (int c = 0; c < d; ++c) {
            mass += std::norm(ft.coeff(mode, c));
            mass += std::norm(ft.coeff(-mode, c));
        }
        if (mass > best + 1e-15) { // ties toward the smaller mode
            best = mass;
            n0 = mode;
        }
    }
    if (n0 == 0) throw std::runtime_error("degenerate mode: no nonzero mode found");

    std::vector<double> alpha(d), beta(d);
    for (int c = 0; c < d; ++c) {
        alpha[c] = ft.coeff(n0, c).real();
        beta[c] = ft.coeff(n0, c).imag();
    }
    double na = 0.0;
    for (double c : alpha) na += c * c;
    na = 2.0 * std::sqrt(na); // |2 alpha0|
    if (na < mode_floor) throw std::runtime_error("degenerate mode: |2 alpha0| below floor");

    std::vector<double> mu(d), nu(d);
    for (int c = 0; c < d; ++c) mu[c] = 2.0 * alpha[c] / na;
    double bdota = 0.0, a2 = 0.0;
    for (int c = 0; c < d; ++c) {
        bdota += beta[c] * alpha[c];
        a2 += alpha[c] * alpha[c];
    }
    double nn = 0.0;
    for (int c = 0; c < d; ++c) {
        nu[c] = 2.0 * beta[c] - 2.0 * bdota * alpha[c] / a2;
        nn += nu[c] * nu[c];
    }
    nn = std::sqrt(nn);
    if (nn < 1e-12) throw std::runtime_error("degenerate mode: collapsed Gram-Schmidt");
    for (int c = 0; c < d; ++c) nu[c] /= nn;

    // distance against the raw best-fit phase
    GeodesicMap raw{mu, nu, n0};
    double dist = h1l2_distance(state, raw.sample(state.grid));

    // canonical representative: first nonzero component of mu positive
    GeodesicMap canon = raw;
    for (int c = 0; c < d; ++c) {
        if (std::abs(canon.mu[c]) > 1e-9) {
            if (canon.mu[c] < 0.0)
                for (int q = 0; q < d; ++q) {
                    canon.mu[q] = -canon.mu[q];
                    canon.nu[q] = -canon.nu[q];
                }
            break;
        }
    }
    canon.validate();
    return {std::move(canon), dist};
}

bool is_approx_harmonic(const FieldState& state, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("is_approx_harmonic: eps in (0,1)");
    try {
        return nearest_harmonic(state).distance <= eps;
    } catch (const std::runtime_error&) {
        return false; // degenerate-mode states are far from every geodesic
    }
}

double approximate_kg_residual(std::span<const double> avg, int n, int dim, double E0) {
    if (avg.size() != static_cast<size_t>(n) * dim)
        throw std::invalid_argument("approximate_kg_residual: buffer size mismatch");
    const double h = two_pi / n;
    const double inv_h2 = 1.0 / (h * h);
    const double lam = E0 / two_pi;
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
        int jm = (j + n - 1) % n, jp = (j + 1) % n;
        double norm2 = 0.0;
        for (int c = 0; c < dim; ++c) {
            double lap = (avg[static_cast<size_t>(jp) * dim + c] - 2.0 * avg[static_cast<size_t>(j) * dim + c] +
                          avg[static_cast<size_t>(jm) * dim + c]) *
                         inv_h2;
            double r = lap + lam * avg[static_cast<size_t>(j) * dim + c];
            norm2 += r * r;
        }
        worst = std::max(worst, std::sqrt(norm2));
    }
    return worst;
}

} // namespace wavemaps
