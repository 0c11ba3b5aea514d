#include "wavemaps/field_state.hpp"

#include <algorithm>
#include <cmath>

namespace wavemaps {

void FieldState::project_to_sphere() {
    const int d = dim();
    for (int j = 0; j < n(); ++j) {
        double* p = phi.data() + static_cast<size_t>(j) * d;
        double* v = phi_t.data() + static_cast<size_t>(j) * d;
        double norm2 = 0.0;
        for (int c = 0; c < d; ++c) norm2 += p[c] * p[c];
        double inv = 1.0 / std::sqrt(norm2);
        for (int c = 0; c < d; ++c) p[c] *= inv;
        double dot = 0.0;
        for (int c = 0; c < d; ++c) dot += p[c] * v[c];
        for (int c = 0; c < d; ++c) v[c] -= dot * p[c];
    }
}

double FieldState::constraint_error() const {
    const int d = dim();
    double worst = 0.0;
    for (int j = 0; j < n(); ++j) {
        const double* p = phi.data() + static_cast<size_t>(j) * d;
        const double* v = phi_t.data() + static_cast<size_t>(j) * d;
        double norm2 = 0.0, dot = 0.0;
        for (int c = 0; c < d; ++c) {
            norm2 += p[c] * p[c];
            dot += p[c] * v[c];
        }
        worst = std::max(worst, std::abs(std::sqrt(norm2) - 1.0));
        worst = std::max(worst, std::abs(dot));
    }
    return worst;
}

void FieldState::validate(double tol) const {
    double err = constraint_error();
    if (!(err <= tol))
        throw std::runtime_error("FieldState: sphere/tangency invariant violated, error " +
                                 std::to_string(err));
}

FieldState FieldState::constant(const Grid& g, int k, std::span<const double> p) {
    if (static_cast<int>(p.size()) != k + 1)
        throw std::invalid_argument("FieldState::constant: point dimension mismatch");
    FieldState s(g, k);
    double norm = 0.0;
    for (double c : p) norm += c * c;
    norm = std::sqrt(norm);
    if (norm == 0.0) throw std::invalid_argument("FieldState::constant: zero point");
    for (int j = 0; j < g.n(); ++j)
        for (int c = 0; c <= k; ++c) s.phi[static_cast<size_t>(j) * (k + 1) + c] = p[c] / norm;
    return s;
}

FieldState FieldState::circle(const Grid& g, int k, std::span<const double> mu,
                              std::span<const double> nu, int N) {
    if (N == 0) return constant(g, k, mu);
    if (static_cast<int>(mu.size()) != k + 1 || static_cast<int>(nu.size()) != k + 1)
        throw std::invalid_argument("FieldState::circle: vector dimension mismatch");
    FieldState s(g, k);
    for (int j = 0; j < g.n(); ++j) {
        double c = std::cos(N * g.x(j)), sn = std::sin(N * g.x(j));
        for (int comp = 0; comp <= k; ++comp)
            s.phi[static_cast<size_t>(j) * (k + 1) + comp] = mu[comp] * c - nu[comp] * sn;
    }
    s.validate(1e-9);
    return s;
}

FieldState FieldState::equator(const Grid& g, int k) {
    std::vector<double> mu(k + 1, 0.0), nu(k + 1, 0.0);
    mu[0] = 1.0;
    nu[1] = -1.0; // gamma(x) = mu cos x - nu sin x = (cos x, sin x, 0, ...)
    return circle(g, k, mu, nu, 1);
}

std::vector<double> project_orthogonal(std::span<const double> f, std::span<const double> phi) {
    if (f.size() != phi.size())
        throw std::invalid_argument("project_orthogonal: dimension mismatch");
    double norm2 = 0.0, dot = 0.0;
    for (size_t c = 0; c < phi.size(); ++c) {
        norm2 += phi[c] * phi[c];
        dot += f[c] * phi[c];
    }
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-8)
        throw std::invalid_argument("project_orthogonal: phi is not a unit vector");
    std::vector<double> out(f.begin(), f.end());
    for (size_t c = 0; c < phi.size(); ++c) out[c] -= dot * phi[c];
    return out;
}

double energy_unchecked(const FieldState& state) {
    const int n = state.n(), d = state.dim();
    const double inv2h = 1.0 / (2.0 * state.grid.spacing());
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
        const double* prev = state.phi.data() + static_cast<size_t>(state.grid.wrap(j - 1)) * d;
        const double* next = state.phi.data() + static_cast<size_t>(state.grid.wrap(j + 1)) * d;
        const double* v = state.phi_t.data() + static_cast<size_t>(j) * d;
        for (int c = 0; c < d; ++c) {
            double dx = (next[c] - prev[c]) * inv2h;
            total += dx * dx + v[c] * v[c];
        }
    }
    return total * state.grid.spacing();
}

double energy(const FieldState& state) {
    state.validate();
    return energy_unchecked(state);
}

double h1l2_distance(const FieldState& state, std::span<const double> ref_phi) {
    const int n = state.n(), d = state.dim();
    if (ref_phi.size() != state.phi.size())
        throw std::invalid_argument("h1l2_distance: reference size mismatch");
    const double inv2h = 1.0 / (2.0 * state.grid.spacing());
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
        int jm = state.grid.wrap(j - 1), jp = state.grid.wrap(j + 1);
        for (int c = 0; c < d; ++c) {
            size_t i = static_cast<size_t>(j) * d + c;
            double u = state.phi[i] - ref_phi[i];
            double um = state.phi[static_cast<size_t>(jm) * d + c] - ref_phi[static_cast<size_t>(jm) * d + c];
            double up = state.phi[static_cast<size_t>(jp) * d + c] - ref_phi[static_cast<size_t>(jp) * d + c];
            double ux = (up - um) * inv2h;
            total += u * u + ux * ux + state.phi_t[i] * state.phi_t[i];
        }
    }
    return std::sqrt(total * state.grid.spacing());
}

double h1l2_distance(const FieldState& a, const FieldState& b) {
    if (a.grid != b.grid || a.k != b.k)
        throw std::invalid_argument("h1l2_distance: incompatible states");
    const int n = a.n(), d = a.dim();
    const double inv2h = 1.0 / (2.0 * a.grid.spacing());
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
        int jm = a.grid.wrap(j - 1), jp = a.grid.wrap(j + 1);
        for (int c = 0; c < d; ++c) {
            size_t i = static_cast<size_t>(j) * d + c;
            double u = a.phi[i] - b.phi[i];
            double um = a.phi[static_cast<size_t>(jm) * d + c] - b.phi[static_cast<size_t>(jm) * d + c];
            double up = a.phi[static_cast<size_t>(jp) * d + c] - b.phi[static_cast<size_t>(jp) * d + c];
            double ux = (up - um) * inv2h;
            double v = a.phi_t[i] - b.phi_t[i];
            total += u * u + ux * ux + v * v;
        }
    }
    return std::sqrt(total * a.grid.spacing());
}

void EnergyTrace::validate() const {
    size_t m = times.size();
    if (energy.size() != m || dissipation.size() != m || forcing_work.size() != m ||
        tangency.size() != m)
        throw std::runtime_error("EnergyTrace: trace lengths disagree");
    for (size_t i = 1; i < m; ++i)
        if (!(times[i] > times[i - 1]))
            throw std::runtime_error("EnergyTrace: times not strictly increasing");
}

} // namespace wavemaps
