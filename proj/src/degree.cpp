#include "wavemaps/degree.hpp"

#include <cmath>
#include <numbers>

namespace wavemaps {

namespace {

// Determinant of a small dense matrix (row-major, destroys the buffer).
double det_inplace(std::vector<double>& a, int n) {
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[static_cast<size_t>(r) * n + col]) >
                std::abs(a[static_cast<size_t>(piv) * n + col]))
                piv = r;
        if (a[static_cast<size_t>(piv) * n + col] == 0.0) return 0.0;
        if (piv != col) {
            for (int c = 0; c < n; ++c)
                std::swap(a[static_cast<size_t>(piv) * n + c], a[static_cast<size_t>(col) * n + c]);
            det = -det;
        }
        double d = a[static_cast<size_t>(col) * n + col];
        det *= d;
        for (int r = col + 1; r < n; ++r) {
            double f = a[static_cast<size_t>(r) * n + col] / d;
            for (int c = col; c < n; ++c)
                a[static_cast<size_t>(r) * n + c] -= f * a[static_cast<size_t>(col) * n + c];
        }
    }
    return det;
}

// Surface volume of S^m.
double sphere_volume(int m) {
    switch (m) {
        case 1: return two_pi;
        case 2: return 4.0 * std::numbers::pi;
        case 3: return 2.0 * std::numbers::pi * std::numbers::pi;
        case 4: return 8.0 * std::numbers::pi * std::numbers::pi / 3.0;
        default: {
            double halfm1 = 0.5 * (m + 1);
            return 2.0 * std::pow(std::numbers::pi, halfm1) / std::tgamma(halfm1);
        }
    }
}

DegreeReport finish(double raw) {
    DegreeReport r;
    r.raw = raw;
    r.rounded = static_cast<int>(std::lround(raw));
    r.residual = std::abs(raw - r.rounded);
    if (r.residual >= 0.1) throw std::runtime_error("degree not resolved: residual " +
                                                    std::to_string(r.residual));
    return r;
}

} // namespace

std::vector<double> lift_angle(const FieldState& state, double jump_margin) {
    if (state.k != 1) throw std::invalid_argument("lift_angle: requires k = 1");
    const int n = state.n();
    std::vector<double> theta(n);
    theta[0] = std::atan2(state.phi[1], state.phi[0]);
    for (int j = 0; j < n; ++j) {
        auto cur = state.node(j);
        auto nxt = state.node(state.grid.wrap(j + 1));
        double cross = cur[0] * nxt[1] - cur[1] * nxt[0];
        double dot = cur[0] * nxt[0] + cur[1] * nxt[1];
        double inc = std::atan2(cross, dot);
        if (std::abs(inc) >= std::numbers::pi - jump_margin)
            throw std::runtime_error("unresolved loop: adjacent angular jump too large");
        if (j + 1 < n) theta[j + 1] = theta[j] + inc;
    }
    return theta;
}

int winding_number(const FieldState& state, double jump_margin) {
    if (state.k != 1) throw std::invalid_argument("winding_number: requires k = 1");
    const int n = state.n();
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
        auto cur = state.node(j);
        auto nxt = state.node(state.grid.wrap(j + 1));
        double cross = cur[0] * nxt[1] - cur[1] * nxt[0];
        double dot = cur[0] * nxt[0] + cur[1] * nxt[1];
        double inc = std::atan2(cross, dot);
        if (std::abs(inc) >= std::numbers::pi - jump_margin)
            throw std::runtime_error("unresolved loop: adjacent angular jump too large");
        total += inc;
    }
    return static_cast<int>(std::lround(total / two_pi));
}

DegreeReport surface_degree(std::span<const double> samples, int m) {
    if (m < 64) throw std::invalid_argument("surface_degree: m must be >= 64");
    if (samples.size() != static_cast<size_t>(m) * m * 3)
        throw std::invalid_argument("surface_degree: sample buffer size mismatch");
    for (size_t p = 0; p < samples.size(); p += 3) {
        double n2 = samples[p] * samples[p] + samples[p + 1] * samples[p + 1] +
                    samples[p + 2] * samples[p + 2];
        if (std::abs(std::sqrt(n2) - 1.0) > 1e-8)
            throw std::invalid_argument("surface_degree: samples not on the sphere");
    }
    const double h = two_pi / m;
    const double inv2h = 1.0 / (2.0 * h);
    auto at = [&](int i, int j, int c) {
        int ii = (i % m + m) % m, jj = (j % m + m) % m;
        return samples[(static_cast<size_t>(ii) * m + jj) * 3 + c];
    };
    double sum = 0.0;
    std::vector<double> mat(9);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            for (int c = 0; c < 3; ++c) {
                mat[static_cast<size_t>(c) * 3 + 0] = (at(i + 1, j, c) - at(i - 1, j, c)) * inv2h;
                mat[static_cast<size_t>(c) * 3 + 1] = (at(i, j + 1, c) - at(i, j - 1, c)) * inv2h;
                mat[static_cast<size_t>(c) * 3 + 2] = at(i, j, c);
            }
            sum += det_inplace(mat, 3);
        }
    }
    return finish(sum * h * h / sphere_volume(2));
}

DegreeReport torus_degree(int d_params, int m,
                          const std::function<void(std::span<const double>, double,
                                                   std::span<double>)>& eval) {
    const int D = d_params + 1;  // domain dimensions: params plus x
    const int C = d_params + 2;  // ambient components of the target sphere
    const double h = two_pi / m;
    const double inv2h = 1.0 / (2.0 * h);

    std::vector<int> idx(D, 0);
    std::vector<double> coords(D), pert(D), val(C), plus(C), minus(C), mat(static_cast<size_t>(C) * C);

    auto evaluate = [&](std::span<const double> cs, std::span<double> out) {
        eval(cs.subspan(0, d_params), cs[d_params], out);
    };

    double sum = 0.0;
    while (true) {
        for (int a = 0; a < D; ++a) coords[a] = idx[a] * h;
        evaluate(coords, val);
        for (int a = 0; a < D; ++a) {
            pert = coords;
            pert[a] = coords[a] + h;
            evaluate(pert, plus);
            pert[a] = coords[a] - h;
            evaluate(pert, minus);
            for (int c = 0; c < C; ++c)
                mat[static_cast<size_t>(c) * C + a] = (plus[c] - minus[c]) * inv2h;
        }
        for (int c = 0; c < C; ++c) mat[static_cast<size_t>(c) * C + D] = val[c];
        sum += det_inplace(mat, C);

        int a = D - 1;
        while (a >= 0 && ++idx[a] == m) idx[a--] = 0;
        if (a < 0) break;
    }
    double cell = std::pow(h, D);
    return finish(sum * cell / sphere_volume(D));
}

} // namespace wavemaps
