#include "wavemaps/obstruction.hpp"

#include <cmath>

namespace wavemaps {

namespace {

// Suspension of a loop family: out = (sin(s1) w, cos(s1)), with the sign of
// the first component flipped on one half-circle of s1 when the vector part
// has even dimension. The flip parity keeps both half-circles contributing
// with the same orientation so the degree doubles at each suspension; which
// half carries the flip (dimension mod 4) fixes the sign positive under the
// det(d_s1, ..., d_x, A) convention. With a 2-dimensional vector part this
// is exactly the base family's piecewise formula.
void suspend_loop(double s1, std::span<double> vec_and_out) {
    int kw = static_cast<int>(vec_and_out.size()) - 1;
    double s = wrap_angle(s1);
    // snap rounding noise at the exact zeros of the formula (seams and the
    // equatorial slice); a stray 1e-16 here would seed the tilt instability
    // and destroy the stationarity of the s = pi/2 slice
    double sn = std::sin(s);
    double cs = std::cos(s);
    if (std::abs(sn) < 1e-15) sn = 0.0;
    if (std::abs(cs) < 1e-15) cs = 0.0;
    bool flip_active = false;
    if (kw % 2 == 0) {
        bool on_first_half = kw % 4 == 0;
        flip_active = on_first_half ? s <= std::numbers::pi : s > std::numbers::pi;
    }
    for (int c = 0; c < kw; ++c) vec_and_out[c] *= (flip_active && c == 0) ? -sn : sn;
    vec_and_out[kw] = cs;
}

} // namespace

void family_A(double s, double x, std::span<double> out3) {
    out3[0] = std::cos(x);
    out3[1] = std::sin(x);
    suspend_loop(s, out3);
}

void family_Ak(int k, std::span<const double> s, double x, std::span<double> out) {
    if (k < 1) throw std::invalid_argument("family_Ak: k must be >= 1");
    if (static_cast<int>(s.size()) != k || static_cast<int>(out.size()) != k + 2)
        throw std::invalid_argument("family_Ak: buffer size mismatch");
    if (k == 1) {
        family_A(s[0], x, out);
        return;
    }
    family_Ak(k - 1, s.subspan(1), x, out.subspan(0, k + 1));
    suspend_loop(s[0], out);
}

HomotopyFamily HomotopyFamily::suspension(int k) {
    HomotopyFamily f;
    f.k = k + 1;
    f.param_dim = k;
    f.eval = [k](std::span<const double> s, double x, std::span<double> out) {
        family_Ak(k, s, x, out);
    };
    return f;
}

std::vector<double> family_energy_curve(const HomotopyFamily& family,
                                        const std::vector<std::vector<double>>& s_samples,
                                        const Grid& grid) {
    std::vector<double> energies;
    energies.reserve(s_samples.size());
    const int d = family.k + 1;
    for (const auto& s : s_samples) {
        if (static_cast<int>(s.size()) != family.param_dim)
            throw std::invalid_argument("family_energy_curve: parameter dimension mismatch");
        FieldState st(grid, family.k);
        for (int j = 0; j < grid.n(); ++j)
            family.eval(s, grid.x(j), std::span<double>(st.phi.data() + static_cast<size_t>(j) * d, d));
        st.validate(1e-12);
        energies.push_back(energy_unchecked(st));
    }
    return energies;
}

DegreeReport family_degree(const HomotopyFamily& family, int m) {
    return torus_degree(family.param_dim, m, family.eval);
}

CappedHomotopy capped_homotopy(std::span<const double> flow, std::span<const double> anchor,
                               int m_s, int n_x, const std::vector<double>& r_values) {
    if (flow.size() != static_cast<size_t>(m_s) * n_x * 3 ||
        anchor.size() != static_cast<size_t>(m_s) * 3)
        throw std::invalid_argument("capped_homotopy: buffer size mismatch");

    // proximity condition and the exact minimum of the interpolant's norm
    double min_denom = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m_s; ++i) {
        const double* a = anchor.data() + static_cast<size_t>(i) * 3;
        for (int j = 0; j < n_x; ++j) {
            const double* u = flow.data() + (static_cast<size_t>(i) * n_x + j) * 3;
            double diff2 = 0.0, dot = 0.0;
            for (int c = 0; c < 3; ++c) {
                diff2 += (u[c] - a[c]) * (u[c] - a[c]);
                dot += u[c] * a[c];
            }
            if (!(std::sqrt(diff2) < 2.0 - 1e-12))
                throw std::runtime_error("cap undefined: flow point antipodal to anchor");
            // |(1-r)u + ra|^2 over r in [0,1] is minimized at r = 1/2: (1 + u.a)/2
            min_denom = std::min(min_denom, std::sqrt(std::max(0.0, (1.0 + dot) / 2.0)));
        }
    }

    CappedHomotopy out;
    out.r_values = r_values;
    out.min_denominator = min_denom;
    for (double r : r_values) {
        std::vector<double> slice(flow.size());
        for (int i = 0; i < m_s; ++i) {
            const double* a = anchor.data() + static_cast<size_t>(i) * 3;
            for (int j = 0; j < n_x; ++j) {
                const double* u = flow.data() + (static_cast<size_t>(i) * n_x + j) * 3;
                double w[3], norm2 = 0.0;
                for (int c = 0; c < 3; ++c) {
                    w[c] = (1.0 - r) * u[c] + r * a[c];
                    norm2 += w[c] * w[c];
                }
                double inv = 1.0 / std::sqrt(norm2);
                for (int c = 0; c < 3; ++c)
                    slice[(static_cast<size_t>(i) * n_x + j) * 3 + c] = w[c] * inv;
            }
        }
        out.slices.push_back(std::move(slice));
    }
    return out;
}

std::vector<DecayRow> nonuniform_decay_experiment(const DampingProfile& damping,
                                                  const std::vector<double>& s_values,
                                                  double energy_target, double t_max,
                                                  double dt) {
    if (!(energy_target > 0.0 && energy_target < two_pi))
        throw std::invalid_argument("nonuniform_decay_experiment: target outside (0, 2pi)");
    const Grid& grid = damping.grid();
    if (dt <= 0.0) dt = defaults::cfl_ratio * grid.spacing();
    const double chunk = 5.0;

    std::vector<DecayRow> rows;
    for (double s : s_values) {
        FieldState st(grid, 2);
        for (int j = 0; j < grid.n(); ++j)
            family_A(s, grid.x(j), std::span<double>(st.phi.data() + static_cast<size_t>(j) * 3, 3));
        DecayRow row;
        row.s = s;
        row.initial_energy = energy_unchecked(st);
        if (row.initial_energy <= energy_target) {
            row.hit_time = 0.0;
            rows.push_back(row);
            continue;
        }
        double t = 0.0;
        bool hit = false;
        while (t < t_max - 1e-9 && !hit) {
            double span = std::min(chunk, t_max - t);
            Trajectory piece = evolve(st, span, nullptr, &damping, dt, 1 << 30);
            for (size_t i = 0; i < piece.trace.times.size(); ++i) {
                if (piece.trace.energy[i] <= energy_target) {
                    row.hit_time = t + piece.trace.times[i] - piece.trace.times.front();
                    hit = true;
                    break;
                }
            }
            st = piece.final();
            t += span;
        }
        if (!hit) {
            row.censored = true;
            row.hit_time = t_max;
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace wavemaps
