#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace wavemaps {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Default tolerances and scheme constants used across the library.
namespace defaults {
inline constexpr double tang_tol = 1e-10;     // sphere/tangency invariant tolerance
inline constexpr double jump_margin = 0.5;    // rad; winding-number resolvability margin
inline constexpr double cfl_ratio = 0.5;      // dt <= cfl_ratio * spacing
inline constexpr double mono_tol = 1e-4;      // allowed per-stride energy uptick in damped runs
inline constexpr double ctrl_tol = 1e-3;      // steering defect tolerance (H1 x L2)
inline constexpr double reg_eps = 1e-10;      // Tikhonov floor for the control Gramian
inline constexpr int max_iter = 500;          // CG iteration cap
inline constexpr double harmonic_floor = 0.1; // below this energy the constant-map branch applies
inline constexpr double mode_floor = 0.05;    // minimum dominant-mode amplitude |2 alpha0|
}

/// Uniform periodic grid on [0, 2pi): node x_j = j * spacing, spacing = 2pi/n.
class Grid {
public:
    explicit Grid(int n_points) : n_(n_points), spacing_(two_pi / n_points) {
        if (n_points < 8 || n_points % 2 != 0)
            throw std::invalid_argument("Grid: n_points must be even and >= 8, got " +
                                        std::to_string(n_points));
    }

    int n() const { return n_; }
    double spacing() const { return spacing_; }
    double x(int j) const { return spacing_ * j; }

    int wrap(int j) const {
        int r = j % n_;
        return r < 0 ? r + n_ : r;
    }

    bool operator==(const Grid& o) const { return n_ == o.n_; }
    bool operator!=(const Grid& o) const { return n_ != o.n_; }

private:
    int n_;
    double spacing_;
};

/// Wrap an angle into [0, 2pi).
inline double wrap_angle(double x) {
    double r = std::fmod(x, two_pi);
    return r < 0 ? r + two_pi : r;
}

/// C2 ramp used for region cutoffs: 0 at u<=0, 1 at u>=1.
inline double smootherstep(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return u * u * u * (u * (6.0 * u - 15.0) + 10.0);
}

/// Open arc on the circle from `start` to `end` (wrapping allowed).
/// A length of 2pi denotes the full circle.
class ControlRegion {
public:
    ControlRegion(double start, double end) {
        start_ = wrap_angle(start);
        double len = wrap_angle(end - start);
        if (len == 0.0) {
            // interpret identical endpoints as the full circle
            len = two_pi;
        }
        length_ = len;
    }

    static ControlRegion full() { return ControlRegion(0.0, two_pi); }

    double start() const { return start_; }
    double end() const { return wrap_angle(start_ + length_); }
    double length() const { return length_; }
    bool is_full() const { return length_ >= two_pi - 1e-15; }

    /// Position of x along the arc, in [0, 2pi); values >= length() are outside.
    double arc_pos(double x) const { return wrap_angle(x - start_); }

    bool contains(double x) const {
        if (is_full()) return true;
        double p = arc_pos(x);
        return p > 0.0 && p < length_;
    }

    /// Width of the C2 cutoff ramps: 10% of the arc, capped so the plateau
    /// reaches within ramp_cap of the arc ends (the cap keeps the effective
    /// control region aligned with the arc for sharp-time studies).
    static constexpr double ramp_cap = 0.05;

    /// C2 cutoff: 1 on the plateau, smooth ramps at each side, exactly 0
    /// outside the arc. Identically 1 for the full circle.
    double cutoff(double x) const {
        if (is_full()) return 1.0;
        double p = arc_pos(x);
        if (p <= 0.0 || p >= length_) return 0.0;
        double ramp = std::min(0.1 * length_, ramp_cap);
        if (p < ramp) return smootherstep(p / ramp);
        if (p > length_ - ramp) return smootherstep((length_ - p) / ramp);
        return 1.0;
    }

private:
    double start_;
    double length_;
};

} // namespace wavemaps
