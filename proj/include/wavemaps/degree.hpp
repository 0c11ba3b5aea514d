#pragma once

#include <functional>
#include <span>
#include <vector>

#include "wavemaps/field_state.hpp"

namespace wavemaps {

/// Integer winding of a k=1 field, by summing principal-branch angle
/// increments of the lifted angle. Fails with "unresolved loop" if an
/// adjacent angular jump reaches pi - jump_margin.
int winding_number(const FieldState& state, double jump_margin = defaults::jump_margin);

/// Continuous angle lift theta_j of a k=1 position field, anchored at
/// theta_0 = atan2(phi_0^y, phi_0^x). theta_n would close up to 2*pi*winding.
std::vector<double> lift_angle(const FieldState& state, double jump_margin = defaults::jump_margin);

struct DegreeReport {
    double raw = 0.0;   // pre-rounding quadrature value
    int rounded = 0;
    double residual = 0.0; // |raw - rounded|
};

/// Degree of a sampled map S^1_s x S^1_x -> S^2 given as an m x m grid of
/// 3-vectors (row-major in s, then x, then component). Central differences
/// and midpoint quadrature; requires m >= 64 and samples on S^2.
/// Throws "degree not resolved" if the integrality residual is >= 0.1.
DegreeReport surface_degree(std::span<const double> samples, int m);

/// Degree of a map (S^1)^d_params x S^1_x -> S^{d_params+1} given by an
/// evaluator: eval(s, x, out) with s of size d_params and out of size
/// d_params + 2. Direct pullback-form quadrature at m samples per axis.
DegreeReport torus_degree(int d_params, int m,
                          const std::function<void(std::span<const double>, double,
                                                   std::span<double>)>& eval);

} // namespace wavemaps
