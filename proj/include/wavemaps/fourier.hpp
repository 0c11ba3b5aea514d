#pragma once

#include <complex>
#include <vector>

#include "wavemaps/field_state.hpp"

namespace wavemaps {

/// Discrete Fourier coefficients of an n x dim periodic field, per component,
/// indexed by mode in {-n/2, ..., n/2 - 1}:
///   c_m = (1/n) sum_j f_j exp(-i m x_j),  f_j = sum_m c_m exp(i m x_j).
struct FourierTable {
    int n = 0;
    int dim = 0;
    std::vector<std::complex<double>> coeffs; // (mode offset) * dim + component

    int min_mode() const { return -n / 2; }
    int max_mode() const { return n / 2 - 1; }

    std::complex<double> coeff(int mode, int comp) const {
        return coeffs[static_cast<size_t>(mode - min_mode()) * dim + comp];
    }
    std::complex<double>& coeff(int mode, int comp) {
        return coeffs[static_cast<size_t>(mode - min_mode()) * dim + comp];
    }
};

/// DFT of a flat n x dim field sampled at x_j = 2 pi j / n.
FourierTable fourier_coefficients(std::span<const double> field, int n, int dim);

inline FourierTable fourier_coefficients(const FieldState& s) {
    return fourier_coefficients(s.phi, s.n(), s.dim());
}

/// Inverse reconstruction; returns the real part of the synthesis (exact for
/// conjugate-symmetric tables of real fields).
std::vector<double> inverse_fourier(const FourierTable& table);

} // namespace wavemaps
