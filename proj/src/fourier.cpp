#include "wavemaps/fourier.hpp"

#include <cmath>

namespace wavemaps {

FourierTable fourier_coefficients(std::span<const double> field, int n, int dim) {
    if (field.size() != static_cast<size_t>(n) * dim)
        throw std::invalid_argument("fourier_coefficients: buffer size mismatch");
    FourierTable t;
    t.n = n;
    t.dim = dim;
    t.coeffs.assign(static_cast<size_t>(n) * dim, {0.0, 0.0});
    const double w = two_pi / n;
    for (int mode = t.min_mode(); mode <= t.max_mode(); ++mode) {
        for (int j = 0; j < n; ++j) {
            double ang = -mode * w * j;
            std::complex<double> e(std::cos(ang), std::sin(ang));
            for (int c = 0; c < dim; ++c)
                t.coeff(mode, c) += e * field[static_cast<size_t>(j) * dim + c];
        }
    }
    for (auto& z : t.coeffs) z /= static_cast<double>(n);
    return t;
}

std::vector<double> inverse_fourier(const FourierTable& t) {
    std::vector<double> out(static_cast<size_t>(t.n) * t.dim, 0.0);
    const double w = two_pi / t.n;
    for (int j = 0; j < t.n; ++j) {
        for (int mode = t.min_mode(); mode <= t.max_mode(); ++mode) {
            double ang = mode * w * j;
            std::complex<double> e(std::cos(ang), std::sin(ang));
            for (int c = 0; c < t.dim; ++c)
                out[static_cast<size_t>(j) * t.dim + c] += (t.coeff(mode, c) * e).real();
        }
    }
    return out;
}

} // namespace wavemaps
