#include "spectral.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace pmc::detail {

namespace {

// Transforms every line along every axis in place.
void transform(const TorusGrid& grid, Eigen::ArrayXcd& data, bool inverse) {
    // kissfft keeps a plan cache per object; one per thread keeps calls reentrant.
    thread_local Eigen::FFT<double> fft;

    const int n = grid.points_per_axis();
    std::vector<std::complex<double>> line(n), out(n);
    for (int axis = 0; axis < grid.dim(); ++axis) {
        const Index stride = grid.stride(axis);
        const Index block = stride * n;
        for (Index base = 0; base < grid.size(); base += block) {
            for (Index off = 0; off < stride; ++off) {
                const Index start = base + off;
                for (int j = 0; j < n; ++j) line[j] = data[start + j * stride];
                if (inverse) {
                    fft.inv(out, line);
                } else {
                    fft.fwd(out, line);
                }
                for (int j = 0; j < n; ++j) data[start + j * stride] = out[j];
            }
        }
    }
}

}  // namespace

Eigen::ArrayXcd forward(const TorusGrid& grid, const Eigen::ArrayXd& values) {
    Eigen::ArrayXcd spectrum = values.cast<std::complex<double>>();
    transform(grid, spectrum, false);
    return spectrum;
}

Eigen::ArrayXd inverse_real(const TorusGrid& grid, Eigen::ArrayXcd spectrum) {
    transform(grid, spectrum, true);
    return spectrum.real();
}

std::vector<double> derivative_symbol(int n) {
    std::vector<double> k(n);
    for (int j = 0; j < n; ++j) {
        k[j] = (j == n / 2) ? 0.0 : 2.0 * std::numbers::pi * signed_wavenumber(j, n);
    }
    return k;
}

Eigen::ArrayXd axis_symbol(const TorusGrid& grid, int axis) {
    const auto k = derivative_symbol(grid.points_per_axis());
    Eigen::ArrayXd out(grid.size());
    for (Index i = 0; i < grid.size(); ++i) out[i] = k[grid.axis_index(i, axis)];
    return out;
}

Eigen::ArrayXcd multiply_ik(const Eigen::ArrayXcd& spectrum, const Eigen::ArrayXd& symbol) {
    // (a + ib) * ik = -bk + iak
    Eigen::ArrayXcd out(spectrum.size());
    out.real() = -spectrum.imag() * symbol;
    out.imag() = spectrum.real() * symbol;
    return out;
}

void require_finite(const Eigen::ArrayXd& values, const char* what) {
    if (!values.allFinite()) {
        throw DomainError(std::string(what) + ": non-finite value");
    }
}

}  // namespace pmc::detail
