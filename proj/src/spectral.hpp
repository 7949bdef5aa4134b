#pragma once

// Internal n-dimensional FFT helpers shared by the spectral operators.

#include <Eigen/Core>

#include <vector>

#include "pmc/torus_grid.hpp"

namespace pmc::detail {

Eigen::ArrayXcd forward(const TorusGrid& grid, const Eigen::ArrayXd& values);

/// Inverse transform (normalized) returning the real part.
Eigen::ArrayXd inverse_real(const TorusGrid& grid, Eigen::ArrayXcd spectrum);

/// Signed wavenumber of index j on an N-point axis; the Nyquist index maps to N/2.
inline int signed_wavenumber(int j, int n) { return j <= n / 2 ? j : j - n; }

/// Per-axis first-derivative symbol 2*pi*k, zero at the Nyquist index.
std::vector<double> derivative_symbol(int n);

/// Per-flat-index symbol 2*pi*k_axis (Nyquist zero) along one axis.
Eigen::ArrayXd axis_symbol(const TorusGrid& grid, int axis);

/// Spectral derivative along `axis` of a transformed field.
Eigen::ArrayXcd multiply_ik(const Eigen::ArrayXcd& spectrum, const Eigen::ArrayXd& symbol);

void require_finite(const Eigen::ArrayXd& values, const char* what);

}  // namespace pmc::detail
