#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "pmc/errors.hpp"

namespace pmc {

using Eigen::Index;

/**
 * Uniform periodic lattice on the unit torus T^n, n in {1,2,3}.
 *
 * Points are x_i = i / N per axis. Flat indices are row-major: axis 0 (x1)
 * varies slowest, the last axis fastest. This ordering is also the on-disk
 * ordering of field files.
 */
class TorusGrid {
public:
    static constexpr int kMinPoints = 16;

    TorusGrid(int dim, int points_per_axis);

    int dim() const { return dim_; }
    int points_per_axis() const { return n_; }
    double spacing() const { return 1.0 / n_; }
    Index size() const { return size_; }

    /// Distance in flat-index units between neighbours along `axis`.
    Index stride(int axis) const { return strides_[axis]; }

    int axis_index(Index flat, int axis) const {
        return static_cast<int>((flat / strides_[axis]) % n_);
    }

    /// Flat index of a (possibly out-of-range) multi-index, wrapped periodically.
    Index wrap(std::span<const int> multi) const;

    double coordinate(Index flat, int axis) const { return axis_index(flat, axis) * spacing(); }
    std::array<double, 3> point(Index flat) const;

    bool operator==(const TorusGrid& other) const { return dim_ == other.dim_ && n_ == other.n_; }

private:
    int dim_;
    int n_;
    Index size_;
    std::array<Index, 3> strides_{};
};

/// Real grid function on T^n. Values are always finite.
class ScalarField {
public:
    explicit ScalarField(const TorusGrid& grid);
    ScalarField(const TorusGrid& grid, Eigen::ArrayXd values);

    static ScalarField constant(const TorusGrid& grid, double c);

    /// Samples f(x) at every grid point; `f` receives a span of length dim.
    template <class F>
    static ScalarField sample(const TorusGrid& grid, F&& f) {
        Eigen::ArrayXd v(grid.size());
        for (Index i = 0; i < grid.size(); ++i) {
            const auto x = grid.point(i);
            v[i] = f(std::span<const double>(x.data(), grid.dim()));
        }
        return ScalarField(grid, std::move(v));
    }

    const TorusGrid& grid() const { return grid_; }
    const Eigen::ArrayXd& values() const { return values_; }
    double operator[](Index i) const { return values_[i]; }
    Index size() const { return values_.size(); }

private:
    TorusGrid grid_;
    Eigen::ArrayXd values_;
};

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator+(const ScalarField& a, double c);
ScalarField operator-(const ScalarField& a, double c);
ScalarField operator*(double c, const ScalarField& a);

/// n-vector field on T^n (one array per axis). `gradient` produces these.
class VectorField {
public:
    VectorField(const TorusGrid& grid, std::vector<Eigen::ArrayXd> components);

    const TorusGrid& grid() const { return grid_; }
    int dim() const { return static_cast<int>(components_.size()); }
    const Eigen::ArrayXd& component(int k) const { return components_[k]; }

    /// Pointwise Euclidean length.
    Eigen::ArrayXd magnitude() const;

private:
    TorusGrid grid_;
    std::vector<Eigen::ArrayXd> components_;
};

using GradientField = VectorField;

// Spectral calculus. All derivatives use the Fourier-collocation symbol
// i*2*pi*k with the Nyquist wavenumber set to zero, so second derivatives are
// compositions of first derivatives and div(grad u) is the discrete Laplacian.

GradientField gradient(const ScalarField& u);
ScalarField divergence(const VectorField& w);
ScalarField partial(const ScalarField& u, int axis);
ScalarField second_partial(const ScalarField& u, int axis_a, int axis_b);
ScalarField laplacian(const ScalarField& u);

/// Zero-mean solution of laplacian(u) = f (f projected onto the range first).
ScalarField inverse_laplacian(const ScalarField& f);

/// Removes the constant and every mode annihilated by the derivative symbols.
ScalarField project_to_range(const ScalarField& u);

double mean(const ScalarField& u);
double inner(const ScalarField& a, const ScalarField& b);

/// (h^n sum |u_i|^p)^(1/p); p = +inf gives the max norm.
double lp_norm(const ScalarField& u, double p);
double lp_norm(const TorusGrid& grid, const Eigen::ArrayXd& values, double p);
double max_norm(const ScalarField& u);

/**
 * Additive discrete W^{order,p} norm:
 *   ||u||_p + sum_k ||d_k u||_p + sum_{j<=k} ||d_j d_k u||_p
 * Each unordered pair of second derivatives is counted once.
 */
double sobolev_norm(const ScalarField& u, int order, double p);

/// max|u| + max|grad u| (Euclidean length of the gradient).
double c1_norm(const ScalarField& u);

/// Trigonometric interpolant of u at x (coordinates reduced mod 1).
double interpolate(const ScalarField& u, std::span<const double> x);

/// Tensor-product cardinal weights w with interpolate(u, x) = w . u.values().
Eigen::ArrayXd interpolation_weights(const TorusGrid& grid, std::span<const double> x);

/// Fourier resampling onto another grid of the same dimension.
ScalarField resample(const ScalarField& u, const TorusGrid& target);

}  // namespace pmc
