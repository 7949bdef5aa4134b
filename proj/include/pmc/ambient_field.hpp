#pragma once

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "pmc/torus_grid.hpp"

namespace pmc {

/// Scalar function of a torus point x (length n) and a height s.
using PointFunction = std::function<double(std::span<const double> x, double s)>;

/// One component of an analytic ambient field together with its s-derivative.
struct AnalyticComponent {
    PointFunction value;
    PointFunction vertical_partial;
};

/// Uniform vertical nodes first + j * spacing, j = 0..count-1.
struct VerticalLattice {
    double first = -1.0;
    double spacing = 0.0;
    int count = 0;

    static VerticalLattice unit_interval(int count) { return {-1.0, 2.0 / (count - 1), count}; }

    double node(int j) const { return first + j * spacing; }
    double last() const { return node(count - 1); }
};

/**
 * The ambient vector field g = (g', g^{n+1}) on T^n x (band_lower, band_upper).
 *
 * Two backends:
 *  - analytic: n+1 callables with their vertical partials, band (-1, 1);
 *  - sampled: values on a torus grid times a uniform vertical lattice.
 *    Interpolation is spectral in x and a not-a-knot cubic spline in s.
 *
 * Immutable and cheap to copy (the backend is shared).
 */
class AmbientField {
public:
    static AmbientField analytic(int dim, std::vector<AnalyticComponent> components);

    /// `values[c]` is (count x grid.size()): one column of vertical samples per torus point.
    static AmbientField sampled(const TorusGrid& grid, VerticalLattice lattice, std::vector<Eigen::MatrixXd> values,
                                double band_lower, double band_upper);

    /// Sampled field on `vertical_points` nodes spanning [-1, 1], band (-1, 1).
    static AmbientField sampled(const TorusGrid& grid, int vertical_points, std::vector<Eigen::MatrixXd> values);

    /// Tabulates any field on grid x [-1, 1] (vertical_points nodes).
    static AmbientField tabulate(const AmbientField& g, const TorusGrid& grid, int vertical_points);

    /// Constant vector field (analytic backend).
    static AmbientField constant(int dim, std::span<const double> value);

    int dim() const;
    int components() const { return dim() + 1; }
    bool is_sampled() const;
    double band_lower() const;
    double band_upper() const;
    bool in_band(double s) const { return s > band_lower() && s < band_upper(); }

    /// Throws DomainError unless s lies in the open band.
    Eigen::VectorXd eval(std::span<const double> x, double s) const;
    Eigen::VectorXd eval_vertical_partial(std::span<const double> x, double s) const;

    /// Component arrays of g(x_i, heights[i]) over every node of `grid`.
    std::vector<Eigen::ArrayXd> eval_on_graph(const TorusGrid& grid, const Eigen::ArrayXd& heights) const;
    std::vector<Eigen::ArrayXd> vertical_partial_on_graph(const TorusGrid& grid, const Eigen::ArrayXd& heights) const;

    // Sampled-backend data; these throw if the field is analytic.
    const TorusGrid& sample_grid() const;
    const VerticalLattice& lattice() const;
    const Eigen::MatrixXd& samples(int component) const;
    /// Spline slopes d/ds at the nodes.
    const Eigen::MatrixXd& slopes(int component) const;

    /// Raw node values without the band check (analytic: direct call).
    double raw_value(int component, std::span<const double> x, double s) const;
    double raw_vertical_partial(int component, std::span<const double> x, double s) const;

    struct Impl;

private:
    explicit AmbientField(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

/// Returns g(x, s - shift): the field translated upward by `shift` (analytic only).
AmbientField translate_vertically(const AmbientField& g, double shift);

/// q = n p / (n + 1 - p); requires (n+1)/2 < p < n+1.
double exponent_q(int n, double p);

struct HypothesisOptions {
    /// Sampling lattice for analytic fields; sampled fields use their own.
    std::optional<TorusGrid> grid;
    int vertical_points = 129;
    double zero_mean_tolerance = 1e-10;
};

struct HypothesisReport {
    int dim = 0;
    double epsilon = 0.0;
    double p = 0.0;
    double sobolev_norm_w1p = 0.0;
    bool smallness_pass = false;
    double monotonicity_margin = 0.0;
    double zero_mean_residual = 0.0;
    double zero_mean_tolerance = 0.0;

    double q() const { return exponent_q(dim, p); }
    double smallness_threshold() const;
    bool passed() const {
        return smallness_pass && monotonicity_margin > 0.0 && zero_mean_residual < zero_mean_tolerance;
    }
};

/// Additive W^{1,p}(T^n x band) norm of all components, trapezoid rule in s.
double w1p_norm(const AmbientField& g, double p, const HypothesisOptions& options = {});

/**
 * Checks the three solvability hypotheses on a sample lattice:
 *   ||g||_{W^{1,p}} < eps^{2/3},
 *   d_s g^{n+1} > eps + eps^{1/2} |d_s g'|   (reported as the infimum margin),
 *   |mean_x g^{n+1}(x, 0)| < tolerance.
 */
HypothesisReport check_hypotheses(const AmbientField& g, double epsilon, double p,
                                  const HypothesisOptions& options = {});

/**
 * L^p norm over T^n x [s_lower, s_upper] of the pointwise Euclidean length |g|,
 * by the trapezoid rule on the lattice nodes. Both limits must be nodes.
 * Sampled fields only.
 */
double ambient_lp_norm(const AmbientField& g, double p, double s_lower, double s_upper);

}  // namespace pmc
