#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "pmc/ambient_field.hpp"
#include "pmc/torus_grid.hpp"

namespace pmc {

/// Upward unit normal (-z, 1) / sqrt(1 + |z|^2) of a graph with slope z.
Eigen::VectorXd normal_vector(std::span<const double> z);

/**
 * F(t) = mean over the grid of nu(grad v(x)) . g(x, v(x) + t).
 *
 * The normal field is computed once at construction. The constructor checks
 * that v + t stays inside the field's band for every t in the bracket.
 */
class ShiftProblem {
public:
    static constexpr double kBracket = 0.25;

    ShiftProblem(ScalarField v, AmbientField g, double epsilon);

    const ScalarField& v() const { return v_; }
    const AmbientField& field() const { return g_; }
    double epsilon() const { return epsilon_; }
    const TorusGrid& grid() const { return v_.grid(); }

    /// nu(grad v) as n+1 component arrays.
    const std::vector<Eigen::ArrayXd>& normal() const { return normal_; }

    double c1_norm() const { return c1_norm_; }
    /// ||v||_{C^1} <= sqrt(epsilon)
    bool c1_bound_ok() const { return c1_norm_ <= std::sqrt(epsilon_); }

private:
    ScalarField v_;
    AmbientField g_;
    double epsilon_;
    double c1_norm_;
    std::vector<Eigen::ArrayXd> normal_;
};

/// Pointwise nu(grad v) . g(x, v + t).
Eigen::ArrayXd flux_density(const ShiftProblem& problem, double t);

double eval_F(const ShiftProblem& problem, double t);

/// F at `count` equally spaced points of [-1/4, 1/4], endpoints included.
std::vector<std::pair<double, double>> sample_F(const ShiftProblem& problem, int count);

struct ShiftOptions {
    /// Success when |F(c)| <= tolerance * epsilon.
    double tolerance = 1e-10;
    int max_evaluations = 200;
};

struct ShiftResult {
    double c = 0.0;
    double residual = 0.0;  // F(c)
    int evaluations = 0;
    /// Nonempty if the evaluated samples were not strictly increasing.
    std::string warning;
};

/// Sign condition F(lo) < 0 < F(hi) failed.
class BracketError : public Error {
public:
    BracketError(const std::string& message, double f_lower, double f_upper)
        : Error(message), f_lower_(f_lower), f_upper_(f_upper) {}
    double f_lower() const { return f_lower_; }
    double f_upper() const { return f_upper_; }

private:
    double f_lower_;
    double f_upper_;
};

/// Bisection on [-1/4, 1/4] followed by one secant polish step.
ShiftResult find_shift(const ShiftProblem& problem, const ShiftOptions& options = {});

/// Same on a sub-bracket [lower, upper] of [-1/4, 1/4].
ShiftResult find_shift(const ShiftProblem& problem, double lower, double upper, const ShiftOptions& options = {});

}  // namespace pmc
