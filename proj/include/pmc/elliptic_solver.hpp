#pragma once

#include <optional>
#include <utility>

#include "pmc/errors.hpp"
#include "pmc/torus_grid.hpp"

namespace pmc {

/**
 * -div(a grad u) = H on T^n with a = 1 / sqrt(1 + |grad v|^2).
 *
 * The discrete operator is the strong-form spectral div(a grad .). Its kernel
 * is spanned by the constant and the Nyquist modes; solutions are taken in the
 * orthogonal complement (zero mean).
 */
struct WeightedPoissonProblem {
    ScalarField coefficient;
    ScalarField rhs;

    /// Throws DimensionError on mismatched grids, DomainError if a is not in (0, 1].
    WeightedPoissonProblem(ScalarField coefficient, ScalarField rhs);

    const TorusGrid& grid() const { return rhs.grid(); }
};

struct LinearSolveStats {
    int iterations = 0;
    double relative_residual = 0.0;
    /// min a = 1 / sqrt(1 + max |grad v|^2)
    double coercivity_lower_bound = 0.0;
};

struct EllipticOptions {
    double tolerance = 1e-10;
    int max_iterations = 500;
    /// |mean(H)| allowed before the solve refuses the data.
    double mean_tolerance = 1e-10;
};

class SolverFailure : public Error {
public:
    SolverFailure(const std::string& message, LinearSolveStats stats) : Error(message), stats_(stats) {}
    const LinearSolveStats& stats() const { return stats_; }

private:
    LinearSolveStats stats_;
};

/// 1 / sqrt(1 + |grad v|^2) with the spectral gradient.
ScalarField coefficient_from(const ScalarField& v);

/// div(a grad w)
ScalarField apply_operator(const ScalarField& a, const ScalarField& w);

/// B[w1, w2] = mean(a grad w1 . grad w2)
double bilinear_form(const ScalarField& w1, const ScalarField& w2, const ScalarField& a);

/// ||grad w||_{L^2}
double gradient_l2_norm(const ScalarField& w);

/// ||div(a grad u) + H||_2
double weak_residual(const ScalarField& u, const WeightedPoissonProblem& problem);

/**
 * Preconditioned conjugate gradients on -div(a grad .) restricted to the
 * operator's range, preconditioned by the constant-coefficient inverse
 * Laplacian. Holds its own work vectors: one solve per instance at a time.
 */
class WeightedPoissonSolver {
public:
    explicit WeightedPoissonSolver(EllipticOptions options = {}) : options_(options) {}

    /// Throws ContractViolation if |mean(H)| >= mean_tolerance and SolverFailure on non-convergence.
    std::pair<ScalarField, LinearSolveStats> solve(const WeightedPoissonProblem& problem,
                                                   const std::optional<ScalarField>& initial_guess = std::nullopt);

    const EllipticOptions& options() const { return options_; }

private:
    EllipticOptions options_;
};

std::pair<ScalarField, LinearSolveStats> solve_weighted_poisson(const WeightedPoissonProblem& problem,
                                                                const EllipticOptions& options = {});

}  // namespace pmc
