#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pmc/ambient_field.hpp"
#include "pmc/elliptic_solver.hpp"
#include "pmc/shift_finder.hpp"
#include "pmc/torus_grid.hpp"

namespace pmc {

struct SolverConfig {
    double epsilon = 1e-3;
    /// Unset means (n + 2) / 2, which gives q = n + 2.
    std::optional<double> p;
    std::vector<double> lambda_schedule{1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
    double picard_tol = 1e-9;
    int picard_max_iters = 200;
    double damping = 1.0;
    int max_halvings = 4;
    double linear_tol = 1e-12;
    int linear_max_iters = 500;
    double shift_tol = 1e-10;
    /// Vertical nodes used when an analytic field is tabulated for mollification.
    int vertical_points = 129;
    /// Refuse to solve when the hypotheses fail.
    bool require_hypotheses = true;

    double p_for(int dim) const { return p ? *p : 0.5 * (dim + 2); }
    double q_for(int dim) const { return exponent_q(dim, p_for(dim)); }

    /// Throws ConfigurationError / DomainError on invalid settings.
    void validate(int dim) const;
};

/// T(v) = (u, c): c from the shift root-find, u from the weighted Poisson solve.
struct TResult {
    ScalarField u;
    double c = 0.0;
    ShiftResult shift;
    LinearSolveStats linear;
    bool c1_bound_ok = true;
};

TResult apply_T(const ScalarField& v, const AmbientField& g_lambda, const SolverConfig& config,
                const std::optional<ScalarField>& initial_guess = std::nullopt);

struct PicardStep {
    double c = 0.0;
    double shift_residual = 0.0;
    double update_norm = 0.0;  // ||T1(v) - v||_{W^{2,q}}
    double theta = 1.0;
    double t1_norm = 0.0;  // ||T1(v)||_{W^{2,q}}
    int linear_iterations = 0;
    bool in_admissible_set = true;  // ||v||_{W^{2,q}} <= sqrt(eps)
    std::string shift_warning;
};

struct StageReport {
    double lambda = 0.0;  // 0 for the unmollified stage
    bool skipped = false;
    std::string note;
    bool converged = false;
    int iterations = 0;
    double c = 0.0;
    double final_update = 0.0;
    double change_from_previous = 0.0;  // ||v_lambda - v_previous||_{W^{2,q}}
    double residual_unmollified = 0.0;
    std::vector<PicardStep> steps;
};

struct SolveReport {
    std::optional<ScalarField> u;
    int dim = 0;
    int points_per_axis = 0;
    double epsilon = 0.0;
    double p = 0.0;
    double q = 0.0;
    HypothesisReport hypotheses;
    bool hypotheses_passed = false;

    std::vector<double> c_history;
    std::vector<double> shift_residuals;
    std::vector<int> picard_iterates;
    std::vector<StageReport> stages;

    double g_w1p_norm = 0.0;
    /// max over accepted iterates of ||T1(v)||_{W^{2,q}} / ||g||_{W^{1,p}}
    double apriori_ratio = 0.0;
    bool admissible_throughout = true;

    double final_c = 0.0;
    double residual_nonlinear = 0.0;
    double residual_tolerance = 0.0;
    double w2q_norm_of_centered_u = 0.0;
    double sqrt_epsilon = 0.0;
    bool epsilon_bound_satisfied = false;
    bool converged = false;
    std::string failure;

    int total_iterations() const;
};

/// A stage failed; carries everything computed so far.
class SolveFailure : public Error {
public:
    SolveFailure(const std::string& message, SolveReport partial) : Error(message), partial_(std::move(partial)) {}
    const SolveReport& partial() const { return partial_; }

private:
    SolveReport partial_;
};

/// A Picard stage failed (iteration cap, bracket or linear failure); carries its history.
class StageFailure : public Error {
public:
    StageFailure(const std::string& message, StageReport report) : Error(message), report_(std::move(report)) {}
    const StageReport& report() const { return report_; }

private:
    StageReport report_;
};

struct StageResult {
    ScalarField v;  // zero-mean part
    double c = 0.0;
    StageReport report;
};

/**
 * Damped Picard iteration v <- v + theta (T1(v) - v) at one mollification
 * radius (lambda = 0 uses g itself). theta halves when the update norm grows.
 * Returns on ||T1(v) - v||_{W^{2,q}} <= picard_tol with v the last input, so
 * T(v) = (v + O(tol), c) exactly.
 */
StageResult solve_at_lambda(const AmbientField& g, double lambda, const SolverConfig& config, const ScalarField& v0);

/**
 * Lambda-continuation over the schedule, warm-starting each stage, followed by
 * an unmollified stage. Stages whose radius the lattice cannot resolve are
 * skipped and noted. Throws ContractViolation if the hypotheses fail and
 * require_hypotheses is set, SolveFailure if a stage fails.
 */
SolveReport solve(const AmbientField& g, const TorusGrid& grid, const SolverConfig& config,
                  const std::optional<ScalarField>& v0 = std::nullopt);

/// "key: value" lines; stages nested under "stage[i]:" with two-space indent.
void write_report(std::ostream& out, const SolveReport& report);

}  // namespace pmc
