#include "pmc/elliptic_solver.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include "spectral.hpp"

namespace pmc {

namespace {

double rms(const Eigen::ArrayXd& v) { return std::sqrt(v.square().mean()); }

// Operator and preconditioner on raw arrays of one grid.
class Workspace {
public:
    Workspace(const TorusGrid& grid, const Eigen::ArrayXd& a) : grid_(grid), a_(a), lap_(Eigen::ArrayXd::Zero(grid.size())) {
        for (int k = 0; k < grid.dim(); ++k) {
            symbols_.push_back(detail::axis_symbol(grid, k));
            lap_ += symbols_.back().square();
        }
    }

    // -div(a grad w)
    Eigen::ArrayXd apply(const Eigen::ArrayXd& w) const {
        const Eigen::ArrayXcd spec = detail::forward(grid_, w);
        Eigen::ArrayXcd acc = Eigen::ArrayXcd::Zero(grid_.size());
        for (const auto& sym : symbols_) {
            const Eigen::ArrayXd flux = a_ * detail::inverse_real(grid_, detail::multiply_ik(spec, sym));
            acc += detail::multiply_ik(detail::forward(grid_, flux), sym);
        }
        return -detail::inverse_real(grid_, std::move(acc));
    }

    // Pseudo-inverse of -Laplacian; also projects onto the operator's range.
    Eigen::ArrayXd precondition(const Eigen::ArrayXd& r) const {
        Eigen::ArrayXcd spec = detail::forward(grid_, r);
        for (Index i = 0; i < grid_.size(); ++i) spec[i] = lap_[i] > 0.0 ? spec[i] / lap_[i] : 0.0;
        return detail::inverse_real(grid_, std::move(spec));
    }

    Eigen::ArrayXd project(const Eigen::ArrayXd& r) const {
        Eigen::ArrayXcd spec = detail::forward(grid_, r);
        for (Index i = 0; i < grid_.size(); ++i) {
            if (lap_[i] == 0.0) spec[i] = 0.0;
        }
        return detail::inverse_real(grid_, std::move(spec));
    }

private:
    const TorusGrid& grid_;
    const Eigen::ArrayXd& a_;
    std::vector<Eigen::ArrayXd> symbols_;
    Eigen::ArrayXd lap_;
};

double dot(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y) { return (x * y).sum(); }

}  // namespace

WeightedPoissonProblem::WeightedPoissonProblem(ScalarField coefficient_, ScalarField rhs_)
    : coefficient(std::move(coefficient_)), rhs(std::move(rhs_)) {
    if (!(coefficient.grid() == rhs.grid())) throw DimensionError("coefficient and rhs live on different grids");
    if (!(coefficient.values().minCoeff() > 0.0) || coefficient.values().maxCoeff() > 1.0 + 1e-14) {
        throw DomainError("coefficient must take values in (0, 1]");
    }
}

ScalarField coefficient_from(const ScalarField& v) {
    const Eigen::ArrayXd g = gradient(v).magnitude();
    return ScalarField(v.grid(), (1.0 + g.square()).rsqrt());
}

ScalarField apply_operator(const ScalarField& a, const ScalarField& w) {
    if (!(a.grid() == w.grid())) throw DimensionError("apply_operator: grid mismatch");
    Workspace ws(w.grid(), a.values());
    return ScalarField(w.grid(), -ws.apply(w.values()));
}

double bilinear_form(const ScalarField& w1, const ScalarField& w2, const ScalarField& a) {
    if (!(w1.grid() == w2.grid()) || !(w1.grid() == a.grid())) throw DimensionError("bilinear_form: grid mismatch");
    const auto g1 = gradient(w1);
    const auto g2 = gradient(w2);
    Eigen::ArrayXd dotp = Eigen::ArrayXd::Zero(w1.size());
    for (int k = 0; k < g1.dim(); ++k) dotp += g1.component(k) * g2.component(k);
    return (a.values() * dotp).mean();
}

double gradient_l2_norm(const ScalarField& w) { return rms(gradient(w).magnitude()); }

double weak_residual(const ScalarField& u, const WeightedPoissonProblem& problem) {
    if (!(u.grid() == problem.grid())) throw DimensionError("weak_residual: grid mismatch");
    return rms(apply_operator(problem.coefficient, u).values() + problem.rhs.values());
}

std::pair<ScalarField, LinearSolveStats> WeightedPoissonSolver::solve(const WeightedPoissonProblem& problem,
                                                                      const std::optional<ScalarField>& initial_guess) {
    const TorusGrid& grid = problem.grid();
    const double rhs_mean = mean(problem.rhs);
    if (std::abs(rhs_mean) >= options_.mean_tolerance) {
        std::ostringstream msg;
        msg << "right-hand side mean " << rhs_mean << " exceeds tolerance " << options_.mean_tolerance;
        throw ContractViolation(msg.str());
    }

    LinearSolveStats stats;
    stats.coercivity_lower_bound = problem.coefficient.values().minCoeff();

    Workspace ws(grid, problem.coefficient.values());
    const Eigen::ArrayXd b = ws.project(problem.rhs.values());
    const double bnorm = rms(b);
    if (bnorm == 0.0) return {ScalarField(grid), stats};

    Eigen::ArrayXd x = Eigen::ArrayXd::Zero(grid.size());
    if (initial_guess) {
        if (!(initial_guess->grid() == grid)) throw DimensionError("initial guess lives on another grid");
        x = ws.project(initial_guess->values());
    }
    Eigen::ArrayXd r = b - ws.apply(x);
    double rel = rms(r) / bnorm;

    // Restarted PCG: the true residual is recomputed whenever the recurrence
    // claims convergence, guarding against drift.
    int it = 0;
    while (rel > options_.tolerance && it < options_.max_iterations) {
        Eigen::ArrayXd z = ws.precondition(r);
        Eigen::ArrayXd p = z;
        double rz = dot(r, z);
        while (it < options_.max_iterations) {
            ++it;
            const Eigen::ArrayXd ap = ws.apply(p);
            const double pap = dot(p, ap);
            if (!(pap > 0.0)) break;
            const double alpha = rz / pap;
            x += alpha * p;
            r -= alpha * ap;
            if (rms(r) / bnorm <= 0.5 * options_.tolerance) break;
            z = ws.precondition(r);
            const double rz_new = dot(r, z);
            p = z + (rz_new / rz) * p;
            rz = rz_new;
        }
        r = b - ws.apply(x);
        const double new_rel = rms(r) / bnorm;
        if (!(new_rel < rel) && rel <= 10.0 * options_.tolerance) {
            rel = new_rel;
            break;
        }
        rel = new_rel;
    }
    stats.iterations = it;
    stats.relative_residual = rel;
    if (!(rel <= options_.tolerance)) {
        std::ostringstream msg;
        msg << "weighted Poisson solve stopped after " << it << " iterations at relative residual " << rel;
        throw SolverFailure(msg.str(), stats);
    }
    x -= x.mean();
    return {ScalarField(grid, std::move(x)), stats};
}

std::pair<ScalarField, LinearSolveStats> solve_weighted_poisson(const WeightedPoissonProblem& problem,
                                                                const EllipticOptions& options) {
    WeightedPoissonSolver solver(options);
    return solver.solve(problem);
}

}  // namespace pmc
