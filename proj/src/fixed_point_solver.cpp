#include "pmc/fixed_point_solver.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "pmc/mollifier.hpp"
#include "pmc/verification.hpp"

namespace pmc {

void SolverConfig::validate(int dim) const {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
    q_for(dim);
    for (std::size_t i = 0; i < lambda_schedule.size(); ++i) {
        const double l = lambda_schedule[i];
        if (!(l > 0.0 && l < 0.125)) throw ConfigurationError("lambda schedule entries must lie in (0, 1/8)");
        if (i > 0 && !(l < lambda_schedule[i - 1])) {
            throw ConfigurationError("lambda schedule must be strictly decreasing");
        }
    }
    if (!(picard_tol > 0.0)) throw ConfigurationError("picard_tol must be positive");
    if (picard_max_iters < 1) throw ConfigurationError("picard_max_iters must be at least 1");
    if (!(damping > 0.0 && damping <= 1.0)) throw ConfigurationError("damping must lie in (0, 1]");
    if (max_halvings < 0) throw ConfigurationError("max_halvings must be non-negative");
    if (!(linear_tol > 0.0)) throw ConfigurationError("linear_tol must be positive");
    if (linear_max_iters < 1) throw ConfigurationError("linear_max_iters must be at least 1");
    if (!(shift_tol > 0.0)) throw ConfigurationError("shift_tol must be positive");
    if (vertical_points < 16) throw ConfigurationError("vertical_points must be at least 16");
}

int SolveReport::total_iterations() const {
    int total = 0;
    for (int k : picard_iterates) total += k;
    return total;
}

TResult apply_T(const ScalarField& v, const AmbientField& g_lambda, const SolverConfig& config,
                const std::optional<ScalarField>& initial_guess) {
    const ShiftProblem problem(v - mean(v), g_lambda, config.epsilon);
    const ShiftResult shift = find_shift(problem, ShiftOptions{config.shift_tol, 200});
    const Eigen::ArrayXd flux = flux_density(problem, shift.c);
    const ScalarField H(v.grid(), flux - flux.mean());

    WeightedPoissonSolver solver(EllipticOptions{config.linear_tol, config.linear_max_iters, 1e-10});
    auto [u, stats] = solver.solve(WeightedPoissonProblem(coefficient_from(problem.v()), H), initial_guess);
    return TResult{std::move(u), shift.c, shift, stats, problem.c1_bound_ok()};
}

namespace {

// Lattice spacings the mollifier sees for this field.
std::pair<double, double> spacings(const AmbientField& g, const TorusGrid& grid, int vertical_points) {
    if (g.is_sampled()) return {g.sample_grid().spacing(), g.lattice().spacing};
    return {grid.spacing(), 2.0 / (vertical_points - 1)};
}

}  // namespace

StageResult solve_at_lambda(const AmbientField& g, double lambda, const SolverConfig& config, const ScalarField& v0) {
    const TorusGrid& grid = v0.grid();
    config.validate(grid.dim());
    const double q = config.q_for(grid.dim());
    const double root = std::sqrt(config.epsilon);

    StageReport rep;
    rep.lambda = lambda;
    AmbientField g_l = g;
    if (lambda > 0.0) {
        MollifyOptions mo;
        mo.grid = grid;
        mo.vertical_points = config.vertical_points;
        g_l = mollify(g, lambda, mo);
    }

    ScalarField v = v0 - mean(v0);
    double theta = config.damping;
    int halvings = 0;
    double previous = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= config.picard_max_iters; ++it) {
        std::optional<TResult> applied;
        try {
            applied = apply_T(v, g_l, config, v);
        } catch (const Error& e) {
            rep.iterations = it - 1;
            throw StageFailure(e.what(), rep);
        }
        const TResult& t = *applied;
        PicardStep step;
        step.c = t.c;
        step.shift_residual = t.shift.residual;
        step.update_norm = sobolev_norm(t.u - v, 2, q);
        step.t1_norm = sobolev_norm(t.u, 2, q);
        step.linear_iterations = t.linear.iterations;
        step.in_admissible_set = sobolev_norm(v, 2, q) <= root;
        step.shift_warning = t.shift.warning;

        if (step.update_norm <= config.picard_tol) {
            step.theta = 0.0;
            rep.steps.push_back(step);
            rep.iterations = it;
            rep.converged = true;
            rep.c = t.c;
            rep.final_update = step.update_norm;
            return StageResult{std::move(v), t.c, std::move(rep)};
        }
        if (step.update_norm > previous && halvings < config.max_halvings) {
            theta *= 0.5;
            ++halvings;
        }
        step.theta = theta;
        rep.steps.push_back(step);
        v = v + theta * (t.u - v);
        v = v - mean(v);
        previous = step.update_norm;
    }
    rep.iterations = config.picard_max_iters;
    rep.final_update = previous;
    std::ostringstream msg;
    msg << "Picard iteration at lambda=" << lambda << " did not reach " << config.picard_tol << " in "
        << config.picard_max_iters << " iterations (last update " << previous << ")";
    throw StageFailure(msg.str(), rep);
}

namespace {

void absorb(SolveReport& report, const StageReport& stage, double g_norm) {
    for (const auto& s : stage.steps) {
        report.c_history.push_back(s.c);
        report.shift_residuals.push_back(s.shift_residual);
        if (g_norm > 0.0) report.apriori_ratio = std::max(report.apriori_ratio, s.t1_norm / g_norm);
        if (!s.in_admissible_set) report.admissible_throughout = false;
    }
    report.picard_iterates.push_back(stage.iterations);
    report.stages.push_back(stage);
}

}  // namespace

SolveReport solve(const AmbientField& g, const TorusGrid& grid, const SolverConfig& config,
                  const std::optional<ScalarField>& v0) {
    const int n = grid.dim();
    if (g.dim() != n) throw DimensionError("solve: field and grid dimensions differ");
    config.validate(n);

    SolveReport report;
    report.dim = n;
    report.points_per_axis = grid.points_per_axis();
    report.epsilon = config.epsilon;
    report.p = config.p_for(n);
    report.q = config.q_for(n);
    report.sqrt_epsilon = std::sqrt(config.epsilon);

    HypothesisOptions ho;
    ho.grid = grid;
    ho.vertical_points = config.vertical_points;
    report.hypotheses = check_hypotheses(g, config.epsilon, report.p, ho);
    report.hypotheses_passed = report.hypotheses.passed();
    report.g_w1p_norm = report.hypotheses.sobolev_norm_w1p;
    if (config.require_hypotheses && !report.hypotheses_passed) {
        std::ostringstream msg;
        msg << "hypotheses fail: ||g||_W1p=" << report.hypotheses.sobolev_norm_w1p << " (threshold "
            << report.hypotheses.smallness_threshold() << "), monotonicity margin "
            << report.hypotheses.monotonicity_margin << ", zero-mean residual " << report.hypotheses.zero_mean_residual;
        throw ContractViolation(msg.str());
    }

    ScalarField v = v0 ? *v0 - mean(*v0) : ScalarField(grid);
    if (!(v.grid() == grid)) throw DimensionError("solve: initial guess lives on another grid");
    std::optional<ScalarField> previous;
    double c = 0.0;
    bool settled = false;

    auto run = [&](double lambda) {
        StageResult r{ScalarField(grid), 0.0, {}};
        try {
            r = solve_at_lambda(g, lambda, config, v);
        } catch (const StageFailure& e) {
            auto stage = e.report();
            stage.note = e.what();
            absorb(report, stage, report.g_w1p_norm);
            report.failure = e.what();
            throw SolveFailure(e.what(), report);
        } catch (const Error& e) {
            StageReport stage;
            stage.lambda = lambda;
            stage.note = e.what();
            absorb(report, stage, report.g_w1p_norm);
            report.failure = e.what();
            throw SolveFailure(e.what(), report);
        }
        const double q = report.q;
        r.report.change_from_previous =
            previous ? sobolev_norm(r.v - *previous, 2, q) : std::numeric_limits<double>::infinity();
        r.report.residual_unmollified = pmc_residual(r.v + r.c, g);
        if (r.report.change_from_previous < config.picard_tol) settled = true;
        absorb(report, r.report, report.g_w1p_norm);
        previous = r.v;
        v = r.v;
        c = r.c;
    };

    const auto [hx, hs] = spacings(g, grid, config.vertical_points);
    for (double lambda : config.lambda_schedule) {
        StageReport skipped;
        skipped.lambda = lambda;
        skipped.skipped = true;
        if (settled) {
            skipped.note = "continuation settled";
        } else if (!mollifier_resolvable(lambda, TorusGrid(n, static_cast<int>(std::lround(1.0 / hx))), hs)) {
            std::ostringstream msg;
            msg << "radius below two lattice spacings (h=" << hx << ", h_s=" << hs << ")";
            skipped.note = msg.str();
        } else {
            run(lambda);
            continue;
        }
        report.stages.push_back(skipped);
    }
    run(0.0);

    const ScalarField u = v + c;
    report.final_c = c;
    report.residual_nonlinear = pmc_residual(u, g);
    report.residual_tolerance = std::max(10.0 * config.picard_tol * report.g_w1p_norm,
                                         1.0 / (double(grid.points_per_axis()) * grid.points_per_axis()));
    report.w2q_norm_of_centered_u = sobolev_norm(v, 2, report.q);
    report.epsilon_bound_satisfied = report.w2q_norm_of_centered_u <= report.sqrt_epsilon;
    report.converged = report.stages.back().converged && report.residual_nonlinear <= report.residual_tolerance;
    if (!report.converged && report.failure.empty()) {
        std::ostringstream msg;
        msg << "unmollified residual " << report.residual_nonlinear << " above tolerance " << report.residual_tolerance;
        report.failure = msg.str();
    }
    report.u = u;
    return report;
}

namespace {

std::string fmt(double x) {
    std::ostringstream s;
    s << std::setprecision(12) << x;
    return s.str();
}

std::string yes_no(bool b) { return b ? "true" : "false"; }

template <class T>
std::string join(const std::vector<T>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ",";
        if constexpr (std::is_same_v<T, double>) {
            out += fmt(xs[i]);
        } else {
            out += std::to_string(xs[i]);
        }
    }
    return out;
}

}  // namespace

void write_report(std::ostream& out, const SolveReport& r) {
    out << "dim: " << r.dim << '\n';
    out << "N: " << r.points_per_axis << '\n';
    out << "epsilon: " << fmt(r.epsilon) << '\n';
    out << "p: " << fmt(r.p) << '\n';
    out << "q: " << fmt(r.q) << '\n';
    out << "hypotheses: " << (r.hypotheses_passed ? "passed" : "failed") << '\n';
    out << "hypothesis_w1p_norm: " << fmt(r.hypotheses.sobolev_norm_w1p) << '\n';
    out << "hypothesis_smallness_threshold: " << fmt(r.hypotheses.smallness_threshold()) << '\n';
    out << "hypothesis_monotonicity_margin: " << fmt(r.hypotheses.monotonicity_margin) << '\n';
    out << "hypothesis_zero_mean_residual: " << fmt(r.hypotheses.zero_mean_residual) << '\n';
    out << "converged: " << yes_no(r.converged) << '\n';
    if (!r.failure.empty()) out << "failure: " << r.failure << '\n';
    out << "final_c: " << fmt(r.final_c) << '\n';
    out << "residual_nonlinear: " << fmt(r.residual_nonlinear) << '\n';
    out << "residual_tolerance: " << fmt(r.residual_tolerance) << '\n';
    out << "w2q_norm_of_centered_u: " << fmt(r.w2q_norm_of_centered_u) << '\n';
    out << "sqrt_epsilon: " << fmt(r.sqrt_epsilon) << '\n';
    out << "epsilon_bound_satisfied: " << yes_no(r.epsilon_bound_satisfied) << '\n';
    out << "apriori_ratio: " << fmt(r.apriori_ratio) << '\n';
    out << "admissible_throughout: " << yes_no(r.admissible_throughout) << '\n';
    out << "total_iterations: " << r.total_iterations() << '\n';
    out << "picard_iterates: " << join(r.picard_iterates) << '\n';
    out << "c_history: " << join(r.c_history) << '\n';
    out << "shift_residuals: " << join(r.shift_residuals) << '\n';
    for (std::size_t i = 0; i < r.stages.size(); ++i) {
        const auto& s = r.stages[i];
        out << "stage[" << i << "]:\n";
        out << "  lambda: " << fmt(s.lambda) << '\n';
        out << "  skipped: " << yes_no(s.skipped) << '\n';
        if (!s.note.empty()) out << "  note: " << s.note << '\n';
        if (s.skipped) continue;
        out << "  converged: " << yes_no(s.converged) << '\n';
        out << "  iterations: " << s.iterations << '\n';
        out << "  c: " << fmt(s.c) << '\n';
        out << "  final_update: " << fmt(s.final_update) << '\n';
        out << "  change_from_previous: " << fmt(s.change_from_previous) << '\n';
        out << "  residual_unmollified: " << fmt(s.residual_unmollified) << '\n';
        for (const auto& st : s.steps) {
            if (!st.shift_warning.empty()) out << "  shift_warning: " << st.shift_warning << '\n';
        }
    }
}

}  // namespace pmc
