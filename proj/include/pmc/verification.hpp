#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pmc/ambient_field.hpp"
#include "pmc/fixed_point_solver.hpp"
#include "pmc/torus_grid.hpp"

namespace pmc {

/// Mean curvature -div(grad u / sqrt(1 + |grad u|^2)).
ScalarField mean_curvature(const ScalarField& u);

/// Pointwise -div(grad u / W) - nu(grad u) . g(x, u). Throws DomainError if u leaves the band.
ScalarField pmc_residual_field(const ScalarField& u, const AmbientField& g);

/// Discrete L^2 norm of pmc_residual_field.
double pmc_residual(const ScalarField& u, const AmbientField& g);

/**
 * Target graph u* and an ambient field g built so that u* solves the
 * equation exactly on the grid:
 *
 *   g'(x, s)      = s B(x)                       (B = 0 unless given)
 *   g^{n+1}(x, s) = W H* + s grad u* . B + kappa (s - u*)
 *
 * with H* the mean curvature of u* and W = sqrt(1 + |grad u*|^2). The stored
 * u_star is the input shifted by `shift` so that mean g^{n+1}(x, 0) = 0.
 * g is a sampled field on u*'s grid; it is linear in s, so the vertical spline
 * is exact.
 */
struct ManufacturedCase {
    ScalarField u_star;
    double kappa = 0.0;
    double epsilon = 0.0;
    double shift = 0.0;
    AmbientField g;
    HypothesisReport hypotheses;
    std::string description;
};

struct ManufacturedOptions {
    /// Throw ConstructionError if the hypotheses fail.
    bool strict = true;
    /// Defaults to (n + 2) / 2.
    std::optional<double> p;
    int vertical_points = 129;
    /// Slopes B_k(x) of the tangential part; empty means g' = 0.
    std::vector<Eigen::ArrayXd> tangential_slope;
};

ManufacturedCase build_manufactured(const ScalarField& u_star, double kappa, double epsilon,
                                    const ManufacturedOptions& options = {});

struct TraceBound {
    double lhs = 0.0;     // ||g_lambda(., v(.))||_{L^q}
    double norm_g = 0.0;  // ||g||_{W^{1,p}}
    double ratio = 0.0;
};

/// Requires ||v||_{C^1} <= 7/16 and 0 < lambda < 1/8. Analytic g is tabulated on v's grid.
TraceBound trace_bound_check(const AmbientField& g, const ScalarField& v, double lambda, double p,
                             int vertical_points = 129);

struct OracleSolution {
    bool available = false;
    std::optional<ScalarField> u;
    int newton_iterations = 0;
    double residual = 0.0;
    std::string message;
};

/**
 * Independent 1D solve of (u' / W)' = -nu(u') . g(x, u): sixth-order central
 * differences on the grid, unknowns (w, c) with u = w + c and mean(w) = 0,
 * Newton with the exact Jacobian of the discrete system.
 */
OracleSolution ode_oracle_1d(const AmbientField& g, const TorusGrid& grid, int max_newton = 50);

struct OdeComparison {
    bool oracle_available = false;
    std::string message;
    double linf_difference = 0.0;
    std::optional<ScalarField> oracle_u;
    std::optional<ScalarField> solver_u;
};

OdeComparison ode_cross_check_1d(const AmbientField& g, const TorusGrid& grid, const SolverConfig& config);
OdeComparison ode_cross_check_1d(const AmbientField& g, const ScalarField& solver_u);

/// One line of a corpus manifest: name n N epsilon kappa amplitude seed [tangential].
struct CorpusEntry {
    std::string name;
    int dim = 1;
    int points = 64;
    double epsilon = 1e-3;
    double kappa = 2e-3;
    double amplitude = 0.0;
    std::uint64_t seed = 0;
    /// Relative size of a tangential part g' = s B(x), |B| <= tangential * epsilon.
    double tangential = 0.0;
};

std::vector<CorpusEntry> read_corpus(std::istream& in);
std::vector<CorpusEntry> read_corpus(const std::filesystem::path& path);

/// Deterministic uniform [0, 1) stream from a seed (splitmix64).
class SeededUniform {
public:
    explicit SeededUniform(std::uint64_t seed) : state_(seed) {}
    double operator()();
    double between(double lo, double hi) { return lo + (hi - lo) * (*this)(); }

private:
    std::uint64_t state_;
};

/// Smooth random field: a few low modes scaled so that max|u| = amplitude.
ScalarField random_smooth_field(const TorusGrid& grid, double amplitude, std::uint64_t seed, int max_wavenumber = 2);

ManufacturedCase corpus_case(const CorpusEntry& entry, const ManufacturedOptions& options = {});

}  // namespace pmc
