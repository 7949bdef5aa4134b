#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pmc/ambient_field.hpp"
#include "pmc/cli/expression.hpp"
#include "pmc/fixed_point_solver.hpp"
#include "pmc/verification.hpp"

namespace pmc::cli {

/**
 * Flat `key = value` run configuration. '#' starts a comment.
 *
 *   grid.dim, grid.N
 *   solver.epsilon, solver.p, solver.lambda_schedule (comma list), solver.picard_tol,
 *   solver.picard_max_iters, solver.damping, solver.linear_tol, solver.linear_max_iters,
 *   solver.shift_tol, solver.vertical_points
 *   field.source = expr | file | manufactured
 *   field.g1 .. field.g<n+1>   expressions (expr source; missing components are 0)
 *   field.file                 pmc-ambient v1 path, relative to the config file
 *   manufactured.u_star        expression over x1..xn, or
 *   manufactured.amplitude + manufactured.seed   random smooth target
 *   manufactured.kappa, manufactured.tangential
 *   output.dir
 *
 * Unknown keys and duplicates are parse errors.
 */
struct RunConfig {
    int dim = 1;
    int points = 64;
    SolverConfig solver;

    std::string source = "expr";
    std::vector<std::optional<Expression>> components;
    std::filesystem::path field_file;

    std::optional<Expression> u_star;
    double amplitude = 0.0;
    std::uint64_t seed = 0;
    double kappa = 0.0;
    double tangential = 0.0;

    std::filesystem::path output_dir = "pmc_out";
    std::filesystem::path base_dir = ".";

    /// Raw values by key, used for the echo.
    std::map<std::string, std::string> entries;

    static RunConfig parse(std::istream& in, const std::filesystem::path& base_dir = ".");
    static RunConfig load(const std::filesystem::path& path);

    /// Canonical text: one `key = value` line per entry, sorted by key.
    std::string echo() const;

    TorusGrid grid() const { return TorusGrid(dim, points); }
};

/// Ambient field and, for manufactured sources, the case it came from.
struct BuiltField {
    AmbientField g;
    std::optional<ManufacturedCase> manufactured;
};

/**
 * Builds g for `epsilon` (expressions bind eps; manufactured cases use
 * kappa, with u* scaled by `amplitude_scale`).
 */
BuiltField build_field(const RunConfig& config, double epsilon, double amplitude_scale = 1.0, bool strict = true);

}  // namespace pmc::cli
