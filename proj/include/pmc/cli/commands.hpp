#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pmc/cli/config.hpp"

namespace pmc::cli {

// Exit codes: 0 success, 1 failed check / solve, 2 usage or parse error.

/// Prints and writes the hypothesis report; 0 iff all three hypotheses pass.
int cmd_check(const RunConfig& config, std::ostream& out, std::ostream& err);

struct SolveOptions {
    bool force = false;
    std::optional<std::string> out_dir;
};

/// Writes report.txt, u.field and slices.csv; 0 on a converged solve within the epsilon bound.
int cmd_solve(const RunConfig& config, const SolveOptions& options, std::ostream& out, std::ostream& err);

/// Manufactured identity, recovery error, residual, trace ratio and (n = 1) the ODE oracle.
int cmd_verify(const RunConfig& config, const SolveOptions& options, std::ostream& out, std::ostream& err);

/// CSV over epsilon values; rows run on a worker pool capped by PMC_THREADS.
int cmd_sweep(const RunConfig& config, const std::vector<double>& epsilons, const std::optional<std::string>& out_dir,
              std::ostream& out, std::ostream& err);

inline constexpr const char* kSweepHeader = "epsilon,w2q_norm,sqrt_epsilon,bound_ok,residual,iterations";

/// Worker count: PMC_THREADS if set and positive, else the hardware concurrency.
int worker_count();

/// Report text without its first (timestamp) line.
std::string report_body(const std::string& report);

}  // namespace pmc::cli
