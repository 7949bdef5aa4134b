#include "pmc/cli/commands.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "pmc/field_io.hpp"
#include "pmc/mollifier.hpp"
#include "pmc/verification.hpp"

namespace pmc::cli {

namespace fs = std::filesystem;

namespace {

std::string timestamp_line(const std::string& command) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream s;
    s << "# pmc " << command << " " << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << '\n';
    return s.str();
}

std::string fmt(double x) {
    std::ostringstream s;
    s << std::setprecision(12) << x;
    return s.str();
}

fs::path prepare_dir(const RunConfig& config, const std::optional<std::string>& override_dir) {
    fs::path dir = override_dir ? fs::path(*override_dir) : config.output_dir;
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw ConfigurationError("cannot write " + path.string());
    f << text;
}

void write_hypotheses(std::ostream& out, const HypothesisReport& r) {
    out << "dim: " << r.dim << '\n';
    out << "epsilon: " << fmt(r.epsilon) << '\n';
    out << "p: " << fmt(r.p) << '\n';
    out << "q: " << fmt(r.q()) << '\n';
    out << "sobolev_norm_w1p: " << fmt(r.sobolev_norm_w1p) << '\n';
    out << "smallness_threshold: " << fmt(r.smallness_threshold()) << '\n';
    out << "smallness_pass: " << (r.smallness_pass ? "true" : "false") << '\n';
    out << "monotonicity_margin: " << fmt(r.monotonicity_margin) << '\n';
    out << "monotonicity_pass: " << (r.monotonicity_margin > 0.0 ? "true" : "false") << '\n';
    out << "zero_mean_residual: " << fmt(r.zero_mean_residual) << '\n';
    out << "zero_mean_pass: " << (r.zero_mean_residual < r.zero_mean_tolerance ? "true" : "false") << '\n';
    out << "hypotheses: " << (r.passed() ? "passed" : "failed") << '\n';
}

HypothesisReport hypotheses_for(const RunConfig& config, const AmbientField& g, double epsilon) {
    HypothesisOptions ho;
    ho.grid = config.grid();
    ho.vertical_points = config.solver.vertical_points;
    return check_hypotheses(g, epsilon, config.solver.p_for(config.dim), ho);
}

void write_slices(const fs::path& path, const ScalarField& u) {
    std::ofstream f(path);
    if (!f) throw ConfigurationError("cannot write " + path.string());
    const auto& grid = u.grid();
    f << "axis,index,x,u\n" << std::setprecision(17);
    for (int a = 0; a < grid.dim(); ++a) {
        for (int i = 0; i < grid.points_per_axis(); ++i) {
            const Index flat = i * grid.stride(a);
            f << a + 1 << ',' << i << ',' << grid.coordinate(flat, a) << ',' << u[flat] << '\n';
        }
    }
}

}  // namespace

int worker_count() {
    if (const char* env = std::getenv("PMC_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

std::string report_body(const std::string& report) {
    const auto nl = report.find('\n');
    return nl == std::string::npos ? std::string() : report.substr(nl + 1);
}

int cmd_check(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        const BuiltField f = build_field(config, config.solver.epsilon, 1.0, false);
        const HypothesisReport r = hypotheses_for(config, f.g, config.solver.epsilon);
        std::ostringstream body;
        write_hypotheses(body, r);
        const std::string text = timestamp_line("check") + body.str();
        out << body.str();
        write_text(prepare_dir(config, std::nullopt) / "check_report.txt", text);
        return r.passed() ? 0 : 1;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

int cmd_solve(const RunConfig& config, const SolveOptions& options, std::ostream& out, std::ostream& err) {
    try {
        const fs::path dir = prepare_dir(config, options.out_dir);
        const BuiltField f = build_field(config, config.solver.epsilon, 1.0, false);
        const HypothesisReport hyp = hypotheses_for(config, f.g, config.solver.epsilon);

        std::ostringstream body;
        body << "command: solve\n";
        body << "forced: " << (options.force ? "true" : "false") << '\n';
        if (!hyp.passed() && !options.force) {
            write_hypotheses(body, hyp);
            body << "converged: false\nfailure: hypotheses fail; rerun with --force to attempt the solve\n";
            write_text(dir / "report.txt", timestamp_line("solve") + body.str());
            out << body.str();
            return 1;
        }

        SolverConfig sc = config.solver;
        sc.require_hypotheses = false;
        int code = 0;
        std::optional<SolveReport> report;
        try {
            report = solve(f.g, config.grid(), sc);
        } catch (const SolveFailure& e) {
            report = e.partial();
            code = 1;
        }
        write_report(body, *report);
        if (report->u && f.manufactured) {
            body << "manufactured_shift: " << fmt(f.manufactured->shift) << '\n';
            body << "manufactured_l2_error: " << fmt(lp_norm(*report->u - f.manufactured->u_star, 2.0)) << '\n';
        }
        if (!report->converged || !report->epsilon_bound_satisfied) code = 1;
        write_text(dir / "report.txt", timestamp_line("solve") + body.str());
        if (report->u) {
            write_field(dir / "u.field", *report->u);
            write_slices(dir / "slices.csv", *report->u);
        }
        out << body.str();
        return code;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

int cmd_verify(const RunConfig& config, const SolveOptions& options, std::ostream& out, std::ostream& err) {
    try {
        if (config.source != "manufactured") {
            err << "error: verify needs field.source = manufactured\n";
            return 2;
        }
        const fs::path dir = prepare_dir(config, options.out_dir);
        const BuiltField f = build_field(config, config.solver.epsilon, 1.0, !options.force);
        const ManufacturedCase& mc = *f.manufactured;
        const TorusGrid grid = config.grid();

        std::ostringstream body;
        bool ok = true;
        auto line = [&](const std::string& name, double value, bool pass) {
            body << name << ": " << fmt(value) << ' ' << (pass ? "pass" : "fail") << '\n';
            ok = ok && pass;
        };
        const double identity = pmc_residual(mc.u_star, mc.g);
        line("construction_residual", identity, identity <= 1e-10);

        SolverConfig sc = config.solver;
        sc.require_hypotheses = !options.force;
        SolveReport report = solve(mc.g, grid, sc);
        const double err_l2 = lp_norm(*report.u - mc.u_star, 2.0);
        line("recovery_l2_error", err_l2, err_l2 <= 1e-5);
        line("residual_nonlinear", report.residual_nonlinear, report.residual_nonlinear <= report.residual_tolerance);
        line("w2q_norm_of_centered_u", report.w2q_norm_of_centered_u, report.epsilon_bound_satisfied);
        line("apriori_ratio", report.apriori_ratio, std::isfinite(report.apriori_ratio));

        const VerticalLattice lat = mc.g.lattice();
        for (double lambda : sc.lambda_schedule) {
            if (!mollifier_resolvable(lambda, grid, lat.spacing)) continue;
            const ScalarField centered = *report.u - report.final_c;
            const TraceBound tb = trace_bound_check(mc.g, centered, lambda, sc.p_for(grid.dim()), sc.vertical_points);
            line("trace_ratio_lambda_" + fmt(lambda), tb.ratio, std::isfinite(tb.ratio));
            break;
        }
        if (grid.dim() == 1) {
            const OdeComparison cmp = ode_cross_check_1d(mc.g, *report.u);
            if (cmp.oracle_available) {
                line("ode_oracle_linf_difference", cmp.linf_difference, cmp.linf_difference <= 1e-6);
            } else {
                body << "ode_oracle: unavailable (" << cmp.message << ")\n";
            }
        }
        body << "verify: " << (ok ? "pass" : "fail") << '\n';
        write_text(dir / "verify_report.txt", timestamp_line("verify") + body.str());
        out << body.str();
        return ok ? 0 : 1;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

namespace {

struct SweepRow {
    double epsilon = 0.0;
    double w2q = std::nan("");
    double residual = std::nan("");
    int iterations = 0;
    bool bound_ok = false;
    bool failed = true;
    std::string message;
};

SweepRow sweep_row(const RunConfig& config, double epsilon) {
    SweepRow row;
    row.epsilon = epsilon;
    try {
        std::optional<BuiltField> f;
        if (config.source == "manufactured") {
            double scale = 1.0;
            for (int halvings = 0; halvings <= 60 && !f; ++halvings, scale *= 0.5) {
                try {
                    f = build_field(config, epsilon, scale, true);
                } catch (const ConstructionError&) {
                } catch (const DomainError&) {
                    // u* too steep for the construction; halving fixes that too
                }
            }
            if (!f) throw ConstructionError("no amplitude passes the hypotheses");
        } else {
            f = build_field(config, epsilon);
        }
        SolverConfig sc = config.solver;
        sc.epsilon = epsilon;
        const SolveReport r = solve(f->g, config.grid(), sc);
        row.w2q = r.w2q_norm_of_centered_u;
        row.residual = r.residual_nonlinear;
        row.iterations = r.total_iterations();
        row.bound_ok = r.epsilon_bound_satisfied;
        row.failed = !r.converged || !r.epsilon_bound_satisfied;
        if (row.failed) row.message = r.failure.empty() ? "epsilon bound violated" : r.failure;
    } catch (const Error& e) {
        row.message = e.what();
    }
    return row;
}

}  // namespace

int cmd_sweep(const RunConfig& config, const std::vector<double>& epsilons, const std::optional<std::string>& out_dir,
              std::ostream& out, std::ostream& err) {
    if (epsilons.empty()) {
        err << "error: sweep needs a non-empty --eps list\n";
        return 2;
    }
    for (double e : epsilons) {
        if (!(e > 0.0 && e < 1.0)) {
            err << "error: epsilon " << e << " outside (0, 1)\n";
            return 2;
        }
    }
    std::vector<SweepRow> rows(epsilons.size());
    std::atomic<std::size_t> next{0};
    const int workers = std::max(1, std::min<int>(worker_count(), static_cast<int>(epsilons.size())));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < epsilons.size(); i = next++) rows[i] = sweep_row(config, epsilons[i]);
        });
    }
    for (auto& t : pool) t.join();

    std::ostringstream csv;
    csv << kSweepHeader << '\n' << std::setprecision(10);
    bool any_failed = false;
    for (const auto& r : rows) {
        csv << r.epsilon << ',' << r.w2q << ',' << std::sqrt(r.epsilon) << ',' << (r.bound_ok ? "true" : "false") << ','
            << r.residual << ',' << r.iterations << '\n';
        if (r.failed) {
            any_failed = true;
            err << "row epsilon=" << r.epsilon << " failed: " << r.message << '\n';
        }
    }
    try {
        write_text(prepare_dir(config, out_dir) / "sweep.csv", csv.str());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    out << csv.str();
    return any_failed ? 1 : 0;
}

}  // namespace pmc::cli
