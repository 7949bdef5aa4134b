#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pmc/cli/commands.hpp"
#include "pmc/field_io.hpp"

using namespace pmc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "pmc_commands_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

cli::RunConfig load(const std::string& name, const fs::path& out) {
    cli::RunConfig c = cli::RunConfig::load(fs::path(PMC_TEST_DATA) / name);
    c.output_dir = out;
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

double report_value(const std::string& text, const std::string& key) {
    const auto at = text.find("\n" + key + ": ");
    REQUIRE(at != std::string::npos);
    return std::stod(text.substr(at + key.size() + 3));
}

int run_binary(const std::string& args) {
    const std::string cmd = std::string(PMC_BINARY) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("check") {
    std::ostringstream out, err;
    const fs::path dir = scratch("check");
    CHECK(cli::cmd_check(load("trivial.cfg", dir), out, err) == 0);
    const std::string report = slurp(dir / "check_report.txt");
    CHECK(report.rfind("# pmc check ", 0) == 0);
    CHECK(cli::report_body(report) == out.str());
    CHECK(out.str().find("hypotheses: passed") != std::string::npos);

    std::ostringstream out2;
    CHECK(cli::cmd_check(load("flat_g.cfg", dir), out2, err) == 1);
    CHECK(out2.str().find("monotonicity_pass: false") != std::string::npos);
    CHECK(out2.str().find("monotonicity_margin: -") != std::string::npos);
}

TEST_CASE("solve") {
    std::ostringstream out, err;
    SUBCASE("trivial field writes a zero graph") {
        const fs::path dir = scratch("solve_trivial");
        CHECK(cli::cmd_solve(load("trivial.cfg", dir), {}, out, err) == 0);
        const ScalarField u = read_field(dir / "u.field");
        CHECK(max_norm(u) < 1e-14);
        CHECK(fs::exists(dir / "slices.csv"));
        CHECK(slurp(dir / "slices.csv").rfind("axis,index,x,u\n", 0) == 0);
    }
    SUBCASE("failing hypotheses stop the solve unless forced") {
        const fs::path dir = scratch("solve_forced");
        cli::SolveOptions opt;
        CHECK(cli::cmd_solve(load("manufactured_2d.cfg", dir), opt, out, err) == 1);
        CHECK_FALSE(fs::exists(dir / "u.field"));

        opt.force = true;
        std::ostringstream forced;
        // the 0.02 target converges, but its W^{2,q} norm is above sqrt(eps): exit 1
        CHECK(cli::cmd_solve(load("manufactured_2d.cfg", dir), opt, forced, err) == 1);
        const std::string report = slurp(dir / "report.txt");
        CHECK(report.find("hypotheses: failed") != std::string::npos);
        CHECK(report.find("forced: true") != std::string::npos);
        CHECK(report.find("converged: true") != std::string::npos);
        CHECK(report_value(report, "residual_nonlinear") <= 1e-6);
        CHECK(report_value(report, "manufactured_l2_error") <= 1e-5);
    }
    SUBCASE("out directory override") {
        const fs::path dir = scratch("solve_out");
        cli::SolveOptions opt;
        opt.out_dir = (dir / "nested").string();
        CHECK(cli::cmd_solve(load("trivial.cfg", dir / "unused"), opt, out, err) == 0);
        CHECK(fs::exists(dir / "nested" / "report.txt"));
    }
}

TEST_CASE("verify") {
    std::ostringstream out, err;
    const fs::path dir = scratch("verify");
    CHECK(cli::cmd_verify(load("manufactured_1d.cfg", dir), {}, out, err) == 0);
    CHECK(out.str().find("ode_oracle_linf_difference") != std::string::npos);
    CHECK(out.str().find("verify: pass") != std::string::npos);
    CHECK(cli::cmd_verify(load("trivial.cfg", dir), {}, out, err) == 2);
}

TEST_CASE("sweep") {
    std::ostringstream out, err;
    const fs::path dir = scratch("sweep");
    const cli::RunConfig c = load("sweep_2d.cfg", dir);
    CHECK(cli::cmd_sweep(c, {}, std::nullopt, out, err) == 2);
    CHECK(cli::cmd_sweep(c, {1e-3, 2.0}, std::nullopt, out, err) == 2);

    CHECK(cli::cmd_sweep(c, {1e-3, 1e-4}, std::nullopt, out, err) == 0);
    const std::string csv = slurp(dir / "sweep.csv");
    CHECK(csv.rfind(std::string(cli::kSweepHeader) + "\n", 0) == 0);
    CHECK(csv.find("0.001,") != std::string::npos);
    CHECK(csv.find(",true,") != std::string::npos);
    CHECK(csv.find(",false,") == std::string::npos);
}

TEST_CASE("worker count honours PMC_THREADS") {
    setenv("PMC_THREADS", "3", 1);
    CHECK(cli::worker_count() == 3);
    setenv("PMC_THREADS", "zero", 1);
    CHECK(cli::worker_count() >= 1);
    unsetenv("PMC_THREADS");
    CHECK(cli::worker_count() >= 1);
}

TEST_CASE("report body drops the header line") {
    CHECK(cli::report_body("# pmc solve 2020\na: 1\n") == "a: 1\n");
    CHECK(cli::report_body("no newline") == "");
}

TEST_CASE("exit codes of the binary") {
    const fs::path dir = scratch("binary");
    const std::string data = PMC_TEST_DATA;
    std::ofstream(dir / "bad_expr.cfg") << "grid.dim = 1\nfield.g2 = 2*eps*(s\n";
    std::ofstream(dir / "bad_key.cfg") << "grid.dim = 1\nsolver.epsilonn = 1e-3\n";
    std::ofstream(dir / "ok.cfg") << "grid.dim = 1\ngrid.N = 32\nsolver.epsilon = 1e-4\nfield.g2 = 2*eps*s\n"
                                  << "output.dir = " << (dir / "out").string() << "\n";

    CHECK(run_binary("check " + (dir / "ok.cfg").string()) == 0);
    CHECK(run_binary("check " + (dir / "bad_expr.cfg").string()) == 2);
    CHECK(run_binary("solve " + (dir / "bad_key.cfg").string()) == 2);
    CHECK(run_binary("check " + (dir / "missing.cfg").string()) == 2);
    CHECK(run_binary("sweep " + (dir / "ok.cfg").string() + " --eps ''") == 2);
    CHECK(run_binary("sweep " + (dir / "ok.cfg").string() + " --eps 1e-3,abc") == 2);
    CHECK(run_binary("frobnicate") == 2);
    CHECK(run_binary("solve " + (dir / "ok.cfg").string() + " --out " + (dir / "o2").string()) == 0);
    CHECK(fs::exists(dir / "o2" / "u.field"));
}
