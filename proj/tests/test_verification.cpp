#include "doctest.h"
#include "test_support.hpp"

#include <sstream>

#include "pmc/verification.hpp"

using namespace pmc;
using pmc::test::kTwoPi;

namespace {

ManufacturedCase sine_case_1d(int points, double amplitude, double eps) {
    const TorusGrid grid(1, points);
    ManufacturedOptions mo;
    mo.strict = false;
    return build_manufactured(test::sin_mode(grid, 0, 1, amplitude), 2 * eps, eps, mo);
}

}  // namespace

TEST_CASE("mean curvature of a one-dimensional graph") {
    const TorusGrid grid(1, 64);
    const double a = 0.05;
    const ScalarField u = test::sin_mode(grid, 0, 1, a);
    const ScalarField expect = ScalarField::sample(grid, [&](std::span<const double> x) {
        const double d1 = a * kTwoPi * std::cos(kTwoPi * x[0]);
        const double d2 = -a * kTwoPi * kTwoPi * std::sin(kTwoPi * x[0]);
        return -d2 / std::pow(1.0 + d1 * d1, 1.5);
    });
    CHECK(test::max_abs_diff(mean_curvature(u), expect) < 1e-10);
    CHECK(max_norm(mean_curvature(ScalarField::constant(TorusGrid(2, 16), 0.3))) == 0.0);
}

TEST_CASE("residual of the curvature equation") {
    const double eps = 1e-3;
    const TorusGrid grid(2, 32);
    CHECK(pmc_residual(ScalarField(grid), test::linear_vertical(2, 2 * eps)) < 1e-18);
    CHECK(pmc_residual(ScalarField(grid), test::linear_vertical(2, 2 * eps, 0.1)) ==
          doctest::Approx(0.2 * eps).epsilon(1e-12));
    CHECK_THROWS_AS(pmc_residual(ScalarField::constant(grid, 1.2), test::linear_vertical(2, 2 * eps)), DomainError);
}

TEST_CASE("manufactured construction") {
    const double eps = 1e-3;
    SUBCASE("flat target gives the linear field") {
        const TorusGrid grid(2, 32);
        const ManufacturedCase mc = build_manufactured(ScalarField(grid), 2 * eps, eps);
        CHECK(mc.shift == 0.0);
        CHECK(mc.hypotheses.passed());
        const double x[2] = {0.4, 0.1};
        for (double s : {-0.5, 0.0, 0.3}) {
            const Eigen::VectorXd v = mc.g.eval(x, s);
            CHECK(v[0] == 0.0);
            CHECK(v[1] == 0.0);
            CHECK(v[2] == doctest::Approx(2 * eps * s).epsilon(1e-13));
        }
    }
    SUBCASE("target solves its own equation") {
        const TorusGrid grid(2, 64);
        ManufacturedOptions mo;
        mo.strict = false;
        const ScalarField u = ScalarField::sample(
            grid, [](std::span<const double> x) { return 0.02 * std::sin(kTwoPi * x[0]) * std::sin(kTwoPi * x[1]); });
        const ManufacturedCase mc = build_manufactured(u, 2 * eps, eps, mo);
        CHECK(pmc_residual(mc.u_star, mc.g) <= 1e-8);
        CHECK(test::max_abs_diff(mc.u_star, u + mc.shift) == 0.0);
        CHECK(mc.hypotheses.zero_mean_residual < 1e-12);
        CHECK_FALSE(mc.hypotheses.smallness_pass);  // 0.02 is far too large for the smallness hypothesis
        mo.strict = true;
        CHECK_THROWS_AS(build_manufactured(u, 2 * eps, eps, mo), ConstructionError);
    }
    SUBCASE("tangential part") {
        const TorusGrid grid(1, 64);
        ManufacturedOptions mo;
        mo.tangential_slope = {test::sin_mode(grid, 0, 1, 0.5 * eps).values()};
        const ManufacturedCase mc = build_manufactured(test::sin_mode(grid, 0, 1, 2e-6), 2 * eps, eps, mo);
        CHECK(pmc_residual(mc.u_star, mc.g) <= 1e-12);
        const double x[1] = {0.25};
        CHECK(mc.g.eval(x, 0.5)[0] == doctest::Approx(0.25 * eps).epsilon(1e-12));
    }
    SUBCASE("argument checks") {
        const TorusGrid grid(1, 64);
        CHECK_THROWS_AS(build_manufactured(test::sin_mode(grid, 0, 1, 0.1), 2 * eps, eps), DomainError);
        CHECK_THROWS_AS(build_manufactured(ScalarField(grid), eps, eps), DomainError);
        ManufacturedOptions mo;
        mo.tangential_slope = {Eigen::ArrayXd::Zero(3)};
        CHECK_THROWS_AS(build_manufactured(ScalarField(grid), 2 * eps, eps, mo), DimensionError);
    }
}

TEST_CASE("trace bound") {
    const TorusGrid grid(2, 32);
    const ScalarField v = test::smooth_with_c1(grid, 0.3, 5);
    std::vector<AnalyticComponent> zero(3, {[](std::span<const double>, double) { return 0.0; },
                                            [](std::span<const double>, double) { return 0.0; }});
    CHECK(trace_bound_check(AmbientField::analytic(2, zero), v, 1.0 / 16, 2.0).lhs == 0.0);

    const double c[3] = {0.3, 0.0, -0.4};
    const TraceBound tb = trace_bound_check(AmbientField::constant(2, c), v, 1.0 / 16, 2.0);
    CHECK(tb.lhs == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(tb.ratio == doctest::Approx(tb.lhs / tb.norm_g));

    CHECK_THROWS_AS(trace_bound_check(AmbientField::constant(2, c), test::smooth_with_c1(grid, 0.5, 5), 1.0 / 16, 2.0),
                    DomainError);
    CHECK_THROWS_AS(trace_bound_check(AmbientField::constant(2, c), v, 0.2, 2.0), DomainError);
}

TEST_CASE("trace ratio over the corpus is stable") {
    // Largest ratio at lambda = 1/16 over the corpus cases with N >= 32, recorded on first calibration.
    const double recorded = 0.065725189921331945;
    double worst = 0.0;
    for (const CorpusEntry& e : read_corpus(std::filesystem::path(PMC_TEST_DATA) / "corpus.txt")) {
        if (e.points < 32) continue;
        const ManufacturedCase mc = corpus_case(e);
        const SolverConfig cfg;
        const TraceBound tb = trace_bound_check(mc.g, mc.u_star - mean(mc.u_star), 1.0 / 16, cfg.p_for(e.dim));
        REQUIRE(std::isfinite(tb.ratio));
        worst = std::max(worst, tb.ratio);
    }
    CHECK(worst == doctest::Approx(recorded).epsilon(1e-6));
}

TEST_CASE("one-dimensional oracle") {
    const double eps = 1e-3;
    SUBCASE("trivial field") {
        const TorusGrid grid(1, 64);
        const OdeComparison cmp = ode_cross_check_1d(test::linear_vertical(1, 2 * eps), grid, SolverConfig{});
        REQUIRE(cmp.oracle_available);
        CHECK(cmp.linf_difference < 1e-14);
    }
    SUBCASE("manufactured case at N = 128") {
        const ManufacturedCase mc = sine_case_1d(128, 0.02, eps);
        const OracleSolution o = ode_oracle_1d(mc.g, mc.u_star.grid());
        REQUIRE(o.available);
        CHECK(test::max_abs_diff(*o.u, mc.u_star) < 1e-6);
    }
    SUBCASE("difference shrinks under refinement") {
        double last = INFINITY;
        for (int n : {32, 64, 128}) {
            const ManufacturedCase mc = sine_case_1d(n, 0.02, eps);
            const OdeComparison cmp = ode_cross_check_1d(mc.g, mc.u_star);
            REQUIRE(cmp.oracle_available);
            CHECK(cmp.linf_difference < last);
            last = cmp.linf_difference;
        }
    }
    SUBCASE("rejects higher dimensions") {
        CHECK_THROWS_AS(ode_oracle_1d(test::linear_vertical(2, 2 * eps), TorusGrid(2, 16)), DimensionError);
    }
}

TEST_CASE("corpus manifest") {
    std::istringstream good("# comment\nc1 1 64 1e-3 2e-3 1e-6 4\n\nc2 2 32 1e-4 2e-4 5e-7 9 0.5  # tail\n");
    const auto entries = read_corpus(good);
    REQUIRE(entries.size() == 2);
    CHECK(entries[1].name == "c2");
    CHECK(entries[1].dim == 2);
    CHECK(entries[1].tangential == 0.5);
    CHECK(entries[0].tangential == 0.0);

    std::istringstream short_line("c1 1 64 1e-3\n");
    CHECK_THROWS_AS(read_corpus(short_line), ParseError);
    std::istringstream trailing("c1 1 64 1e-3 2e-3 1e-6 4 0.5 x\n");
    CHECK_THROWS_AS(read_corpus(trailing), ParseError);
    CHECK_THROWS_AS(read_corpus(std::filesystem::path("/nonexistent/corpus.txt")), ConfigurationError);
}

TEST_CASE("every corpus case passes the strict construction") {
    const auto entries = read_corpus(std::filesystem::path(PMC_TEST_DATA) / "corpus.txt");
    CHECK(entries.size() == 20);
    for (const CorpusEntry& e : entries) {
        CAPTURE(e.name);
        ManufacturedCase mc = corpus_case(e);
        CHECK(mc.hypotheses.passed());
        CHECK(pmc_residual(mc.u_star, mc.g) < 1e-12);
    }
}

TEST_CASE("seeded generators are deterministic") {
    SeededUniform a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) {
        const double x = a();
        CHECK(x == b());
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
    CHECK(a() != c());
    const TorusGrid grid(2, 32);
    const ScalarField u = random_smooth_field(grid, 0.3, 7);
    CHECK(max_norm(u) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(test::max_abs_diff(u, random_smooth_field(grid, 0.3, 7)) == 0.0);
}
