#include "doctest.h"
#include "test_support.hpp"

using namespace pmc;
using pmc::test::kTwoPi;

namespace {

/// Sampled field with every component zero except the last, G(s) independent of x.
AmbientField sampled_vertical(const TorusGrid& grid, int count, const std::function<double(double)>& G) {
    const VerticalLattice lat = VerticalLattice::unit_interval(count);
    std::vector<Eigen::MatrixXd> values(grid.dim() + 1, Eigen::MatrixXd::Zero(count, grid.size()));
    for (int j = 0; j < count; ++j) values.back().row(j).setConstant(G(lat.node(j)));
    return AmbientField::sampled(grid, count, std::move(values));
}

AmbientField s_independent(int dim) {
    std::vector<AnalyticComponent> comps;
    for (int k = 0; k <= dim; ++k) {
        comps.push_back({[k](std::span<const double> x, double) { return 0.01 * std::cos(kTwoPi * x[0]) * (k + 1); },
                         [](std::span<const double>, double) { return 0.0; }});
    }
    return AmbientField::analytic(dim, std::move(comps));
}

}  // namespace

TEST_CASE("analytic evaluation") {
    const AmbientField g = test::linear_vertical(2, 2e-3);
    const double x[2] = {0.3, 0.7};
    const Eigen::VectorXd v = g.eval(x, 0.25);
    CHECK(v.size() == 3);
    CHECK(v[0] == 0.0);
    CHECK(v[2] == doctest::Approx(5e-4).epsilon(1e-14));
    CHECK_THROWS_AS(g.eval(x, 1.0), DomainError);
    CHECK_THROWS_AS(g.eval(x, -1.5), DomainError);

    const double c[3] = {0.1, -0.2, 0.3};
    const AmbientField k = AmbientField::constant(2, c);
    for (double s : {-0.9, 0.0, 0.6}) {
        const Eigen::VectorXd e = k.eval(x, s);
        CHECK(e[1] == -0.2);
        CHECK(k.eval_vertical_partial(x, s).norm() == 0.0);
    }
}

TEST_CASE("sampled backend collocates at the nodes") {
    const TorusGrid grid(2, 16);
    std::vector<AnalyticComponent> comps;
    for (int k = 0; k < 3; ++k) {
        comps.push_back({[k](std::span<const double> x, double s) { return std::sin(kTwoPi * x[0] + k) * std::exp(s); },
                         [k](std::span<const double> x, double s) { return std::sin(kTwoPi * x[0] + k) * std::exp(s); }});
    }
    const AmbientField a = AmbientField::analytic(2, std::move(comps));
    const AmbientField t = AmbientField::tabulate(a, grid, 33);
    CHECK(t.is_sampled());
    const auto& lat = t.lattice();
    double worst = 0.0;
    for (Index i = 0; i < grid.size(); i += 7) {
        const auto x = grid.point(i);
        for (int j = 1; j + 1 < lat.count; j += 5) {
            const std::span<const double> xs(x.data(), 2);
            worst = std::max(worst, (t.eval(xs, lat.node(j)) - a.eval(xs, lat.node(j))).cwiseAbs().maxCoeff());
        }
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("vertical partials") {
    const double x[1] = {0.4};
    CHECK(test::linear_vertical(1, 2e-3).eval_vertical_partial(x, 0.3)[1] == doctest::Approx(2e-3));
    CHECK(s_independent(1).eval_vertical_partial(x, 0.3).norm() == 0.0);

    const TorusGrid grid(1, 16);
    const AmbientField t = AmbientField::tabulate(s_independent(1), grid, 33);
    CHECK(t.eval_vertical_partial(x, 0.3).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("spline slope of sin(pi s) matches a not-a-knot reference") {
    const TorusGrid grid(1, 16);
    const double x[1] = {0.0};
    const auto G = [](double s) { return std::sin(std::numbers::pi * s); };

    // Reference values: the not-a-knot cubic interpolant through the same nodes.
    const AmbientField g64 = sampled_vertical(grid, 64, G);
    CHECK(g64.eval_vertical_partial(x, 0.0)[1] == doctest::Approx(3.1415933550579389).epsilon(1e-13));
    CHECK(g64.eval_vertical_partial(x, 0.37)[1] == doctest::Approx(1.2476549037854492).epsilon(1e-13));
    CHECK(g64.eval(x, 0.37)[1] == doctest::Approx(0.91775455790345162).epsilon(1e-13));
    // Against the exact slope pi the cubic is O(h^3) at 64 nodes, O(1e-8) at 257.
    CHECK(std::abs(g64.eval_vertical_partial(x, 0.0)[1] - std::numbers::pi) < 1e-6);

    const AmbientField g257 = sampled_vertical(grid, 257, G);
    CHECK(g257.eval_vertical_partial(x, 0.0)[1] == doctest::Approx(3.1415926472559379).epsilon(1e-13));
    CHECK(std::abs(g257.eval_vertical_partial(x, 0.0)[1] - std::numbers::pi) < 1e-8);
}

TEST_CASE("vertical translation on both backends") {
    const auto G = [](double s) { return s * s * s - 0.5 * s + 0.1; };
    const TorusGrid grid(2, 16);
    const AmbientField sampled = sampled_vertical(grid, 64, G);
    const double x[2] = {0.21, 0.83};
    const double c = 0.17;
    for (double s : {-0.8, -0.3, 0.0, 0.45, 0.7}) {
        CHECK(std::abs(sampled.eval(x, s + c)[2] - G(s + c)) < 1e-12);
    }

    const AmbientField a = test::linear_vertical(2, 2e-3);
    const AmbientField up = translate_vertically(a, 0.1);
    CHECK(up.eval(x, 0.3)[2] == doctest::Approx(a.eval(x, 0.2)[2]));
}

TEST_CASE("q exponent") {
    CHECK(exponent_q(2, 2.0) == doctest::Approx(4.0));
    CHECK(exponent_q(1, 1.5) == doctest::Approx(3.0));
    CHECK(exponent_q(3, 2.5) == doctest::Approx(5.0));
    CHECK_THROWS_AS(exponent_q(2, 1.5), DomainError);
    CHECK_THROWS_AS(exponent_q(2, 3.0), DomainError);
}

TEST_CASE("hypothesis checker") {
    HypothesisOptions opt;
    opt.grid = TorusGrid(2, 16);

    SUBCASE("linear monotone field passes") {
        const double eps = 1e-4;
        const HypothesisReport r = check_hypotheses(test::linear_vertical(2, 2 * eps), eps, 2.0, opt);
        CHECK(r.monotonicity_margin == doctest::Approx(eps).epsilon(1e-12));
        CHECK(r.zero_mean_residual == 0.0);
        CHECK(r.smallness_pass);
        CHECK(r.passed());
        // trapezoid rule on 129 nodes: 2e-4 (sqrt(0.666748046875) + sqrt(2))
        CHECK(r.sobolev_norm_w1p == doctest::Approx(0.000446151995355293).epsilon(1e-12));
        CHECK(r.smallness_threshold() == doctest::Approx(std::pow(eps, 2.0 / 3.0)));
    }
    SUBCASE("s-independent field fails monotonicity") {
        const double eps = 1e-3;
        const HypothesisReport r = check_hypotheses(s_independent(2), eps, 2.0, opt);
        CHECK(r.monotonicity_margin == doctest::Approx(-eps));
        CHECK_FALSE(r.passed());
    }
    SUBCASE("nonzero mean at s = 0") {
        std::vector<AnalyticComponent> comps(2, {[](std::span<const double>, double) { return 0.0; },
                                                 [](std::span<const double>, double) { return 0.0; }});
        comps.push_back({[](std::span<const double> x, double s) { return std::sin(kTwoPi * x[0]) + 0.05 + 2e-3 * s; },
                         [](std::span<const double>, double) { return 2e-3; }});
        const HypothesisReport r = check_hypotheses(AmbientField::analytic(2, std::move(comps)), 1e-3, 2.0, opt);
        CHECK(r.zero_mean_residual == doctest::Approx(0.05).epsilon(1e-12));
        CHECK_FALSE(r.passed());
    }
    SUBCASE("bad arguments") {
        CHECK_THROWS_AS(check_hypotheses(test::linear_vertical(2, 1e-3), 1e-3, 3.5, opt), DomainError);
        CHECK_THROWS_AS(check_hypotheses(test::linear_vertical(2, 1e-3), 0.0, 2.0, opt), DomainError);
    }
}

TEST_CASE("sampled and analytic hypothesis reports agree") {
    const double eps = 1e-3;
    const TorusGrid grid(1, 32);
    HypothesisOptions opt;
    opt.grid = grid;
    const AmbientField a = test::linear_vertical(1, 2 * eps);
    const HypothesisReport ra = check_hypotheses(a, eps, 1.5, opt);
    const HypothesisReport rs = check_hypotheses(AmbientField::tabulate(a, grid, 129), eps, 1.5);
    CHECK(rs.sobolev_norm_w1p == doctest::Approx(ra.sobolev_norm_w1p).epsilon(1e-12));
    CHECK(rs.monotonicity_margin == doctest::Approx(ra.monotonicity_margin).epsilon(1e-10));
}
