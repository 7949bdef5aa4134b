#include "doctest.h"
#include "test_support.hpp"

using namespace pmc;
using pmc::test::kTwoPi;

TEST_CASE("grid rejects bad sizes") {
    CHECK_THROWS_AS(TorusGrid(2, 48), ConfigurationError);
    CHECK_THROWS_AS(TorusGrid(2, 8), ConfigurationError);
    CHECK_THROWS_AS(TorusGrid(4, 16), ConfigurationError);
    CHECK_NOTHROW(TorusGrid(3, 16));
}

TEST_CASE("row-major layout, last axis fastest") {
    const TorusGrid g(3, 16);
    CHECK(g.size() == 16 * 16 * 16);
    CHECK(g.stride(2) == 1);
    CHECK(g.stride(0) == 256);
    const int m[3] = {-1, 17, 3};
    const Index i = g.wrap(m);
    CHECK(g.axis_index(i, 0) == 15);
    CHECK(g.axis_index(i, 1) == 1);
    CHECK(g.axis_index(i, 2) == 3);
}

TEST_CASE("fields reject non-finite values and wrong lengths") {
    const TorusGrid g(1, 16);
    Eigen::ArrayXd v = Eigen::ArrayXd::Zero(16);
    v[3] = std::nan("");
    CHECK_THROWS_AS(ScalarField(g, v), DomainError);
    CHECK_THROWS_AS(ScalarField(g, Eigen::ArrayXd::Zero(15)), DimensionError);
    CHECK_THROWS_AS(ScalarField(g) + ScalarField(TorusGrid(1, 32)), DimensionError);
}

TEST_CASE("gradient of a resolved mode") {
    const TorusGrid g(1, 64);
    const ScalarField u = test::sin_mode(g);
    const GradientField d = gradient(u);
    const ScalarField expect =
        ScalarField::sample(g, [](std::span<const double> x) { return kTwoPi * std::cos(kTwoPi * x[0]); });
    CHECK((d.component(0) - expect.values()).abs().maxCoeff() < 1e-12);

    const GradientField z = gradient(ScalarField::constant(TorusGrid(2, 32), 7.0));
    CHECK(z.component(0).abs().maxCoeff() == doctest::Approx(0.0));
    CHECK(z.component(1).abs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("gradient components have zero mean") {
    const TorusGrid g(2, 32);
    const ScalarField u = random_smooth_field(g, 0.7, 5);
    const GradientField d = gradient(u);
    for (int k = 0; k < 2; ++k) CHECK(std::abs(d.component(k).mean()) < 1e-12);
}

TEST_CASE("divergence of a gradient is the laplacian") {
    const TorusGrid g(2, 64);
    const ScalarField u = test::sin_mode(g);
    const ScalarField lap = divergence(gradient(u));
    CHECK(test::max_abs_diff(lap, (-kTwoPi * kTwoPi) * u) < 1e-10);
    CHECK(max_norm(divergence(gradient(ScalarField(g)))) == 0.0);
    CHECK_THROWS_AS(divergence(VectorField(TorusGrid(2, 32), {Eigen::ArrayXd::Zero(1024)})), DimensionError);
}

TEST_CASE("mean and Lp norms") {
    const TorusGrid g(2, 64);
    CHECK(mean(ScalarField::constant(g, 3.5)) == doctest::Approx(3.5));
    CHECK(std::abs(mean(test::sin_mode(g))) < 1e-15);
    for (double p : {1.0, 2.0, 3.0}) CHECK(lp_norm(ScalarField::constant(g, 1.0), p) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(lp_norm(test::sin_mode(g), 2.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(lp_norm(test::sin_mode(g), INFINITY) == doctest::Approx(1.0));
    CHECK_THROWS_AS(lp_norm(test::sin_mode(g), 0.5), DomainError);
}

TEST_CASE("additive Sobolev norm of a single mode") {
    const TorusGrid g(2, 32);
    CHECK(sobolev_norm(ScalarField(g), 2, 2.0) == 0.0);
    CHECK(sobolev_norm(ScalarField::constant(g, -2.5), 2, 3.0) == doctest::Approx(2.5));
    // a/sqrt(2) (1 + 2 pi + 4 pi^2), a = 0.3, evaluated in 30-digit arithmetic
    const double oracle = 9.9196339553701272;
    CHECK(sobolev_norm(test::sin_mode(g, 0, 1, 0.3), 2, 2.0) == doctest::Approx(oracle).epsilon(1e-13));
    CHECK_THROWS_AS(sobolev_norm(ScalarField(g), 3, 2.0), DomainError);
}

TEST_CASE("C1 norm is max|u| + max|grad u|") {
    const TorusGrid g(1, 64);
    CHECK(c1_norm(test::sin_mode(g, 0, 1, 0.1)) == doctest::Approx(0.1 + 0.1 * kTwoPi).epsilon(1e-12));
}

TEST_CASE("trigonometric interpolation") {
    const TorusGrid g(2, 64);
    const ScalarField u = random_smooth_field(g, 1.0, 9);
    const auto x5 = g.point(517);
    CHECK(interpolate(u, std::span<const double>(x5.data(), 2)) == doctest::Approx(u[517]).epsilon(1e-13));
    const ScalarField s = test::sin_mode(TorusGrid(1, 64));
    const double third[1] = {1.0 / 3.0};
    CHECK(std::abs(interpolate(s, third) - std::sin(kTwoPi / 3.0)) < 1e-12);
    const double wrapped[2] = {1.25, -0.5};
    CHECK(interpolate(ScalarField::constant(g, 4.0), wrapped) == doctest::Approx(4.0));
}

TEST_CASE("resampling a band-limited field is exact") {
    const ScalarField u = random_smooth_field(TorusGrid(2, 32), 1.0, 4);
    const ScalarField fine = resample(u, TorusGrid(2, 64));
    const ScalarField back = resample(fine, TorusGrid(2, 32));
    CHECK(test::max_abs_diff(u, back) < 1e-13);
}

TEST_CASE("inverse laplacian inverts on the range") {
    const TorusGrid g(3, 16);
    const ScalarField f = project_to_range(random_smooth_field(g, 1.0, 2));
    const ScalarField u = inverse_laplacian(f);
    CHECK(std::abs(mean(u)) < 1e-14);
    CHECK(test::max_abs_diff(laplacian(u), f) < 1e-11);
}
