#pragma once

#include <array>
#include <vector>

#include "pmc/ambient_field.hpp"

namespace pmc {

/// Unnormalized bump profile exp(1/(r^2 - 1)) on r < 1, zero elsewhere.
double bump(double r);

/**
 * Discrete mollifier on the (n+1)-dimensional lattice h Z^n x h_s Z.
 *
 * Weights are the bump profile sampled at |offset| / lambda and renormalized to
 * sum to one, so the kernel is a convex combination supported in the open ball
 * of radius lambda and depends only on the physical length of the offset.
 */
struct MollifierKernel {
    struct Tap {
        std::array<int, 3> shift{};  // torus offset in grid steps
        int vertical = 0;            // vertical offset in lattice steps
        double weight = 0.0;
    };

    double lambda = 0.0;
    int dim_ambient = 0;
    std::vector<Tap> taps;

    /// Largest |vertical| over all taps.
    int vertical_reach() const;
    double weight_sum() const;
};

/// Throws DomainError unless 0 < lambda < 1/8, ResolutionError if lambda < 2 max(h, h_s).
MollifierKernel make_kernel(double lambda, const TorusGrid& grid, double vertical_spacing);

bool mollifier_resolvable(double lambda, const TorusGrid& grid, double vertical_spacing);

struct MollifyOptions {
    /// Tabulation lattice used when the input field is analytic.
    std::optional<TorusGrid> grid;
    int vertical_points = 129;
};

/**
 * g_lambda = eta_lambda * g, periodic in x and restricted in s.
 *
 * The result is a sampled field on the input lattice (analytic inputs are
 * tabulated first) whose band is the input band shrunk by lambda on each side.
 */
AmbientField mollify(const AmbientField& g, double lambda, const MollifyOptions& options = {});

}  // namespace pmc
