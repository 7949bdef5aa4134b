#include "pmc/mollifier.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace pmc {

double bump(double r) {
    if (std::abs(r) >= 1.0) return 0.0;
    return std::exp(1.0 / (r * r - 1.0));
}

int MollifierKernel::vertical_reach() const {
    int reach = 0;
    for (const auto& t : taps) reach = std::max(reach, std::abs(t.vertical));
    return reach;
}

double MollifierKernel::weight_sum() const {
    double s = 0.0;
    for (const auto& t : taps) s += t.weight;
    return s;
}

bool mollifier_resolvable(double lambda, const TorusGrid& grid, double vertical_spacing) {
    return lambda >= 2.0 * std::max(grid.spacing(), vertical_spacing);
}

MollifierKernel make_kernel(double lambda, const TorusGrid& grid, double vertical_spacing) {
    if (!(lambda > 0.0 && lambda < 0.125)) {
        std::ostringstream msg;
        msg << "mollifier radius lambda=" << lambda << " must satisfy 0 < lambda < 1/8";
        throw DomainError(msg.str());
    }
    if (!mollifier_resolvable(lambda, grid, vertical_spacing)) {
        std::ostringstream msg;
        msg << "mollifier radius lambda=" << lambda << " is below two lattice spacings (h=" << grid.spacing()
            << ", h_s=" << vertical_spacing << ")";
        throw ResolutionError(msg.str());
    }

    MollifierKernel k;
    k.lambda = lambda;
    k.dim_ambient = grid.dim() + 1;
    const double h = grid.spacing();
    const int rx = static_cast<int>(std::ceil(lambda / h));
    const int rs = static_cast<int>(std::ceil(lambda / vertical_spacing));
    const int n = grid.dim();

    std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
    for (int a = 0; a < n; ++a) {
        lo[a] = -rx;
        hi[a] = rx;
    }
    for (int a0 = lo[0]; a0 <= hi[0]; ++a0) {
        for (int a1 = lo[1]; a1 <= hi[1]; ++a1) {
            for (int a2 = lo[2]; a2 <= hi[2]; ++a2) {
                const double xr2 = (double(a0) * a0 + double(a1) * a1 + double(a2) * a2) * h * h;
                for (int b = -rs; b <= rs; ++b) {
                    const double r = std::sqrt(xr2 + b * vertical_spacing * b * vertical_spacing) / lambda;
                    const double w = bump(r);
                    if (w > 0.0) k.taps.push_back({{a0, a1, a2}, b, w});
                }
            }
        }
    }
    const double total = k.weight_sum();
    for (auto& t : k.taps) t.weight /= total;
    return k;
}

AmbientField mollify(const AmbientField& g, double lambda, const MollifyOptions& options) {
    AmbientField source = g;
    if (!g.is_sampled()) {
        if (!options.grid) throw ConfigurationError("mollifying an analytic field needs a tabulation grid");
        if (options.grid->dim() != g.dim()) throw DimensionError("mollify: grid dimension mismatch");
        source = AmbientField::tabulate(g, *options.grid, options.vertical_points);
    }
    const TorusGrid& grid = source.sample_grid();
    const VerticalLattice& lat = source.lattice();
    const MollifierKernel kernel = make_kernel(lambda, grid, lat.spacing);

    const int reach = kernel.vertical_reach();
    const int m_out = lat.count - 2 * reach;
    if (m_out < 16) throw ResolutionError("mollify: vertical lattice too short for this radius");
    VerticalLattice out_lat{lat.node(reach), lat.spacing, m_out};

    // Taps grouped by torus shift; each group is a short vertical stencil.
    std::map<std::array<int, 3>, std::vector<std::pair<int, double>>> groups;
    for (const auto& t : kernel.taps) groups[t.shift].push_back({t.vertical, t.weight});

    const int n = grid.dim();
    std::vector<Eigen::MatrixXd> out;
    out.reserve(source.components());
    std::vector<Index> src_col(grid.size());
    for (int c = 0; c < source.components(); ++c) {
        const Eigen::MatrixXd& in = source.samples(c);
        Eigen::MatrixXd res = Eigen::MatrixXd::Zero(m_out, grid.size());
        if (in.isZero(0.0)) {
            out.push_back(std::move(res));
            continue;
        }
        for (const auto& [shift, taps] : groups) {
            // g_lambda(x_i) gathers g(x_i - shift).
            for (Index i = 0; i < grid.size(); ++i) {
                std::array<int, 3> idx{};
                for (int a = 0; a < n; ++a) idx[a] = grid.axis_index(i, a) - shift[a];
                src_col[i] = grid.wrap(std::span<const int>(idx.data(), n));
            }
            for (Index i = 0; i < grid.size(); ++i) {
                auto dst = res.col(i);
                const auto src = in.col(src_col[i]);
                for (const auto& [b, w] : taps) dst.noalias() += w * src.segment(reach - b, m_out);
            }
        }
        out.push_back(std::move(res));
    }
    return AmbientField::sampled(grid, out_lat, std::move(out), source.band_lower() + lambda,
                                 source.band_upper() - lambda);
}

}  // namespace pmc
