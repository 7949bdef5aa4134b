#include "pmc/ambient_field.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "cubic_spline.hpp"
#include "spectral.hpp"

namespace pmc {

struct AmbientField::Impl {
    int dim = 0;
    double band_lower = -1.0;
    double band_upper = 1.0;

    std::vector<AnalyticComponent> analytic;

    std::optional<TorusGrid> grid;
    VerticalLattice lattice;
    std::vector<Eigen::MatrixXd> values;
    std::vector<Eigen::MatrixXd> slopes;

    bool sampled() const { return grid.has_value(); }
};

namespace {

using Impl = AmbientField::Impl;

[[noreturn]] void out_of_band(double s, double lo, double hi) {
    std::ostringstream msg;
    msg << "height s=" << s << " outside the field's vertical band (" << lo << ", " << hi << ")";
    throw DomainError(msg.str());
}

// Sampled-backend evaluation at every node of `target`. `derivative` selects d/ds.
std::vector<Eigen::ArrayXd> sampled_on_graph(const Impl& f, const TorusGrid& target, const Eigen::ArrayXd& heights,
                                             bool derivative) {
    const int nc = f.dim + 1;
    const auto& lat = f.lattice;
    const double h = lat.spacing;
    std::vector<Eigen::ArrayXd> out(nc, Eigen::ArrayXd(target.size()));

    if (target == *f.grid) {
        for (Index i = 0; i < target.size(); ++i) {
            double t;
            const int j = detail::locate(heights[i], lat.first, h, lat.count, t);
            for (int c = 0; c < nc; ++c) {
                const auto& v = f.values[c];
                const auto& m = f.slopes[c];
                out[c][i] = derivative ? detail::hermite_derivative(v(j, i), v(j + 1, i), m(j, i), m(j + 1, i), h, t)
                                       : detail::hermite_value(v(j, i), v(j + 1, i), m(j, i), m(j + 1, i), h, t);
            }
        }
        return out;
    }

    for (Index i = 0; i < target.size(); ++i) {
        const auto x = target.point(i);
        const Eigen::ArrayXd w =
            interpolation_weights(*f.grid, std::span<const double>(x.data(), target.dim()));
        double t;
        const int j = detail::locate(heights[i], lat.first, h, lat.count, t);
        for (int c = 0; c < nc; ++c) {
            const auto& v = f.values[c];
            const auto& m = f.slopes[c];
            const double y0 = (v.row(j).transpose().array() * w).sum();
            const double y1 = (v.row(j + 1).transpose().array() * w).sum();
            const double m0 = (m.row(j).transpose().array() * w).sum();
            const double m1 = (m.row(j + 1).transpose().array() * w).sum();
            out[c][i] = derivative ? detail::hermite_derivative(y0, y1, m0, m1, h, t)
                                   : detail::hermite_value(y0, y1, m0, m1, h, t);
        }
    }
    return out;
}

std::vector<Eigen::ArrayXd> analytic_on_graph(const Impl& f, const TorusGrid& target, const Eigen::ArrayXd& heights,
                                              bool derivative) {
    const int nc = f.dim + 1;
    std::vector<Eigen::ArrayXd> out(nc, Eigen::ArrayXd(target.size()));
    for (Index i = 0; i < target.size(); ++i) {
        const auto x = target.point(i);
        const std::span<const double> xs(x.data(), target.dim());
        for (int c = 0; c < nc; ++c) {
            const auto& comp = f.analytic[c];
            out[c][i] = derivative ? comp.vertical_partial(xs, heights[i]) : comp.value(xs, heights[i]);
        }
    }
    return out;
}

// Node data used by the hypothesis checks: values and d/ds on a lattice.
struct NodeData {
    TorusGrid grid;
    VerticalLattice lattice;
    int j_begin = 0;
    int j_end = 0;  // exclusive
    std::vector<Eigen::MatrixXd> values;
    std::vector<Eigen::MatrixXd> ds;
};

NodeData node_data(const AmbientField& g, const HypothesisOptions& options) {
    if (g.is_sampled()) {
        NodeData d{g.sample_grid(), g.lattice(), 0, 0, {}, {}};
        const auto& lat = g.lattice();
        const double tol = 1e-9 * lat.spacing;
        d.j_begin = 0;
        while (d.j_begin < lat.count && lat.node(d.j_begin) < g.band_lower() - tol) ++d.j_begin;
        d.j_end = lat.count;
        while (d.j_end > d.j_begin && lat.node(d.j_end - 1) > g.band_upper() + tol) --d.j_end;
        d.values.reserve(g.components());
        d.ds.reserve(g.components());
        for (int c = 0; c < g.components(); ++c) {
            d.values.push_back(g.samples(c));
            d.ds.push_back(g.slopes(c));
        }
        return d;
    }
    if (!options.grid) throw ConfigurationError("checking an analytic field needs a sampling grid");
    const TorusGrid& grid = *options.grid;
    const auto lat = VerticalLattice::unit_interval(options.vertical_points);
    NodeData d{grid, lat, 0, lat.count, {}, {}};
    for (int c = 0; c < g.components(); ++c) {
        Eigen::MatrixXd v(lat.count, grid.size()), dv(lat.count, grid.size());
        for (Index i = 0; i < grid.size(); ++i) {
            const auto x = grid.point(i);
            const std::span<const double> xs(x.data(), grid.dim());
            for (int j = 0; j < lat.count; ++j) {
                v(j, i) = g.raw_value(c, xs, lat.node(j));
                dv(j, i) = g.raw_vertical_partial(c, xs, lat.node(j));
            }
        }
        d.values.push_back(std::move(v));
        d.ds.push_back(std::move(dv));
    }
    return d;
}

double trapezoid_weight(int j, int j_begin, int j_end, double h) {
    return (j == j_begin || j == j_end - 1) ? 0.5 * h : h;
}

double lp_integrand(const Eigen::ArrayXd& f, double p) {
    if (p == 2.0) return f.square().mean();
    if (p == 1.0) return f.abs().mean();
    return f.abs().pow(p).mean();
}

double w1p_from_nodes(const NodeData& d, double p) {
    const auto& grid = d.grid;
    const double h = d.lattice.spacing;
    double total = 0.0;
    for (std::size_t c = 0; c < d.values.size(); ++c) {
        const auto& v = d.values[c];
        const auto& dv = d.ds[c];
        double acc_value = 0.0, acc_ds = 0.0;
        std::vector<double> acc_dx(grid.dim(), 0.0);
        for (int j = d.j_begin; j < d.j_end; ++j) {
            const double w = trapezoid_weight(j, d.j_begin, d.j_end, h);
            const Eigen::ArrayXd slice = v.row(j).transpose().array();
            acc_value += w * lp_integrand(slice, p);
            acc_ds += w * lp_integrand(dv.row(j).transpose().array(), p);
            if ((slice != 0.0).any()) {
                const Eigen::ArrayXcd spec = detail::forward(grid, slice);
                for (int a = 0; a < grid.dim(); ++a) {
                    const Eigen::ArrayXd dx =
                        detail::inverse_real(grid, detail::multiply_ik(spec, detail::axis_symbol(grid, a)));
                    acc_dx[a] += w * lp_integrand(dx, p);
                }
            }
        }
        total += std::pow(acc_value, 1.0 / p) + std::pow(acc_ds, 1.0 / p);
        for (double a : acc_dx) total += std::pow(a, 1.0 / p);
    }
    return total;
}

}  // namespace

AmbientField AmbientField::analytic(int dim, std::vector<AnalyticComponent> components) {
    if (dim < 1 || dim > 3) throw ConfigurationError("ambient field dimension must be 1, 2 or 3");
    if (static_cast<int>(components.size()) != dim + 1) {
        throw DimensionError("analytic ambient field needs n+1 components");
    }
    for (const auto& c : components) {
        if (!c.value || !c.vertical_partial) throw ConfigurationError("analytic component missing a callable");
    }
    auto impl = std::make_shared<Impl>();
    impl->dim = dim;
    impl->analytic = std::move(components);
    return AmbientField(std::move(impl));
}

AmbientField AmbientField::sampled(const TorusGrid& grid, VerticalLattice lattice, std::vector<Eigen::MatrixXd> values,
                                   double band_lower, double band_upper) {
    if (static_cast<int>(values.size()) != grid.dim() + 1) {
        throw DimensionError("sampled ambient field needs n+1 components");
    }
    if (lattice.count < 16) throw ConfigurationError("sampled ambient field needs at least 16 vertical points");
    if (!(lattice.spacing > 0.0)) throw ConfigurationError("vertical spacing must be positive");
    const double tol = 1e-12;
    if (band_lower < lattice.first - tol || band_upper > lattice.last() + tol || !(band_lower < band_upper)) {
        throw ConfigurationError("vertical band must lie inside the sample lattice");
    }
    auto impl = std::make_shared<Impl>();
    impl->dim = grid.dim();
    impl->band_lower = band_lower;
    impl->band_upper = band_upper;
    impl->grid = grid;
    impl->lattice = lattice;
    std::vector<double> work;
    for (auto& v : values) {
        if (v.rows() != lattice.count || v.cols() != grid.size()) {
            throw DimensionError("sampled component must be (vertical points) x (grid size)");
        }
        if (!v.allFinite()) throw DomainError("sampled ambient field: non-finite value");
        Eigen::MatrixXd m(v.rows(), v.cols());
        for (Index i = 0; i < v.cols(); ++i) {
            detail::spline_slopes(v.col(i).data(), lattice.count, lattice.spacing, m.col(i).data(), work);
        }
        impl->slopes.push_back(std::move(m));
    }
    impl->values = std::move(values);
    return AmbientField(std::move(impl));
}

AmbientField AmbientField::sampled(const TorusGrid& grid, int vertical_points, std::vector<Eigen::MatrixXd> values) {
    if (vertical_points < 16) throw ConfigurationError("sampled ambient field needs at least 16 vertical points");
    return sampled(grid, VerticalLattice::unit_interval(vertical_points), std::move(values), -1.0, 1.0);
}

AmbientField AmbientField::tabulate(const AmbientField& g, const TorusGrid& grid, int vertical_points) {
    if (g.dim() != grid.dim()) throw DimensionError("tabulate: dimension mismatch");
    if (vertical_points < 16) throw ConfigurationError("tabulate: at least 16 vertical points required");
    const auto lat = VerticalLattice::unit_interval(vertical_points);
    std::vector<Eigen::MatrixXd> values(g.components(), Eigen::MatrixXd(lat.count, grid.size()));
    for (int j = 0; j < lat.count; ++j) {
        const Eigen::ArrayXd heights = Eigen::ArrayXd::Constant(grid.size(), lat.node(j));
        const auto row = g.impl_->sampled() ? sampled_on_graph(*g.impl_, grid, heights, false)
                                            : analytic_on_graph(*g.impl_, grid, heights, false);
        for (int c = 0; c < g.components(); ++c) values[c].row(j) = row[c].transpose().matrix();
    }
    return sampled(grid, lat, std::move(values), -1.0, 1.0);
}

AmbientField AmbientField::constant(int dim, std::span<const double> value) {
    if (static_cast<int>(value.size()) != dim + 1) throw DimensionError("constant field needs n+1 values");
    std::vector<AnalyticComponent> comps;
    for (double v : value) {
        comps.push_back({[v](std::span<const double>, double) { return v; },
                         [](std::span<const double>, double) { return 0.0; }});
    }
    return analytic(dim, std::move(comps));
}

int AmbientField::dim() const { return impl_->dim; }
bool AmbientField::is_sampled() const { return impl_->sampled(); }
double AmbientField::band_lower() const { return impl_->band_lower; }
double AmbientField::band_upper() const { return impl_->band_upper; }

Eigen::VectorXd AmbientField::eval(std::span<const double> x, double s) const {
    if (!in_band(s)) out_of_band(s, band_lower(), band_upper());
    Eigen::VectorXd out(components());
    for (int c = 0; c < components(); ++c) out[c] = raw_value(c, x, s);
    return out;
}

Eigen::VectorXd AmbientField::eval_vertical_partial(std::span<const double> x, double s) const {
    if (!in_band(s)) out_of_band(s, band_lower(), band_upper());
    Eigen::VectorXd out(components());
    for (int c = 0; c < components(); ++c) out[c] = raw_vertical_partial(c, x, s);
    return out;
}

namespace {

void check_graph(const AmbientField& g, const TorusGrid& grid, const Eigen::ArrayXd& heights) {
    if (grid.dim() != g.dim()) throw DimensionError("graph grid dimension differs from the field's");
    if (heights.size() != grid.size()) throw DimensionError("heights must have one value per grid point");
    const double lo = heights.minCoeff();
    const double hi = heights.maxCoeff();
    if (!g.in_band(lo)) out_of_band(lo, g.band_lower(), g.band_upper());
    if (!g.in_band(hi)) out_of_band(hi, g.band_lower(), g.band_upper());
}

}  // namespace

std::vector<Eigen::ArrayXd> AmbientField::eval_on_graph(const TorusGrid& grid, const Eigen::ArrayXd& heights) const {
    check_graph(*this, grid, heights);
    return impl_->sampled() ? sampled_on_graph(*impl_, grid, heights, false)
                            : analytic_on_graph(*impl_, grid, heights, false);
}

std::vector<Eigen::ArrayXd> AmbientField::vertical_partial_on_graph(const TorusGrid& grid,
                                                                    const Eigen::ArrayXd& heights) const {
    check_graph(*this, grid, heights);
    return impl_->sampled() ? sampled_on_graph(*impl_, grid, heights, true)
                            : analytic_on_graph(*impl_, grid, heights, true);
}

const TorusGrid& AmbientField::sample_grid() const {
    if (!impl_->sampled()) throw ConfigurationError("analytic field has no sample grid");
    return *impl_->grid;
}

const VerticalLattice& AmbientField::lattice() const {
    if (!impl_->sampled()) throw ConfigurationError("analytic field has no vertical lattice");
    return impl_->lattice;
}

const Eigen::MatrixXd& AmbientField::samples(int component) const {
    if (!impl_->sampled()) throw ConfigurationError("analytic field has no samples");
    return impl_->values.at(component);
}

const Eigen::MatrixXd& AmbientField::slopes(int component) const {
    if (!impl_->sampled()) throw ConfigurationError("analytic field has no samples");
    return impl_->slopes.at(component);
}

double AmbientField::raw_value(int component, std::span<const double> x, double s) const {
    if (!impl_->sampled()) return impl_->analytic.at(component).value(x, s);
    const auto& f = *impl_;
    const Eigen::ArrayXd w = interpolation_weights(*f.grid, x);
    double t;
    const int j = detail::locate(s, f.lattice.first, f.lattice.spacing, f.lattice.count, t);
    const auto& v = f.values.at(component);
    const auto& m = f.slopes.at(component);
    return detail::hermite_value((v.row(j).transpose().array() * w).sum(), (v.row(j + 1).transpose().array() * w).sum(),
                                 (m.row(j).transpose().array() * w).sum(), (m.row(j + 1).transpose().array() * w).sum(),
                                 f.lattice.spacing, t);
}

double AmbientField::raw_vertical_partial(int component, std::span<const double> x, double s) const {
    if (!impl_->sampled()) return impl_->analytic.at(component).vertical_partial(x, s);
    const auto& f = *impl_;
    const Eigen::ArrayXd w = interpolation_weights(*f.grid, x);
    double t;
    const int j = detail::locate(s, f.lattice.first, f.lattice.spacing, f.lattice.count, t);
    const auto& v = f.values.at(component);
    const auto& m = f.slopes.at(component);
    return detail::hermite_derivative(
        (v.row(j).transpose().array() * w).sum(), (v.row(j + 1).transpose().array() * w).sum(),
        (m.row(j).transpose().array() * w).sum(), (m.row(j + 1).transpose().array() * w).sum(), f.lattice.spacing, t);
}

AmbientField translate_vertically(const AmbientField& g, double shift) {
    if (g.is_sampled()) {
        auto lat = g.lattice();
        lat.first += shift;
        std::vector<Eigen::MatrixXd> values;
        for (int c = 0; c < g.components(); ++c) values.push_back(g.samples(c));
        return AmbientField::sampled(g.sample_grid(), lat, std::move(values), g.band_lower() + shift,
                                     g.band_upper() + shift);
    }
    std::vector<AnalyticComponent> comps;
    for (int c = 0; c < g.components(); ++c) {
        comps.push_back({[g, c, shift](std::span<const double> x, double s) { return g.raw_value(c, x, s - shift); },
                         [g, c, shift](std::span<const double> x, double s) {
                             return g.raw_vertical_partial(c, x, s - shift);
                         }});
    }
    return AmbientField::analytic(g.dim(), std::move(comps));
}

double exponent_q(int n, double p) {
    if (!(p > 0.5 * (n + 1) && p < n + 1)) {
        std::ostringstream msg;
        msg << "exponent p=" << p << " must satisfy " << 0.5 * (n + 1) << " < p < " << n + 1;
        throw DomainError(msg.str());
    }
    return n * p / (n + 1 - p);
}

double HypothesisReport::smallness_threshold() const { return std::pow(epsilon, 2.0 / 3.0); }

double w1p_norm(const AmbientField& g, double p, const HypothesisOptions& options) {
    if (!(p >= 1.0)) throw DomainError("w1p_norm: p must be >= 1");
    return w1p_from_nodes(node_data(g, options), p);
}

HypothesisReport check_hypotheses(const AmbientField& g, double epsilon, double p, const HypothesisOptions& options) {
    exponent_q(g.dim(), p);
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");

    const NodeData d = node_data(g, options);
    HypothesisReport r;
    r.dim = g.dim();
    r.epsilon = epsilon;
    r.p = p;
    r.zero_mean_tolerance = options.zero_mean_tolerance;
    r.sobolev_norm_w1p = w1p_from_nodes(d, p);
    r.smallness_pass = r.sobolev_norm_w1p < r.smallness_threshold();

    const int n = g.dim();
    const double root = std::sqrt(epsilon);
    double margin = std::numeric_limits<double>::infinity();
    for (int j = d.j_begin; j < d.j_end; ++j) {
        Eigen::ArrayXd tangential = Eigen::ArrayXd::Zero(d.grid.size());
        for (int c = 0; c < n; ++c) tangential += d.ds[c].row(j).transpose().array().square();
        const Eigen::ArrayXd m =
            d.ds[n].row(j).transpose().array() - epsilon - root * tangential.sqrt();
        margin = std::min(margin, m.minCoeff());
    }
    r.monotonicity_margin = margin;

    double sum = 0.0;
    if (g.is_sampled()) {
        sum = g.eval_on_graph(d.grid, Eigen::ArrayXd::Zero(d.grid.size()))[n].sum();
    } else {
        for (Index i = 0; i < d.grid.size(); ++i) {
            const auto x = d.grid.point(i);
            sum += g.raw_value(n, std::span<const double>(x.data(), n), 0.0);
        }
    }
    r.zero_mean_residual = std::abs(sum / static_cast<double>(d.grid.size()));
    return r;
}

double ambient_lp_norm(const AmbientField& g, double p, double s_lower, double s_upper) {
    if (!(p >= 1.0)) throw DomainError("ambient_lp_norm: p must be >= 1");
    if (!g.is_sampled()) throw ConfigurationError("ambient_lp_norm needs a sampled field");
    const auto& lat = g.lattice();
    const auto node_of = [&](double s) {
        const double u = (s - lat.first) / lat.spacing;
        const double r = std::round(u);
        if (std::abs(u - r) > 1e-9 || r < 0 || r >= lat.count) {
            throw DomainError("ambient_lp_norm: integration limits must be lattice nodes");
        }
        return static_cast<int>(r);
    };
    const int j0 = node_of(s_lower);
    const int j1 = node_of(s_upper) + 1;
    if (j1 - j0 < 2) throw DomainError("ambient_lp_norm: empty vertical range");
    double acc = 0.0;
    for (int j = j0; j < j1; ++j) {
        Eigen::ArrayXd sq = Eigen::ArrayXd::Zero(g.sample_grid().size());
        for (int c = 0; c < g.components(); ++c) sq += g.samples(c).row(j).transpose().array().square();
        acc += trapezoid_weight(j, j0, j1, lat.spacing) * lp_integrand(sq.sqrt(), p);
    }
    return std::pow(acc, 1.0 / p);
}

}  // namespace pmc
