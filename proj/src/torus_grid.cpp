#include "pmc/torus_grid.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "spectral.hpp"

namespace pmc {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* what) {
    if (!(a == b)) throw DimensionError(std::string(what) + ": fields live on different grids");
}

// Periodic cardinal function of an N-point axis at offset d (in periods).
double cardinal(double d, int n) {
    const double sd = std::sin(std::numbers::pi * d);
    if (std::abs(sd) < 1e-14) return 1.0;
    return std::sin(std::numbers::pi * n * d) * std::cos(std::numbers::pi * d) / (n * sd);
}

}  // namespace

TorusGrid::TorusGrid(int dim, int points_per_axis) : dim_(dim), n_(points_per_axis) {
    if (dim < 1 || dim > 3) {
        throw ConfigurationError("torus dimension must be 1, 2 or 3 (got " + std::to_string(dim) + ")");
    }
    if (!is_power_of_two(points_per_axis)) {
        throw ConfigurationError("points per axis must be a power of two (got " +
                                 std::to_string(points_per_axis) + ")");
    }
    if (points_per_axis < kMinPoints) {
        throw ConfigurationError("points per axis must be at least " + std::to_string(kMinPoints));
    }
    size_ = 1;
    for (int a = 0; a < dim; ++a) size_ *= n_;
    Index s = 1;
    for (int a = dim - 1; a >= 0; --a) {
        strides_[a] = s;
        s *= n_;
    }
}

Index TorusGrid::wrap(std::span<const int> multi) const {
    Index flat = 0;
    for (int a = 0; a < dim_; ++a) {
        int j = multi[a] % n_;
        if (j < 0) j += n_;
        flat += j * strides_[a];
    }
    return flat;
}

std::array<double, 3> TorusGrid::point(Index flat) const {
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = 0; a < dim_; ++a) x[a] = coordinate(flat, a);
    return x;
}

ScalarField::ScalarField(const TorusGrid& grid) : grid_(grid), values_(Eigen::ArrayXd::Zero(grid.size())) {}

ScalarField::ScalarField(const TorusGrid& grid, Eigen::ArrayXd values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw DimensionError("field has " + std::to_string(values_.size()) + " values, grid needs " +
                             std::to_string(grid_.size()));
    }
    detail::require_finite(values_, "ScalarField");
}

ScalarField ScalarField::constant(const TorusGrid& grid, double c) {
    return ScalarField(grid, Eigen::ArrayXd::Constant(grid.size(), c));
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid(), b.grid(), "operator+");
    return ScalarField(a.grid(), a.values() + b.values());
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid(), b.grid(), "operator-");
    return ScalarField(a.grid(), a.values() - b.values());
}

ScalarField operator+(const ScalarField& a, double c) { return ScalarField(a.grid(), a.values() + c); }
ScalarField operator-(const ScalarField& a, double c) { return ScalarField(a.grid(), a.values() - c); }
ScalarField operator*(double c, const ScalarField& a) { return ScalarField(a.grid(), c * a.values()); }

VectorField::VectorField(const TorusGrid& grid, std::vector<Eigen::ArrayXd> components)
    : grid_(grid), components_(std::move(components)) {
    if (static_cast<int>(components_.size()) != grid_.dim()) {
        throw DimensionError("vector field needs one component per torus axis");
    }
    for (const auto& c : components_) {
        if (c.size() != grid_.size()) throw DimensionError("vector field component has wrong length");
        detail::require_finite(c, "VectorField");
    }
}

Eigen::ArrayXd VectorField::magnitude() const {
    Eigen::ArrayXd sq = Eigen::ArrayXd::Zero(grid_.size());
    for (const auto& c : components_) sq += c.square();
    return sq.sqrt();
}

GradientField gradient(const ScalarField& u) {
    const auto& grid = u.grid();
    const Eigen::ArrayXcd spec = detail::forward(grid, u.values());
    std::vector<Eigen::ArrayXd> comps;
    comps.reserve(grid.dim());
    for (int a = 0; a < grid.dim(); ++a) {
        comps.push_back(detail::inverse_real(grid, detail::multiply_ik(spec, detail::axis_symbol(grid, a))));
    }
    return GradientField(grid, std::move(comps));
}

ScalarField divergence(const VectorField& w) {
    const auto& grid = w.grid();
    Eigen::ArrayXcd acc = Eigen::ArrayXcd::Zero(grid.size());
    for (int a = 0; a < grid.dim(); ++a) {
        acc += detail::multiply_ik(detail::forward(grid, w.component(a)), detail::axis_symbol(grid, a));
    }
    return ScalarField(grid, detail::inverse_real(grid, std::move(acc)));
}

ScalarField partial(const ScalarField& u, int axis) {
    const auto& grid = u.grid();
    if (axis < 0 || axis >= grid.dim()) throw DimensionError("partial: axis out of range");
    return ScalarField(grid, detail::inverse_real(grid, detail::multiply_ik(detail::forward(grid, u.values()),
                                                                           detail::axis_symbol(grid, axis))));
}

ScalarField second_partial(const ScalarField& u, int axis_a, int axis_b) {
    const auto& grid = u.grid();
    if (axis_a < 0 || axis_a >= grid.dim() || axis_b < 0 || axis_b >= grid.dim()) {
        throw DimensionError("second_partial: axis out of range");
    }
    const Eigen::ArrayXd sym = detail::axis_symbol(grid, axis_a) * detail::axis_symbol(grid, axis_b);
    Eigen::ArrayXcd spec = detail::forward(grid, u.values());
    spec *= -sym.cast<std::complex<double>>();
    return ScalarField(grid, detail::inverse_real(grid, std::move(spec)));
}

ScalarField laplacian(const ScalarField& u) {
    const auto& grid = u.grid();
    Eigen::ArrayXd sym = Eigen::ArrayXd::Zero(grid.size());
    for (int a = 0; a < grid.dim(); ++a) sym += detail::axis_symbol(grid, a).square();
    Eigen::ArrayXcd spec = detail::forward(grid, u.values());
    spec *= -sym.cast<std::complex<double>>();
    return ScalarField(grid, detail::inverse_real(grid, std::move(spec)));
}

ScalarField inverse_laplacian(const ScalarField& f) {
    const auto& grid = f.grid();
    Eigen::ArrayXd sym = Eigen::ArrayXd::Zero(grid.size());
    for (int a = 0; a < grid.dim(); ++a) sym += detail::axis_symbol(grid, a).square();
    Eigen::ArrayXcd spec = detail::forward(grid, f.values());
    for (Index i = 0; i < grid.size(); ++i) spec[i] = sym[i] > 0.0 ? -spec[i] / sym[i] : 0.0;
    return ScalarField(grid, detail::inverse_real(grid, std::move(spec)));
}

ScalarField project_to_range(const ScalarField& u) {
    const auto& grid = u.grid();
    Eigen::ArrayXd sym = Eigen::ArrayXd::Zero(grid.size());
    for (int a = 0; a < grid.dim(); ++a) sym += detail::axis_symbol(grid, a).square();
    Eigen::ArrayXcd spec = detail::forward(grid, u.values());
    for (Index i = 0; i < grid.size(); ++i) {
        if (sym[i] == 0.0) spec[i] = 0.0;
    }
    return ScalarField(grid, detail::inverse_real(grid, std::move(spec)));
}

double mean(const ScalarField& u) { return u.values().mean(); }

double inner(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid(), b.grid(), "inner");
    return (a.values() * b.values()).mean();
}

double lp_norm(const TorusGrid& grid, const Eigen::ArrayXd& values, double p) {
    if (!(p >= 1.0)) throw DomainError("lp_norm: p must be >= 1");
    if (values.size() != grid.size()) throw DimensionError("lp_norm: length mismatch");
    if (std::isinf(p)) return values.abs().maxCoeff();
    if (p == 1.0) return values.abs().mean();
    if (p == 2.0) return std::sqrt(values.square().mean());
    return std::pow(values.abs().pow(p).mean(), 1.0 / p);
}

double lp_norm(const ScalarField& u, double p) { return lp_norm(u.grid(), u.values(), p); }

double max_norm(const ScalarField& u) { return u.values().abs().maxCoeff(); }

double sobolev_norm(const ScalarField& u, int order, double p) {
    if (order < 0 || order > 2) throw DomainError("sobolev_norm: order must be 0, 1 or 2");
    const auto& grid = u.grid();
    double total = lp_norm(u, p);
    if (order == 0) return total;

    const Eigen::ArrayXcd spec = detail::forward(grid, u.values());
    std::vector<Eigen::ArrayXd> sym;
    for (int a = 0; a < grid.dim(); ++a) sym.push_back(detail::axis_symbol(grid, a));
    for (int a = 0; a < grid.dim(); ++a) {
        total += lp_norm(grid, detail::inverse_real(grid, detail::multiply_ik(spec, sym[a])), p);
    }
    if (order == 1) return total;
    for (int a = 0; a < grid.dim(); ++a) {
        for (int b = a; b < grid.dim(); ++b) {
            Eigen::ArrayXcd s2 = spec * (-(sym[a] * sym[b])).cast<std::complex<double>>();
            total += lp_norm(grid, detail::inverse_real(grid, std::move(s2)), p);
        }
    }
    return total;
}

double c1_norm(const ScalarField& u) { return max_norm(u) + gradient(u).magnitude().maxCoeff(); }

Eigen::ArrayXd interpolation_weights(const TorusGrid& grid, std::span<const double> x) {
    if (static_cast<int>(x.size()) < grid.dim()) throw DimensionError("interpolate: point has too few coordinates");
    const int n = grid.points_per_axis();
    std::vector<std::vector<double>> axis_weights(grid.dim(), std::vector<double>(n));
    for (int a = 0; a < grid.dim(); ++a) {
        double xa = x[a] - std::floor(x[a]);
        const double scaled = xa * n;
        const double nearest = std::round(scaled);
        if (std::abs(scaled - nearest) < 1e-12) {
            const int j = static_cast<int>(nearest) % n;
            for (int k = 0; k < n; ++k) axis_weights[a][k] = (k == j) ? 1.0 : 0.0;
        } else {
            for (int k = 0; k < n; ++k) axis_weights[a][k] = cardinal(xa - static_cast<double>(k) / n, n);
        }
    }
    Eigen::ArrayXd w(grid.size());
    for (Index i = 0; i < grid.size(); ++i) {
        double wi = 1.0;
        for (int a = 0; a < grid.dim(); ++a) wi *= axis_weights[a][grid.axis_index(i, a)];
        w[i] = wi;
    }
    return w;
}

double interpolate(const ScalarField& u, std::span<const double> x) {
    return (interpolation_weights(u.grid(), x) * u.values()).sum();
}

namespace {

// Target indices (with weights) receiving source mode j when resampling an axis.
std::vector<std::pair<int, double>> map_axis(int j, int ns, int nt) {
    if (ns == nt) return {{j, 1.0}};
    const int k = detail::signed_wavenumber(j, ns);
    if (j == ns / 2) {
        if (nt > ns) return {{ns / 2, 0.5}, {nt - ns / 2, 0.5}};
        return {};
    }
    if (std::abs(k) < nt / 2) return {{(k + nt) % nt, 1.0}};
    return {};
}

}  // namespace

ScalarField resample(const ScalarField& u, const TorusGrid& target) {
    const auto& src = u.grid();
    if (src.dim() != target.dim()) throw DimensionError("resample: dimension mismatch");
    if (src == target) return u;
    const int ns = src.points_per_axis();
    const int nt = target.points_per_axis();
    const Eigen::ArrayXcd spec = detail::forward(src, u.values());
    Eigen::ArrayXcd out = Eigen::ArrayXcd::Zero(target.size());
    const double scale = std::pow(static_cast<double>(nt) / ns, src.dim());

    std::vector<std::vector<std::pair<int, double>>> maps(ns);
    for (int j = 0; j < ns; ++j) maps[j] = map_axis(j, ns, nt);

    std::array<int, 3> idx{};
    for (Index i = 0; i < src.size(); ++i) {
        // Cartesian product of the per-axis target lists.
        const int d = src.dim();
        std::array<std::size_t, 3> pick{0, 0, 0};
        std::array<const std::vector<std::pair<int, double>>*, 3> lists{};
        bool empty = false;
        for (int a = 0; a < d; ++a) {
            lists[a] = &maps[src.axis_index(i, a)];
            if (lists[a]->empty()) empty = true;
        }
        if (empty) continue;
        while (true) {
            double w = scale;
            for (int a = 0; a < d; ++a) {
                idx[a] = (*lists[a])[pick[a]].first;
                w *= (*lists[a])[pick[a]].second;
            }
            out[target.wrap(std::span<const int>(idx.data(), d))] += w * spec[i];
            int a = d - 1;
            while (a >= 0 && ++pick[a] == lists[a]->size()) {
                pick[a] = 0;
                --a;
            }
            if (a < 0) break;
        }
    }
    return ScalarField(target, detail::inverse_real(target, std::move(out)));
}

}  // namespace pmc
