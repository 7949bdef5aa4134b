#include "pmc/verification.hpp"

#include <Eigen/LU>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "pmc/mollifier.hpp"

namespace pmc {

ScalarField mean_curvature(const ScalarField& u) {
    const auto grad = gradient(u);
    const Eigen::ArrayXd inv = (1.0 + grad.magnitude().square()).rsqrt();
    std::vector<Eigen::ArrayXd> flux;
    for (int k = 0; k < grad.dim(); ++k) flux.push_back(grad.component(k) * inv);
    return -1.0 * divergence(VectorField(u.grid(), std::move(flux)));
}

ScalarField pmc_residual_field(const ScalarField& u, const AmbientField& g) {
    const auto& grid = u.grid();
    const auto grad = gradient(u);
    const auto gv = g.eval_on_graph(grid, u.values());
    const Eigen::ArrayXd inv = (1.0 + grad.magnitude().square()).rsqrt();
    Eigen::ArrayXd flux = gv[grid.dim()] * inv;
    for (int k = 0; k < grid.dim(); ++k) flux -= grad.component(k) * inv * gv[k];
    return ScalarField(grid, mean_curvature(u).values() - flux);
}

double pmc_residual(const ScalarField& u, const AmbientField& g) { return lp_norm(pmc_residual_field(u, g), 2.0); }

ManufacturedCase build_manufactured(const ScalarField& u_star, double kappa, double epsilon,
                                    const ManufacturedOptions& options) {
    const auto& grid = u_star.grid();
    const int n = grid.dim();
    if (c1_norm(u_star) > 0.25) throw DomainError("manufactured target needs ||u*||_C1 <= 1/4");
    if (!(kappa > epsilon)) throw DomainError("manufactured case needs kappa > epsilon");
    if (!options.tangential_slope.empty()) {
        if (static_cast<int>(options.tangential_slope.size()) != n) {
            throw DimensionError("tangential slope needs n components");
        }
        for (const auto& b : options.tangential_slope) {
            if (b.size() != grid.size()) throw DimensionError("tangential slope has the wrong length");
        }
    }

    const auto grad = gradient(u_star);
    const Eigen::ArrayXd W = (1.0 + grad.magnitude().square()).sqrt();
    const Eigen::ArrayXd WH = W * mean_curvature(u_star).values();
    Eigen::ArrayXd coupling = Eigen::ArrayXd::Zero(grid.size());
    for (std::size_t k = 0; k < options.tangential_slope.size(); ++k) {
        coupling += grad.component(static_cast<int>(k)) * options.tangential_slope[k];
    }

    const double d = WH.mean() / kappa - mean(u_star);
    const ScalarField target = u_star + d;

    const auto lat = VerticalLattice::unit_interval(options.vertical_points);
    std::vector<Eigen::MatrixXd> values(n + 1, Eigen::MatrixXd::Zero(lat.count, grid.size()));
    for (int j = 0; j < lat.count; ++j) {
        const double s = lat.node(j);
        for (std::size_t k = 0; k < options.tangential_slope.size(); ++k) {
            values[k].row(j) = (s * options.tangential_slope[k]).matrix().transpose();
        }
        values[n].row(j) = (WH + s * coupling + kappa * (s - target.values())).matrix().transpose();
    }

    ManufacturedCase mc{target, kappa, epsilon, d, AmbientField::sampled(grid, lat.count, std::move(values)), {}, {}};
    HypothesisOptions ho;
    ho.vertical_points = options.vertical_points;
    const double p = options.p ? *options.p : 0.5 * (n + 2);
    mc.hypotheses = check_hypotheses(mc.g, epsilon, p, ho);
    if (options.strict && !mc.hypotheses.passed()) {
        std::ostringstream msg;
        msg << "manufactured field fails the hypotheses (||g||_W1p=" << mc.hypotheses.sobolev_norm_w1p
            << " vs threshold " << mc.hypotheses.smallness_threshold() << ", margin "
            << mc.hypotheses.monotonicity_margin << "); use a smaller u* amplitude";
        throw ConstructionError(msg.str());
    }
    return mc;
}

TraceBound trace_bound_check(const AmbientField& g, const ScalarField& v, double lambda, double p,
                             int vertical_points) {
    if (c1_norm(v) > 7.0 / 16.0) throw DomainError("trace bound check needs ||v||_C1 <= 7/16");
    if (!(lambda > 0.0 && lambda < 0.125)) throw DomainError("trace bound check needs 0 < lambda < 1/8");
    const auto& grid = v.grid();
    const double q = exponent_q(grid.dim(), p);
    MollifyOptions mo;
    mo.grid = grid;
    mo.vertical_points = vertical_points;
    const AmbientField g_l = mollify(g, lambda, mo);
    const auto gv = g_l.eval_on_graph(grid, v.values());
    Eigen::ArrayXd sq = Eigen::ArrayXd::Zero(grid.size());
    for (const auto& c : gv) sq += c.square();

    TraceBound tb;
    tb.lhs = lp_norm(grid, sq.sqrt(), q);
    HypothesisOptions ho;
    ho.grid = grid;
    ho.vertical_points = vertical_points;
    tb.norm_g = w1p_norm(g, p, ho);
    tb.ratio = tb.norm_g > 0.0 ? tb.lhs / tb.norm_g : 0.0;
    return tb;
}

namespace {

// Periodic sixth-order central first difference.
Eigen::MatrixXd difference_matrix(int n, double h) {
    static constexpr double coef[3] = {3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0};
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int k = 1; k <= 3; ++k) {
            D(i, (i + k) % n) += coef[k - 1] / h;
            D(i, (i - k + n) % n) -= coef[k - 1] / h;
        }
    }
    return D;
}

}  // namespace

OracleSolution ode_oracle_1d(const AmbientField& g, const TorusGrid& grid, int max_newton) {
    if (grid.dim() != 1 || g.dim() != 1) throw DimensionError("ode oracle is one-dimensional");
    const int N = static_cast<int>(grid.size());
    const Eigen::MatrixXd D = difference_matrix(N, grid.spacing());

    OracleSolution out;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(N);
    double c = 0.0;
    double last_step = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= max_newton; ++it) {
        const Eigen::ArrayXd u = (w.array() + c);
        if (!g.in_band(u.minCoeff()) || !g.in_band(u.maxCoeff())) {
            out.message = "Newton iterate left the field's band";
            return out;
        }
        const Eigen::ArrayXd z = (D * w).array();
        const Eigen::ArrayXd W = (1.0 + z.square()).sqrt();
        const Eigen::ArrayXd W3 = W.cube();
        const auto gv = g.eval_on_graph(grid, u);
        const auto gs = g.vertical_partial_on_graph(grid, u);

        Eigen::VectorXd E(N + 1);
        E.head(N) = D * (z / W).matrix() + ((-z * gv[0] + gv[1]) / W).matrix();
        E[N] = w.mean();
        out.residual = E.head(N).cwiseAbs().maxCoeff();

        const Eigen::ArrayXd dGds = (-z * gs[0] + gs[1]) / W;
        Eigen::MatrixXd J(N + 1, N + 1);
        J.topLeftCorner(N, N) = D * (W3.inverse().matrix().asDiagonal() * D);
        J.topLeftCorner(N, N) += ((-gv[0] - z * gv[1]) / W3).matrix().asDiagonal() * D;
        J.topLeftCorner(N, N).diagonal() += dGds.matrix();
        J.col(N).head(N) = dGds.matrix();
        J.row(N).head(N).setConstant(1.0 / N);
        J(N, N) = 0.0;

        const Eigen::VectorXd delta = J.partialPivLu().solve(-E);
        if (!delta.allFinite()) {
            out.message = "singular Newton system";
            return out;
        }
        w += delta.head(N);
        c += delta[N];
        const double step = delta.cwiseAbs().maxCoeff();
        out.newton_iterations = it;
        if (step <= 1e-14 || (step <= 1e-11 && step >= 0.5 * last_step)) {
            out.available = true;
            out.u = ScalarField(grid, w.array() + c);
            return out;
        }
        last_step = step;
    }
    out.message = "Newton did not converge";
    return out;
}

OdeComparison ode_cross_check_1d(const AmbientField& g, const ScalarField& solver_u) {
    OdeComparison cmp;
    cmp.solver_u = solver_u;
    const OracleSolution oracle = ode_oracle_1d(g, solver_u.grid());
    cmp.oracle_available = oracle.available;
    cmp.message = oracle.message;
    if (oracle.available) {
        cmp.oracle_u = oracle.u;
        cmp.linf_difference = (oracle.u->values() - solver_u.values()).abs().maxCoeff();
    }
    return cmp;
}

OdeComparison ode_cross_check_1d(const AmbientField& g, const TorusGrid& grid, const SolverConfig& config) {
    const SolveReport report = solve(g, grid, config);
    return ode_cross_check_1d(g, *report.u);
}

std::vector<CorpusEntry> read_corpus(std::istream& in) {
    std::vector<CorpusEntry> out;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        CorpusEntry e;
        if (!(ls >> e.name)) continue;
        if (!(ls >> e.dim >> e.points >> e.epsilon >> e.kappa >> e.amplitude >> e.seed)) {
            throw ParseError("corpus line needs: name n N epsilon kappa amplitude seed [tangential]", number, e.name);
        }
        ls >> e.tangential;
        std::string extra;
        if (ls.fail() && !ls.eof()) throw ParseError("bad tangential value", number, e.name);
        ls.clear();
        if (ls >> extra) throw ParseError("trailing text on corpus line", number, e.name);
        out.push_back(e);
    }
    return out;
}

std::vector<CorpusEntry> read_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError("cannot read corpus " + path.string());
    return read_corpus(in);
}

double SeededUniform::operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

ScalarField random_smooth_field(const TorusGrid& grid, double amplitude, std::uint64_t seed, int max_wavenumber) {
    SeededUniform rng(seed);
    const int n = grid.dim();
    const int span = 2 * max_wavenumber + 1;
    Eigen::ArrayXd u = Eigen::ArrayXd::Zero(grid.size());
    for (int mode = 0; mode < 3; ++mode) {
        std::array<int, 3> k{};
        bool nonzero = false;
        while (!nonzero) {
            for (int a = 0; a < n; ++a) {
                k[a] = std::min(static_cast<int>(rng() * span), span - 1) - max_wavenumber;
                nonzero = nonzero || k[a] != 0;
            }
        }
        const double r = rng.between(0.5, 1.0);
        const double phase = rng.between(0.0, 2.0 * std::numbers::pi);
        for (Index i = 0; i < grid.size(); ++i) {
            double arg = phase;
            for (int a = 0; a < n; ++a) arg += 2.0 * std::numbers::pi * k[a] * grid.coordinate(i, a);
            u[i] += r * std::cos(arg);
        }
    }
    const double peak = u.abs().maxCoeff();
    if (peak > 0.0) u *= amplitude / peak;
    return ScalarField(grid, std::move(u));
}

ManufacturedCase corpus_case(const CorpusEntry& entry, const ManufacturedOptions& options) {
    const TorusGrid grid(entry.dim, entry.points);
    const ScalarField u_star = random_smooth_field(grid, entry.amplitude, entry.seed);
    ManufacturedOptions mo = options;
    if (entry.tangential > 0.0 && mo.tangential_slope.empty()) {
        SeededUniform rng(entry.seed ^ 0x5bd1e995ULL);
        for (int k = 0; k < entry.dim; ++k) {
            const double phase = rng();
            mo.tangential_slope.push_back(ScalarField::sample(grid, [&](std::span<const double> x) {
                                              return entry.tangential * entry.epsilon *
                                                     std::sin(2.0 * std::numbers::pi * (x[k] + phase));
                                          }).values());
        }
    }
    ManufacturedCase mc = build_manufactured(u_star, entry.kappa, entry.epsilon, mo);
    mc.description = entry.name;
    return mc;
}

}  // namespace pmc
