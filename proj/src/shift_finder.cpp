#include "pmc/shift_finder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pmc {

Eigen::VectorXd normal_vector(std::span<const double> z) {
    const int n = static_cast<int>(z.size());
    Eigen::VectorXd nu(n + 1);
    double sq = 0.0;
    for (double zi : z) sq += zi * zi;
    const double inv = 1.0 / std::sqrt(1.0 + sq);
    for (int k = 0; k < n; ++k) nu[k] = -z[k] * inv;
    nu[n] = inv;
    return nu;
}

ShiftProblem::ShiftProblem(ScalarField v, AmbientField g, double epsilon)
    : v_(std::move(v)), g_(std::move(g)), epsilon_(epsilon), c1_norm_(pmc::c1_norm(v_)) {
    if (g_.dim() != v_.grid().dim()) throw DimensionError("shift problem: field and graph dimensions differ");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("shift problem: epsilon must lie in (0, 1)");
    const double lo = v_.values().minCoeff() - kBracket;
    const double hi = v_.values().maxCoeff() + kBracket;
    if (!g_.in_band(lo) || !g_.in_band(hi)) {
        std::ostringstream msg;
        msg << "graph range [" << lo << ", " << hi << "] over the shift bracket leaves the band (" << g_.band_lower()
            << ", " << g_.band_upper() << ")";
        throw DomainError(msg.str());
    }
    const auto grad = gradient(v_);
    const int n = grid().dim();
    Eigen::ArrayXd inv = Eigen::ArrayXd::Ones(grid().size());
    for (int k = 0; k < n; ++k) inv += grad.component(k).square();
    inv = inv.rsqrt();
    for (int k = 0; k < n; ++k) normal_.push_back(-grad.component(k) * inv);
    normal_.push_back(inv);
}

Eigen::ArrayXd flux_density(const ShiftProblem& problem, double t) {
    const auto gv = problem.field().eval_on_graph(problem.grid(), problem.v().values() + t);
    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(problem.grid().size());
    for (std::size_t c = 0; c < gv.size(); ++c) out += problem.normal()[c] * gv[c];
    return out;
}

double eval_F(const ShiftProblem& problem, double t) { return flux_density(problem, t).mean(); }

std::vector<std::pair<double, double>> sample_F(const ShiftProblem& problem, int count) {
    if (count < 2) throw DomainError("sample_F: need at least two points");
    std::vector<std::pair<double, double>> out;
    for (int i = 0; i < count; ++i) {
        const double t = -ShiftProblem::kBracket + 2.0 * ShiftProblem::kBracket * i / (count - 1);
        out.emplace_back(t, eval_F(problem, t));
    }
    return out;
}

ShiftResult find_shift(const ShiftProblem& problem, const ShiftOptions& options) {
    return find_shift(problem, -ShiftProblem::kBracket, ShiftProblem::kBracket, options);
}

ShiftResult find_shift(const ShiftProblem& problem, double lower, double upper, const ShiftOptions& options) {
    if (!(lower >= -ShiftProblem::kBracket && upper <= ShiftProblem::kBracket && lower < upper)) {
        throw DomainError("find_shift: bracket must be a subinterval of [-1/4, 1/4]");
    }
    const double target = options.tolerance * problem.epsilon();
    std::vector<std::pair<double, double>> seen;
    double noise = 0.0;
    auto F = [&](double t) {
        const Eigen::ArrayXd density = flux_density(problem, t);
        noise = std::max(noise, 16.0 * std::numeric_limits<double>::epsilon() * density.abs().mean());
        const double f = density.mean();
        seen.emplace_back(t, f);
        return f;
    };

    double a = lower, b = upper;
    double fa = F(a), fb = F(b);
    if (!(fa < 0.0 && fb > 0.0)) {
        std::ostringstream msg;
        msg << "shift bracket sign condition failed: F(" << a << ")=" << fa << ", F(" << b << ")=" << fb;
        throw BracketError(msg.str(), fa, fb);
    }

    ShiftResult r;
    double best = std::abs(fa) < std::abs(fb) ? a : b;
    double fbest = std::abs(fa) < std::abs(fb) ? fa : fb;
    while (std::abs(fbest) > target && static_cast<int>(seen.size()) < options.max_evaluations) {
        const double m = 0.5 * (a + b);
        if (!(m > a && m < b)) break;
        const double fm = F(m);
        if (std::abs(fm) < std::abs(fbest)) {
            best = m;
            fbest = fm;
        }
        if (fm < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }

    // Secant polish inside the final bracket.
    if (fbest != 0.0 && static_cast<int>(seen.size()) < options.max_evaluations && fb > fa) {
        const double s = a - fa * (b - a) / (fb - fa);
        if (s > a && s < b) {
            const double fs = F(s);
            if (std::abs(fs) < std::abs(fbest)) {
                best = s;
                fbest = fs;
            }
        }
    }

    r.c = best;
    r.residual = fbest;
    r.evaluations = static_cast<int>(seen.size());
    std::sort(seen.begin(), seen.end());
    for (std::size_t i = 1; i < seen.size(); ++i) {
        // Differences below the summation noise floor are not evidence either way.
        const double rise = seen[i].second - seen[i - 1].second;
        const double gap = seen[i].first - seen[i - 1].first;
        if (rise < -noise || (gap > 1e-6 && !(rise > 0.0))) {
            std::ostringstream msg;
            msg << "F not strictly increasing between t=" << seen[i - 1].first << " and t=" << seen[i].first;
            r.warning = msg.str();
            break;
        }
    }
    if (std::abs(fbest) > target) {
        std::ostringstream msg;
        msg << "shift root-find stopped at |F(c)|=" << std::abs(fbest) << " above " << target;
        throw Error(msg.str());
    }
    return r;
}

}  // namespace pmc
