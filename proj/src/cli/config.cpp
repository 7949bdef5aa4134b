#include "pmc/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "pmc/field_io.hpp"

namespace pmc::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, int line, const std::string& key) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ParseError("config line " + std::to_string(line) + ": key '" + key + "' expects a number, got '" + v + "'",
                         line, key);
    }
}

long long to_int(const std::string& v, int line, const std::string& key) {
    try {
        std::size_t used = 0;
        const long long x = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ParseError("config line " + std::to_string(line) + ": key '" + key + "' expects an integer, got '" + v +
                             "'",
                         line, key);
    }
}

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "grid.dim",          "grid.N",
        "solver.epsilon",    "solver.p",
        "solver.lambda_schedule", "solver.picard_tol",
        "solver.picard_max_iters", "solver.damping",
        "solver.linear_tol", "solver.linear_max_iters",
        "solver.shift_tol",  "solver.vertical_points",
        "field.source",      "field.g1",
        "field.g2",          "field.g3",
        "field.g4",          "field.file",
        "manufactured.u_star", "manufactured.amplitude",
        "manufactured.seed", "manufactured.kappa",
        "manufactured.tangential", "output.dir",
    };
    return keys;
}

}  // namespace

RunConfig RunConfig::parse(std::istream& in, const std::filesystem::path& base_dir) {
    RunConfig c;
    c.base_dir = base_dir;
    std::map<std::string, int> where;
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError("config line " + std::to_string(number) + ": expected 'key = value'", number);
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto& keys = known_keys();
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            throw ParseError("config line " + std::to_string(number) + ": unknown key '" + key + "'", number, key);
        }
        if (c.entries.count(key)) {
            throw ParseError("config line " + std::to_string(number) + ": duplicate key '" + key + "'", number, key);
        }
        if (value.empty()) {
            throw ParseError("config line " + std::to_string(number) + ": key '" + key + "' has no value", number, key);
        }
        c.entries[key] = value;
        where[key] = number;
    }

    auto get = [&](const std::string& key, const std::function<void(const std::string&, int)>& apply) {
        const auto it = c.entries.find(key);
        if (it != c.entries.end()) apply(it->second, where[key]);
    };
    auto fail = [&](const std::string& key, const std::string& what) {
        const int line = where.count(key) ? where[key] : 0;
        throw ParseError("config line " + std::to_string(line) + ": key '" + key + "': " + what, line, key);
    };

    get("grid.dim", [&](const std::string& v, int l) { c.dim = static_cast<int>(to_int(v, l, "grid.dim")); });
    if (c.dim < 1 || c.dim > 3) fail("grid.dim", "must be 1, 2 or 3");
    get("grid.N", [&](const std::string& v, int l) { c.points = static_cast<int>(to_int(v, l, "grid.N")); });
    try {
        TorusGrid(c.dim, c.points);
    } catch (const Error& e) {
        fail("grid.N", e.what());
    }

    auto& s = c.solver;
    get("solver.epsilon", [&](const std::string& v, int l) { s.epsilon = to_double(v, l, "solver.epsilon"); });
    get("solver.p", [&](const std::string& v, int l) { s.p = to_double(v, l, "solver.p"); });
    get("solver.lambda_schedule", [&](const std::string& v, int l) {
        s.lambda_schedule.clear();
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ',')) s.lambda_schedule.push_back(to_double(trim(item), l, "solver.lambda_schedule"));
    });
    get("solver.picard_tol", [&](const std::string& v, int l) { s.picard_tol = to_double(v, l, "solver.picard_tol"); });
    get("solver.picard_max_iters",
        [&](const std::string& v, int l) { s.picard_max_iters = static_cast<int>(to_int(v, l, "solver.picard_max_iters")); });
    get("solver.damping", [&](const std::string& v, int l) { s.damping = to_double(v, l, "solver.damping"); });
    get("solver.linear_tol", [&](const std::string& v, int l) { s.linear_tol = to_double(v, l, "solver.linear_tol"); });
    get("solver.linear_max_iters",
        [&](const std::string& v, int l) { s.linear_max_iters = static_cast<int>(to_int(v, l, "solver.linear_max_iters")); });
    get("solver.shift_tol", [&](const std::string& v, int l) { s.shift_tol = to_double(v, l, "solver.shift_tol"); });
    get("solver.vertical_points",
        [&](const std::string& v, int l) { s.vertical_points = static_cast<int>(to_int(v, l, "solver.vertical_points")); });
    try {
        s.validate(c.dim);
    } catch (const Error& e) {
        throw ParseError(std::string("config: invalid solver settings: ") + e.what(), 0, "solver");
    }

    get("field.source", [&](const std::string& v, int) { c.source = v; });
    if (c.source != "expr" && c.source != "file" && c.source != "manufactured") {
        fail("field.source", "must be expr, file or manufactured");
    }
    c.components.assign(c.dim + 1, std::nullopt);
    for (int k = 1; k <= 4; ++k) {
        const std::string key = "field.g" + std::to_string(k);
        if (!c.entries.count(key)) continue;
        if (k > c.dim + 1) fail(key, "component beyond n+1 = " + std::to_string(c.dim + 1));
        try {
            Expression e = Expression::parse(c.entries[key], c.dim);
            e.derivative_s();
            c.components[k - 1] = std::move(e);
        } catch (const ParseError& e) {
            fail(key, e.what());
        }
    }
    get("field.file", [&](const std::string& v, int) { c.field_file = v; });
    if (c.source == "file" && c.field_file.empty()) fail("field.source", "file source needs field.file");

    get("manufactured.u_star", [&](const std::string& v, int) {
        try {
            Expression e = Expression::parse(v, c.dim);
            if (e.depends_on_s()) fail("manufactured.u_star", "must not depend on s");
            c.u_star = std::move(e);
        } catch (const ParseError& e) {
            if (e.key() == "manufactured.u_star") throw;
            fail("manufactured.u_star", e.what());
        }
    });
    get("manufactured.amplitude",
        [&](const std::string& v, int l) { c.amplitude = to_double(v, l, "manufactured.amplitude"); });
    get("manufactured.seed", [&](const std::string& v, int l) {
        const long long x = to_int(v, l, "manufactured.seed");
        if (x < 0) fail("manufactured.seed", "must be non-negative");
        c.seed = static_cast<std::uint64_t>(x);
    });
    get("manufactured.kappa", [&](const std::string& v, int l) { c.kappa = to_double(v, l, "manufactured.kappa"); });
    get("manufactured.tangential",
        [&](const std::string& v, int l) { c.tangential = to_double(v, l, "manufactured.tangential"); });
    if (c.source == "manufactured") {
        if (!c.u_star && !c.entries.count("manufactured.amplitude")) {
            fail("field.source", "manufactured source needs manufactured.u_star or manufactured.amplitude");
        }
        if (!c.entries.count("manufactured.kappa")) fail("field.source", "manufactured source needs manufactured.kappa");
    }
    get("output.dir", [&](const std::string& v, int) { c.output_dir = v; });
    return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read config " + path.string());
    return parse(in, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

std::string RunConfig::echo() const {
    std::string out;
    for (const auto& [k, v] : entries) out += k + " = " + v + "\n";
    return out;
}

BuiltField build_field(const RunConfig& config, double epsilon, double amplitude_scale, bool strict) {
    const int n = config.dim;
    if (config.source == "file") {
        const auto path = config.field_file.is_absolute() ? config.field_file : config.base_dir / config.field_file;
        AmbientField g = read_ambient(path);
        if (g.dim() != n) throw ConfigurationError("field file dimension differs from grid.dim");
        return {g, std::nullopt};
    }
    if (config.source == "manufactured") {
        const TorusGrid grid = config.grid();
        ScalarField u_star(grid);
        if (config.u_star) {
            const auto f = config.u_star->compile(epsilon);
            u_star = ScalarField::sample(grid, [&](std::span<const double> x) { return f(x, 0.0); });
            u_star = amplitude_scale * u_star;
        } else {
            u_star = random_smooth_field(grid, config.amplitude * amplitude_scale, config.seed);
        }
        ManufacturedOptions mo;
        mo.strict = strict;
        mo.p = config.solver.p;
        mo.vertical_points = config.solver.vertical_points;
        const double kappa = config.kappa * epsilon / config.solver.epsilon;
        if (config.tangential > 0.0) {
            SeededUniform rng(config.seed ^ 0x5bd1e995ULL);
            for (int k = 0; k < n; ++k) {
                const double phase = rng();
                mo.tangential_slope.push_back(ScalarField::sample(grid, [&](std::span<const double> x) {
                                                  return config.tangential * epsilon *
                                                         std::sin(2.0 * std::numbers::pi * (x[k] + phase));
                                              }).values());
            }
        }
        ManufacturedCase mc = build_manufactured(u_star, kappa, epsilon, mo);
        mc.description = "manufactured";
        AmbientField g = mc.g;
        return {g, std::move(mc)};
    }
    std::vector<AnalyticComponent> comps;
    for (int c = 0; c <= n; ++c) {
        const auto& e = config.components[c];
        if (!e) {
            comps.push_back({[](std::span<const double>, double) { return 0.0; },
                             [](std::span<const double>, double) { return 0.0; }});
            continue;
        }
        comps.push_back({e->compile(epsilon), e->derivative_s().compile(epsilon)});
    }
    return {AmbientField::analytic(n, std::move(comps)), std::nullopt};
}

}  // namespace pmc::cli
