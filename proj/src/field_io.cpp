#include "pmc/field_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace pmc {

namespace {

// Parses "magic v1 key=value ..." and returns the integer values in order.
std::vector<int> parse_header(std::istream& in, const std::string& magic, const std::vector<std::string>& keys) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty " + magic + " file", 1);
    std::istringstream hs(line);
    std::string word, version;
    hs >> word >> version;
    if (word != magic || version != "v1") throw ParseError("expected header '" + magic + " v1 ...'", 1);
    std::vector<int> out;
    for (const auto& key : keys) {
        std::string tok;
        if (!(hs >> tok) || tok.rfind(key + "=", 0) != 0) throw ParseError("header is missing " + key + "=", 1, key);
        try {
            std::size_t used = 0;
            const std::string num = tok.substr(key.size() + 1);
            out.push_back(std::stoi(num, &used));
            if (used != num.size()) throw std::invalid_argument(num);
        } catch (const std::exception&) {
            throw ParseError("bad integer in header: " + tok, 1, key);
        }
    }
    return out;
}

void read_values(std::istream& in, double* dst, Index count) {
    for (Index i = 0; i < count; ++i) {
        std::string tok;
        if (!(in >> tok)) throw ParseError("file ended after " + std::to_string(i) + " of " + std::to_string(count) + " values");
        try {
            std::size_t used = 0;
            dst[i] = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ParseError("not a number: '" + tok + "' at value " + std::to_string(i));
        }
        if (!std::isfinite(dst[i])) throw ParseError("non-finite value at position " + std::to_string(i));
    }
    std::string extra;
    if (in >> extra) throw ParseError("trailing data after " + std::to_string(count) + " values");
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigurationError("cannot write " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError("cannot read " + path.string());
    return in;
}

}  // namespace

void write_field(std::ostream& out, const ScalarField& u) {
    const auto& grid = u.grid();
    out << "pmc-field v1 dim=" << grid.dim() << " N=" << grid.points_per_axis() << '\n';
    out << std::setprecision(17);
    for (Index i = 0; i < u.size(); ++i) out << u[i] << '\n';
}

ScalarField read_field(std::istream& in) {
    const auto h = parse_header(in, "pmc-field", {"dim", "N"});
    const TorusGrid grid(h[0], h[1]);
    Eigen::ArrayXd v(grid.size());
    read_values(in, v.data(), grid.size());
    return ScalarField(grid, std::move(v));
}

void write_field(const std::filesystem::path& path, const ScalarField& u) {
    auto out = open_out(path);
    write_field(out, u);
}

ScalarField read_field(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_field(in);
}

void write_ambient(std::ostream& out, const AmbientField& g) {
    if (!g.is_sampled()) throw ConfigurationError("only sampled ambient fields can be written");
    const auto& lat = g.lattice();
    const auto full = VerticalLattice::unit_interval(lat.count);
    if (std::abs(lat.first - full.first) > 1e-12 || std::abs(lat.spacing - full.spacing) > 1e-12) {
        throw ConfigurationError("ambient file format needs a lattice spanning [-1, 1]");
    }
    const auto& grid = g.sample_grid();
    out << "pmc-ambient v1 dim=" << grid.dim() << " N=" << grid.points_per_axis() << " M=" << lat.count << '\n';
    out << std::setprecision(17);
    for (int c = 0; c < g.components(); ++c) {
        const auto& v = g.samples(c);
        for (Index i = 0; i < grid.size(); ++i) {
            for (int j = 0; j < lat.count; ++j) out << v(j, i) << '\n';
        }
    }
}

AmbientField read_ambient(std::istream& in) {
    const auto h = parse_header(in, "pmc-ambient", {"dim", "N", "M"});
    const TorusGrid grid(h[0], h[1]);
    const int m = h[2];
    if (m < 16) throw ParseError("M must be at least 16", 1, "M");
    std::vector<Eigen::MatrixXd> values;
    Eigen::ArrayXd flat(static_cast<Index>(grid.dim() + 1) * grid.size() * m);
    read_values(in, flat.data(), flat.size());
    for (int c = 0; c <= grid.dim(); ++c) {
        // Column-major (M x N^n) matches "row-major torus, then vertical".
        values.push_back(Eigen::Map<const Eigen::MatrixXd>(flat.data() + c * grid.size() * m, m, grid.size()));
    }
    return AmbientField::sampled(grid, m, std::move(values));
}

void write_ambient(const std::filesystem::path& path, const AmbientField& g) {
    auto out = open_out(path);
    write_ambient(out, g);
}

AmbientField read_ambient(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_ambient(in);
}

}  // namespace pmc
