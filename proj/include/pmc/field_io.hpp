#pragma once

#include <filesystem>
#include <iosfwd>

#include "pmc/ambient_field.hpp"
#include "pmc/torus_grid.hpp"

namespace pmc {

// Text formats. Values are written with 17 significant digits so a write/read
// round trip reproduces doubles exactly.
//
//   pmc-field v1 dim=<n> N=<N>          then N^n values, row-major
//   pmc-ambient v1 dim=<n> N=<N> M=<M>  then (n+1)*N^n*M values, component-major,
//                                       then row-major over the torus, then vertical
//
// Vertical nodes of an ambient file are s_j = -1 + 2j/(M-1), j = 0..M-1.

void write_field(std::ostream& out, const ScalarField& u);
ScalarField read_field(std::istream& in);
void write_field(const std::filesystem::path& path, const ScalarField& u);
ScalarField read_field(const std::filesystem::path& path);

/// Only sampled fields spanning the full vertical interval [-1, 1] can be written.
void write_ambient(std::ostream& out, const AmbientField& g);
AmbientField read_ambient(std::istream& in);
void write_ambient(const std::filesystem::path& path, const AmbientField& g);
AmbientField read_ambient(const std::filesystem::path& path);

}  // namespace pmc
