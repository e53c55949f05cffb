// Field and table I/O.
//
// 1D fields travel as CSV: a short '#' header carrying the grid layout, then
// one value per line, printed with %.17g so a read-back reproduces the exact
// doubles. 2D fields travel as plain-text PGM (P2) rescaled to 0..255, with a
// JSON sidecar recording the affine rescale and grid layout; quantization
// happens once, after which write/read/write is byte-stable. Tabulated
// weights load from a pair CSV of (i, j, value) lines.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nlgrad/grid.h"

namespace nlgrad {

// A field loaded from disk; `grid` owns the layout the values refer to.
// field() binds to this object's grid, so keep the FieldFile alive as long
// as the ScalarField is in use.
struct FieldFile {
    DomainGrid grid;
    std::vector<double> values;
    ScalarField field() const { return ScalarField(grid, values); }
};

// 1D only; a 2D field goes through the PGM pair instead.
void write_field_csv(const std::string& path, const ScalarField& u);
FieldFile read_field_csv(const std::string& path);

// 2D only; writes <base>.pgm and <base>.json.
void write_field_pgm(const std::string& base, const ScalarField& u);
FieldFile read_field_pgm(const std::string& pgm_path);

// (i, j, value) lines, blank/comment lines skipped; returns the inferred row
// count n and the dense n*n table (missing pairs stay zero).
std::pair<std::size_t, std::vector<double>> read_pair_csv(const std::string& path);

// Comma-separated numeric table with one '#'-prefixed column header line.
void write_table_csv(const std::string& path, const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows);

// Space-separated columns for plotting, in the given column order.
void emit_plotdata(const std::string& path, const std::vector<std::vector<double>>& rows);

// FNV-1a over raw bytes; digest strings identify inputs in reports.
std::uint64_t fnv1a(const void* data, std::size_t bytes);
std::string field_digest(const ScalarField& u);

}  // namespace nlgrad
