#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "fastalm/types.hpp"

namespace fastalm {

/// MatrixMarket "array real general" files.
///
/// The header line is `%%MatrixMarket matrix array real general`, followed by
/// `rows cols` and one value per line in column-major order (all of column 0,
/// then column 1, ...). Values are written with 17 significant digits so that
/// a write/read cycle reproduces every double exactly. Reading accepts
/// comment lines starting with '%' after the header.
void write_matrix_market(std::ostream& os, const Matrix& m);
Matrix read_matrix_market(std::istream& is);

void save_matrix_market(const std::filesystem::path& path, const Matrix& m);
Matrix load_matrix_market(const std::filesystem::path& path);

/// Shortest-exact "%.17g" rendering shared by all text outputs.
std::string format_double(double v);

}  // namespace fastalm
