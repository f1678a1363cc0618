#include "fastalm/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "fastalm/error.hpp"

namespace fastalm {

namespace {

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool next_content_line(std::istream& is, std::string& line) {
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '%') continue;
    return true;
  }
  return false;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_matrix_market(std::ostream& os, const Matrix& m) {
  os << "%%MatrixMarket matrix array real general\n";
  os << m.rows() << ' ' << m.cols() << '\n';
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) os << format_double(m(i, j)) << '\n';
}

Matrix read_matrix_market(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("MatrixMarket: empty input");
  std::istringstream header(lowercase(line));
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%matrixmarket" || object != "matrix")
    throw IoError("MatrixMarket: missing banner");
  if (format != "array" || field != "real" || symmetry != "general")
    throw IoError("MatrixMarket: only 'array real general' is supported, got '" + format + " " +
                  field + " " + symmetry + "'");

  if (!next_content_line(is, line)) throw IoError("MatrixMarket: missing size line");
  std::istringstream size_line(line);
  long long rows = -1, cols = -1;
  size_line >> rows >> cols;
  if (!size_line || rows < 0 || cols < 0) throw IoError("MatrixMarket: bad size line '" + line + "'");

  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      if (!next_content_line(is, line))
        throw IoError("MatrixMarket: expected " + std::to_string(rows * cols) + " values");
      const auto first = line.find_first_not_of(" \t");
      const char* begin = line.data() + first;
      const char* end = line.data() + line.size();
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(begin, end, v);
      if (ec != std::errc()) throw IoError("MatrixMarket: bad value '" + line + "'");
      m(i, j) = v;
    }
  }
  return m;
}

void save_matrix_market(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_matrix_market(os, m);
  if (!os) throw IoError("write failed: " + path.string());
}

Matrix load_matrix_market(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  return read_matrix_market(is);
}

}  // namespace fastalm
