#include "twogrid/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <tuple>
#include <vector>

namespace twogrid {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

class LineReader {
 public:
  LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  // Next line that is neither blank nor a comment.
  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_no_;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '%') continue;
      return true;
    }
    return false;
  }

  bool raw(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_no_;
    return true;
  }

  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream msg;
    msg << source_ << ":" << line_no_ << ": " << what;
    throw MatrixMarketError(msg.str());
  }

 private:
  std::istream& in_;
  std::string source_;
  long line_no_ = 0;
};

// strtod rather than operator>> so that "nan" and "inf" are recognized and
// reported as such instead of as malformed text.
bool read_value(std::istream& in, double& v) {
  std::string token;
  if (!(in >> token)) return false;
  char* end = nullptr;
  v = std::strtod(token.c_str(), &end);
  return end != token.c_str() && *end == '\0';
}

enum class Field { Real, Integer, Pattern };
enum class Symmetry { General, Symmetric, SkewSymmetric };

}  // namespace

Matrix read_matrix_market(std::istream& in, const std::string& source_name) {
  LineReader reader(in, source_name);
  std::string line;
  if (!reader.raw(line)) reader.fail("empty file");

  std::istringstream header(line);
  std::string banner, object, format, field_s, symmetry_s;
  header >> banner >> object >> format >> field_s >> symmetry_s;
  if (banner != "%%MatrixMarket") reader.fail("missing '%%MatrixMarket' banner");
  if (lower(object) != "matrix") reader.fail("unsupported object '" + object + "'");

  const std::string fmt = lower(format);
  if (fmt != "array" && fmt != "coordinate") reader.fail("unsupported format '" + format + "'");

  Field field;
  const std::string f = lower(field_s);
  if (f == "real" || f == "double") field = Field::Real;
  else if (f == "integer") field = Field::Integer;
  else if (f == "pattern") field = Field::Pattern;
  else reader.fail("unsupported field '" + field_s + "' (complex matrices are not supported)");
  if (fmt == "array" && field == Field::Pattern) reader.fail("pattern field requires coordinate format");

  Symmetry symmetry;
  const std::string sym = lower(symmetry_s);
  if (sym == "general") symmetry = Symmetry::General;
  else if (sym == "symmetric") symmetry = Symmetry::Symmetric;
  else if (sym == "skew-symmetric") symmetry = Symmetry::SkewSymmetric;
  else reader.fail("unsupported symmetry '" + symmetry_s + "'");

  if (!reader.next(line)) reader.fail("missing size line");
  std::istringstream size_line(line);
  long rows = 0, cols = 0, nnz = 0;
  if (fmt == "coordinate") {
    if (!(size_line >> rows >> cols >> nnz)) reader.fail("malformed size line, expected 'rows cols nnz'");
    if (nnz < 0) reader.fail("negative entry count");
  } else {
    if (!(size_line >> rows >> cols)) reader.fail("malformed size line, expected 'rows cols'");
  }
  if (rows < 1 || cols < 1) reader.fail("matrix dimensions must be positive");
  if (symmetry != Symmetry::General && rows != cols) reader.fail("symmetric storage requires a square matrix");

  Matrix m = Matrix::Zero(rows, cols);

  if (fmt == "coordinate") {
    for (long k = 0; k < nnz; ++k) {
      if (!reader.next(line)) reader.fail("unexpected end of file, expected " + std::to_string(nnz) + " entries");
      std::istringstream entry(line);
      long i = 0, j = 0;
      double v = 1.0;
      if (!(entry >> i >> j)) reader.fail("malformed entry, expected 'row col [value]'");
      if (field != Field::Pattern && !read_value(entry, v)) reader.fail("malformed entry, missing value");
      if (!std::isfinite(v)) reader.fail("NaN or Inf value");
      if (i < 1 || i > rows || j < 1 || j > cols) reader.fail("entry index out of range (indices are 1-based)");
      m(i - 1, j - 1) += v;
      if (i != j) {
        if (symmetry == Symmetry::Symmetric) m(j - 1, i - 1) += v;
        if (symmetry == Symmetry::SkewSymmetric) m(j - 1, i - 1) -= v;
      }
    }
  } else {
    // Column-major; symmetric storage lists the lower triangle only.
    for (long j = 0; j < cols; ++j) {
      const long start = symmetry == Symmetry::General ? 0 : (symmetry == Symmetry::Symmetric ? j : j + 1);
      for (long i = start; i < rows; ++i) {
        if (!reader.next(line)) reader.fail("unexpected end of file in array data");
        std::istringstream entry(line);
        double v = 0.0;
        if (!read_value(entry, v)) reader.fail("malformed array value");
        if (!std::isfinite(v)) reader.fail("NaN or Inf value");
        m(i, j) = v;
        if (i != j && symmetry == Symmetry::Symmetric) m(j, i) = v;
        if (i != j && symmetry == Symmetry::SkewSymmetric) m(j, i) = -v;
      }
    }
  }
  if (!m.allFinite()) reader.fail("matrix has NaN or Inf entries");
  return m;
}

Matrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MatrixMarketError(path + ": cannot open file");
  return read_matrix_market(in, path);
}

void write_matrix_market(std::ostream& out, const Matrix& m, MatrixMarketLayout layout) {
  require_finite(m, "write_matrix_market");
  std::ostringstream buf;
  buf.precision(17);
  if (layout == MatrixMarketLayout::Array) {
    buf << "%%MatrixMarket matrix array real general\n";
    buf << m.rows() << " " << m.cols() << "\n";
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) buf << m(i, j) << "\n";
  } else {
    std::vector<std::tuple<Eigen::Index, Eigen::Index, double>> entries;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        if (m(i, j) != 0.0) entries.emplace_back(i, j, m(i, j));
    buf << "%%MatrixMarket matrix coordinate real general\n";
    buf << m.rows() << " " << m.cols() << " " << entries.size() << "\n";
    for (const auto& [i, j, v] : entries) buf << (i + 1) << " " << (j + 1) << " " << v << "\n";
  }
  out << buf.str();
}

void write_matrix_market(const std::string& path, const Matrix& m, MatrixMarketLayout layout) {
  std::ofstream out(path);
  if (!out) throw MatrixMarketError(path + ": cannot open file for writing");
  write_matrix_market(out, m, layout);
  if (!out) throw MatrixMarketError(path + ": write failed");
}

}  // namespace twogrid
