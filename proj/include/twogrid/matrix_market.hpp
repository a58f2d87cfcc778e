#pragma once

#include <iosfwd>
#include <string>

#include "twogrid/linalg.hpp"

namespace twogrid {

/// Malformed or unreadable MatrixMarket input; the message carries file:line.
class MatrixMarketError : public Error {
 public:
  using Error::Error;
};

enum class MatrixMarketLayout { Array, Coordinate };

/// Reads a real MatrixMarket matrix (array or coordinate; general, symmetric
/// or skew-symmetric; real, integer or pattern). Symmetric storage is expanded.
Matrix read_matrix_market(const std::string& path);
Matrix read_matrix_market(std::istream& in, const std::string& source_name);

/// Writes a general real matrix with 17 significant digits, so a write/read
/// round trip is exact.
void write_matrix_market(const std::string& path, const Matrix& m,
                         MatrixMarketLayout layout = MatrixMarketLayout::Array);
void write_matrix_market(std::ostream& out, const Matrix& m,
                         MatrixMarketLayout layout = MatrixMarketLayout::Array);

}  // namespace twogrid
