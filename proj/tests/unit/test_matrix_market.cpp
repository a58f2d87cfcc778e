#include <doctest.h>

#include <sstream>
#include <string>

#include "oracles.hpp"
#include "twogrid/matrix_market.hpp"

using namespace twogrid;

namespace {

Matrix parse(const std::string& text) {
  std::istringstream in(text);
  return read_matrix_market(in, "input.mtx");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const MatrixMarketError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("matrix_market") {
  TEST_CASE("array general") {
    const Matrix m = parse("%%MatrixMarket matrix array real general\n% comment\n2 2\n1\n3\n2\n4\n");
    Matrix e(2, 2);
    e << 1, 2, 3, 4;
    CHECK(m == e);
  }

  TEST_CASE("coordinate symmetric is expanded") {
    const Matrix m = parse("%%MatrixMarket matrix coordinate real symmetric\n3 3 4\n1 1 2\n2 1 -1\n2 2 2\n3 3 1\n");
    Matrix e(3, 3);
    e << 2, -1, 0, -1, 2, 0, 0, 0, 1;
    CHECK(m == e);
  }

  TEST_CASE("array symmetric lists the lower triangle") {
    const Matrix m = parse("%%MatrixMarket matrix array real symmetric\n2 2\n1\n5\n3\n");
    Matrix e(2, 2);
    e << 1, 5, 5, 3;
    CHECK(m == e);
  }

  TEST_CASE("pattern, integer and skew-symmetric fields") {
    const Matrix p = parse("%%MatrixMarket matrix coordinate pattern general\n2 2 2\n1 2\n2 1\n");
    CHECK(p(0, 1) == 1.0);
    CHECK(p(1, 0) == 1.0);
    const Matrix i = parse("%%MatrixMarket matrix coordinate integer general\n1 2 1\n1 2 7\n");
    CHECK(i(0, 1) == 7.0);
    const Matrix s = parse("%%MatrixMarket matrix coordinate real skew-symmetric\n2 2 1\n2 1 3\n");
    CHECK(s(1, 0) == 3.0);
    CHECK(s(0, 1) == -3.0);
  }

  TEST_CASE("errors carry source and line") {
    CHECK(error_of("") == "input.mtx:0: empty file");
    CHECK(error_of("%%MatrixMarket matrix array complex general\n1 1\n1\n").find("input.mtx:1:") == 0);
    CHECK(error_of("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n").find("input.mtx:3: entry index out of range") == 0);
    CHECK(error_of("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n").find("unexpected end of file") != std::string::npos);
    CHECK(error_of("%%MatrixMarket matrix array real general\n2 x\n").find("input.mtx:2: malformed size line") == 0);
    CHECK(error_of("not a header\n").find("banner") != std::string::npos);
    CHECK(error_of("%%MatrixMarket matrix array real general\n1 1\nnan\n").find("NaN") != std::string::npos);
    CHECK_THROWS_AS(read_matrix_market("/nonexistent/file.mtx"), MatrixMarketError);
  }

  TEST_CASE("write/read round trip is exact in both layouts") {
    const Matrix m = oracle::random_matrix(5, 3, 4) * 1e-3;
    for (auto layout : {MatrixMarketLayout::Array, MatrixMarketLayout::Coordinate}) {
      std::stringstream buf;
      write_matrix_market(buf, m, layout);
      CHECK(read_matrix_market(buf, "buf") == m);
    }
  }
}
