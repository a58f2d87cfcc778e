#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <limits>

#include "oracles.hpp"
#include "twogrid/linalg.hpp"
#include "twogrid/model.hpp"

using namespace twogrid;

namespace {

TolerancePolicy policy(std::size_t n) { return TolerancePolicy::for_dimension(n); }

Matrix diag(std::initializer_list<double> v) {
  Vector d(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) d(i++) = x;
  return d.asDiagonal();
}

}  // namespace

TEST_SUITE("linalg") {
  TEST_CASE("sym_eig on a diagonal matrix returns sorted values and permuted unit vectors") {
    const SymEigen e = sym_eig(diag({3, 1, 2}));
    CHECK(e.values(0) == 1.0);
    CHECK(e.values(1) == 2.0);
    CHECK(e.values(2) == 3.0);
    Matrix expected = Matrix::Zero(3, 3);
    expected(1, 0) = 1.0;
    expected(2, 1) = 1.0;
    expected(0, 2) = 1.0;
    CHECK(max_abs(e.vectors - expected) == 0.0);
  }

  TEST_CASE("sym_eig on the 2x2 swap matrix") {
    Matrix s(2, 2);
    s << 0, 1, 1, 0;
    const SymEigen e = sym_eig(s);
    CHECK(e.values(0) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(e.values(1) == doctest::Approx(1.0).epsilon(1e-15));
    const double h = 1.0 / std::sqrt(2.0);
    // Largest-magnitude entry is made positive, the first one on ties.
    CHECK(e.vectors(0, 0) == doctest::Approx(h));
    CHECK(e.vectors(1, 0) == doctest::Approx(-h));
    CHECK(e.vectors(0, 1) == doctest::Approx(h));
    CHECK(e.vectors(1, 1) == doctest::Approx(h));
  }

  TEST_CASE("sym_eig reconstructs random symmetric matrices and matches Eigen") {
    for (Eigen::Index n : {1, 2, 5, 12, 30}) {
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const Matrix s = oracle::random_symmetric(n, 100 + seed);
        const SymEigen e = sym_eig(s);
        const double scale = s.norm();
        CHECK(max_abs(e.vectors * e.values.asDiagonal() * e.vectors.transpose() - s) <= 1e-12 * scale);
        CHECK(max_abs(e.vectors.transpose() * e.vectors - Matrix::Identity(n, n)) <= 1e-13);
        CHECK(max_abs(e.values - oracle::eigenvalues(s)) <= 1e-12 * scale);
        for (Eigen::Index i = 1; i < n; ++i) CHECK(e.values(i - 1) <= e.values(i));
      }
    }
  }

  TEST_CASE("sym_eig handles repeated eigenvalues") {
    const Matrix q = oracle::random_matrix(6, 6, 5).householderQr().householderQ();
    const Matrix s = q * diag({1, 1, 1, 4, 4, 9}) * q.transpose();
    const SymEigen e = sym_eig(s);
    CHECK(max_abs(e.values - Vector((Vector(6) << 1, 1, 1, 4, 4, 9).finished())) <= 1e-13);
    CHECK(max_abs(e.vectors * e.values.asDiagonal() * e.vectors.transpose() - s) <= 1e-13 * s.norm());
  }

  TEST_CASE("sym_eig is deterministic bitwise") {
    const Matrix s = oracle::random_symmetric(17, 9);
    const SymEigen a = sym_eig(s);
    const SymEigen b = sym_eig(s);
    CHECK((a.values.array() == b.values.array()).all());
    CHECK((a.vectors.array() == b.vectors.array()).all());
  }

  TEST_CASE("sym_eig rejects non-square and non-finite input") {
    CHECK_THROWS_AS(sym_eig(Matrix::Zero(2, 3)), Error);
    Matrix s = Matrix::Identity(3, 3);
    s(1, 2) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(sym_eig(s), Error);
    s(1, 2) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(sym_eig(s), Error);
  }

  TEST_CASE("spsd_certify on diag(2,0)") {
    const SpsdOperator s = spsd_certify(diag({2, 0}), policy(2));
    CHECK(s.rank == 1);
    CHECK(max_abs(s.sqrt - diag({std::sqrt(2.0), 0})) <= 1e-15);
    CHECK(max_abs(s.pinv - diag({0.5, 0})) <= 1e-15);
  }

  TEST_CASE("spsd_certify on the identity") {
    const SpsdOperator s = spsd_certify(Matrix::Identity(4, 4), policy(4));
    CHECK(s.rank == 4);
    CHECK(max_abs(s.sqrt - Matrix::Identity(4, 4)) <= 1e-15);
    CHECK(max_abs(s.pinv - Matrix::Identity(4, 4)) <= 1e-15);
  }

  TEST_CASE("Neumann Laplacian n=6 has rank 5 and a constant null vector") {
    const Matrix a = neumann_laplacian_1d(6);
    CHECK(max_abs(a * Vector::Ones(6)) == 0.0);
    const SpsdOperator s = spsd_certify(a, policy(6));
    CHECK(s.rank == 5);
    const Matrix z = range_null_bases(s).null;
    REQUIRE(z.cols() == 1);
    const Vector c = Vector::Constant(6, 1.0 / std::sqrt(6.0));
    CHECK(std::abs(std::abs(z.col(0).dot(c)) - 1.0) <= 1e-13);
  }

  TEST_CASE("spsd_certify rejects indefinite, asymmetric and zero input") {
    try {
      spsd_certify(diag({1, -0.5}), policy(2));
      FAIL("expected NotSpsdError");
    } catch (const NotSpsdError& e) {
      CHECK(e.min_eigenvalue() == doctest::Approx(-0.5));
    }
    Matrix asym = Matrix::Identity(2, 2);
    asym(0, 1) = 0.5;
    CHECK_THROWS_AS(spsd_certify(asym, policy(2)), Error);
    CHECK_THROWS_AS(spsd_certify(Matrix::Zero(3, 3), policy(3)), Error);
    CHECK_THROWS_AS(spsd_certify(Matrix::Zero(2, 3), policy(3)), Error);
  }

  TEST_CASE("spsd_certify clamps tiny negative drift") {
    const SpsdOperator s = spsd_certify(diag({1, -1e-13}), policy(2));
    CHECK(s.rank == 1);
    CHECK(s.eig.values(0) == 0.0);
  }

  TEST_CASE("certified operators satisfy the Penrose identities and the sqrt invariants") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      const Eigen::Index n = 9;
      const Eigen::Index k = 2 + static_cast<Eigen::Index>(seed);
      const Matrix g = oracle::random_matrix(k, n, seed);
      const SpsdOperator s = spsd_certify(g.transpose() * g, policy(n));
      const double lmax = s.lambda_max();
      CHECK(s.rank == static_cast<std::size_t>(std::min(k, n)));
      CHECK(penrose_residual(s) <= s.tol.match_tol);
      CHECK(max_abs(s.sqrt * s.sqrt - s.matrix) <= s.tol.match_tol * lmax);
      CHECK(max_abs(s.sqrt * s.matrix - s.matrix * s.sqrt) <= s.tol.match_tol * lmax);
      CHECK(oracle::eigenvalues(s.sqrt).minCoeff() >= -1e-12 * std::sqrt(lmax));
      CHECK(max_abs(s.pinv - oracle::pinv(s.matrix)) <= 1e-9 * max_abs(s.pinv));

      const RangeNullBases b = range_null_bases(s);
      CHECK(b.range.cols() == static_cast<Eigen::Index>(s.rank));
      CHECK(b.null.cols() == n - static_cast<Eigen::Index>(s.rank));
      Matrix all(n, n);
      all << b.range, b.null;
      CHECK(max_abs(all.transpose() * all - Matrix::Identity(n, n)) <= s.tol.match_tol);
      if (b.null.cols() > 0) {
        CHECK(max_abs(s.matrix * b.null) <= 1e-10 * lmax);
        CHECK(max_abs(s.sqrt * b.null) <= 1e-10 * std::sqrt(lmax));
      }
    }
  }

  TEST_CASE("numerical_rank examples") {
    CHECK(numerical_rank(spsd_certify(diag({1, 1, 0}), policy(3))) == 2);
    GraphLaplacian g;
    g.nodes = 10;
    g.edges = {{0, 1, 1.0}, {1, 2, 2.0}, {3, 4, 1.0}, {5, 6, 1.0}, {6, 7, 0.5}, {7, 5, 1.0}, {8, 9, 3.0}};
    const Matrix l = graph_laplacian(g);
    const std::size_t c = oracle::components(l);
    CHECK(c == 4);
    CHECK(numerical_rank(spsd_certify(l, policy(10))) == 10 - c);
  }

  TEST_CASE("range_null_bases examples") {
    const RangeNullBases b = range_null_bases(spsd_certify(diag({2, 0}), policy(2)));
    CHECK(std::abs(b.range(0, 0)) == 1.0);
    CHECK(std::abs(b.null(1, 0)) == 1.0);
    const RangeNullBases nb = range_null_bases(spsd_certify(neumann_laplacian_1d(4), policy(4)));
    CHECK(max_abs(nb.null - Vector::Constant(4, 0.5)) <= 1e-14);

    const Matrix g = oracle::random_matrix(3, 8, 21);
    const SpsdOperator s = spsd_certify(g.transpose() * g, policy(8));
    CHECK(s.rank == 3);
    CHECK(max_abs(s.matrix * range_null_bases(s).null) <= 1e-10 * s.lambda_max());
  }

  TEST_CASE("null_intersection_dim examples") {
    const double tol = 1e-12;
    Matrix k1(1, 2), k2(1, 2);
    k1 << 1, 0;
    k2 << 0, 1;
    CHECK(null_intersection_dim(k1, k2, tol) == 0);
    CHECK(null_intersection_dim(Matrix::Zero(2, 2), Matrix::Zero(2, 2), tol) == 2);
    CHECK_THROWS_AS(null_intersection_dim(Matrix::Zero(2, 2), Matrix::Zero(2, 3), tol), Error);

    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      // Rank-deficient blocks so the intersection is nontrivial.
      const Matrix k1r = oracle::random_matrix(3, 2, seed) * oracle::random_matrix(2, 6, seed + 50);
      const Matrix k2r = oracle::random_matrix(2, 6, seed + 99);
      Matrix stacked(5, 6);
      stacked << k1r, k2r;
      Eigen::FullPivLU<Matrix> lu(stacked);
      const auto expected = static_cast<std::size_t>(6 - lu.rank());
      CHECK(null_intersection_dim(k1r, k2r, tol) == expected);
    }
  }

  TEST_CASE("psd_nullity reports its margins") {
    const NullityDecision d = psd_nullity(diag({0, 1e-20, 0.5, 1}), 1e-12);
    CHECK(d.nullity == 2);
    CHECK(d.largest_discarded == doctest::Approx(1e-20));
    CHECK(d.smallest_retained == doctest::Approx(0.5));
  }

  TEST_CASE("tolerance policy defaults, validation and environment overrides") {
    const TolerancePolicy p = TolerancePolicy::for_dimension(10);
    CHECK(p.rank_rel_tol == doctest::Approx(320 * std::numeric_limits<double>::epsilon()));
    CHECK(p.psd_slack == 1e-10);
    CHECK(p.match_tol == 1e-10);
    TolerancePolicy bad = p;
    bad.match_tol = 0.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad.match_tol = 1.0;
    CHECK_THROWS_AS(bad.validate(), Error);

    ::setenv("RANK_REL_TOL", "1e-9", 1);
    ::setenv("MATCH_TOL", "1e-8", 1);
    const TolerancePolicy q = ToleranceOverrides::from_env().resolve(10);
    ::unsetenv("RANK_REL_TOL");
    ::unsetenv("MATCH_TOL");
    CHECK(q.rank_rel_tol == 1e-9);
    CHECK(q.match_tol == 1e-8);

    ::setenv("MATCH_TOL", "abc", 1);
    CHECK_THROWS_AS(ToleranceOverrides::from_env(), Error);
    ::unsetenv("MATCH_TOL");
  }
}
