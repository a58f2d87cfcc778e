#include <doctest.h>

#include <string>

#include "oracles.hpp"
#include "twogrid/model.hpp"

using namespace twogrid;

namespace {

SpsdOperator certify(const Matrix& a) { return spsd_certify(a, TolerancePolicy::for_dimension(a.rows())); }

TwoGridHierarchy hierarchy(const Matrix& a, const Matrix& p, const SmootherSpec& spec) {
  const SpsdOperator op = certify(a);
  return build_hierarchy(op, p, spec, op.tol);
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("Jacobi on a unit-diagonal matrix is a scaled identity") {
    Matrix a = Matrix::Identity(3, 3);
    a(0, 1) = a(1, 0) = 0.3;
    const SmootherResult r = build_smoother(WeightedJacobi{0.5}, certify(a));
    CHECK(max_abs(r.m - 0.5 * Matrix::Identity(3, 3)) == 0.0);
    CHECK(r.warnings.empty());
  }

  TEST_CASE("Gauss-Seidel on the 2x2 model problem") {
    Matrix a(2, 2);
    a << 2, -1, -1, 2;
    const Matrix m = build_smoother(GaussSeidel{}, certify(a)).m;
    Matrix e(2, 2);
    e << 0.5, 0, 0.25, 0.5;
    CHECK(max_abs(m - e) <= 1e-16);
  }

  TEST_CASE("Jacobi 2/3 on the Neumann Laplacian n=8 gives an SPD M-bar matching the closed form") {
    const SpsdOperator a = certify(neumann_laplacian_1d(8));
    const double w = 2.0 / 3.0;
    const Matrix m = build_smoother(WeightedJacobi{w}, a).m;
    const Matrix mb = mbar(m, a);
    const Vector dinv = a.matrix.diagonal().cwiseInverse();
    const Matrix closed = w * w * dinv.asDiagonal() * (2.0 / w * Matrix(a.matrix.diagonal().asDiagonal()) - a.matrix) *
                          dinv.asDiagonal();
    CHECK(max_abs(mb - closed) <= 1e-14);
    CHECK(oracle::eigenvalues(mb).minCoeff() > 0.0);
    CHECK(jacobi_omega_limit(a) > w);
  }

  TEST_CASE("Jacobi warns outside the stability interval and rejects nonpositive weights") {
    const SpsdOperator a = certify(neumann_laplacian_1d(8));
    const SmootherResult r = build_smoother(WeightedJacobi{1.5}, a);
    CHECK(r.warnings.size() == 1);
    CHECK_THROWS_AS(build_smoother(WeightedJacobi{0.0}, a), Error);
    CHECK_THROWS_AS(build_smoother(WeightedJacobi{-1.0}, a), Error);
  }

  TEST_CASE("zero diagonal entry is rejected with its index and the reduction recipe") {
    Matrix a = Matrix::Zero(3, 3);
    a(0, 0) = a(1, 1) = 1;
    a(0, 1) = a(1, 0) = -1;
    const SpsdOperator op = certify(a);
    for (const SmootherSpec& s : {SmootherSpec{WeightedJacobi{}}, SmootherSpec{GaussSeidel{}}}) {
      try {
        build_smoother(s, op);
        FAIL("expected rejection");
      } catch (const Error& e) {
        const std::string what = e.what();
        CHECK(what.find("index 2") != std::string::npos);
        CHECK(what.find("reduced") != std::string::npos);
      }
    }
  }

  TEST_CASE("mbar and mtilde examples") {
    const SpsdOperator a = certify(neumann_laplacian_1d(6));  // lambda_max < 4, scale to <= 2
    const SpsdOperator half = certify(0.5 * a.matrix);
    const Matrix i6 = Matrix::Identity(6, 6);
    CHECK(max_abs(mbar(i6, half) - (2.0 * i6 - half.matrix)) <= 1e-15);
    CHECK(max_abs(mbar(Matrix::Zero(6, 6), a)) == 0.0);
    CHECK(max_abs(mtilde(Matrix::Zero(6, 6), a)) == 0.0);
    CHECK_THROWS_AS(mbar(Matrix::Zero(5, 5), a), Error);

    // Jacobi omega on a unit-diagonal A: eigenvalues 2 omega - omega^2 lambda_i(A).
    Matrix u = Matrix::Identity(4, 4);
    u(0, 1) = u(1, 0) = -0.4;
    u(2, 3) = u(3, 2) = 0.2;
    const SpsdOperator ua = certify(u);
    const double w = 0.7;
    const Matrix mb = mbar(build_smoother(WeightedJacobi{w}, ua).m, ua);
    const Vector expected = (2.0 * w - w * w * oracle::eigenvalues(u).array()).reverse();
    CHECK(max_abs(oracle::eigenvalues(mb) - expected) <= 1e-14);

    // Symmetric M: mtilde = mbar.
    const Matrix sym = oracle::random_symmetric(6, 3) * 0.1;
    CHECK(max_abs(mtilde(sym, a) - mbar(sym, a)) <= 1e-15);
  }

  TEST_CASE("Gauss-Seidel on Neumann n=8: spectrum of A^1/2 Mtilde A^1/2 lies in [0, 1]") {
    const TwoGridHierarchy h = hierarchy(neumann_laplacian_1d(8), aggregation_prolongation(8, 2), GaussSeidel{});
    const Vector ev = oracle::eigenvalues(h.mtilde_hat);
    CHECK(ev.minCoeff() >= -h.tol.psd_slack);
    CHECK(ev.maxCoeff() <= 1.0 + h.tol.psd_slack);
  }

  TEST_CASE("diagonal Galerkin product with s = r") {
    Matrix a = Matrix::Zero(3, 3);
    a(0, 0) = 2;
    a(1, 1) = 1;
    Matrix p = Matrix::Zero(3, 2);
    p(0, 0) = p(1, 1) = 1;
    const TwoGridHierarchy h = hierarchy(a, p, CustomSmoother{0.5 * Matrix::Identity(3, 3)});
    Matrix ac = Matrix::Zero(2, 2);
    ac(0, 0) = 2;
    ac(1, 1) = 1;
    CHECK(max_abs(h.coarse.matrix - ac) == 0.0);
    CHECK(h.rank_coarse == 2);
    CHECK(h.rank_fine == 2);
  }

  TEST_CASE("prolongation with a zero column is accepted") {
    Matrix p = aggregation_prolongation(8, 2);
    p.col(3).setZero();
    const TwoGridHierarchy h = hierarchy(neumann_laplacian_1d(8), p, WeightedJacobi{});
    // Nodes 0..5 couple to the dropped aggregate, so the remaining block is nonsingular.
    CHECK(h.rank_coarse == 3);
    CHECK(h.rank_coarse == oracle::rank(h.coarse.matrix));
  }

  TEST_CASE("Neumann n=8, pairwise aggregation, Jacobi 2/3: r = 7, s = 3") {
    const TwoGridHierarchy h = hierarchy(neumann_laplacian_1d(8), aggregation_prolongation(8, 2), WeightedJacobi{});
    CHECK(h.rank_fine == 7);
    CHECK(h.rank_coarse == 3);
    CHECK(h.rank_fine == oracle::rank(h.a.matrix));
    CHECK(h.rank_coarse == oracle::rank(h.coarse.matrix));
    CHECK(h.smoother_ok);
  }

  TEST_CASE("hierarchy rejects nc >= n, a zero Galerkin matrix and an invalid smoother") {
    const Matrix a = neumann_laplacian_1d(4);
    CHECK_THROWS_AS(hierarchy(a, Matrix::Identity(4, 4), WeightedJacobi{}), Error);
    CHECK_THROWS_AS(hierarchy(a, Matrix::Ones(4, 1), WeightedJacobi{}), Error);
    CHECK_THROWS_AS(hierarchy(a, Matrix::Ones(3, 1), WeightedJacobi{}), Error);
    try {
      hierarchy(neumann_laplacian_1d(8), aggregation_prolongation(8, 2), WeightedJacobi{1.5});
      FAIL("expected SmootherAssumptionError");
    } catch (const SmootherAssumptionError& e) {
      CHECK(e.min_eigenvalue() < 0.0);
    }
    const SpsdOperator op = certify(neumann_laplacian_1d(8));
    const TwoGridHierarchy h = build_hierarchy(op, aggregation_prolongation(8, 2), WeightedJacobi{1.5}, op.tol,
                                               HierarchyOptions{false});
    CHECK_FALSE(h.smoother_ok);
    CHECK(h.smoother_min_eig < 0.0);
  }

  TEST_CASE("hierarchy invariants on several problems") {
    const std::vector<Matrix> problems = {neumann_laplacian_1d(12), neumann_laplacian_2d(4, 3),
                                          random_spsd({10, 6, 7})};
    for (const Matrix& a : problems) {
      for (const SmootherSpec& s : {SmootherSpec{GaussSeidel{}}, SmootherSpec{WeightedJacobi{0.5}}}) {
        const SpsdOperator op = certify(a);
        const TwoGridHierarchy h =
            build_hierarchy(op, aggregation_prolongation(op.size(), 2), s, op.tol, HierarchyOptions{false});
        const double tol = h.tol.match_tol;
        CHECK(max_abs(h.coarse.matrix - h.prolongation.transpose() * a * h.prolongation) <= 1e-13 * max_abs(a));
        CHECK(max_abs(h.projector * h.projector - h.projector) <= tol);
        CHECK(max_abs(h.projector - h.projector.transpose()) <= tol);
        CHECK(std::abs(h.projector.trace() - static_cast<double>(h.rank_coarse)) <= 10 * tol);
        CHECK(max_abs(h.projector_a * h.projector_a - h.projector_a) <= tol * std::max(1.0, max_abs(h.projector_a)));
        if (h.smoother_ok) {
          CHECK(max_abs(oracle::eigenvalues(h.mbar_hat) - oracle::eigenvalues(h.mtilde_hat)) <= tol);
          if (std::holds_alternative<GaussSeidel>(s)) CHECK(oracle::eigenvalues(h.mbar).minCoeff() > 0.0);
        }
      }
    }
  }

  TEST_CASE("generated problems") {
    Matrix n4(4, 4);
    n4 << 1, -1, 0, 0, -1, 2, -1, 0, 0, -1, 2, -1, 0, 0, -1, 1;
    CHECK(neumann_laplacian_1d(4) == n4);
    CHECK(certify(n4).rank == 3);

    GraphLaplacian path;
    path.nodes = 3;
    path.edges = {{0, 1, 1.0}, {1, 2, 1.0}};
    Matrix p3(3, 3);
    p3 << 1, -1, 0, -1, 2, -1, 0, -1, 1;
    CHECK(graph_laplacian(path) == p3);

    const Matrix r = random_spsd({10, 6, 7});
    CHECK(certify(r).rank == 6);
    CHECK(oracle::rank(r) == 6);

    GraphLaplacian neg = path;
    neg.edges[0].weight = -1.0;
    CHECK_THROWS_AS(graph_laplacian(neg), Error);
    CHECK_THROWS_AS(neumann_laplacian_1d(1), Error);
    CHECK_THROWS_AS(random_spsd({0, 1, 0}), Error);

    const Problem pr = generate_problem(NeumannLaplacian2D{4, 4}, 3);
    CHECK(pr.a.rank == 15);
    CHECK(max_abs(pr.rhs - pr.a.matrix * pr.u_ref) == 0.0);
    CHECK(std::abs(pr.rhs.sum()) <= 1e-12 * pr.rhs.norm());
    CHECK(pr.prolongation.cols() == 8);
    const Problem again = generate_problem(NeumannLaplacian2D{4, 4}, 3);
    CHECK(again.u_ref == pr.u_ref);
  }
}
