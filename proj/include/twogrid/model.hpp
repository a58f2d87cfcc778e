#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "twogrid/linalg.hpp"

namespace twogrid {

// ---------------------------------------------------------------------------
// Smoothers

struct WeightedJacobi {
  double omega = 2.0 / 3.0;
};
struct GaussSeidel {};
struct CustomSmoother {
  Matrix m;
};

using SmootherSpec = std::variant<WeightedJacobi, GaussSeidel, CustomSmoother>;

/// Short human-readable tag ("jacobi:0.666667", "gauss-seidel", "custom").
std::string describe(const SmootherSpec& spec);

struct SmootherResult {
  Matrix m;
  std::vector<std::string> warnings;
};

/// Stability limit 2 / lambda_max(D^{-1} A) of weighted Jacobi.
double jacobi_omega_limit(const SpsdOperator& a);

/// Materializes the smoother matrix M.
///
/// Jacobi gives omega D^{-1} and warns when omega leaves (0, 2/lambda_max(D^{-1}A)).
/// Gauss-Seidel gives the explicit dense inverse (D + L)^{-1} of the lower
/// triangle. Both reject a zero diagonal entry: the matching row and column of
/// an SPSD matrix are then zero and the system should be reduced by deleting
/// them before smoothing.
SmootherResult build_smoother(const SmootherSpec& spec, const SpsdOperator& a);

/// M + M^T - M^T A M, symmetrized.
Matrix mbar(const Matrix& m, const SpsdOperator& a);
/// M + M^T - M A M^T, symmetrized.
Matrix mtilde(const Matrix& m, const SpsdOperator& a);

// ---------------------------------------------------------------------------
// Two-grid hierarchy

/// Raised by build_hierarchy when ||I - MA||_A <= 1 fails.
class SmootherAssumptionError : public Error {
 public:
  SmootherAssumptionError(const std::string& what, double min_eigenvalue)
      : Error(what), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// (A, M, P) together with everything the analysis and the solvers derive from
/// them. Built once by build_hierarchy and read-only afterwards.
///
/// The "_hat" operators are the A^{1/2}-conjugated forms on which all spectra
/// are taken, e.g. smoother_hat = A^{1/2} M A^{1/2}.
struct TwoGridHierarchy {
  TolerancePolicy tol;
  SpsdOperator a;
  Matrix smoother;      // M, n x n
  Matrix prolongation;  // P, n x nc
  SpsdOperator coarse;  // A_c = P^T A P
  std::size_t n = 0;
  std::size_t nc = 0;
  std::size_t rank_fine = 0;    // r
  std::size_t rank_coarse = 0;  // s

  Matrix mbar;
  Matrix mtilde;
  Matrix projector;    // A^{1/2} P A_c^+ P^T A^{1/2}, symmetric
  Matrix projector_a;  // P A_c^+ P^T A

  Matrix smoother_hat;
  Matrix mbar_hat;
  Matrix mtilde_hat;

  Matrix range_basis;  // orthonormal basis of R(A)
  Matrix null_basis;   // orthonormal basis of N(A)

  double smoother_min_eig = 0.0;  // lambda_min(mbar_hat)
  bool smoother_ok = true;
  std::vector<std::string> warnings;
};

struct HierarchyOptions {
  /// When false an invalid smoother is recorded (smoother_ok = false) instead
  /// of raising SmootherAssumptionError.
  bool require_smoother_assumption = true;
};

/// Assembles a hierarchy from a certified A, a prolongation and a smoother.
///
/// Rejects n_c >= n, a zero Galerkin matrix and (by default) smoothers with
/// ||I - MA||_A > 1, reporting the most negative eigenvalue of A^{1/2} M-bar A^{1/2}.
TwoGridHierarchy build_hierarchy(const SpsdOperator& a, const Matrix& p, const SmootherSpec& spec,
                                 const TolerancePolicy& tol, const HierarchyOptions& options = {});

/// n x ceil(n/k) unsmoothed aggregation: column j indicates rows jk .. jk+k-1.
Matrix aggregation_prolongation(std::size_t n, std::size_t k);

// ---------------------------------------------------------------------------
// Test problems

struct NeumannLaplacian1D {
  std::size_t n = 8;
};
struct NeumannLaplacian2D {
  std::size_t nx = 8;
  std::size_t ny = 8;
};
struct WeightedEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  double weight = 1.0;
};
struct GraphLaplacian {
  std::size_t nodes = 0;
  std::vector<WeightedEdge> edges;
};
struct RandomSpsd {
  std::size_t n = 10;
  std::size_t rank = 6;
  std::uint64_t seed = 0;
};
struct FromFile {
  std::string matrix_path;
  std::string prolongation_path;  // empty: pairwise aggregation
};

using ProblemSpec = std::variant<NeumannLaplacian1D, NeumannLaplacian2D, GraphLaplacian, RandomSpsd, FromFile>;

std::string describe(const ProblemSpec& spec);

struct Problem {
  std::string name;
  SpsdOperator a;
  Matrix prolongation;
  Vector rhs;    // f = A u_ref, so f lies in R(A)
  Vector u_ref;  // seeded standard-normal reference solution
  std::uint64_t seed = 0;
};

Matrix neumann_laplacian_1d(std::size_t n);
Matrix neumann_laplacian_2d(std::size_t nx, std::size_t ny);
Matrix graph_laplacian(const GraphLaplacian& g);
Matrix random_spsd(const RandomSpsd& spec);

/// Builds A, the default pairwise-aggregation P and a consistent right-hand
/// side. `seed` drives u_ref (RandomSpsd carries its own matrix seed).
Problem generate_problem(const ProblemSpec& spec, std::uint64_t seed = 0,
                         const ToleranceOverrides& overrides = {});

/// Standard normal vector from a seeded Mersenne twister.
Vector seeded_normal(std::size_t n, std::uint64_t seed);

}  // namespace twogrid
