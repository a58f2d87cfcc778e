#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace twogrid {

/// Dense real matrix carrying A, M, P and every derived operator.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an input that must be symmetric positive semidefinite is not.
class NotSpsdError : public Error {
 public:
  NotSpsdError(const std::string& what, double min_eigenvalue)
      : Error(what), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// Raised when the Jacobi sweep budget is exhausted.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Thresholds shared by every rank, semidefiniteness and identity decision.
///
/// One policy is threaded through a whole hierarchy so that the ranks r and s
/// (and every spectral index derived from them) are decided consistently.
struct TolerancePolicy {
  double rank_rel_tol = 1e-13;  // eigenvalue <= rank_rel_tol * lambda_max counts as zero
  double psd_slack = 1e-10;     // admissible negative drift, relative to lambda_max
  double match_tol = 1e-10;     // identity / oracle comparisons

  /// Default policy for an n x n problem: rank_rel_tol = 32 n eps.
  static TolerancePolicy for_dimension(std::size_t n);

  /// Throws Error unless every field lies in (0, 1).
  void validate() const;
};

/// Optional user overrides of a TolerancePolicy (CLI flags, environment).
struct ToleranceOverrides {
  std::optional<double> rank_rel_tol;
  std::optional<double> psd_slack;
  std::optional<double> match_tol;

  TolerancePolicy resolve(std::size_t n) const;

  /// Reads RANK_REL_TOL and MATCH_TOL from the environment.
  static ToleranceOverrides from_env();
};

/// Ascending eigenvalues with orthonormal eigenvectors (column i <-> value i).
struct SymEigen {
  Vector values;
  Matrix vectors;
};

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// The input is symmetrized as (S + S^T)/2 first. Output is deterministic:
/// eigenvalues are sorted ascending (ties keep their diagonal order) and each
/// eigenvector is signed so that its largest-magnitude entry is positive.
/// Throws Error for non-square or non-finite input and ConvergenceError if
/// the off-diagonal mass does not drop below 1e-13 ||S||_F.
SymEigen sym_eig(const Matrix& s);

/// Certified symmetric positive semidefinite matrix with its spectral data.
struct SpsdOperator {
  Matrix matrix;  // symmetrized input
  SymEigen eig;   // negative drift clamped to zero
  std::size_t rank = 0;
  Matrix sqrt;    // S^{1/2}
  Matrix pinv;    // S^dagger
  double threshold = 0.0;  // absolute eigenvalue cut used for rank/sqrt/pinv
  TolerancePolicy tol;

  std::size_t size() const { return static_cast<std::size_t>(matrix.rows()); }
  std::size_t nullity() const { return size() - rank; }
  double lambda_max() const { return eig.values(eig.values.size() - 1); }
};

/// Certifies S as SPSD and bundles eigenvectors, rank, square root and
/// Moore-Penrose inverse.
///
/// Eigenvalues in [-psd_slack lambda_max, 0) are clamped to zero; anything more
/// negative raises NotSpsdError. Eigenvalues at or below rank_rel_tol
/// lambda_max are treated as exact zeros by rank, sqrt and pinv alike, so
/// N(S^{1/2}) = N(S) holds numerically. The zero matrix is rejected.
SpsdOperator spsd_certify(const Matrix& s, const TolerancePolicy& tol);

/// Number of eigenvalues above rank_rel_tol * lambda_max.
std::size_t numerical_rank(const SpsdOperator& s);

struct RangeNullBases {
  Matrix range;  // n x r, orthonormal
  Matrix null;   // n x (n - r), orthonormal
};

RangeNullBases range_null_bases(const SpsdOperator& s);

/// Outcome of one thresholded nullity decision.
///
/// The two margins are relative to the largest eigenvalue of the Gram matrix
/// the decision was taken on: the largest eigenvalue declared zero and the
/// smallest declared nonzero. A small ratio between them means the decision
/// is fragile.
struct NullityDecision {
  std::size_t nullity = 0;
  double largest_discarded = 0.0;
  double smallest_retained = 0.0;
};

/// Nullity of a symmetric positive semidefinite matrix under rank_rel_tol.
NullityDecision psd_nullity(const Matrix& s, double rank_rel_tol);

/// dim(N(K1) cap N(K2)), decided on the Gram matrix of the stacked [K1; K2].
///
/// Each block is scaled to unit Frobenius norm first; this leaves the joint
/// null space unchanged but stops one block from masking the other.
NullityDecision null_intersection(const Matrix& k1, const Matrix& k2, double rank_rel_tol);

std::size_t null_intersection_dim(const Matrix& k1, const Matrix& k2, double rank_rel_tol);

/// Largest absolute entry; 0 for an empty matrix.
double max_abs(const Matrix& m);

/// Largest residual of the four Penrose identities, each relative to the
/// magnitude of the matrix it should reproduce.
double penrose_residual(const SpsdOperator& s);

/// Throws Error when the matrix is empty or holds NaN/Inf.
void require_finite(const Matrix& m, const std::string& what);

}  // namespace twogrid
