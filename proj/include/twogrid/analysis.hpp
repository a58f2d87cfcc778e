#pragma once

#include <optional>
#include <variant>

#include "twogrid/linalg.hpp"
#include "twogrid/model.hpp"

namespace twogrid {

/// Convergence conditions of a hierarchy. Never throws on a failed condition.
struct ConditionReport {
  bool smoother_ok = false;        // ||I - MA||_A <= 1
  double smoother_min_eig = 0.0;   // lambda_min(A^{1/2} Mbar A^{1/2})
  bool equiv_cond_ok = false;      // N(A^{1/2} Mbar A^{1/2}) cap N(P^T (I - AM) A^{1/2}) = N(A)
  bool suff_cond_ok = false;       // Mbar >= 0 and N(Mbar) cap R(A) = {0}
  bool mbar_psd = false;
  bool mbar_pd = false;
  std::size_t intersection_dim = 0;
  std::size_t nullity_a = 0;
  std::size_t mbar_range_intersection_dim = 0;  // dim(N(Mbar) cap R(A))
  NullityDecision equiv_decision;
  NullityDecision suff_decision;
};

ConditionReport check_conditions(const TwoGridHierarchy& h);

/// Exact two-grid convergence factor computed three independent ways plus the
/// two-sided eigenvalue estimate.
struct ExactFactorReport {
  double sigma_tg = 0.0;
  double factor_identity = 0.0;  // sqrt(1 - sigma_tg)
  double factor_ftg = 0.0;       // sqrt(1 - lambda_{n-r+1}(F_TG))
  double factor_oracle = 0.0;    // max over R(A) of the conjugated error propagator
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  double eigengap_at_index = 0.0;  // lambda_i - lambda_{i-1} at sigma_tg's index
  double mtilde_a_low = 0.0;       // lambda_{n-r+1}(Mtilde A)
  double mtilde_a_high = 1.0;      // lambda_{n-r+s+1}(Mtilde A), 1 when s = r
  std::size_t nullity_ftg = 0;
  bool degenerate = false;         // s = r, factor is exactly 0
  bool equiv_cond_warning = false; // identity computed although equiv-cond failed
};

ExactFactorReport exact_factor(const TwoGridHierarchy& h);

// Iteration kinds whose A-seminorm the oracle can evaluate.
struct TwoGrid {};
struct SymmetricTwoGrid {};
struct InexactTwoGrid {
  Matrix coarse_pinv;  // B_c^+
};
using IterationKind = std::variant<TwoGrid, SymmetricTwoGrid, InexactTwoGrid>;

/// Brute-force A-seminorm of an iteration's error propagator.
///
/// Conjugates the propagator by A^{1/2}, restricts it to R(A) through an
/// orthonormal basis V_r and returns sqrt(lambda_max(V_r^T G^T G V_r)). No
/// spectral index arithmetic is involved. `basis` overrides the range basis
/// (any orthonormal basis of R(A) gives the same value).
double seminorm_oracle(const TwoGridHierarchy& h, const IterationKind& kind,
                       const Matrix* basis = nullptr);

struct TwoSidedBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// sqrt(1 - lambda_{n-r+s+1}(Mtilde A)) <= ||E_TG||_A <= sqrt(1 - lambda_{n-r+1}(Mtilde A)).
TwoSidedBounds exact_two_sided(const TwoGridHierarchy& h);

/// Best constants c1, c2 with c1 A_c <= B_c <= c2 A_c, and the best constants
/// d1, d2 with d1 A_c^+ <= B_c^+ <= d2 A_c^+, each on its own symmetric form.
struct SpectralEquivalence {
  double c1 = 0.0;
  double c2 = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Raised when B_c is not usable as a linear coarse solver.
class CoarseSolverError : public Error {
 public:
  using Error::Error;
};

/// Throws CoarseSolverError unless R(B_c) = R(A_c).
void require_matching_range(const SpsdOperator& coarse, const SpsdOperator& bc);

SpectralEquivalence spectral_equivalence(const SpsdOperator& coarse, const SpsdOperator& bc);

struct BetaConstants {
  double beta1 = 0.0;
  double beta2 = 0.0;
};

/// Case formulas for beta1/beta2 given 0 < alpha1 <= alpha2 < 2.
BetaConstants beta_constants(double alpha1, double alpha2);

/// Spectral data shared by the inexact bounds.
struct BoundInputs {
  double sigma_tg = 0.0;
  double delta_tg = 0.0;
  double mtilde_a_low = 0.0;  // lambda_{n-r+1}(Mtilde A)
};

/// Lower two-sided estimate L(beta2).
double lower_bound_l(const BoundInputs& in, double beta2);
/// Upper two-sided estimate U(beta1).
double upper_bound_u(const BoundInputs& in, double beta1);

struct DeltaReport {
  double delta_tg = 0.0;
  bool guard_holds = false;  // N(A^{1/2} Mtilde A^{1/2}) cap R(A^{1/2} P) = {0}
  NullityDecision decision;
};

/// delta_TG = lambda_{n-s+1}(Mtilde A Pi_A) when the guard holds, else 0.
DeltaReport delta_tg(const TwoGridHierarchy& h);

struct InexactFactorReport {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double delta_tg = 0.0;
  bool delta_guard = false;
  double sigma_tg = 0.0;
  double lower_l = 0.0;
  double upper_u = 0.0;
  double factor_exact_itg = 0.0;  // sqrt(1 - lambda_{n-r+1}(F_ITG))
  double factor_oracle = 0.0;
  std::size_t nullity_fitg = 0;
};

/// Full analysis of the two-grid method with coarse solver B_c^+.
///
/// Throws CoarseSolverError when R(B_c) != R(A_c) or alpha2 >= 2; the latter
/// message names the minimal scaling of B_c that restores alpha2 < 2.
InexactFactorReport inexact_linear_analysis(const TwoGridHierarchy& h, const SpsdOperator& bc);

/// U(1 - eps^2): per-sweep bound for any coarse solver with A_c-seminorm
/// accuracy eps in [0, 1).
double general_epsilon_bound(const TwoGridHierarchy& h, double eps);

/// F_TG = A^{1/2} Mbar A^{1/2} + (I - A^{1/2} M^T A^{1/2}) Pi (I - A^{1/2} M A^{1/2}).
Matrix assemble_ftg(const TwoGridHierarchy& h);
/// F_ITG with the coarse term A^{1/2} P (2 B_c^+ - B_c^+ A_c B_c^+) P^T A^{1/2}.
Matrix assemble_fitg(const TwoGridHierarchy& h, const Matrix& bc_pinv);

}  // namespace twogrid
