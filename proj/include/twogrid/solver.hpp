#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "twogrid/linalg.hpp"
#include "twogrid/model.hpp"

namespace twogrid {

// ---------------------------------------------------------------------------
// Coarse solvers

/// e_c = A_c^+ r_c.
struct ExactCoarse {};

/// e_c = B_c^+ r_c for an SPSD B_c with R(B_c) = R(A_c).
struct LinearCoarse {
  SpsdOperator bc;
};

/// Black-box coarse solver r_c -> e_c with declared A_c-seminorm accuracy.
struct GeneralCoarse {
  std::function<Vector(const Vector&)> solve;
  double declared_eps = 0.0;
  bool verify = true;  // compare against A_c^+ r_c on every call
};

using CoarseSolverSpec = std::variant<ExactCoarse, LinearCoarse, GeneralCoarse>;

/// Exact coarse solve followed by a random perturbation w in R(A_c) with
/// ||w||_{A_c} = eps ||e_c||_{A_c}. The returned solver owns its generator, so
/// repeated calls draw fresh directions.
GeneralCoarse perturbed_exact_coarse(const TwoGridHierarchy& h, double eps, std::uint64_t seed);

/// Raised when f has a component in N(A) beyond tolerance.
class InconsistentSystemError : public Error {
 public:
  InconsistentSystemError(const std::string& what, double residual) : Error(what), residual_(residual) {}
  /// ||Z^T f|| / ||f|| for an orthonormal null basis Z.
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// ||Z^T f|| / ||f||, zero for f = 0.
double consistency_residual(const TwoGridHierarchy& h, const Vector& f);

/// Throws InconsistentSystemError unless consistency_residual(h, f) <= match_tol.
void require_consistent(const TwoGridHierarchy& h, const Vector& f);

// ---------------------------------------------------------------------------
// Sweeps

/// Intermediate quantities of one two-grid sweep.
struct SweepOutcome {
  Vector u;
  Vector u_smoothed;        // after presmoothing
  Vector coarse_residual;   // r_c
  Vector coarse_update;     // e_c or its approximation
  std::optional<double> achieved_eps;  // General solver with verification only
};

/// One exact two-grid sweep (smoothing, restriction, A_c^+ solve, prolongation).
Vector tg_sweep(const TwoGridHierarchy& h, const Vector& u0, const Vector& f);

/// One sweep with the coarse correction replaced by the given solver.
SweepOutcome itg_sweep_detailed(const TwoGridHierarchy& h, const Vector& u0, const Vector& f,
                                const CoarseSolverSpec& coarse);
Vector itg_sweep(const TwoGridHierarchy& h, const Vector& u0, const Vector& f, const CoarseSolverSpec& coarse);

/// Exact two-grid sweep followed by postsmoothing with M^T.
Vector stg_sweep(const TwoGridHierarchy& h, const Vector& u0, const Vector& f);

// ---------------------------------------------------------------------------
// Iteration

struct TgVariant {};
struct StgVariant {};
struct ItgVariant {
  CoarseSolverSpec coarse;
};
using SweepVariant = std::variant<TgVariant, StgVariant, ItgVariant>;

std::string describe(const SweepVariant& v);

struct IterationTrace {
  /// errors[k] is ||u_ref - u_k||_A for k = 0..sweeps, or the residual norm
  /// when no reference solution was given (has_reference = false).
  std::vector<double> errors_A;
  std::vector<double> residuals;  // ||f - A u_k||_2, k = 0..sweeps
  /// ratios[k] = errors_A[k+1] / errors_A[k]; NaN where errors_A[k] is at or
  /// below the stagnation floor.
  std::vector<double> ratios;
  std::vector<double> coarse_eps;  // achieved eps per sweep (verified General solver)

  double floor = 0.0;  // 1e3 eps_machine errors_A[0]
  double observed_factor = 0.0;
  double max_ratio = 0.0;
  std::size_t tail_count = 0;  // ratios entering observed_factor
  std::size_t sweeps_done = 0;
  bool has_reference = true;
  bool diverged = false;
  bool stagnated = false;
  bool reached_floor = false;
  bool final_consistent = true;  // only checked when reached_floor
  double final_relative_residual = 0.0;
  std::vector<std::string> violations;
  Vector u;
};

/// Runs `sweeps` sweeps from u0 and records the trace.
///
/// Stops early when the error grows by a factor 10 over 5 sweeps (diverged).
/// observed_factor is the geometric mean of the last max(5, sweeps/4) ratios
/// whose errors both lie above the floor.
IterationTrace iterate(const TwoGridHierarchy& h, const Vector& f, const Vector& u0, std::size_t sweeps,
                       const SweepVariant& variant, const std::optional<Vector>& u_ref);

/// ||v||_A computed as ||A^{1/2} v||_2.
double a_seminorm(const SpsdOperator& a, const Vector& v);

}  // namespace twogrid
