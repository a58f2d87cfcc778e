#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "twogrid/analysis.hpp"
#include "twogrid/solver.hpp"

namespace twogrid {

/// Everything `analyze` reports about one hierarchy.
struct ConvergenceReport {
  std::string problem;
  std::string smoother;
  std::string prolongation;
  std::string coarse = "exact";
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t nc = 0;
  std::size_t rank_fine = 0;
  std::size_t rank_coarse = 0;
  TolerancePolicy tol;

  ConditionReport conditions;
  ExactFactorReport exact;
  DeltaReport delta;
  std::optional<InexactFactorReport> inexact;
  std::optional<double> eps;        // general coarse solver accuracy
  std::optional<double> eps_bound;  // U(1 - eps^2)
  std::vector<std::string> warnings;
};

/// Runs the full analysis. `bc` selects the linear inexact analysis and `eps`
/// the general-solver bound; both may be absent.
ConvergenceReport analyze(const TwoGridHierarchy& h, const std::optional<SpsdOperator>& bc,
                          const std::optional<double>& eps);

/// Pretty-printed JSON with frozen field names and a trailing newline.
std::string to_json(const ConvergenceReport& r);

/// Header and one data row for sweeping many configurations into one table.
std::string report_csv_header();
std::string report_csv_row(const ConvergenceReport& r);

/// Trace table with columns sweep, error_A, residual_2, ratio (ratio empty for
/// sweep 0 and below the stagnation floor).
std::string trace_csv(const IterationTrace& t);

struct TraceContext {
  std::string problem;
  std::string smoother;
  std::string prolongation;
  std::string variant;
  std::uint64_t seed = 0;
  std::optional<double> factor_identity;
};

/// JSON summary of a trace (observed_factor, max_ratio, flags, violations).
std::string trace_summary_json(const IterationTrace& t, const TraceContext& ctx);

}  // namespace twogrid
