#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "twogrid/model.hpp"
#include "twogrid/solver.hpp"

namespace twogrid {

enum class Command { Analyze, Solve, Verify, Generate };
enum class OutputFormat { Json, Csv };

/// Parsed `--coarse` descriptor.
///
///   exact         A_c^+
///   bc:FILE       B_c read from MatrixMarket
///   scaled:C      B_c = C A_c
///   perturbed:T   B_c = A_c^{1/2} (I + T G) A_c^{1/2}, G random symmetric with ||G||_2 = 1, 0 <= T < 1
///   eps:X         exact solve plus a random A_c-seminorm perturbation of relative size X
struct CoarseDescriptor {
  enum class Kind { Exact, File, Scaled, Perturbed, Epsilon };
  Kind kind = Kind::Exact;
  std::string path;
  double value = 0.0;
  std::string text = "exact";
};

struct RunConfig {
  Command command = Command::Analyze;
  std::string problem = "neumann1d:8";
  std::string smoother = "jacobi";
  std::string prolongation = "aggregate:2";
  std::string coarse = "exact";
  std::string variant = "tg";  // tg | stg | itg
  std::size_t sweeps = 50;
  std::uint64_t seed = 0;
  std::string output;  // empty: stdout
  OutputFormat format = OutputFormat::Json;
  std::string rhs_path;
  std::string initial_path;
  ToleranceOverrides tol;
};

/// Raised for malformed specs and config files; messages carry file:line context.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// neumann1d:N, neumann2d:NxM, graph:path:N, graph:cycle:N, graph:twocomp:N,
/// graph:FILE (edge list "i j [w]", 0-based), random:N:RANK[:SEED], file:A.mtx.
ProblemSpec parse_problem(const std::string& text);

/// jacobi, jacobi:W, gs, zero, file:M.mtx. `n` sizes the zero smoother.
SmootherSpec parse_smoother(const std::string& text, std::size_t n);

CoarseDescriptor parse_coarse(const std::string& text);

Command parse_command(const std::string& text);
OutputFormat parse_format(const std::string& text);

/// Reads a flat `key = value` file ('#' starts a comment) into `cfg`.
/// Keys: command, problem, smoother, prolongation, coarse, variant, sweeps,
/// seed, output, format, rhs, initial, rank_rel_tol, psd_slack, match_tol.
void load_config_file(const std::string& path, RunConfig& cfg);

/// Problem, hierarchy and coarse solver materialized from a RunConfig.
struct Setup {
  Problem problem;
  TwoGridHierarchy h;
  std::string smoother_text;
  std::string prolongation_text;
  CoarseDescriptor coarse;
  std::optional<SpsdOperator> bc;  // linear coarse solvers
  Vector u0;                       // initial guess, zero unless read from a file
};

/// Environment overrides (RANK_REL_TOL, MATCH_TOL) with the config's own on top.
ToleranceOverrides effective_tolerances(const RunConfig& cfg);

Setup prepare(const RunConfig& cfg, const HierarchyOptions& options = {});

/// Builds the linear B_c of a descriptor (none for exact and eps).
std::optional<SpsdOperator> coarse_operator(const CoarseDescriptor& d, const TwoGridHierarchy& h, std::uint64_t seed);

/// A_c^{1/2} (I + t G) A_c^{1/2} with G random symmetric, ||G||_2 = 1. Same
/// range as A_c for 0 <= t < 1.
Matrix range_preserving_perturbation(const SpsdOperator& coarse, double t, std::uint64_t seed);

/// Coarse solver spec for the `solve` command.
CoarseSolverSpec coarse_solver(const Setup& s, std::uint64_t seed);

}  // namespace twogrid
