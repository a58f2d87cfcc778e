#pragma once

#include <string>
#include <vector>

#include "twogrid/model.hpp"

namespace twogrid {

enum class ProlongationKind {
  Aggregate,   // aggregation_prolongation(n, aggregate)
  RangeBasis,  // orthonormal basis of R(A), so that s = r
};

struct CorpusCase {
  std::string name;
  ProblemSpec problem;
  SmootherSpec smoother;
  std::size_t aggregate = 2;
  ProlongationKind prolongation = ProlongationKind::Aggregate;
  bool zero_smoother = false;  // M = 0, expected to fail equiv-cond
};

struct CorpusEntry {
  std::string name;
  Problem problem;
  TwoGridHierarchy h;
  bool expect_equiv_fail = false;
};

struct Corpus {
  std::vector<CorpusEntry> entries;
  std::vector<std::string> rejected;  // cases whose smoother violates ||I - MA||_A <= 1, with reason
};

/// Neumann 1D/2D, path/cycle/two-component graphs and seeded random SPSD
/// matrices crossed with Jacobi (0.5, 2/3), Gauss-Seidel and aggregation by 2
/// and 4, plus an s = r case and an M = 0 case.
std::vector<CorpusCase> builtin_cases();

/// Materializes cases; invalid smoother combinations land in `rejected`.
Corpus build_corpus(const std::vector<CorpusCase>& cases, const ToleranceOverrides& overrides = {},
                    std::uint64_t seed = 0);

}  // namespace twogrid
