#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "twogrid/corpus.hpp"

namespace twogrid {

/// One invariant evaluated on one hierarchy. slack = bound - measured; the
/// check passes iff slack >= 0.
struct CheckResult {
  std::string case_name;
  std::string check;
  bool pass = false;
  bool expected_failure = false;  // a documented failing condition that was correctly detected
  double measured = 0.0;
  double bound = 0.0;
  double slack = 0.0;
};

struct VerifyOptions {
  double perturb_identity = 0.0;  // added to factor_identity to self-test the harness
  std::size_t sweep_trials = 20;
  std::uint64_t seed = 0;
};

struct VerifyReport {
  std::size_t cases = 0;
  std::vector<std::string> rejected;
  std::vector<CheckResult> checks;
  bool all_pass() const;
  std::size_t failures() const;
};

/// Identity, sandwich, squaring, null-space, condition, sweep-bound,
/// fixed-point and inexact checks on one hierarchy.
void verify_entry(const CorpusEntry& entry, const VerifyOptions& options, std::vector<CheckResult>& out);

VerifyReport verify_corpus(const Corpus& corpus, const VerifyOptions& options);

std::string verify_json(const VerifyReport& report);

}  // namespace twogrid
