#include "twogrid/corpus.hpp"

#include <sstream>

#include "twogrid/config.hpp"

namespace twogrid {

namespace {

std::string smoother_tag(const SmootherSpec& s) {
  if (const auto* j = std::get_if<WeightedJacobi>(&s)) return j->omega == 0.5 ? "jacobi0.5" : "jacobi2/3";
  if (std::holds_alternative<GaussSeidel>(s)) return "gs";
  return "custom";
}

}  // namespace

std::vector<CorpusCase> builtin_cases() {
  const SmootherSpec j05 = WeightedJacobi{0.5};
  const SmootherSpec j23 = WeightedJacobi{2.0 / 3.0};
  const SmootherSpec gs = GaussSeidel{};
  std::vector<CorpusCase> cases;
  auto add = [&](const std::string& problem, const SmootherSpec& sm, std::size_t agg) {
    CorpusCase c;
    c.problem = parse_problem(problem);
    c.smoother = sm;
    c.aggregate = agg;
    c.name = problem + "/" + smoother_tag(sm) + "/agg" + std::to_string(agg);
    cases.push_back(std::move(c));
  };

  for (const char* p : {"neumann1d:8", "neumann1d:16", "neumann1d:32"})
    for (const auto& sm : {j05, j23, gs}) add(p, sm, 2);
  for (const char* p : {"neumann1d:16", "neumann1d:32"})
    for (const auto& sm : {j23, gs}) add(p, sm, 4);

  add("neumann2d:8x8", j05, 2);
  add("neumann2d:8x8", j23, 2);
  add("neumann2d:8x8", gs, 2);
  add("neumann2d:8x8", j05, 4);
  add("neumann2d:8x8", gs, 4);

  for (const char* p : {"graph:path:12", "graph:cycle:12", "graph:twocomp:12"})
    for (const auto& sm : {j05, gs}) add(p, sm, 2);

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const std::size_t n = 10 + 4 * (seed % 3);
    const std::size_t rank = n - 2 - seed % 3;
    const std::string p = "random:" + std::to_string(n) + ":" + std::to_string(rank) + ":" + std::to_string(seed);
    add(p, gs, seed % 2 == 1 ? 2 : 4);
    add(p, j05, 2);
  }

  CorpusCase degenerate;
  degenerate.problem = RandomSpsd{8, 4, 42};
  degenerate.smoother = gs;
  degenerate.prolongation = ProlongationKind::RangeBasis;
  degenerate.name = "random:8:4:42/gs/range-basis";
  cases.push_back(degenerate);

  CorpusCase zero;
  zero.problem = NeumannLaplacian1D{8};
  zero.smoother = CustomSmoother{Matrix::Zero(8, 8)};
  zero.zero_smoother = true;
  zero.name = "neumann1d:8/zero/agg2";
  cases.push_back(zero);
  return cases;
}

Corpus build_corpus(const std::vector<CorpusCase>& cases, const ToleranceOverrides& overrides, std::uint64_t seed) {
  Corpus corpus;
  for (const auto& c : cases) {
    Problem problem = generate_problem(c.problem, seed, overrides);
    problem.name = c.name;
    const std::size_t n = problem.a.size();
    problem.prolongation = c.prolongation == ProlongationKind::RangeBasis ? range_null_bases(problem.a).range
                                                                          : aggregation_prolongation(n, c.aggregate);
    try {
      TwoGridHierarchy h = build_hierarchy(problem.a, problem.prolongation, c.smoother, problem.a.tol);
      corpus.entries.push_back({c.name, std::move(problem), std::move(h), c.zero_smoother});
    } catch (const SmootherAssumptionError& e) {
      corpus.rejected.push_back(c.name + ": " + e.what());
    }
  }
  return corpus;
}

}  // namespace twogrid
