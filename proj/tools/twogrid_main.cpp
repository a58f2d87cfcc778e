// twogrid: analyze, solve, verify and generate two-grid setups for SPSD systems.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "twogrid/analysis.hpp"
#include "twogrid/config.hpp"
#include "twogrid/corpus.hpp"
#include "twogrid/matrix_market.hpp"
#include "twogrid/report.hpp"
#include "twogrid/solver.hpp"
#include "twogrid/verify.hpp"

namespace {

using namespace twogrid;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitCondition = 2;

struct Flags {
  std::string config;
  std::string problem, smoother, prolongation, coarse, variant, output, format, rhs, initial, trace;
  std::size_t sweeps = 0;
  std::uint64_t seed = 0;
  double rank_rel_tol = 0.0, match_tol = 0.0, psd_slack = 0.0;
  double perturb_identity = 0.0;
  std::size_t trials = 20;
  bool no_corpus = false;
  bool with_problem = false;
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path + ": cannot open file for writing");
  out << text;
  if (!out) throw Error(path + ": write failed");
}

// Config file first, then every flag given on the command line.
RunConfig resolve(const CLI::App& sub, const Flags& f, Command command) {
  RunConfig cfg;
  if (!f.config.empty()) load_config_file(f.config, cfg);
  cfg.command = command;
  auto given = [&](const char* name) {
    const CLI::Option* opt = sub.get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--problem")) cfg.problem = f.problem;
  if (given("--smoother")) cfg.smoother = f.smoother;
  if (given("--prolongation")) cfg.prolongation = f.prolongation;
  if (given("--coarse")) cfg.coarse = f.coarse;
  if (given("--variant")) cfg.variant = f.variant;
  if (given("--sweeps")) cfg.sweeps = f.sweeps;
  if (given("--seed")) cfg.seed = f.seed;
  if (given("--output")) cfg.output = f.output;
  if (given("--format")) cfg.format = parse_format(f.format);
  if (given("--rhs")) cfg.rhs_path = f.rhs;
  if (given("--initial")) cfg.initial_path = f.initial;
  if (given("--rank-rel-tol")) cfg.tol.rank_rel_tol = f.rank_rel_tol;
  if (given("--match-tol")) cfg.tol.match_tol = f.match_tol;
  if (given("--psd-slack")) cfg.tol.psd_slack = f.psd_slack;
  return cfg;
}

int run_analyze(const RunConfig& cfg) {
  HierarchyOptions opts;
  opts.require_smoother_assumption = false;
  const Setup s = prepare(cfg, opts);
  std::optional<double> eps;
  if (s.coarse.kind == CoarseDescriptor::Kind::Epsilon) eps = s.coarse.value;
  ConvergenceReport r = analyze(s.h, s.bc, eps);
  r.problem = cfg.problem;
  r.smoother = cfg.smoother;
  r.prolongation = cfg.prolongation;
  r.coarse = cfg.coarse;
  r.seed = cfg.seed;
  emit(cfg.output, cfg.format == OutputFormat::Csv ? report_csv_header() + report_csv_row(r) : to_json(r));
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  return r.conditions.equiv_cond_ok ? kExitOk : kExitCondition;
}

int run_solve(const RunConfig& cfg, const std::string& trace_path) {
  HierarchyOptions opts;
  opts.require_smoother_assumption = false;
  const Setup s = prepare(cfg, opts);
  SweepVariant variant;
  if (cfg.variant == "tg") variant = TgVariant{};
  else if (cfg.variant == "stg") variant = StgVariant{};
  else if (cfg.variant == "itg") variant = ItgVariant{coarse_solver(s, cfg.seed)};
  else throw ConfigError("unknown variant '" + cfg.variant + "' (tg, stg, itg)");
  if (cfg.variant != "itg" && s.coarse.kind != CoarseDescriptor::Kind::Exact)
    throw ConfigError("--coarse other than 'exact' requires --variant itg");

  std::optional<Vector> u_ref;
  if (s.problem.u_ref.size() > 0) u_ref = s.problem.u_ref;
  const IterationTrace t = iterate(s.h, s.problem.rhs, s.u0, cfg.sweeps, variant, u_ref);

  TraceContext ctx;
  ctx.problem = cfg.problem;
  ctx.smoother = cfg.smoother;
  ctx.prolongation = cfg.prolongation;
  ctx.variant = describe(variant);
  ctx.seed = cfg.seed;
  if (u_ref && std::holds_alternative<TgVariant>(variant)) ctx.factor_identity = exact_factor(s.h).factor_identity;

  if (cfg.format == OutputFormat::Csv) {
    emit(cfg.output, trace_csv(t));
    if (!trace_path.empty()) emit(trace_path, trace_summary_json(t, ctx));
  } else {
    emit(cfg.output, trace_summary_json(t, ctx));
    if (!trace_path.empty()) emit(trace_path, trace_csv(t));
  }
  for (const auto& v : t.violations) std::cerr << "violation: " << v << "\n";
  return t.diverged || t.stagnated ? kExitCondition : kExitOk;
}

int run_verify(const RunConfig& cfg, const Flags& f) {
  VerifyOptions opts;
  opts.perturb_identity = f.perturb_identity;
  opts.sweep_trials = f.trials;
  opts.seed = cfg.seed;

  Corpus corpus;
  if (!f.no_corpus) corpus = build_corpus(builtin_cases(), effective_tolerances(cfg), cfg.seed);
  if (f.with_problem || f.no_corpus) {
    const Setup s = prepare(cfg);
    const bool zero = cfg.smoother == "zero";
    corpus.entries.push_back({cfg.problem + "/" + cfg.smoother + "/" + cfg.prolongation, s.problem, s.h, zero});
  }
  const VerifyReport report = verify_corpus(corpus, opts);
  emit(cfg.output, verify_json(report));
  for (const auto& c : report.checks)
    if (!c.pass) std::cerr << "FAIL " << c.case_name << " " << c.check << " slack " << c.slack << "\n";
  return report.all_pass() ? kExitOk : kExitCondition;
}

int run_generate(const RunConfig& cfg) {
  const Setup s = prepare(cfg, HierarchyOptions{false});
  namespace fs = std::filesystem;
  const fs::path dir = cfg.output.empty() ? fs::path(".") : fs::path(cfg.output);
  fs::create_directories(dir);
  write_matrix_market((dir / "A.mtx").string(), s.problem.a.matrix);
  write_matrix_market((dir / "P.mtx").string(), s.problem.prolongation);
  write_matrix_market((dir / "f.mtx").string(), s.problem.rhs);
  if (s.problem.u_ref.size() > 0) write_matrix_market((dir / "u_ref.mtx").string(), s.problem.u_ref);
  std::cout << "wrote A.mtx P.mtx f.mtx u_ref.mtx to " << dir.string() << " (seed " << cfg.seed << ")\n";
  return kExitOk;
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "flat key = value config file")->check(CLI::ExistingFile);
  sub->add_option("--problem", f.problem,
                  "neumann1d:N | neumann2d:NXxNY | graph:path|cycle|twocomp:N | graph:EDGES | random:N:RANK[:SEED] | file:A.mtx");
  sub->add_option("--smoother", f.smoother, "jacobi[:W] | gs | zero | file:M.mtx");
  sub->add_option("--prolongation", f.prolongation, "aggregate:K or a MatrixMarket file");
  sub->add_option("--seed", f.seed, "seed for u_ref and random constructions (default 0)");
  sub->add_option("--output", f.output, "output path (default stdout)");
  sub->add_option("--rank-rel-tol", f.rank_rel_tol, "relative eigenvalue threshold for ranks (env RANK_REL_TOL)");
  sub->add_option("--match-tol", f.match_tol, "identity comparison tolerance (env MATCH_TOL)");
  sub->add_option("--psd-slack", f.psd_slack, "admissible relative negative eigenvalue drift");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and inexact two-grid methods for SPSD systems"};
  app.require_subcommand(1);
  Flags f;

  auto* analyze = app.add_subcommand("analyze", "convergence conditions, factor identity, bounds");
  add_common(analyze, f);
  analyze->add_option("--coarse", f.coarse, "exact | bc:FILE | scaled:C | perturbed:T | eps:X");
  analyze->add_option("--format", f.format, "json | csv");

  auto* solve = app.add_subcommand("solve", "run two-grid sweeps and trace the A-seminorm error");
  add_common(solve, f);
  solve->add_option("--coarse", f.coarse, "exact | bc:FILE | scaled:C | perturbed:T | eps:X");
  solve->add_option("--variant", f.variant, "tg | stg | itg");
  solve->add_option("--sweeps", f.sweeps, "number of sweeps (>= 1)");
  solve->add_option("--rhs", f.rhs, "right-hand side f (n x 1 MatrixMarket); disables the A-seminorm error");
  solve->add_option("--initial", f.initial, "initial guess u0 (n x 1 MatrixMarket); default zero");
  solve->add_option("--trace", f.trace, "second output: trace CSV (json format) or summary JSON (csv format)");
  solve->add_option("--format", f.format, "json (summary) | csv (trace)");

  auto* verify = app.add_subcommand("verify", "run the invariant suite on the built-in corpus");
  add_common(verify, f);
  verify->add_option("--perturb-identity", f.perturb_identity, "add this offset to factor_identity (harness self-test)");
  verify->add_option("--trials", f.trials, "random initial guesses per sweep-bound check");
  verify->add_flag("--no-corpus", f.no_corpus, "check only the configured problem");
  verify->add_flag("--with-problem", f.with_problem, "also check the configured problem");

  auto* generate = app.add_subcommand("generate", "write A, P, f and u_ref as MatrixMarket files");
  add_common(generate, f);

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) return run_analyze(resolve(*analyze, f, Command::Analyze));
    if (solve->parsed()) return run_solve(resolve(*solve, f, Command::Solve), f.trace);
    if (verify->parsed()) return run_verify(resolve(*verify, f, Command::Verify), f);
    if (generate->parsed()) return run_generate(resolve(*generate, f, Command::Generate));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
