#include "twogrid/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "twogrid/matrix_market.hpp"

namespace twogrid {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::size_t parse_count(const std::string& s, const std::string& what) {
  std::size_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) throw ConfigError("invalid " + what + " '" + s + "'");
  return v;
}

double parse_real(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw ConfigError("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid " + what + " '" + s + "'");
  }
}

std::string after_prefix(const std::string& s, const std::string& prefix) {
  return s.compare(0, prefix.size(), prefix) == 0 ? s.substr(prefix.size()) : std::string();
}

bool has_prefix(const std::string& s, const std::string& prefix) { return s.compare(0, prefix.size(), prefix) == 0; }

GraphLaplacian read_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open edge list");
  GraphLaplacian g;
  std::string line;
  long line_no = 0;
  std::size_t max_node = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line.substr(0, line.find('#')));
    if (t.empty()) continue;
    std::istringstream row(t);
    long i = -1, j = -1;
    double w = 1.0;
    if (!(row >> i >> j) || i < 0 || j < 0) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected 'i j [weight]' with 0-based nodes");
    }
    if (!(row >> w)) w = 1.0;
    if (!(w >= 0.0)) throw ConfigError(path + ":" + std::to_string(line_no) + ": negative edge weight");
    g.edges.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), w});
    max_node = std::max({max_node, static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
  }
  if (g.edges.empty()) throw ConfigError(path + ": edge list is empty");
  g.nodes = max_node + 1;
  return g;
}

GraphLaplacian named_graph(const std::string& kind, std::size_t n) {
  if (n < 2) throw ConfigError("graph needs at least 2 nodes");
  GraphLaplacian g;
  g.nodes = n;
  if (kind == "path") {
    for (std::size_t i = 0; i + 1 < n; ++i) g.edges.push_back({i, i + 1, 1.0});
  } else if (kind == "cycle") {
    if (n < 3) throw ConfigError("cycle graph needs at least 3 nodes");
    for (std::size_t i = 0; i < n; ++i) g.edges.push_back({i, (i + 1) % n, 1.0});
  } else if (kind == "twocomp") {
    if (n < 4) throw ConfigError("two-component graph needs at least 4 nodes");
    const std::size_t half = n / 2;
    for (std::size_t i = 0; i + 1 < half; ++i) g.edges.push_back({i, i + 1, 1.0});
    for (std::size_t i = half; i + 1 < n; ++i) g.edges.push_back({i, i + 1, 2.0});
  } else {
    throw ConfigError("unknown graph kind '" + kind + "' (path, cycle, twocomp or an edge-list file)");
  }
  return g;
}

Matrix read_prolongation(const std::string& text, std::size_t n) {
  if (has_prefix(text, "aggregate:")) return aggregation_prolongation(n, parse_count(after_prefix(text, "aggregate:"), "aggregate size"));
  if (text == "aggregate") return aggregation_prolongation(n, 2);
  return read_matrix_market(has_prefix(text, "file:") ? after_prefix(text, "file:") : text);
}

Vector read_vector(const std::string& path, std::size_t n, const std::string& what) {
  const Matrix m = read_matrix_market(path);
  if (m.cols() != 1 || m.rows() != static_cast<Eigen::Index>(n)) {
    std::ostringstream msg;
    msg << path << ": " << what << " must be " << n << "x1, got " << m.rows() << "x" << m.cols();
    throw ConfigError(msg.str());
  }
  return m.col(0);
}

}  // namespace

ProblemSpec parse_problem(const std::string& text) {
  const auto parts = split(text, ':');
  const std::string& kind = parts[0];
  if (kind == "neumann1d" && parts.size() == 2) return NeumannLaplacian1D{parse_count(parts[1], "size")};
  if (kind == "neumann2d" && parts.size() == 2) {
    const auto dims = split(parts[1], 'x');
    if (dims.size() != 2) throw ConfigError("neumann2d expects NXxNY, got '" + parts[1] + "'");
    return NeumannLaplacian2D{parse_count(dims[0], "grid size"), parse_count(dims[1], "grid size")};
  }
  if (kind == "graph" && parts.size() == 3) return named_graph(parts[1], parse_count(parts[2], "node count"));
  if (kind == "graph" && parts.size() >= 2) return read_edge_list(text.substr(6));
  if (kind == "random" && (parts.size() == 3 || parts.size() == 4)) {
    RandomSpsd r;
    r.n = parse_count(parts[1], "size");
    r.rank = parse_count(parts[2], "rank");
    r.seed = parts.size() == 4 ? parse_count(parts[3], "seed") : 0;
    return r;
  }
  if (kind == "file" && parts.size() >= 2) return FromFile{text.substr(5), ""};
  throw ConfigError("unrecognized problem '" + text +
                    "' (neumann1d:N, neumann2d:NXxNY, graph:path|cycle|twocomp:N, graph:FILE, random:N:RANK[:SEED], file:A.mtx)");
}

SmootherSpec parse_smoother(const std::string& text, std::size_t n) {
  if (text == "jacobi") return WeightedJacobi{};
  if (has_prefix(text, "jacobi:")) {
    const double w = parse_real(after_prefix(text, "jacobi:"), "Jacobi weight");
    if (!(w > 0.0)) throw ConfigError("Jacobi weight must be positive");
    return WeightedJacobi{w};
  }
  if (text == "gs" || text == "gauss-seidel") return GaussSeidel{};
  if (text == "zero") {
    const auto m = static_cast<Eigen::Index>(n);
    return CustomSmoother{Matrix::Zero(m, m)};
  }
  if (has_prefix(text, "file:")) return CustomSmoother{read_matrix_market(after_prefix(text, "file:"))};
  throw ConfigError("unrecognized smoother '" + text + "' (jacobi[:W], gs, zero, file:M.mtx)");
}

CoarseDescriptor parse_coarse(const std::string& text) {
  CoarseDescriptor d;
  d.text = text;
  if (text == "exact") return d;
  if (has_prefix(text, "bc:")) {
    d.kind = CoarseDescriptor::Kind::File;
    d.path = after_prefix(text, "bc:");
    return d;
  }
  if (has_prefix(text, "scaled:")) {
    d.kind = CoarseDescriptor::Kind::Scaled;
    d.value = parse_real(after_prefix(text, "scaled:"), "coarse scaling");
    if (!(d.value > 0.0)) throw ConfigError("coarse scaling must be positive");
    return d;
  }
  if (has_prefix(text, "perturbed:")) {
    d.kind = CoarseDescriptor::Kind::Perturbed;
    d.value = parse_real(after_prefix(text, "perturbed:"), "perturbation size");
    if (!(d.value >= 0.0 && d.value < 1.0)) throw ConfigError("perturbation size must lie in [0, 1)");
    return d;
  }
  if (has_prefix(text, "eps:")) {
    d.kind = CoarseDescriptor::Kind::Epsilon;
    d.value = parse_real(after_prefix(text, "eps:"), "coarse accuracy");
    if (!(d.value >= 0.0 && d.value < 1.0)) throw ConfigError("coarse accuracy eps must lie in [0, 1)");
    return d;
  }
  throw ConfigError("unrecognized coarse solver '" + text + "' (exact, bc:FILE, scaled:C, perturbed:T, eps:X)");
}

Command parse_command(const std::string& text) {
  if (text == "analyze") return Command::Analyze;
  if (text == "solve") return Command::Solve;
  if (text == "verify") return Command::Verify;
  if (text == "generate") return Command::Generate;
  throw ConfigError("unknown command '" + text + "'");
}

OutputFormat parse_format(const std::string& text) {
  if (text == "json") return OutputFormat::Json;
  if (text == "csv") return OutputFormat::Csv;
  throw ConfigError("unknown format '" + text + "' (json or csv)");
}

void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line.substr(0, line.find('#')));
    if (t.empty()) continue;
    const auto eq = t.find('=');
    const std::string where = path + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    try {
      if (key == "command") cfg.command = parse_command(value);
      else if (key == "problem") cfg.problem = value;
      else if (key == "smoother") cfg.smoother = value;
      else if (key == "prolongation") cfg.prolongation = value;
      else if (key == "coarse") cfg.coarse = value;
      else if (key == "variant") cfg.variant = value;
      else if (key == "sweeps") cfg.sweeps = parse_count(value, "sweep count");
      else if (key == "seed") cfg.seed = parse_count(value, "seed");
      else if (key == "output") cfg.output = value;
      else if (key == "format") cfg.format = parse_format(value);
      else if (key == "rhs") cfg.rhs_path = value;
      else if (key == "initial") cfg.initial_path = value;
      else if (key == "rank_rel_tol") cfg.tol.rank_rel_tol = parse_real(value, "rank_rel_tol");
      else if (key == "psd_slack") cfg.tol.psd_slack = parse_real(value, "psd_slack");
      else if (key == "match_tol") cfg.tol.match_tol = parse_real(value, "match_tol");
      else throw ConfigError("unknown key '" + key + "'");
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
}

Matrix range_preserving_perturbation(const SpsdOperator& coarse, double t, std::uint64_t seed) {
  if (!(t >= 0.0 && t < 1.0)) throw Error("perturbation size must lie in [0, 1)");
  const Eigen::Index nc = static_cast<Eigen::Index>(coarse.size());
  const Vector entries = seeded_normal(coarse.size() * coarse.size(), seed);
  Matrix g = Eigen::Map<const Matrix>(entries.data(), nc, nc);
  g = 0.5 * (g + g.transpose()).eval();
  const double norm = sym_eig(g).values.cwiseAbs().maxCoeff();
  if (norm > 0.0) g /= norm;
  const Matrix inner = Matrix::Identity(nc, nc) + t * g;
  const Matrix b = coarse.sqrt * inner * coarse.sqrt;
  return 0.5 * (b + b.transpose());
}

std::optional<SpsdOperator> coarse_operator(const CoarseDescriptor& d, const TwoGridHierarchy& h, std::uint64_t seed) {
  switch (d.kind) {
    case CoarseDescriptor::Kind::Exact:
    case CoarseDescriptor::Kind::Epsilon:
      return std::nullopt;
    case CoarseDescriptor::Kind::File: {
      const Matrix b = read_matrix_market(d.path);
      if (b.rows() != static_cast<Eigen::Index>(h.nc) || b.cols() != static_cast<Eigen::Index>(h.nc)) {
        std::ostringstream msg;
        msg << d.path << ": B_c must be " << h.nc << "x" << h.nc << ", got " << b.rows() << "x" << b.cols();
        throw ConfigError(msg.str());
      }
      return spsd_certify(b, h.tol);
    }
    case CoarseDescriptor::Kind::Scaled:
      return spsd_certify(d.value * h.coarse.matrix, h.tol);
    case CoarseDescriptor::Kind::Perturbed:
      return spsd_certify(range_preserving_perturbation(h.coarse, d.value, seed), h.tol);
  }
  return std::nullopt;
}

ToleranceOverrides effective_tolerances(const RunConfig& cfg) {
  ToleranceOverrides tol = ToleranceOverrides::from_env();
  if (cfg.tol.rank_rel_tol) tol.rank_rel_tol = cfg.tol.rank_rel_tol;
  if (cfg.tol.psd_slack) tol.psd_slack = cfg.tol.psd_slack;
  if (cfg.tol.match_tol) tol.match_tol = cfg.tol.match_tol;
  return tol;
}

Setup prepare(const RunConfig& cfg, const HierarchyOptions& options) {
  const ToleranceOverrides tol = effective_tolerances(cfg);
  Setup s;
  s.problem = generate_problem(parse_problem(cfg.problem), cfg.seed, tol);
  s.problem.name = cfg.problem;
  const std::size_t n = s.problem.a.size();
  s.problem.prolongation = read_prolongation(cfg.prolongation, n);
  s.prolongation_text = cfg.prolongation;
  const SmootherSpec smoother = parse_smoother(cfg.smoother, n);
  s.smoother_text = cfg.smoother;
  s.h = build_hierarchy(s.problem.a, s.problem.prolongation, smoother, s.problem.a.tol, options);
  s.coarse = parse_coarse(cfg.coarse);

  if (!cfg.rhs_path.empty()) {
    s.problem.rhs = read_vector(cfg.rhs_path, n, "right-hand side");
    s.problem.u_ref = Vector();
  }
  s.u0 = cfg.initial_path.empty() ? Vector(Vector::Zero(static_cast<Eigen::Index>(n)))
                                  : read_vector(cfg.initial_path, n, "initial guess");
  s.bc = coarse_operator(s.coarse, s.h, cfg.seed);
  return s;
}

CoarseSolverSpec coarse_solver(const Setup& s, std::uint64_t seed) {
  if (s.bc) return LinearCoarse{*s.bc};
  if (s.coarse.kind == CoarseDescriptor::Kind::Epsilon) return perturbed_exact_coarse(s.h, s.coarse.value, seed);
  return ExactCoarse{};
}

}  // namespace twogrid
