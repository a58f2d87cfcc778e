#include "twogrid/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "twogrid/matrix_market.hpp"

namespace twogrid {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream msg;
    msg << what << ": expected " << rows << "x" << cols << ", got " << m.rows() << "x" << m.cols();
    throw Error(msg.str());
  }
}

Vector checked_diagonal(const SpsdOperator& a) {
  const Vector d = a.matrix.diagonal();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d(i) == 0.0) {
      std::ostringstream msg;
      msg << "zero diagonal entry at index " << i
          << ": row and column " << i << " of A are zero; delete them and solve the reduced system";
      throw Error(msg.str());
    }
  }
  return d;
}

}  // namespace

std::string describe(const SmootherSpec& spec) {
  return std::visit(overloaded{
                        [](const WeightedJacobi& j) {
                          std::ostringstream s;
                          s << "jacobi:" << j.omega;
                          return s.str();
                        },
                        [](const GaussSeidel&) { return std::string("gauss-seidel"); },
                        [](const CustomSmoother&) { return std::string("custom"); },
                    },
                    spec);
}

double jacobi_omega_limit(const SpsdOperator& a) {
  const Vector d = checked_diagonal(a);
  const Vector inv_sqrt = d.cwiseSqrt().cwiseInverse();
  // D^{-1/2} A D^{-1/2} is similar to D^{-1} A.
  const Matrix scaled = inv_sqrt.asDiagonal() * a.matrix * inv_sqrt.asDiagonal();
  const double lmax = sym_eig(scaled).values.maxCoeff();
  return 2.0 / lmax;
}

SmootherResult build_smoother(const SmootherSpec& spec, const SpsdOperator& a) {
  const Eigen::Index n = static_cast<Eigen::Index>(a.size());
  SmootherResult out;
  std::visit(overloaded{
                 [&](const WeightedJacobi& j) {
                   if (!(j.omega > 0.0)) throw Error("weighted Jacobi requires omega > 0");
                   const Vector d = checked_diagonal(a);
                   out.m = (j.omega * d.cwiseInverse()).asDiagonal();
                   const double limit = jacobi_omega_limit(a);
                   if (j.omega >= limit) {
                     std::ostringstream msg;
                     msg << "Jacobi weight " << j.omega << " is outside (0, 2/lambda_max(D^-1 A)) = (0, " << limit
                         << "); M-bar is not positive definite";
                     out.warnings.push_back(msg.str());
                   }
                 },
                 [&](const GaussSeidel&) {
                   checked_diagonal(a);
                   const Matrix lower = a.matrix.triangularView<Eigen::Lower>();
                   out.m = lower.triangularView<Eigen::Lower>().solve(Matrix::Identity(n, n));
                 },
                 [&](const CustomSmoother& c) {
                   require_shape(c.m, n, n, "custom smoother");
                   require_finite(c.m, "custom smoother");
                   out.m = c.m;
                 },
             },
             spec);
  return out;
}

Matrix mbar(const Matrix& m, const SpsdOperator& a) {
  const Eigen::Index n = static_cast<Eigen::Index>(a.size());
  require_shape(m, n, n, "mbar");
  return symmetrized(m + m.transpose() - m.transpose() * a.matrix * m);
}

Matrix mtilde(const Matrix& m, const SpsdOperator& a) {
  const Eigen::Index n = static_cast<Eigen::Index>(a.size());
  require_shape(m, n, n, "mtilde");
  return symmetrized(m + m.transpose() - m * a.matrix * m.transpose());
}

Matrix aggregation_prolongation(std::size_t n, std::size_t k) {
  if (n == 0 || k == 0) throw Error("aggregation requires positive size and aggregate width");
  const std::size_t nc = (n + k - 1) / k;
  Matrix p = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(nc));
  for (std::size_t i = 0; i < n; ++i) p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i / k)) = 1.0;
  return p;
}

TwoGridHierarchy build_hierarchy(const SpsdOperator& a, const Matrix& p, const SmootherSpec& spec,
                                 const TolerancePolicy& tol, const HierarchyOptions& options) {
  tol.validate();
  const Eigen::Index n = static_cast<Eigen::Index>(a.size());
  if (p.rows() != n) {
    std::ostringstream msg;
    msg << "prolongation has " << p.rows() << " rows, A has " << n;
    throw Error(msg.str());
  }
  require_finite(p, "prolongation");
  if (p.cols() >= n) {
    std::ostringstream msg;
    msg << "prolongation must have fewer columns than rows (n_c = " << p.cols() << ", n = " << n << ")";
    throw Error(msg.str());
  }

  TwoGridHierarchy h;
  h.tol = tol;
  h.a = a;
  h.n = static_cast<std::size_t>(n);
  h.nc = static_cast<std::size_t>(p.cols());
  h.prolongation = p;

  SmootherResult sm = build_smoother(spec, a);
  h.smoother = std::move(sm.m);
  h.warnings = std::move(sm.warnings);

  const Matrix galerkin = p.transpose() * a.matrix * p;
  const double galerkin_scale = max_abs(a.matrix) * max_abs(p) * max_abs(p);
  if (max_abs(galerkin) <= tol.rank_rel_tol * galerkin_scale)
    throw Error("Galerkin coarse matrix P^T A P is zero; the coarse space lies in N(A)");
  h.coarse = spsd_certify(galerkin, tol);

  h.rank_fine = a.rank;
  h.rank_coarse = h.coarse.rank;
  if (h.rank_coarse > h.rank_fine) {
    std::ostringstream msg;
    msg << "rank(A_c) = " << h.rank_coarse << " exceeds rank(A) = " << h.rank_fine
        << "; the rank tolerance is inconsistent for this problem";
    throw Error(msg.str());
  }

  h.mbar = mbar(h.smoother, a);
  h.mtilde = mtilde(h.smoother, a);

  const Matrix& root = a.sqrt;
  h.smoother_hat = root * h.smoother * root;
  h.mbar_hat = symmetrized(root * h.mbar * root);
  h.mtilde_hat = symmetrized(root * h.mtilde * root);

  const Matrix& cpinv = h.coarse.pinv;
  h.projector = symmetrized(root * p * cpinv * p.transpose() * root);
  h.projector_a = p * cpinv * p.transpose() * a.matrix;

  RangeNullBases bases = range_null_bases(a);
  h.range_basis = std::move(bases.range);
  h.null_basis = std::move(bases.null);

  const Vector spectrum = sym_eig(h.mbar_hat).values;
  h.smoother_min_eig = spectrum(0);
  const double scale = std::max(1.0, spectrum.cwiseAbs().maxCoeff());
  h.smoother_ok = h.smoother_min_eig >= -tol.psd_slack * scale;
  if (!h.smoother_ok) {
    std::ostringstream msg;
    msg << "smoother violates ||I - MA||_A <= 1: lambda_min(A^1/2 Mbar A^1/2) = " << h.smoother_min_eig;
    if (options.require_smoother_assumption) throw SmootherAssumptionError(msg.str(), h.smoother_min_eig);
    h.warnings.push_back(msg.str());
  }
  return h;
}

// ---------------------------------------------------------------------------

std::string describe(const ProblemSpec& spec) {
  return std::visit(overloaded{
                        [](const NeumannLaplacian1D& p) { return "neumann1d:" + std::to_string(p.n); },
                        [](const NeumannLaplacian2D& p) {
                          return "neumann2d:" + std::to_string(p.nx) + "x" + std::to_string(p.ny);
                        },
                        [](const GraphLaplacian& g) {
                          return "graph:" + std::to_string(g.nodes) + "n" + std::to_string(g.edges.size()) + "e";
                        },
                        [](const RandomSpsd& r) {
                          return "random:" + std::to_string(r.n) + ":" + std::to_string(r.rank) + ":" +
                                 std::to_string(r.seed);
                        },
                        [](const FromFile& f) { return "file:" + f.matrix_path; },
                    },
                    spec);
}

Matrix neumann_laplacian_1d(std::size_t n) {
  if (n < 2) throw Error("Neumann Laplacian needs n >= 2");
  const Eigen::Index m = static_cast<Eigen::Index>(n);
  Matrix a = Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i + 1 < m; ++i) {
    a(i, i) += 1.0;
    a(i + 1, i + 1) += 1.0;
    a(i, i + 1) -= 1.0;
    a(i + 1, i) -= 1.0;
  }
  return a;
}

Matrix neumann_laplacian_2d(std::size_t nx, std::size_t ny) {
  if (nx < 1 || ny < 1 || nx * ny < 2) throw Error("2D Neumann Laplacian needs at least two grid points");
  GraphLaplacian g;
  g.nodes = nx * ny;
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = i + nx * j;
      if (i + 1 < nx) g.edges.push_back({k, k + 1, 1.0});
      if (j + 1 < ny) g.edges.push_back({k, k + nx, 1.0});
    }
  }
  return graph_laplacian(g);
}

Matrix graph_laplacian(const GraphLaplacian& g) {
  if (g.nodes < 1) throw Error("graph Laplacian needs at least one node");
  const Eigen::Index n = static_cast<Eigen::Index>(g.nodes);
  Matrix a = Matrix::Zero(n, n);
  for (const auto& e : g.edges) {
    if (e.from >= g.nodes || e.to >= g.nodes) {
      std::ostringstream msg;
      msg << "edge (" << e.from << ", " << e.to << ") references a node outside [0, " << g.nodes << ")";
      throw Error(msg.str());
    }
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
      std::ostringstream msg;
      msg << "edge (" << e.from << ", " << e.to << ") has invalid weight " << e.weight << " (weights must be >= 0)";
      throw Error(msg.str());
    }
    if (e.from == e.to) continue;
    const auto i = static_cast<Eigen::Index>(e.from);
    const auto j = static_cast<Eigen::Index>(e.to);
    a(i, i) += e.weight;
    a(j, j) += e.weight;
    a(i, j) -= e.weight;
    a(j, i) -= e.weight;
  }
  return a;
}

Vector seeded_normal(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  Vector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = dist(rng);
  return v;
}

Matrix random_spsd(const RandomSpsd& spec) {
  if (spec.n < 2) throw Error("random SPSD matrix needs n >= 2");
  if (spec.rank < 1 || spec.rank > spec.n) throw Error("random SPSD rank must lie in [1, n]");
  const Eigen::Index n = static_cast<Eigen::Index>(spec.n);
  const Eigen::Index k = static_cast<Eigen::Index>(spec.rank);
  const Vector entries = seeded_normal(spec.n * spec.rank, spec.seed);
  const Matrix g = Eigen::Map<const Matrix>(entries.data(), k, n);
  return g.transpose() * g;
}

Problem generate_problem(const ProblemSpec& spec, std::uint64_t seed, const ToleranceOverrides& overrides) {
  Matrix a;
  Matrix p;
  std::visit(overloaded{
                 [&](const NeumannLaplacian1D& s) { a = neumann_laplacian_1d(s.n); },
                 [&](const NeumannLaplacian2D& s) { a = neumann_laplacian_2d(s.nx, s.ny); },
                 [&](const GraphLaplacian& s) { a = graph_laplacian(s); },
                 [&](const RandomSpsd& s) { a = random_spsd(s); },
                 [&](const FromFile& s) {
                   a = read_matrix_market(s.matrix_path);
                   if (!s.prolongation_path.empty()) p = read_matrix_market(s.prolongation_path);
                 },
             },
             spec);
  if (a.rows() < 2) throw Error("problem dimension must be at least 2");

  const std::size_t n = static_cast<std::size_t>(a.rows());
  Problem out;
  out.name = describe(spec);
  out.seed = seed;
  out.a = spsd_certify(a, overrides.resolve(n));
  out.prolongation = p.size() > 0 ? p : aggregation_prolongation(n, 2);
  out.u_ref = seeded_normal(n, seed);
  out.rhs = out.a.matrix * out.u_ref;
  return out;
}

}  // namespace twogrid
