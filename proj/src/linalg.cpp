#include "twogrid/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

namespace twogrid {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxSweeps = 100;

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  const Eigen::Index n = a.rows();
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < j; ++i) sum += a(i, j) * a(i, j);
  return std::sqrt(2.0 * sum);
}

std::optional<double> env_double(const char* name) {
  const char* raw = std::getenv(name);
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  const double value = std::strtod(raw, &end);
  if (end == raw || *end != '\0')
    throw Error(std::string("environment variable ") + name + " is not a number: " + raw);
  return value;
}

}  // namespace

TolerancePolicy TolerancePolicy::for_dimension(std::size_t n) {
  TolerancePolicy tol;
  tol.rank_rel_tol = static_cast<double>(std::max<std::size_t>(n, 1)) * kEps * 32.0;
  return tol;
}

void TolerancePolicy::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v > 0.0 && v < 1.0))
      throw Error(std::string("tolerance ") + name + " must lie in (0, 1)");
  };
  check(rank_rel_tol, "rank_rel_tol");
  check(psd_slack, "psd_slack");
  check(match_tol, "match_tol");
}

TolerancePolicy ToleranceOverrides::resolve(std::size_t n) const {
  TolerancePolicy tol = TolerancePolicy::for_dimension(n);
  if (rank_rel_tol) tol.rank_rel_tol = *rank_rel_tol;
  if (psd_slack) tol.psd_slack = *psd_slack;
  if (match_tol) tol.match_tol = *match_tol;
  tol.validate();
  return tol;
}

ToleranceOverrides ToleranceOverrides::from_env() {
  ToleranceOverrides o;
  o.rank_rel_tol = env_double("RANK_REL_TOL");
  o.match_tol = env_double("MATCH_TOL");
  return o;
}

void require_finite(const Matrix& m, const std::string& what) {
  if (m.rows() == 0 || m.cols() == 0) throw Error(what + ": empty matrix");
  if (!m.allFinite()) throw Error(what + ": matrix has NaN or Inf entries");
}

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

SymEigen sym_eig(const Matrix& s) {
  if (s.rows() != s.cols()) {
    std::ostringstream msg;
    msg << "sym_eig: matrix is " << s.rows() << "x" << s.cols() << ", not square";
    throw Error(msg.str());
  }
  require_finite(s, "sym_eig");

  const Eigen::Index n = s.rows();
  Matrix a = 0.5 * (s + s.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double frob = a.norm();

  if (frob > 0.0) {
    // Entries at or below `negligible` are left alone; the sweep loop ends
    // once a full sweep finds nothing to rotate.
    const double negligible = kEps * frob / static_cast<double>(n);
    int sweep = 0;
    for (; sweep < kMaxSweeps; ++sweep) {
      int rotations = 0;
      for (Eigen::Index p = 0; p < n - 1; ++p) {
        for (Eigen::Index q = p + 1; q < n; ++q) {
          const double apq = a(p, q);
          if (std::abs(apq) <= negligible) continue;
          ++rotations;
          const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
          const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          const double c = 1.0 / std::sqrt(t * t + 1.0);
          const double sn = t * c;

          // A <- J^T A J with J the (p, q) plane rotation [c s; -s c].
          for (Eigen::Index k = 0; k < n; ++k) {
            const double akp = a(k, p);
            const double akq = a(k, q);
            a(k, p) = c * akp - sn * akq;
            a(k, q) = sn * akp + c * akq;
          }
          for (Eigen::Index k = 0; k < n; ++k) {
            const double apk = a(p, k);
            const double aqk = a(q, k);
            a(p, k) = c * apk - sn * aqk;
            a(q, k) = sn * apk + c * aqk;
          }
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          for (Eigen::Index k = 0; k < n; ++k) {
            const double vkp = v(k, p);
            const double vkq = v(k, q);
            v(k, p) = c * vkp - sn * vkq;
            v(k, q) = sn * vkp + c * vkq;
          }
        }
      }
      if (rotations == 0) break;
    }
    const double residual = off_diagonal_norm(a);
    if (residual > 1e-13 * frob) {
      std::ostringstream msg;
      msg << "sym_eig: Jacobi iteration did not converge after " << sweep
          << " sweeps (off-diagonal residual " << residual << ", ||S||_F " << frob << ")";
      throw ConvergenceError(msg.str(), residual);
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });

  SymEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.values(k) = a(src, src);
    Vector col = v.col(src);
    Eigen::Index pivot = 0;
    for (Eigen::Index i = 1; i < n; ++i)
      if (std::abs(col(i)) > std::abs(col(pivot))) pivot = i;
    if (col(pivot) < 0.0) col = -col;
    out.vectors.col(k) = col;
  }
  return out;
}

SpsdOperator spsd_certify(const Matrix& s, const TolerancePolicy& tol) {
  tol.validate();
  if (s.rows() != s.cols()) {
    std::ostringstream msg;
    msg << "spsd_certify: matrix is " << s.rows() << "x" << s.cols() << ", not square";
    throw Error(msg.str());
  }
  require_finite(s, "spsd_certify");

  const double scale = max_abs(s);
  if (scale == 0.0) throw Error("spsd_certify: zero matrix (a nonzero SPSD matrix is required)");
  const double skew = max_abs(s - s.transpose());
  if (skew > std::max(tol.match_tol, 1e3 * kEps) * scale) {
    std::ostringstream msg;
    msg << "spsd_certify: matrix is not symmetric (max |S - S^T| = " << skew << ")";
    throw Error(msg.str());
  }

  SpsdOperator op;
  op.tol = tol;
  op.matrix = 0.5 * (s + s.transpose());
  op.eig = sym_eig(op.matrix);

  const Eigen::Index n = op.matrix.rows();
  const double lmax = op.eig.values(n - 1);
  const double lmin = op.eig.values(0);
  if (lmax <= 0.0 || lmin < -tol.psd_slack * lmax) {
    std::ostringstream msg;
    msg << "spsd_certify: matrix is not SPSD (lambda_min = " << lmin << ", lambda_max = " << lmax << ")";
    throw NotSpsdError(msg.str(), lmin);
  }

  op.threshold = tol.rank_rel_tol * lmax;
  Vector root(n);
  Vector inv(n);
  op.rank = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double& lambda = op.eig.values(i);
    if (lambda < 0.0) lambda = 0.0;
    if (lambda > op.threshold) {
      ++op.rank;
      root(i) = std::sqrt(lambda);
      inv(i) = 1.0 / lambda;
    } else {
      root(i) = 0.0;
      inv(i) = 0.0;
    }
  }
  const Matrix& q = op.eig.vectors;
  op.sqrt = q * root.asDiagonal() * q.transpose();
  op.pinv = q * inv.asDiagonal() * q.transpose();
  op.sqrt = 0.5 * (op.sqrt + op.sqrt.transpose()).eval();
  op.pinv = 0.5 * (op.pinv + op.pinv.transpose()).eval();
  return op;
}

std::size_t numerical_rank(const SpsdOperator& s) {
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < s.eig.values.size(); ++i)
    if (s.eig.values(i) > s.threshold) ++count;
  return count;
}

RangeNullBases range_null_bases(const SpsdOperator& s) {
  const Eigen::Index n = static_cast<Eigen::Index>(s.size());
  const Eigen::Index r = static_cast<Eigen::Index>(s.rank);
  // Eigenvalues are ascending, so the null space comes first.
  return {s.eig.vectors.rightCols(r), s.eig.vectors.leftCols(n - r)};
}

NullityDecision psd_nullity(const Matrix& s, double rank_rel_tol) {
  const SymEigen eig = sym_eig(s);
  const Eigen::Index n = eig.values.size();
  const double lmax = eig.values(n - 1);
  NullityDecision d;
  if (lmax <= 0.0) {
    d.nullity = static_cast<std::size_t>(n);
    return d;
  }
  const double cut = rank_rel_tol * lmax;
  d.smallest_retained = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double rel = eig.values(i) / lmax;
    if (eig.values(i) <= cut) {
      ++d.nullity;
      d.largest_discarded = std::max(d.largest_discarded, rel);
    } else {
      d.smallest_retained = std::min(d.smallest_retained, rel);
    }
  }
  return d;
}

NullityDecision null_intersection(const Matrix& k1, const Matrix& k2, double rank_rel_tol) {
  if (k1.cols() != k2.cols()) {
    std::ostringstream msg;
    msg << "null_intersection: column counts differ (" << k1.cols() << " vs " << k2.cols() << ")";
    throw Error(msg.str());
  }
  auto normalized = [](const Matrix& k) -> Matrix {
    const double nrm = k.norm();
    return nrm > 0.0 ? Matrix(k / nrm) : k;
  };
  const Matrix a = normalized(k1);
  const Matrix b = normalized(k2);
  const Matrix gram = a.transpose() * a + b.transpose() * b;
  return psd_nullity(gram, rank_rel_tol);
}

std::size_t null_intersection_dim(const Matrix& k1, const Matrix& k2, double rank_rel_tol) {
  return null_intersection(k1, k2, rank_rel_tol).nullity;
}

double penrose_residual(const SpsdOperator& s) {
  const Matrix& a = s.matrix;
  const Matrix& p = s.pinv;
  const double a_scale = std::max(max_abs(a), std::numeric_limits<double>::min());
  const double p_scale = std::max(max_abs(p), std::numeric_limits<double>::min());
  const Matrix ap = a * p;
  const Matrix pa = p * a;
  double res = max_abs(ap * a - a) / a_scale;
  res = std::max(res, max_abs(pa * p - p) / p_scale);
  res = std::max(res, max_abs(ap - ap.transpose()));
  res = std::max(res, max_abs(pa - pa.transpose()));
  return res;
}

}  // namespace twogrid
