#include "twogrid/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace twogrid {

namespace {

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

double root_of_complement(double lambda) { return std::sqrt(std::max(0.0, 1.0 - lambda)); }

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

// S^{+/2}: inverse square root on the numerical range, zero on the null space.
Matrix pinv_sqrt(const SpsdOperator& s) {
  const Eigen::Index n = idx(s.size());
  Vector d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lambda = s.eig.values(i);
    d(i) = lambda > s.threshold ? 1.0 / std::sqrt(lambda) : 0.0;
  }
  return symmetrized(s.eig.vectors * d.asDiagonal() * s.eig.vectors.transpose());
}

struct SigmaData {
  double sigma = 1.0;
  double gap = 0.0;
  Vector mtilde_spectrum;  // ascending eigenvalues of A^{1/2} Mtilde A^{1/2}
};

// sigma_TG on the symmetric form (I - Pi) A^{1/2} Mtilde A^{1/2} (I - Pi), which
// shares its spectrum with Mtilde A (I - Pi_A).
SigmaData compute_sigma(const TwoGridHierarchy& h) {
  SigmaData out;
  out.mtilde_spectrum = sym_eig(h.mtilde_hat).values;
  const std::size_t n = h.n;
  const std::size_t r = h.rank_fine;
  const std::size_t s = h.rank_coarse;
  if (s >= r) return out;  // Pi covers R(A): the factor is exactly zero.

  const Matrix complement = Matrix::Identity(idx(n), idx(n)) - h.projector;
  const Vector spectrum = sym_eig(symmetrized(complement * h.mtilde_hat * complement)).values;
  const std::size_t i = n - r + s;
  if (i >= n) throw Error("sigma_TG index out of range; rank thresholds are inconsistent");
  out.sigma = spectrum(idx(i));
  out.gap = i == 0 ? spectrum(0) : spectrum(idx(i)) - spectrum(idx(i - 1));
  return out;
}

Matrix identity(std::size_t n) { return Matrix::Identity(idx(n), idx(n)); }

}  // namespace

ConditionReport check_conditions(const TwoGridHierarchy& h) {
  ConditionReport rep;
  const double rel = h.tol.rank_rel_tol;
  rep.smoother_ok = h.smoother_ok;
  rep.smoother_min_eig = h.smoother_min_eig;
  rep.nullity_a = h.n - h.rank_fine;

  const Matrix k2 = h.prolongation.transpose() * (identity(h.n) - h.a.matrix * h.smoother) * h.a.sqrt;
  rep.equiv_decision = null_intersection(h.mbar_hat, k2, rel);
  rep.intersection_dim = rep.equiv_decision.nullity;
  rep.equiv_cond_ok = rep.intersection_dim == rep.nullity_a;

  const Vector mbar_spec = sym_eig(h.mbar).values;
  const double mbar_scale = mbar_spec.cwiseAbs().maxCoeff();
  rep.mbar_psd = mbar_spec(0) >= -h.tol.psd_slack * mbar_scale;
  rep.mbar_pd = mbar_scale > 0.0 && mbar_spec(0) > rel * mbar_scale;

  // R(A) = N(Z^T) for an orthonormal null basis Z of A.
  const Matrix zt = h.null_basis.transpose();
  rep.suff_decision = null_intersection(h.mbar, zt, rel);
  rep.mbar_range_intersection_dim = rep.suff_decision.nullity;
  rep.suff_cond_ok = rep.mbar_psd && rep.mbar_range_intersection_dim == 0;
  return rep;
}

Matrix assemble_ftg(const TwoGridHierarchy& h) {
  const Matrix smooth = identity(h.n) - h.smoother_hat;
  return symmetrized(h.mbar_hat + smooth.transpose() * h.projector * smooth);
}

Matrix assemble_fitg(const TwoGridHierarchy& h, const Matrix& bc_pinv) {
  const Matrix modified = 2.0 * bc_pinv - bc_pinv * h.coarse.matrix * bc_pinv;
  const Matrix lifted = h.a.sqrt * h.prolongation;
  const Matrix coarse_term = lifted * symmetrized(modified) * lifted.transpose();
  const Matrix smooth = identity(h.n) - h.smoother_hat;
  return symmetrized(h.mbar_hat + smooth.transpose() * coarse_term * smooth);
}

double seminorm_oracle(const TwoGridHierarchy& h, const IterationKind& kind, const Matrix* basis) {
  const Matrix eye = identity(h.n);
  const Matrix smooth = eye - h.smoother_hat;
  Matrix g;
  if (std::holds_alternative<TwoGrid>(kind)) {
    g = (eye - h.projector) * smooth;
  } else if (std::holds_alternative<SymmetricTwoGrid>(kind)) {
    g = smooth.transpose() * (eye - h.projector) * smooth;
  } else {
    const Matrix& bc_pinv = std::get<InexactTwoGrid>(kind).coarse_pinv;
    if (bc_pinv.rows() != idx(h.nc) || bc_pinv.cols() != idx(h.nc)) throw Error("oracle: B_c^+ has the wrong shape");
    const Matrix lifted = h.a.sqrt * h.prolongation;
    g = (eye - lifted * bc_pinv * lifted.transpose()) * smooth;
  }
  const Matrix& v = basis != nullptr ? *basis : h.range_basis;
  if (v.rows() != idx(h.n)) throw Error("oracle: basis has the wrong number of rows");
  if (v.cols() == 0) return 0.0;
  const Matrix w = g * v;
  const double lmax = sym_eig(w.transpose() * w).values.maxCoeff();
  return std::sqrt(std::max(0.0, lmax));
}

TwoSidedBounds exact_two_sided(const TwoGridHierarchy& h) {
  const Vector spec = sym_eig(h.mtilde_hat).values;
  const std::size_t n = h.n;
  const std::size_t r = h.rank_fine;
  const std::size_t s = h.rank_coarse;
  TwoSidedBounds b;
  b.upper = root_of_complement(spec(idx(n - r)));
  b.lower = s < r ? root_of_complement(spec(idx(n - r + s))) : 0.0;
  return b;
}

ExactFactorReport exact_factor(const TwoGridHierarchy& h) {
  ExactFactorReport rep;
  const std::size_t n = h.n;
  const std::size_t r = h.rank_fine;
  const std::size_t s = h.rank_coarse;

  const SigmaData sd = compute_sigma(h);
  rep.mtilde_a_low = sd.mtilde_spectrum(idx(n - r));
  rep.mtilde_a_high = s < r ? sd.mtilde_spectrum(idx(n - r + s)) : 1.0;
  rep.degenerate = s >= r;
  rep.sigma_tg = sd.sigma;
  rep.eigengap_at_index = sd.gap;
  rep.factor_identity = rep.degenerate ? 0.0 : root_of_complement(sd.sigma);

  const Matrix ftg = assemble_ftg(h);
  const Vector ftg_spec = sym_eig(ftg).values;
  rep.factor_ftg = root_of_complement(ftg_spec(idx(n - r)));
  rep.nullity_ftg = psd_nullity(ftg, h.tol.rank_rel_tol).nullity;

  rep.factor_oracle = seminorm_oracle(h, TwoGrid{});

  rep.upper_bound = root_of_complement(rep.mtilde_a_low);
  rep.lower_bound = rep.degenerate ? 0.0 : root_of_complement(rep.mtilde_a_high);

  rep.equiv_cond_warning = !check_conditions(h).equiv_cond_ok;
  return rep;
}

void require_matching_range(const SpsdOperator& coarse, const SpsdOperator& bc) {
  if (bc.size() != coarse.size()) {
    std::ostringstream msg;
    msg << "B_c is " << bc.size() << "x" << bc.size() << " but A_c is " << coarse.size() << "x" << coarse.size();
    throw CoarseSolverError(msg.str());
  }
  if (bc.rank != coarse.rank) {
    std::ostringstream msg;
    msg << "range condition R(B_c) = R(A_c) fails: rank(B_c) = " << bc.rank << " but rank(A_c) = " << coarse.rank;
    throw CoarseSolverError(msg.str());
  }
  const std::size_t nullity = coarse.nullity();
  if (nullity == 0) return;
  const std::size_t nc = coarse.size();
  Matrix stacked(idx(nc), idx(2 * nullity));
  stacked << range_null_bases(coarse).null, range_null_bases(bc).null;
  const std::size_t joint = nc - psd_nullity(stacked * stacked.transpose(), coarse.tol.rank_rel_tol).nullity;
  if (joint != nullity) {
    std::ostringstream msg;
    msg << "range condition R(B_c) = R(A_c) fails: null spaces of B_c and A_c differ in "
        << (joint - nullity) << " direction(s)";
    throw CoarseSolverError(msg.str());
  }
}

SpectralEquivalence spectral_equivalence(const SpsdOperator& coarse, const SpsdOperator& bc) {
  require_matching_range(coarse, bc);
  const std::size_t nc = coarse.size();
  const std::size_t s = coarse.rank;
  const Matrix ac_inv_root = pinv_sqrt(coarse);
  const Vector forward = sym_eig(symmetrized(ac_inv_root * bc.matrix * ac_inv_root)).values;
  const Vector inverse = sym_eig(symmetrized(coarse.sqrt * bc.pinv * coarse.sqrt)).values;
  SpectralEquivalence eq;
  eq.c1 = forward(idx(nc - s));
  eq.c2 = forward.maxCoeff();
  eq.d1 = inverse(idx(nc - s));
  eq.d2 = inverse.maxCoeff();
  return eq;
}

BetaConstants beta_constants(double alpha1, double alpha2) {
  if (!(alpha1 > 0.0 && alpha1 <= alpha2 && alpha2 < 2.0))
    throw Error("beta constants need 0 < alpha1 <= alpha2 < 2");
  const double g1 = (2.0 - alpha1) * alpha1;
  const double g2 = (2.0 - alpha2) * alpha2;
  if (alpha2 <= 1.0) return {g1, g2};
  if (alpha1 <= 1.0) return {std::min(g1, g2), 1.0};
  return {g2, g1};
}

double lower_bound_l(const BoundInputs& in, double beta2) {
  // low + beta2 (1 - delta) >= sigma always; a term below sigma by rounding only
  // would otherwise be magnified by the square root when sigma is close to 1.
  const double t = in.mtilde_a_low + beta2 * (1.0 - in.delta_tg);
  const double rounding = 64.0 * std::numeric_limits<double>::epsilon();
  return root_of_complement(t >= in.sigma_tg - rounding ? in.sigma_tg : t);
}

double upper_bound_u(const BoundInputs& in, double beta1) {
  const double best = std::max({in.mtilde_a_low, beta1 * in.sigma_tg,
                                in.sigma_tg - (1.0 - beta1) * (1.0 - in.delta_tg)});
  return root_of_complement(best);
}

DeltaReport delta_tg(const TwoGridHierarchy& h) {
  DeltaReport rep;
  // Pi A^{1/2} Mtilde A^{1/2} Pi shares its spectrum with Mtilde A Pi_A.
  const Matrix y = symmetrized(h.projector * h.mtilde_hat * h.projector);
  rep.decision = psd_nullity(y, h.tol.rank_rel_tol);
  rep.guard_holds = h.n - rep.decision.nullity == h.rank_coarse;
  if (rep.guard_holds) rep.delta_tg = sym_eig(y).values(idx(h.n - h.rank_coarse));
  return rep;
}

InexactFactorReport inexact_linear_analysis(const TwoGridHierarchy& h, const SpsdOperator& bc) {
  require_matching_range(h.coarse, bc);
  const std::size_t n = h.n;
  const std::size_t nc = h.nc;
  const std::size_t r = h.rank_fine;
  const std::size_t s = h.rank_coarse;

  InexactFactorReport rep;
  const Matrix bc_inv_root = pinv_sqrt(bc);
  const Vector alpha_spec = sym_eig(symmetrized(bc_inv_root * h.coarse.matrix * bc_inv_root)).values;
  rep.alpha1 = alpha_spec(idx(nc - s));
  rep.alpha2 = alpha_spec.maxCoeff();
  if (rep.alpha2 >= 2.0) {
    std::ostringstream msg;
    msg << "alpha2 = lambda_max(B_c^+ A_c) = " << rep.alpha2
        << " violates alpha2 < 2; scale B_c by a factor greater than " << rep.alpha2 / 2.0;
    throw CoarseSolverError(msg.str());
  }
  const BetaConstants beta = beta_constants(rep.alpha1, rep.alpha2);
  rep.beta1 = beta.beta1;
  rep.beta2 = beta.beta2;

  const DeltaReport delta = delta_tg(h);
  rep.delta_tg = delta.delta_tg;
  rep.delta_guard = delta.guard_holds;

  const SigmaData sd = compute_sigma(h);
  rep.sigma_tg = sd.sigma;
  const BoundInputs in{sd.sigma, rep.delta_tg, sd.mtilde_spectrum(idx(n - r))};
  rep.lower_l = lower_bound_l(in, rep.beta2);
  rep.upper_u = upper_bound_u(in, rep.beta1);

  const Matrix fitg = assemble_fitg(h, bc.pinv);
  rep.factor_exact_itg = root_of_complement(sym_eig(fitg).values(idx(n - r)));
  rep.nullity_fitg = psd_nullity(fitg, h.tol.rank_rel_tol).nullity;
  rep.factor_oracle = seminorm_oracle(h, InexactTwoGrid{bc.pinv});
  return rep;
}

double general_epsilon_bound(const TwoGridHierarchy& h, double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw Error("coarse accuracy eps must lie in [0, 1)");
  const SigmaData sd = compute_sigma(h);
  const BoundInputs in{sd.sigma, delta_tg(h).delta_tg, sd.mtilde_spectrum(idx(h.n - h.rank_fine))};
  return upper_bound_u(in, 1.0 - eps * eps);
}

}  // namespace twogrid
