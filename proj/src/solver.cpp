#include "twogrid/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <sstream>

namespace twogrid {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kStagnationRatio = 1.0 - 1e-8;
constexpr double kFinalResidualTol = 1e-8;
constexpr std::size_t kDivergenceWindow = 5;
constexpr double kDivergenceGrowth = 10.0;

void check_sizes(const TwoGridHierarchy& h, const Vector& u0, const Vector& f) {
  const auto n = static_cast<Eigen::Index>(h.n);
  if (u0.size() != n || f.size() != n) {
    std::ostringstream msg;
    msg << "sweep: expected vectors of length " << h.n << ", got u0 " << u0.size() << " and f " << f.size();
    throw Error(msg.str());
  }
}

Vector apply_coarse(const TwoGridHierarchy& h, const CoarseSolverSpec& coarse, const Vector& rc,
                    std::optional<double>& achieved) {
  if (std::holds_alternative<ExactCoarse>(coarse)) return h.coarse.pinv * rc;
  if (const auto* lin = std::get_if<LinearCoarse>(&coarse)) {
    if (lin->bc.size() != h.nc) throw Error("coarse solver: B_c has the wrong size");
    return lin->bc.pinv * rc;
  }
  const auto& gen = std::get<GeneralCoarse>(coarse);
  if (!gen.solve) throw Error("coarse solver: empty callable");
  Vector ec_hat = gen.solve(rc);
  if (ec_hat.size() != rc.size()) {
    std::ostringstream msg;
    msg << "coarse solver returned a vector of length " << ec_hat.size() << ", expected " << rc.size();
    throw Error(msg.str());
  }
  require_finite(ec_hat, "coarse solver output");
  if (gen.verify) {
    const Vector ec = h.coarse.pinv * rc;
    const double denom = a_seminorm(h.coarse, ec);
    const double num = a_seminorm(h.coarse, ec - ec_hat);
    if (denom > 0.0) achieved = num / denom;
    else achieved = num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return ec_hat;
}

}  // namespace

double a_seminorm(const SpsdOperator& a, const Vector& v) { return (a.sqrt * v).norm(); }

GeneralCoarse perturbed_exact_coarse(const TwoGridHierarchy& h, double eps, std::uint64_t seed) {
  if (!(eps >= 0.0 && eps < 1.0)) throw Error("perturbed coarse solver: eps must lie in [0, 1)");
  auto rng = std::make_shared<std::mt19937_64>(seed);
  const SpsdOperator coarse = h.coarse;
  GeneralCoarse g;
  g.declared_eps = eps;
  g.solve = [rng, coarse, eps](const Vector& rc) -> Vector {
    const Vector ec = coarse.pinv * rc;
    const double target = eps * a_seminorm(coarse, ec);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector w(rc.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = normal(*rng);
    w = coarse.pinv * (coarse.matrix * w);  // project onto R(A_c)
    const double size = a_seminorm(coarse, w);
    if (target == 0.0 || size == 0.0) return ec;
    return ec + (target / size) * w;
  };
  return g;
}

double consistency_residual(const TwoGridHierarchy& h, const Vector& f) {
  const double fn = f.norm();
  if (fn == 0.0 || h.null_basis.cols() == 0) return 0.0;
  return (h.null_basis.transpose() * f).norm() / fn;
}

void require_consistent(const TwoGridHierarchy& h, const Vector& f) {
  if (f.size() != static_cast<Eigen::Index>(h.n)) throw Error("right-hand side has the wrong length");
  require_finite(f, "right-hand side");
  const double res = consistency_residual(h, f);
  if (res > h.tol.match_tol) {
    std::ostringstream msg;
    msg.precision(6);
    msg << "inconsistent system: f has a component in N(A), ||Z^T f|| / ||f|| = " << res << " > "
        << h.tol.match_tol;
    throw InconsistentSystemError(msg.str(), res);
  }
}

SweepOutcome itg_sweep_detailed(const TwoGridHierarchy& h, const Vector& u0, const Vector& f,
                                const CoarseSolverSpec& coarse) {
  check_sizes(h, u0, f);
  require_consistent(h, f);
  SweepOutcome out;
  out.u_smoothed = u0 + h.smoother * (f - h.a.matrix * u0);
  out.coarse_residual = h.prolongation.transpose() * (f - h.a.matrix * out.u_smoothed);
  out.coarse_update = apply_coarse(h, coarse, out.coarse_residual, out.achieved_eps);
  out.u = out.u_smoothed + h.prolongation * out.coarse_update;
  return out;
}

Vector tg_sweep(const TwoGridHierarchy& h, const Vector& u0, const Vector& f) {
  return itg_sweep_detailed(h, u0, f, ExactCoarse{}).u;
}

Vector itg_sweep(const TwoGridHierarchy& h, const Vector& u0, const Vector& f, const CoarseSolverSpec& coarse) {
  return itg_sweep_detailed(h, u0, f, coarse).u;
}

Vector stg_sweep(const TwoGridHierarchy& h, const Vector& u0, const Vector& f) {
  const Vector u = tg_sweep(h, u0, f);
  return u + h.smoother.transpose() * (f - h.a.matrix * u);
}

std::string describe(const SweepVariant& v) {
  if (std::holds_alternative<TgVariant>(v)) return "tg";
  if (std::holds_alternative<StgVariant>(v)) return "stg";
  const auto& c = std::get<ItgVariant>(v).coarse;
  if (std::holds_alternative<ExactCoarse>(c)) return "itg:exact";
  if (std::holds_alternative<LinearCoarse>(c)) return "itg:linear";
  return "itg:general";
}

IterationTrace iterate(const TwoGridHierarchy& h, const Vector& f, const Vector& u0, std::size_t sweeps,
                       const SweepVariant& variant, const std::optional<Vector>& u_ref) {
  if (sweeps == 0) throw Error("iterate: sweeps must be at least 1");
  check_sizes(h, u0, f);
  require_consistent(h, f);
  if (u_ref && u_ref->size() != f.size()) throw Error("iterate: reference solution has the wrong length");

  IterationTrace t;
  t.has_reference = u_ref.has_value();
  const double fn = f.norm();
  auto measure = [&](const Vector& u) {
    return t.has_reference ? a_seminorm(h.a, *u_ref - u) : (f - h.a.matrix * u).norm();
  };

  Vector u = u0;
  t.errors_A.push_back(measure(u));
  t.residuals.push_back((f - h.a.matrix * u).norm());
  t.floor = 1e3 * kEps * t.errors_A[0];

  for (std::size_t k = 1; k <= sweeps; ++k) {
    if (std::holds_alternative<TgVariant>(variant)) {
      u = tg_sweep(h, u, f);
    } else if (std::holds_alternative<StgVariant>(variant)) {
      u = stg_sweep(h, u, f);
    } else {
      const auto& spec = std::get<ItgVariant>(variant).coarse;
      SweepOutcome o = itg_sweep_detailed(h, u, f, spec);
      u = std::move(o.u);
      if (o.achieved_eps) {
        const double eps = *o.achieved_eps;
        t.coarse_eps.push_back(eps);
        const auto* gen = std::get_if<GeneralCoarse>(&spec);
        if (eps >= 1.0 || (gen != nullptr && eps > gen->declared_eps + h.tol.match_tol)) {
          std::ostringstream msg;
          msg.precision(6);
          msg << "sweep " << k << ": achieved coarse accuracy " << eps << " exceeds declared eps "
              << (gen != nullptr ? gen->declared_eps : 0.0);
          t.violations.push_back(msg.str());
        }
      }
    }
    const double prev = t.errors_A.back();
    t.errors_A.push_back(measure(u));
    t.residuals.push_back((f - h.a.matrix * u).norm());
    t.ratios.push_back(prev > t.floor ? t.errors_A.back() / prev : std::numeric_limits<double>::quiet_NaN());
    t.sweeps_done = k;

    if (k >= kDivergenceWindow) {
      const double base = t.errors_A[k - kDivergenceWindow];
      if (base > 0.0 && t.errors_A[k] > kDivergenceGrowth * base) {
        t.diverged = true;
        std::ostringstream msg;
        msg << "diverged at sweep " << k << ": error grew more than " << kDivergenceGrowth << "x over "
            << kDivergenceWindow << " sweeps";
        t.violations.push_back(msg.str());
        break;
      }
    }
  }

  std::vector<double> usable;
  for (std::size_t k = 0; k < t.ratios.size(); ++k) {
    if (t.errors_A[k] > t.floor && t.errors_A[k + 1] > t.floor) usable.push_back(t.ratios[k]);
  }
  for (double r : usable) t.max_ratio = std::max(t.max_ratio, r);
  const std::size_t window = std::max<std::size_t>(5, t.sweeps_done / 4);
  t.tail_count = std::min(window, usable.size());
  if (t.tail_count > 0) {
    double log_sum = 0.0;
    for (std::size_t i = usable.size() - t.tail_count; i < usable.size(); ++i) log_sum += std::log(usable[i]);
    t.observed_factor = std::exp(log_sum / static_cast<double>(t.tail_count));
  }
  t.stagnated = t.tail_count > 0 && t.observed_factor >= kStagnationRatio;

  t.reached_floor = t.errors_A.back() <= t.floor;
  t.final_relative_residual = fn > 0.0 ? t.residuals.back() / fn : t.residuals.back();
  if (t.reached_floor) {
    t.final_consistent = t.final_relative_residual <= kFinalResidualTol;
    if (!t.final_consistent) {
      std::ostringstream msg;
      msg.precision(6);
      msg << "final iterate has relative residual " << t.final_relative_residual << " although the error reached the floor";
      t.violations.push_back(msg.str());
    }
  }
  t.u = std::move(u);
  return t;
}

}  // namespace twogrid
