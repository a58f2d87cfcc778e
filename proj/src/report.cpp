#include "twogrid/report.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

namespace twogrid {

namespace {

using Json = nlohmann::ordered_json;

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

template <class T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

Json margin_json(const NullityDecision& d) {
  Json j;
  j["nullity"] = d.nullity;
  j["largest_discarded"] = d.largest_discarded;
  j["smallest_retained"] = d.smallest_retained;
  return j;
}

std::string fmt(double v) {
  if (!std::isfinite(v)) return "";
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

ConvergenceReport analyze(const TwoGridHierarchy& h, const std::optional<SpsdOperator>& bc,
                          const std::optional<double>& eps) {
  ConvergenceReport r;
  r.n = h.n;
  r.nc = h.nc;
  r.rank_fine = h.rank_fine;
  r.rank_coarse = h.rank_coarse;
  r.tol = h.tol;
  r.conditions = check_conditions(h);
  r.exact = exact_factor(h);
  r.delta = delta_tg(h);
  r.warnings = h.warnings;
  if (bc) r.inexact = inexact_linear_analysis(h, *bc);
  if (eps) {
    r.eps = *eps;
    r.eps_bound = general_epsilon_bound(h, *eps);
  }
  if (!r.conditions.equiv_cond_ok)
    r.warnings.push_back("equiv-cond fails: the two-grid method does not converge in the A-seminorm (factor is 1)");
  if (!r.conditions.smoother_ok) r.warnings.push_back("smoother assumption ||I - MA||_A <= 1 fails");
  if (!r.delta.guard_holds) r.warnings.push_back("delta_TG guard fails; delta_tg reported as 0");
  return r;
}

std::string to_json(const ConvergenceReport& r) {
  Json j;
  j["problem"] = r.problem;
  j["smoother"] = r.smoother;
  j["prolongation"] = r.prolongation;
  j["coarse"] = r.coarse;
  j["seed"] = r.seed;
  j["n"] = r.n;
  j["nc"] = r.nc;
  j["rank_A"] = r.rank_fine;
  j["rank_Ac"] = r.rank_coarse;

  const ExactFactorReport& e = r.exact;
  j["sigma_tg"] = e.sigma_tg;
  j["factor_identity"] = e.factor_identity;
  j["factor_ftg"] = e.factor_ftg;
  j["factor_oracle"] = e.factor_oracle;
  j["lower"] = e.lower_bound;
  j["upper"] = e.upper_bound;
  j["eigengap_at_index"] = e.eigengap_at_index;
  j["mtilde_a_low"] = e.mtilde_a_low;
  j["mtilde_a_high"] = e.mtilde_a_high;
  j["nullity_ftg"] = e.nullity_ftg;
  j["delta_tg"] = r.delta.delta_tg;
  j["delta_margin"] = margin_json(r.delta.decision);

  if (r.inexact) {
    const InexactFactorReport& i = *r.inexact;
    j["alpha1"] = i.alpha1;
    j["alpha2"] = i.alpha2;
    j["beta1"] = i.beta1;
    j["beta2"] = i.beta2;
    j["lower_L"] = i.lower_l;
    j["upper_U"] = i.upper_u;
    j["factor_exact_itg"] = i.factor_exact_itg;
    j["factor_oracle_itg"] = i.factor_oracle;
    j["nullity_fitg"] = i.nullity_fitg;
  } else {
    for (const char* k : {"alpha1", "alpha2", "beta1", "beta2", "lower_L", "upper_U", "factor_exact_itg",
                          "factor_oracle_itg", "nullity_fitg"})
      j[k] = nullptr;
  }
  j["eps"] = optional_json(r.eps);
  j["eps_bound"] = optional_json(r.eps_bound);

  const ConditionReport& c = r.conditions;
  Json cond;
  cond["smoother_min_eig"] = c.smoother_min_eig;
  cond["intersection_dim"] = c.intersection_dim;
  cond["nullity_A"] = c.nullity_a;
  cond["equiv_margin"] = margin_json(c.equiv_decision);
  cond["mbar_psd"] = c.mbar_psd;
  cond["mbar_pd"] = c.mbar_pd;
  cond["mbar_range_intersection_dim"] = c.mbar_range_intersection_dim;
  cond["suff_margin"] = margin_json(c.suff_decision);
  j["conditions"] = cond;

  Json flags;
  flags["smoother_ok"] = c.smoother_ok;
  flags["equiv_cond_ok"] = c.equiv_cond_ok;
  flags["suff_cond_ok"] = c.suff_cond_ok;
  flags["degenerate"] = e.degenerate;
  flags["equiv_cond_warning"] = e.equiv_cond_warning;
  flags["delta_guard"] = r.delta.guard_holds;
  j["flags"] = flags;

  Json tol;
  tol["rank_rel_tol"] = r.tol.rank_rel_tol;
  tol["psd_slack"] = r.tol.psd_slack;
  tol["match_tol"] = r.tol.match_tol;
  j["tolerances"] = tol;
  j["warnings"] = r.warnings;
  return j.dump(2) + "\n";
}

std::string report_csv_header() {
  return "problem,smoother,prolongation,coarse,seed,n,nc,rank_A,rank_Ac,sigma_tg,factor_identity,factor_ftg,"
         "factor_oracle,lower,upper,delta_tg,alpha1,alpha2,beta1,beta2,lower_L,upper_U,factor_exact_itg,eps,"
         "eps_bound,smoother_ok,equiv_cond_ok,suff_cond_ok\n";
}

std::string report_csv_row(const ConvergenceReport& r) {
  std::ostringstream s;
  const auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
  const auto flag = [](bool b) { return b ? "1" : "0"; };
  s << csv_field(r.problem) << ',' << csv_field(r.smoother) << ',' << csv_field(r.prolongation) << ','
    << csv_field(r.coarse) << ',' << r.seed << ',' << r.n << ',' << r.nc << ',' << r.rank_fine << ','
    << r.rank_coarse << ',' << fmt(r.exact.sigma_tg) << ',' << fmt(r.exact.factor_identity) << ','
    << fmt(r.exact.factor_ftg) << ',' << fmt(r.exact.factor_oracle) << ',' << fmt(r.exact.lower_bound) << ','
    << fmt(r.exact.upper_bound) << ',' << fmt(r.delta.delta_tg) << ',';
  if (r.inexact) {
    const auto& i = *r.inexact;
    s << fmt(i.alpha1) << ',' << fmt(i.alpha2) << ',' << fmt(i.beta1) << ',' << fmt(i.beta2) << ','
      << fmt(i.lower_l) << ',' << fmt(i.upper_u) << ',' << fmt(i.factor_exact_itg) << ',';
  } else {
    s << ",,,,,,,";
  }
  s << opt(r.eps) << ',' << opt(r.eps_bound) << ',' << flag(r.conditions.smoother_ok) << ','
    << flag(r.conditions.equiv_cond_ok) << ',' << flag(r.conditions.suff_cond_ok) << '\n';
  return s.str();
}

std::string trace_csv(const IterationTrace& t) {
  std::ostringstream s;
  s << "sweep,error_A,residual_2,ratio\n";
  for (std::size_t k = 0; k < t.errors_A.size(); ++k) {
    s << k << ',' << fmt(t.errors_A[k]) << ',' << fmt(t.residuals[k]) << ',';
    if (k > 0) s << fmt(t.ratios[k - 1]);
    s << '\n';
  }
  return s.str();
}

std::string trace_summary_json(const IterationTrace& t, const TraceContext& ctx) {
  Json j;
  j["problem"] = ctx.problem;
  j["smoother"] = ctx.smoother;
  j["prolongation"] = ctx.prolongation;
  j["variant"] = ctx.variant;
  j["seed"] = ctx.seed;
  j["sweeps"] = t.sweeps_done;
  j["has_reference"] = t.has_reference;
  j["error_measure"] = t.has_reference ? "error_A" : "residual_2";
  j["initial_error"] = t.errors_A.front();
  j["final_error"] = t.errors_A.back();
  j["final_relative_residual"] = t.final_relative_residual;
  j["stagnation_floor"] = t.floor;
  j["observed_factor"] = t.has_reference ? number_or_null(t.observed_factor) : Json(nullptr);
  j["max_ratio"] = t.has_reference ? number_or_null(t.max_ratio) : Json(nullptr);
  j["tail_count"] = t.tail_count;
  j["factor_identity"] = optional_json(ctx.factor_identity);
  Json flags;
  flags["diverged"] = t.diverged;
  flags["stagnated"] = t.stagnated;
  flags["reached_floor"] = t.reached_floor;
  flags["final_consistent"] = t.final_consistent;
  j["flags"] = flags;
  if (!t.coarse_eps.empty()) {
    Json eps = Json::array();
    for (double e : t.coarse_eps) eps.push_back(number_or_null(e));
    j["coarse_eps"] = eps;
  }
  j["violations"] = t.violations;
  return j.dump(2) + "\n";
}

}  // namespace twogrid
