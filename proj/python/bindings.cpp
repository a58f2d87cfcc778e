#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "twogrid/analysis.hpp"
#include "twogrid/config.hpp"
#include "twogrid/model.hpp"
#include "twogrid/report.hpp"
#include "twogrid/solver.hpp"

namespace py = pybind11;
using namespace twogrid;

namespace {

TwoGridHierarchy make_hierarchy(const Matrix& a, const Matrix& p, const std::string& smoother,
                                const std::optional<Matrix>& m, bool strict) {
  const SpsdOperator op = spsd_certify(a, ToleranceOverrides::from_env().resolve(static_cast<std::size_t>(a.rows())));
  const SmootherSpec spec = m ? SmootherSpec{CustomSmoother{*m}} : parse_smoother(smoother, op.size());
  return build_hierarchy(op, p, spec, op.tol, HierarchyOptions{strict});
}

py::dict factor_dict(const ExactFactorReport& r) {
  py::dict d;
  d["sigma_tg"] = r.sigma_tg;
  d["factor_identity"] = r.factor_identity;
  d["factor_ftg"] = r.factor_ftg;
  d["factor_oracle"] = r.factor_oracle;
  d["lower"] = r.lower_bound;
  d["upper"] = r.upper_bound;
  d["nullity_ftg"] = r.nullity_ftg;
  d["degenerate"] = r.degenerate;
  d["equiv_cond_warning"] = r.equiv_cond_warning;
  return d;
}

}  // namespace

PYBIND11_MODULE(_twogrid, mod) {
  mod.doc() = "Two-grid convergence analysis for symmetric positive semidefinite systems";

  py::register_exception<Error>(mod, "TwoGridError", PyExc_ValueError);

  mod.def(
      "sym_eig",
      [](const Matrix& s) {
        const SymEigen e = sym_eig(s);
        return py::make_tuple(e.values, e.vectors);
      },
      py::arg("s"), "Ascending eigenvalues and orthonormal eigenvectors (cyclic Jacobi).");

  mod.def(
      "analyze_json",
      [](const Matrix& a, const Matrix& p, const std::string& smoother, const std::optional<Matrix>& m,
         const std::optional<Matrix>& bc, const std::optional<double>& eps) {
        const TwoGridHierarchy h = make_hierarchy(a, p, smoother, m, false);
        std::optional<SpsdOperator> b;
        if (bc) b = spsd_certify(*bc, h.tol);
        ConvergenceReport r = analyze(h, b, eps);
        r.smoother = m ? "custom" : smoother;
        r.problem = "python";
        r.prolongation = "python";
        return to_json(r);
      },
      py::arg("a"), py::arg("p"), py::arg("smoother") = "jacobi", py::arg("m") = py::none(),
      py::arg("bc") = py::none(), py::arg("eps") = py::none());

  mod.def(
      "exact_factor",
      [](const Matrix& a, const Matrix& p, const std::string& smoother, const std::optional<Matrix>& m) {
        return factor_dict(exact_factor(make_hierarchy(a, p, smoother, m, false)));
      },
      py::arg("a"), py::arg("p"), py::arg("smoother") = "jacobi", py::arg("m") = py::none());

  mod.def(
      "solve",
      [](const Matrix& a, const Matrix& p, const Vector& f, std::size_t sweeps, const std::string& smoother,
         const std::optional<Matrix>& m, const std::string& variant, const std::optional<Vector>& u0,
         const std::optional<Vector>& u_ref) {
        const TwoGridHierarchy h = make_hierarchy(a, p, smoother, m, true);
        SweepVariant v = TgVariant{};
        if (variant == "stg") v = StgVariant{};
        else if (variant == "itg") v = ItgVariant{ExactCoarse{}};
        else if (variant != "tg") throw Error("variant must be tg, stg or itg");
        const Vector start = u0 ? *u0 : Vector(Vector::Zero(a.rows()));
        const IterationTrace t = iterate(h, f, start, sweeps, v, u_ref);
        py::dict d;
        d["u"] = t.u;
        d["errors_A"] = t.errors_A;
        d["residuals"] = t.residuals;
        d["ratios"] = t.ratios;
        d["observed_factor"] = t.observed_factor;
        d["max_ratio"] = t.max_ratio;
        d["diverged"] = t.diverged;
        d["stagnated"] = t.stagnated;
        return d;
      },
      py::arg("a"), py::arg("p"), py::arg("f"), py::arg("sweeps") = 50, py::arg("smoother") = "jacobi",
      py::arg("m") = py::none(), py::arg("variant") = "tg", py::arg("u0") = py::none(),
      py::arg("u_ref") = py::none());

  mod.def(
      "spectral_equivalence",
      [](const Matrix& ac, const Matrix& bc) {
        const TolerancePolicy tol = ToleranceOverrides::from_env().resolve(static_cast<std::size_t>(ac.rows()));
        const SpectralEquivalence e = spectral_equivalence(spsd_certify(ac, tol), spsd_certify(bc, tol));
        return py::make_tuple(e.c1, e.c2, e.d1, e.d2);
      },
      py::arg("ac"), py::arg("bc"), "(c1, c2, d1, d2) with c1 A_c <= B_c <= c2 A_c and d1 A_c^+ <= B_c^+ <= d2 A_c^+.");

  mod.def("neumann_laplacian_1d", &neumann_laplacian_1d, py::arg("n"));
  mod.def("neumann_laplacian_2d", &neumann_laplacian_2d, py::arg("nx"), py::arg("ny"));
  mod.def("aggregation_prolongation", &aggregation_prolongation, py::arg("n"), py::arg("k") = 2);
}
