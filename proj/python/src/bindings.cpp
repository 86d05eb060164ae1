#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "geodesic/census.hpp"
#include "geodesic/congruence.hpp"
#include "geodesic/error.hpp"
#include "geodesic/qforms.hpp"
#include "geodesic/stats.hpp"

namespace py = pybind11;
using namespace geodesic;
using i64 = std::int64_t;
using u64 = std::uint64_t;

namespace {

py::object to_py(const pell::BigInt& n) {
  const std::string s = n.str();
  return py::reinterpret_steal<py::object>(PyLong_FromString(s.c_str(), nullptr, 10));
}

cg::Family family_of(const std::string& name) {
  if (name == "hat") return cg::Family::Hat;
  if (name == "split0") return cg::Family::Split0;
  if (name == "plus") return cg::Family::Plus;
  if (name == "minus") return cg::Family::Minus;
  if (name == "three") return cg::Family::Three;
  if (name == "pow4") return cg::Family::Pow4;
  throw Error(errc::unsupported_spec, "unknown family " + name);
}

py::dict record_dict(const census::CensusRecord& r) {
  py::dict d;
  d["t"] = r.t;
  d["u"] = r.u;
  d["D"] = r.D;
  d["d"] = r.d;
  d["j"] = r.j;
  d["h"] = r.h;
  d["log_eps"] = r.logEps;
  return d;
}

}  // namespace

PYBIND11_MODULE(_geodesic, m) {
  m.doc() = "C++ core of the geodesic package";

  // messages start with the error code, e.g. "parse-error: ..."
  py::register_exception<Error>(m, "GeodesicError", PyExc_ValueError);

  m.def(
      "pell_fundamental",
      [](i64 D) {
        const auto s = pell::pell_fundamental(D);
        return py::make_tuple(to_py(s.t), to_py(s.u));
      },
      py::arg("D"), "Least (t, u) with t^2 - D u^2 = 4, u > 0.");

  m.def(
      "class_number", [](i64 D) { return qf::class_number(qf::make_discriminant(D)); }, py::arg("D"),
      "Narrow class number h(D).");

  m.def(
      "companion", [](i64 D) { return qf::make_discriminant(D).d; }, py::arg("D"),
      "d = D when the square-free core of D is 1 mod 4, else D / 4.");

  m.def(
      "census",
      [](u64 x, bool squarefree) {
        py::list out;
        const auto records = squarefree ? census::squarefree_census(x) : census::census(x);
        for (const auto& r : records) out.append(record_dict(r));
        return out;
      },
      py::arg("x"), py::arg("squarefree") = false,
      "Records (t, u, D, d, j, h, log_eps) with eps(D)^j < x, ordered by t.");

  m.def(
      "_mu_theoretical",
      [](const std::string& cond) { return stats::to_string(stats::mu_theoretical(stats::Condition::parse(cond))); },
      py::arg("condition"));

  m.def(
      "mu_estimate",
      [](const std::string& cond, u64 x) {
        const auto e = stats::mu_estimate(stats::Condition::parse(cond), census::census(x), x);
        return py::make_tuple(e.numerator, e.denominator, e.value);
      },
      py::arg("condition"), py::arg("x"),
      "(numerator, denominator, ratio) of h-weighted counts with eps(D) < x.");

  m.def("li", &stats::li, py::arg("x"), "Logarithmic integral from 2.");

  m.def(
      "sarnak_ratio", [](u64 x) { return stats::sarnak_ratio(census::census(x), x).ratio; }, py::arg("x"),
      "Sum of h(D) over eps(D)^j < x, divided by li(x^2).");

  m.def(
      "siegel_ratio", [](i64 x) { return stats::siegel_ratio(x).ratio; }, py::arg("x"),
      "Sum of h(D) log eps(D) over D < x, divided by pi^2 x^(3/2) / (18 zeta(3)).");

  m.def(
      "alpha",
      [](u64 p, u64 x) {
        const auto a = stats::alpha_p(p, census::squarefree_census(x), x);
        return py::make_tuple(a.divisible, a.total, a.value);
      },
      py::arg("p"), py::arg("x"), "(count with p | h(d), count, ratio) over square-free d with eps(d) < x.");

  m.def(
      "h1",
      [](u64 x) {
        py::list out;
        for (const auto& e : stats::h1_census(x)) out.append(e.d);
        return out;
      },
      py::arg("x"), "Primes d with class number one and eps < x, in eps order.");

  m.def(
      "l1_crosscheck",
      [](i64 D) {
        const auto c = stats::l1_crosscheck(D);
        return py::make_tuple(c.lhs, c.rhs, c.relErr);
      },
      py::arg("D"), "(h log eps, sqrt(D) L(1, chi_D), relative error) at a fundamental D.");

  m.def(
      "m_value",
      [](const std::string& family, u64 p, int r, i64 D, int j, int m_exp, int l) {
        const cg::SubgroupSpec spec{family_of(family), p, r, m_exp, l, 0};
        const cg::MEvaluator eval(spec);
        const auto data = cg::pell_class_data(D, j);
        return py::make_tuple(cg::m_closed_form(spec, data).value, eval.brute(data), eval(data));
      },
      py::arg("family"), py::arg("p"), py::arg("r"), py::arg("D"), py::arg("j") = 1, py::arg("m") = 0,
      py::arg("l") = -1, "(table value, coset count, evaluated value) of the induced character trace.");

  m.def(
      "verify_m",
      [](u64 p, int r, std::size_t samples) {
        py::list out;
        for (const auto& s : cg::tabulated_families(p, r)) {
          const auto rep = cg::verify_m(s, cg::sample_pairs(s, samples));
          py::dict d;
          d["family"] = s.name();
          d["samples"] = rep.lines.size();
          d["agree"] = rep.agreements;
          d["disagree"] = rep.disagreements;
          d["flagged"] = rep.flagged_disagreements;
          d["rows_hit"] = rep.branches_hit;
          out.append(d);
        }
        return out;
      },
      py::arg("p"), py::arg("r"), py::arg("samples") = 200);
}
