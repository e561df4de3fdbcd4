#include "cflab/catalog.hpp"
#include "cflab/commands.hpp"
#include "cflab/contfrac.hpp"
#include "cflab/exact.hpp"
#include "cflab/io.hpp"
#include "cflab/statistics.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace cflab;

namespace {

// Python int <-> mpz through hex text.
py::int_ to_py(const BigInt& v) {
  const std::string hex = v.get_str(16);
  return py::reinterpret_steal<py::int_>(PyLong_FromString(hex.c_str(), nullptr, 16));
}

BigInt from_py(const py::int_& v) {
  const py::str text = py::reinterpret_steal<py::str>(PyNumber_ToBase(v.ptr(), 16));
  return BigInt(text.cast<std::string>(), 0);
}

py::tuple rational_to_py(const BigRational& r) { return py::make_tuple(to_py(r.numerator()), to_py(r.denominator())); }

SequenceSpec spec_for(const std::string& kind, const std::vector<std::uint64_t>& exponents) {
  SequenceSpec s;
  s.kind = parse_sequence_kind(kind);
  s.exponents = exponents;
  return s;
}

std::vector<py::int_> quotients_to_py(const CFExpansion& cf) {
  std::vector<py::int_> out;
  out.reserve(cf.quotients.size() + 1);
  out.push_back(to_py(cf.a0));
  for (const auto& a : cf.quotients) out.push_back(to_py(a));
  return out;
}

CFExpansion cf_from_py(const std::vector<py::int_>& terms) {
  if (terms.empty()) throw std::invalid_argument("empty continued fraction");
  CFExpansion cf;
  cf.a0 = from_py(terms.front());
  for (std::size_t i = 1; i < terms.size(); ++i) cf.quotients.push_back(from_py(terms[i]));
  return cf;
}

std::vector<std::pair<std::size_t, double>> points(const StatSeries& s) {
  std::vector<std::pair<std::size_t, double>> out;
  for (const auto& p : s.points) out.emplace_back(p.n, p.value);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.attr("__version__") = std::string(kVersion);

  m.def("catalog_exponents", [] {
    const auto e = MersenneCatalog::builtin().exponents();
    return std::vector<std::uint64_t>(e.begin(), e.end());
  });

  m.def(
      "reciprocal_sum",
      [](const std::string& kind, std::size_t count, const std::vector<std::uint64_t>& exponents) {
        return rational_to_py(reciprocal_sum(spec_for(kind, exponents), count));
      },
      py::arg("kind"), py::arg("count"), py::arg("exponents") = std::vector<std::uint64_t>{},
      "Exact sum of 1/s_k for k = 1..count, as (numerator, denominator).");

  m.def(
      "to_decimal",
      [](const py::int_& p, const py::int_& q, std::size_t digits) {
        return to_decimal(BigRational(from_py(p), from_py(q)), digits).str();
      },
      py::arg("numerator"), py::arg("denominator"), py::arg("digits"), "Truncated decimal expansion.");

  m.def(
      "cf_expand",
      [](const py::int_& p, const py::int_& q) {
        return quotients_to_py(cf_expand_rational(BigRational(from_py(p), from_py(q))));
      },
      py::arg("numerator"), py::arg("denominator"), "[a0, a1, ..., aN] of p/q.");

  m.def(
      "from_cf", [](const std::vector<py::int_>& terms) { return rational_to_py(from_cf(cf_from_py(terms))); },
      py::arg("terms"), "Value of [a0; a1, ...] as (numerator, denominator).");

  m.def(
      "running_khinchin",
      [](const std::vector<py::int_>& terms, std::size_t stride) {
        return points(running_khinchin(cf_from_py(terms), stride));
      },
      py::arg("terms"), py::arg("stride") = 1);

  m.def(
      "running_levy",
      [](const std::vector<py::int_>& terms, std::size_t stride) {
        return points(running_levy(cf_from_py(terms), stride));
      },
      py::arg("terms"), py::arg("stride") = 1);

  m.def("levy_constant", &levy_constant);
  m.def(
      "khinchin_constant",
      [](double target) {
        const auto k = khinchin_constant(target);
        return py::make_tuple(k.value, k.error_bound);
      },
      py::arg("target_error") = 1e-6, "(value, error_bound)");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command line in-process: (exit_code, stdout, stderr).");
}
