#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ietlab/cli.hpp"
#include "ietlab/error.hpp"
#include "ietlab/mixing.hpp"
#include "ietlab/return_map.hpp"
#include "ietlab/rigidity.hpp"
#include "ietlab/verifier.hpp"

namespace py = pybind11;
using namespace ietlab;

namespace {

// Artifacts cross over as plain dicts.
py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

json from_py(const py::object& o) {
  return parse_json_text(py::module_::import("json").attr("dumps")(o).cast<std::string>(), "argument");
}

std::vector<py::tuple> pieces_of(const PiecewiseTranslation& f) {
  std::vector<py::tuple> out;
  for (std::size_t i = 0; i < f.piece_count(); ++i) out.push_back(py::make_tuple(f.piece(i), f.shifts()[i]));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact interval exchange transformations over Q(sqrt D)";

  static py::exception<Error> error(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<PreconditionError>(m, "PreconditionError", error.ptr());
  py::register_exception<VerificationError>(m, "VerificationError", error.ptr());
  py::register_exception<DomainError>(m, "DomainError", error.ptr());

  py::class_<ExactScalar>(m, "Scalar")
      .def(py::init<>())
      .def(py::init([](long long v) { return ExactScalar(v); }))
      .def(py::init([](const std::string& s) { return ExactScalar::parse(s); }))
      .def_static("fraction", &ExactScalar::fraction)
      .def_static("sqrt", &ExactScalar::sqrt)
      .def_property_readonly("radicand", &ExactScalar::radicand)
      .def("is_rational", &ExactScalar::is_rational)
      .def("sign", &ExactScalar::sign)
      .def("decimal", &ExactScalar::to_decimal, py::arg("digits") = 20)
      .def("__float__", &ExactScalar::to_double)
      .def("__str__", &ExactScalar::str)
      .def("__repr__", [](const ExactScalar& x) { return "Scalar('" + x.str() + "')"; })
      .def("__hash__", &ExactScalar::hash)
      .def(-py::self)
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def(py::self * py::self)
      .def(py::self / py::self)
      .def(py::self == py::self)
      .def(py::self != py::self)
      .def(py::self < py::self)
      .def(py::self <= py::self)
      .def(py::self > py::self)
      .def(py::self >= py::self);
  py::implicitly_convertible<py::int_, ExactScalar>();
  py::implicitly_convertible<py::str, ExactScalar>();

  py::class_<Interval>(m, "Interval")
      .def(py::init<ExactScalar, ExactScalar>())
      .def_property_readonly("lo", &Interval::lo)
      .def_property_readonly("hi", &Interval::hi)
      .def("length", &Interval::length)
      .def("__contains__", &Interval::contains)
      .def(py::self == py::self)
      .def("__repr__", [](const Interval& i) { return "Interval('" + i.lo().str() + "', '" + i.hi().str() + "')"; });

  py::class_<IntervalSet>(m, "IntervalSet")
      .def(py::init<>())
      .def(py::init<std::vector<Interval>>())
      .def_static("unit", &IntervalSet::unit)
      .def_property_readonly("parts", &IntervalSet::parts)
      .def("measure", &IntervalSet::measure)
      .def("complement", &IntervalSet::complement)
      .def("__contains__", &IntervalSet::contains)
      .def("__len__", &IntervalSet::size)
      .def("__and__", [](const IntervalSet& a, const IntervalSet& b) { return intersect(a, b); })
      .def("__or__", [](const IntervalSet& a, const IntervalSet& b) { return unite(a, b); })
      .def(py::self == py::self)
      .def("__repr__", [](const IntervalSet& s) { return "IntervalSet(" + to_json(s).dump() + ")"; });
  py::implicitly_convertible<Interval, IntervalSet>();
  m.def("dyadic", &dyadic, py::arg("level"), py::arg("index"));

  py::class_<PiecewiseTranslation>(m, "PiecewiseTranslation")
      .def("__len__", &PiecewiseTranslation::piece_count)
      .def("pieces", &pieces_of)
      .def("apply", &PiecewiseTranslation::apply)
      .def("__call__", &PiecewiseTranslation::apply)
      .def("image", &PiecewiseTranslation::image)
      .def("preimage", &PiecewiseTranslation::preimage)
      .def("breakpoints", [](const PiecewiseTranslation& f) { return f.breakpoints().points(); });

  py::class_<IET>(m, "IET")
      .def(py::init<std::vector<ExactScalar>, std::vector<int>>(), py::arg("lengths"), py::arg("perm"))
      .def_static("load", [](const std::string& path) {
        return iet_from_json(parse_json_text(read_text_file(path), path)).iet;
      })
      .def_static("from_dict", [](const py::object& o) { return iet_from_json(from_py(o)).iet; })
      .def("to_dict", [](const IET& t) { return to_py(iet_to_json(t)); })
      .def_property_readonly("d", &IET::d)
      .def_property_readonly("lengths", &IET::lengths)
      .def_property_readonly("perm", &IET::perm)
      .def_property_readonly("endpoints", &IET::endpoints)
      .def_property_readonly("translations", &IET::translations)
      .def_property_readonly("field", &IET::field)
      .def("irreducible", &IET::irreducible)
      .def("apply", &IET::apply)
      .def("__call__", &IET::apply)
      .def("apply_inverse", &IET::apply_inverse)
      .def("inverse", &IET::inverse)
      .def("power", [](const IET& t, long long n) { return power(t, n); })
      .def("orbit", &orbit, py::arg("x"), py::arg("n"), py::arg("direction") = 1)
      .def(py::self == py::self);

  m.def("check_idoc", [](const IET& t, long long depth) { return to_py(to_json(check_idoc(t, depth))); },
        py::arg("iet"), py::arg("depth"));

  py::class_<ReturnPiece>(m, "ReturnPiece")
      .def_readonly("piece", &ReturnPiece::piece)
      .def_readonly("return_time", &ReturnPiece::return_time)
      .def_readonly("translation", &ReturnPiece::translation);
  py::class_<ReturnSystem>(m, "ReturnSystem")
      .def_readonly("base", &ReturnSystem::base)
      .def_readonly("pieces", &ReturnSystem::pieces)
      .def("induced", &ReturnSystem::induced)
      .def("histogram", &return_time_histogram)
      .def("to_dict", [](const ReturnSystem& rs) { return to_py(to_json(rs)); });
  m.def("first_return", &first_return, py::arg("iet"), py::arg("base"), py::arg("step_cap") = py::none());

  py::class_<RigidityCertificate>(m, "Certificate")
      .def_readonly("iet", &RigidityCertificate::iet)
      .def_readonly("n", &RigidityCertificate::n)
      .def_readonly("epsilon", &RigidityCertificate::epsilon)
      .def_readonly("k", &RigidityCertificate::k)
      .def_readonly("A", &RigidityCertificate::A)
      .def_readonly("branch", &RigidityCertificate::branch)
      .def("pieces", [](const RigidityCertificate& c) {
        std::vector<py::tuple> out;
        for (const auto& p : c.pieces) out.push_back(py::make_tuple(p.piece, p.displacement));
        return out;
      })
      .def_static("from_dict", [](const py::object& o) { return certificate_from_json(from_py(o)); })
      .def("to_dict", [](const RigidityCertificate& c) { return to_py(to_json(c)); });
  m.def("n0_for_density", &n0_for_density, py::arg("iet"), py::arg("epsilon"), py::arg("cap"));
  m.def(
      "certify_rigidity",
      [](const IET& t, const ExactScalar& eps, long long n) { return certify_rigidity(t, eps, n); },
      py::arg("iet"), py::arg("epsilon"), py::arg("n"));

  py::class_<VerificationReport>(m, "VerificationReport")
      .def_readonly("ok", &VerificationReport::ok)
      .def_readonly("failures", &VerificationReport::failures)
      .def_readonly("pieces_checked", &VerificationReport::pieces_checked)
      .def_readonly("samples_checked", &VerificationReport::samples_checked)
      .def("__bool__", [](const VerificationReport& r) { return r.ok; });
  m.def("verify_certificate", &verify_certificate, py::arg("certificate"), py::arg("samples") = 1000,
        py::arg("seed") = 1);

  py::class_<CorrelationReport>(m, "CorrelationReport")
      .def_readonly("value", &CorrelationReport::value)
      .def_readonly("target", &CorrelationReport::target)
      .def_readonly("deviation", &CorrelationReport::deviation);
  m.def("correlation", &correlation, py::arg("iet"), py::arg("A"), py::arg("B"), py::arg("n"));
  m.def(
      "mixing_window",
      [](const IET& t, long long j, long long k, const ExactScalar& eps, int depth) {
        return to_py(to_json(mixing_window_check(t, j, k, eps, depth), j, k, eps, depth));
      },
      py::arg("iet"), py::arg("j"), py::arg("k"), py::arg("epsilon"), py::arg("depth"));
  m.def("required_kappa", &required_kappa);
  m.def("kappa_epsilon", &kappa_epsilon);
  m.def(
      "block_mixing",
      [](const IET& t, const RigidityCertificate& c) { return to_py(to_json(rigidity_blocks_mixing(t, c))); },
      py::arg("iet"), py::arg("certificate"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs one CLI invocation in process; returns (exit code, stdout, stderr).");
}
