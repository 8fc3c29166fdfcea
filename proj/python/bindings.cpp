#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qgspectra/bootstrap.hpp"
#include "qgspectra/detpoly.hpp"
#include "qgspectra/error.hpp"
#include "qgspectra/graph.hpp"
#include "qgspectra/graph_config.hpp"
#include "qgspectra/io.hpp"
#include "qgspectra/lagrange.hpp"
#include "qgspectra/orbits.hpp"
#include "qgspectra/spectral_formulas.hpp"
#include "qgspectra/stats.hpp"

namespace py = pybind11;
using namespace qgs;

namespace {

Graph chain(const std::vector<double>& lengths, const std::vector<double>& reflections) {
  return build_graph(linear_chain_spec(lengths, reflections));
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "exact spectra of scaling quantum graphs";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<Graph>(m, "Graph")
      .def_property_readonly("S0", &Graph::S0)
      .def_property_readonly("num_bonds", &Graph::num_bonds)
      .def_property_readonly("directed_actions", &Graph::directed_actions)
      .def("unitarity_defect", &Graph::unitarity_defect);

  m.def("load_graph", [](const std::string& path) { return build_graph(load_graph_spec(path)); }, py::arg("path"));
  m.def("parse_graph", [](const std::string& text) { return build_graph(parse_graph_spec(text)); }, py::arg("yaml"));
  m.def("linear_chain", &chain, py::arg("lengths"), py::arg("reflections"));
  m.def("numeric_determinant", &numeric_determinant, py::arg("graph"), py::arg("k"));

  py::class_<TrigTerm>(m, "TrigTerm")
      .def(py::init([](double a, double S, double g) { return TrigTerm{a, S, g}; }), py::arg("a"), py::arg("S"), py::arg("gamma"))
      .def_readwrite("a", &TrigTerm::a)
      .def_readwrite("S", &TrigTerm::S)
      .def_readwrite("gamma", &TrigTerm::gamma);

  py::class_<TrigPoly>(m, "TrigPoly")
      .def(py::init<double, double, std::vector<TrigTerm>, int, double>(), py::arg("S0"), py::arg("gamma0"),
           py::arg("terms"), py::arg("level") = 0, py::arg("scale") = 1.0)
      .def_property_readonly("S0", &TrigPoly::S0)
      .def_property_readonly("gamma0", &TrigPoly::gamma0)
      .def_property_readonly("level", &TrigPoly::level)
      .def_property_readonly("scale", &TrigPoly::scale)
      .def_property_readonly("terms", &TrigPoly::terms)
      .def("__call__", &TrigPoly::operator(), py::arg("k"))
      .def("to_json", [](const TrigPoly& p) { return trigpoly_to_json(p); })
      .def_static("from_json", &trigpoly_from_json, py::arg("text"));

  m.def("spectral_function", &spectral_function, py::arg("graph"), py::arg("cap") = kDefaultExpansionCap);
  m.def("characteristic_sum", &characteristic_sum, py::arg("p"));
  m.def("irregularity_degree", [](const TrigPoly& p) { return irregularity_degree(p).m; }, py::arg("p"));
  m.def("differentiate", &differentiate, py::arg("p"), py::arg("l"));

  m.def("fixed_point_root", &fixed_point_root, py::arg("p"), py::arg("n"));
  m.def(
      "solve",
      [](const TrigPoly& p, std::int64_t n_lo, std::int64_t n_hi) {
        std::vector<double> ks;
        for (const auto& r : descend_hierarchy(p, n_lo, n_hi).roots) ks.push_back(r.k);
        return ks;
      },
      py::arg("p"), py::arg("n_lo"), py::arg("n_hi"));
  m.def("oracle_scan", &oracle_scan, py::arg("p"), py::arg("k_lo"), py::arg("k_hi"),
        py::arg("samples_per_mean_spacing") = 1000);

  m.def(
      "two_bond_root",
      [](double S0, double S1, double r, std::int64_t n, int order) { return two_bond_root(S0, S1, r, n, order).x; },
      py::arg("S0"), py::arg("S1"), py::arg("r"), py::arg("n"), py::arg("order") = 2);

  m.def("matrix_trace_power", &matrix_trace_power, py::arg("graph"), py::arg("l"), py::arg("k"));
  m.def("orbit_trace_power", py::overload_cast<const Graph&, int, double>(&trace_power), py::arg("graph"),
        py::arg("l"), py::arg("k"));
  m.def(
      "orbit_expansion",
      [](const Graph& g, std::int64_t n, int l_max) { return root_by_orbit_expansion(g, n, l_max).estimate; },
      py::arg("graph"), py::arg("n"), py::arg("l_max"));
  m.def(
      "staircase",
      [](const Graph& g, double k) { return staircase(g, k).N; }, py::arg("graph"), py::arg("k"));

  m.def(
      "spacings",
      [](const std::vector<double>& roots) { return nn_spacings(roots).spacings; }, py::arg("roots"));
}
