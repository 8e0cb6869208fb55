#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/eigen.h>

#include <optional>

#include "boxcast/assemblage.hpp"
#include "boxcast/divergence.hpp"
#include "boxcast/errors.hpp"
#include "boxcast/io.hpp"
#include "boxcast/polytope.hpp"
#include "boxcast/verify.hpp"

namespace py = pybind11;
using namespace boxcast;

namespace {

// Reports cross the boundary as JSON text and are decoded with the json
// module, so Python sees plain dicts and lists.
py::object to_py(const io::Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }
io::Json from_py(const py::object& o) { return io::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>()); }

std::vector<ssize_t> table_shape(const Scenario& sc) {
  std::vector<ssize_t> dims;
  for (const Site& s : sc.sites()) dims.push_back(s.inputs);
  for (const Site& s : sc.sites()) dims.push_back(s.outputs);
  return dims;
}

const VertexCatalogue& catalogue_for(const Scenario& sc, const std::string& kind) {
  static const VertexCatalogue local2 = local_deterministic_vertices(Scenario::bipartite());
  static const VertexCatalogue lrns = lrns_broadcast_222();
  static const VertexCatalogue ns = ns_vertices_222();
  if (kind == "local" && sc == local2.scenario) return local2;
  if (kind == "ns" && sc == ns.scenario) return ns;
  if (kind == "lrns" && sc == lrns.scenario) return lrns;
  throw DimensionError("no built-in \"" + kind + "\" catalogue for this scenario");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Boxes, assemblages and broadcasting";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<SignallingError>(m, "SignallingError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<std::vector<Site>, std::vector<std::vector<int>>>())
      .def_static("bipartite", [] { return Scenario::bipartite(); })
      .def_static("broadcast", [] { return Scenario::broadcast(); })
      .def_property_readonly("grouping", &Scenario::grouping)
      .def_property_readonly("num_settings", &Scenario::num_settings)
      .def_property_readonly("num_outcomes", &Scenario::num_outcomes)
      .def("__eq__", &Scenario::operator==);

  py::class_<Site>(m, "Site")
      .def(py::init<int, int>(), py::arg("inputs") = 2, py::arg("outputs") = 2)
      .def_readonly("inputs", &Site::inputs)
      .def_readonly("outputs", &Site::outputs);

  py::class_<Behavior>(m, "Behavior")
      .def(py::init([](const Scenario& sc, py::array_t<double, py::array::c_style | py::array::forcecast> t) {
             return Behavior(sc, std::vector<double>(t.data(), t.data() + t.size()));
           }),
           py::arg("scenario"), py::arg("table"))
      .def_property_readonly("scenario", &Behavior::scenario)
      // nested [x...][y...][a...][b...]
      .def_property_readonly("table",
                             [](const Behavior& b) {
                               py::array_t<double> a(table_shape(b.scenario()));
                               std::copy(b.table().begin(), b.table().end(), a.mutable_data());
                               return a;
                             })
      .def("to_json", [](const Behavior& b) { return to_py(io::to_json(b)); })
      .def_static("from_json", [](const py::object& o) { return io::behavior_from_json(from_py(o)); });

  py::class_<Assemblage>(m, "Assemblage")
      .def_property_readonly("inputs", &Assemblage::inputs)
      .def_property_readonly("outputs", &Assemblage::outputs)
      .def_property_readonly("dim", &Assemblage::dim)
      .def("element", [](const Assemblage& a, int out, int x) { return CMatrix(a(out, x)); }, py::arg("a"), py::arg("x"))
      .def("to_json", [](const Assemblage& a) { return to_py(io::to_json(a)); })
      .def_static("from_json", [](const py::object& o) { return io::assemblage_from_json(from_py(o)); });

  m.def("pr_box", &pr_box);
  m.def("uniform_box", &uniform_box, py::arg("scenario"));
  m.def("product", &product);
  m.def("is_broadcast_of", &is_broadcast_of);
  m.def("is_nonsignalling", [](const Behavior& b) { return is_nonsignalling(b).ok; });
  m.def("box_kl", [](const Behavior& p, const Behavior& q) {
    BoxDivergenceReport r = box_kl(p, q);
    return py::make_tuple(r.value, r.per_setting);
  });
  m.def(
      "membership",
      [](const Behavior& b, const std::string& kind, double tol) {
        if (kind == "local" && !(b.scenario() == Scenario::bipartite()))
          return to_py(io::to_json(membership(b, local_deterministic_vertices(b.scenario()), tol)));
        return to_py(io::to_json(membership(b, catalogue_for(b.scenario(), kind), tol)));
      },
      py::arg("behavior"), py::arg("kind") = "local", py::arg("tol") = 1e-9);
  m.def(
      "relative_entropy_nl",
      [](const Behavior& b, int iters, std::uint64_t seed) {
        ElrConfig cfg;
        cfg.iters = iters;
        if (seed != 0) {
          cfg.seed = seed;
          cfg.random_init = true;
        }
        const std::string kind = b.scenario().is_broadcast_shape() ? "lrns" : "local";
        const VertexCatalogue& cat = catalogue_for(b.scenario(), kind);
        std::optional<ElrResult> r;
        {
          py::gil_scoped_release nogil;
          r.emplace(relative_entropy_nl(b, cat, cfg));
        }
        return to_py(io::to_json(*r));
      },
      py::arg("behavior"), py::arg("iters") = ElrConfig{}.iters, py::arg("seed") = 0);

  m.def("werner_assemblage", &werner_assemblage, py::arg("visibility"));
  m.def("product_assemblage", &product_assemblage);
  m.def("is_broadcast_assemblage", &is_broadcast_assemblage, py::arg("asm4"), py::arg("asm2"), py::arg("tol") = 1e-8);
  m.def("assemblage_kl", [](const Assemblage& a, const Assemblage& b) { return assemblage_kl(a, b).value; });
  m.def("is_unsteerable", [](const Assemblage& a) { return to_py(io::to_json(is_unsteerable(a))); });
  m.def("is_urns", [](const Assemblage& a) { return to_py(io::to_json(is_urns(a))); });
  m.def(
      "relative_entropy_steering_ub",
      [](const Assemblage& a, int iterations, std::uint64_t seed) {
        SteeringEntropyConfig cfg;
        cfg.iterations = iterations;
        cfg.seed = seed;
        return to_py(io::to_json(relative_entropy_steering_ub(a, cfg)));
      },
      py::arg("assemblage"), py::arg("iterations") = SteeringEntropyConfig{}.iterations, py::arg("seed") = 0);

  m.def(
      "verify",
      [](std::uint64_t seed, const std::string& scope, double scale, const std::string& fault) {
        VerifyConfig cfg;
        cfg.seed = seed;
        cfg.scope = parse_scope(scope);
        cfg.instance_scale = scale;
        cfg.fault = parse_fault(fault);
        SuiteReport r;
        {
          py::gil_scoped_release nogil;
          r = run_verify_suite(cfg);
        }
        return to_py(io::to_json(r));
      },
      py::arg("seed") = 1, py::arg("scope") = "all", py::arg("scale") = 1.0, py::arg("fault") = "none");
}
