#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qm/elliptic.hpp"
#include "qm/experiments.hpp"
#include "qm/fem.hpp"
#include "qm/mesh.hpp"
#include "qm/modulus.hpp"

namespace py = pybind11;
using qm::Point;

namespace {

std::vector<Point> to_points(const std::vector<std::pair<double, double>>& pts) {
  std::vector<Point> out;
  out.reserve(pts.size());
  for (const auto& [x, y] : pts) out.push_back({x, y});
  return out;
}

std::vector<std::pair<double, double>> from_points(const std::vector<Point>& pts) {
  std::vector<std::pair<double, double>> out;
  out.reserve(pts.size());
  for (const Point& p : pts) out.emplace_back(p.x, p.y);
  return out;
}

PyObject* geometry_error = nullptr;

Point pt(std::complex<double> z) { return qm::to_point(z); }

qm::AdaptiveOptions make_options(double tol, std::size_t max_dofs) {
  qm::AdaptiveOptions o;
  o.tol = tol;
  o.max_dofs = max_dofs;
  return o;
}

qm::Quadrilateral make_quad(const std::vector<std::pair<double, double>>& vertices,
                            std::optional<std::array<std::size_t, 4>> marked) {
  auto pts = to_points(vertices);
  if (!marked) {
    if (pts.size() != 4) throw qm::GeometryError("bad-marked", "marked is required unless four vertices are given");
    return qm::quad_from_points(pts[0], pts[1], pts[2], pts[3]);
  }
  return qm::make_quadrilateral(std::move(pts), *marked);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Conformal moduli of polygonal quadrilaterals and ring condensers";

  // Kept alive for the interpreter lifetime; instances carry a `reason` token.
  geometry_error = py::exception<qm::GeometryError>(m, "GeometryError", PyExc_ValueError).inc_ref().ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const qm::GeometryError& e) {
      py::object type = py::reinterpret_borrow<py::object>(geometry_error);
      py::object inst = type(e.what());
      inst.attr("reason") = e.reason();
      PyErr_SetObject(geometry_error, inst.ptr());
    }
  });
  py::register_exception<qm::SolverError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<qm::MeshError>(m, "MeshError", PyExc_RuntimeError);

  // elliptic
  m.def("ellip_k", &qm::elliptic::ellip_k, py::arg("r"));
  m.def("mu", py::overload_cast<double>(&qm::elliptic::mu), py::arg("r"));
  m.def("mu_inv", &qm::elliptic::mu_inv, py::arg("y"));
  m.def("bowman_modulus", &qm::elliptic::bowman_modulus, py::arg("h"));
  m.def("asymptotic_modulus", &qm::elliptic::asymptotic_modulus, py::arg("h"));

  py::class_<qm::Mesh>(m, "Mesh")
      .def_property_readonly("nodes", [](const qm::Mesh& mesh) { return from_points(mesh.nodes); })
      .def_readonly("triangles", &qm::Mesh::triangles)
      .def_property_readonly("boundary",
                             [](const qm::Mesh& mesh) {
                               std::vector<std::tuple<int, int, std::string>> out;
                               for (const auto& e : mesh.boundary) {
                                 out.emplace_back(e.a, e.b, std::string(qm::to_string(e.tag)));
                               }
                               return out;
                             })
      .def("area", [](const qm::Mesh& mesh) { return qm::mesh_area(mesh); })
      .def("min_angle_deg", [](const qm::Mesh& mesh) { return qm::min_angle_deg(mesh); });

  py::class_<qm::SolutionField>(m, "SolutionField")
      .def_readonly("mesh", &qm::SolutionField::mesh)
      .def_readonly("potential", &qm::SolutionField::potential);

  py::class_<qm::ModulusResult>(m, "ModulusResult")
      .def_readonly("value", &qm::ModulusResult::value)
      .def_readonly("lower", &qm::ModulusResult::lower)
      .def_readonly("upper", &qm::ModulusResult::upper)
      .def_readonly("dofs", &qm::ModulusResult::dofs)
      .def_readonly("levels", &qm::ModulusResult::levels)
      .def_readonly("converged", &qm::ModulusResult::converged)
      .def_readonly("energy_history", &qm::ModulusResult::energy_history)
      .def_readonly("conjugate_energy_history", &qm::ModulusResult::conjugate_energy_history)
      .def_readonly("solution", &qm::ModulusResult::solution)
      .def_property_readonly("width", &qm::ModulusResult::width)
      .def("__repr__", [](const qm::ModulusResult& r) {
        std::ostringstream os;
        os.precision(12);
        os << "ModulusResult(value=" << r.value << ", lower=" << r.lower << ", upper=" << r.upper
           << ", dofs=" << r.dofs << ", converged=" << (r.converged ? "True" : "False") << ")";
        return os.str();
      });

  py::class_<qm::CapacityResult>(m, "CapacityResult")
      .def_readonly("capacity", &qm::CapacityResult::capacity)
      .def_readonly("modulus", &qm::CapacityResult::modulus)
      .def_readonly("error_estimate", &qm::CapacityResult::error_estimate)
      .def_readonly("dofs", &qm::CapacityResult::dofs)
      .def_readonly("levels", &qm::CapacityResult::levels)
      .def_readonly("converged", &qm::CapacityResult::converged)
      .def_readonly("energy_history", &qm::CapacityResult::energy_history)
      .def_readonly("solution", &qm::CapacityResult::solution);

  m.def(
      "quad_modulus",
      [](const std::vector<std::pair<double, double>>& vertices, std::optional<std::array<std::size_t, 4>> marked,
         double tol, std::size_t max_dofs) {
        const qm::Quadrilateral q = make_quad(vertices, marked);
        py::gil_scoped_release release;
        return qm::quad_modulus(q, make_options(tol, max_dofs));
      },
      py::arg("vertices"), py::arg("marked") = py::none(), py::arg("tol") = 1e-4, py::arg("max_dofs") = 200000,
      "Modulus of the quadrilateral; with four vertices and no marked list, QM(z1,z2,z3,z4).");

  m.def(
      "ring_capacity",
      [](const std::vector<std::pair<double, double>>& outer, const std::vector<std::pair<double, double>>& inner,
         double tol, std::size_t max_dofs) {
        const qm::RingCondenser ring(qm::validate_polygon(to_points(outer)), qm::validate_polygon(to_points(inner)));
        py::gil_scoped_release release;
        return qm::ring_capacity(ring, make_options(tol, max_dofs));
      },
      py::arg("outer"), py::arg("inner"), py::arg("tol") = 1e-4, py::arg("max_dofs") = 200000);

  m.def(
      "regular_polygon",
      [](std::size_t sides, double radius, std::pair<double, double> center, double phase) {
        return from_points(qm::regular_polygon(sides, radius, {center.first, center.second}, phase).vertices());
      },
      py::arg("sides"), py::arg("radius"), py::arg("center") = std::pair{0.0, 0.0}, py::arg("phase") = 0.0);

  m.def(
      "triangulate",
      [](const std::vector<std::pair<double, double>>& vertices, std::optional<std::array<std::size_t, 4>> marked,
         double max_area) {
        qm::TriangulateOptions o;
        o.max_area = max_area;
        return qm::triangulate(make_quad(vertices, marked), o);
      },
      py::arg("vertices"), py::arg("marked") = py::none(), py::arg("max_area") = 0.0);

  // experiments
  py::class_<qm::experiments::Record>(m, "Record")
      .def_readonly("x", &qm::experiments::Record::x)
      .def_readonly("y", &qm::experiments::Record::y)
      .def_readonly("lhs", &qm::experiments::Record::lhs)
      .def_readonly("rhs", &qm::experiments::Record::rhs)
      .def_readonly("delta", &qm::experiments::Record::delta)
      .def_readonly("bracket", &qm::experiments::Record::bracket)
      .def_readonly("skipped", &qm::experiments::Record::skipped)
      .def_readonly("skip_reason", &qm::experiments::Record::skip_reason)
      .def_readonly("moduli", &qm::experiments::Record::moduli)
      .def_readonly("lower_slack", &qm::experiments::Record::lower_slack)
      .def_property_readonly("sign", [](const qm::experiments::Record& r) {
        return std::string(qm::experiments::to_string(r.sign()));
      });

  m.def(
      "exp_transposition",
      [](std::complex<double> a, std::complex<double> b, double tol) {
        py::gil_scoped_release release;
        return qm::experiments::exp_transposition(pt(a), pt(b), make_options(tol, 200000));
      },
      py::arg("a"), py::arg("b"), py::arg("tol") = 1e-4);
  m.def(
      "exp_duplication",
      [](std::complex<double> a, std::complex<double> b, double tol) {
        py::gil_scoped_release release;
        return qm::experiments::exp_duplication(pt(a), pt(b), make_options(tol, 200000));
      },
      py::arg("A"), py::arg("B"), py::arg("tol") = 1e-4);
  m.def(
      "exp_equal_area",
      [](double r, double s, double alpha, double beta, double tol) {
        py::gil_scoped_release release;
        return qm::experiments::exp_equal_area(r, s, alpha, beta, make_options(tol, 200000));
      },
      py::arg("r"), py::arg("s"), py::arg("alpha"), py::arg("beta"), py::arg("tol") = 1e-4);
  m.def("exp_sum_inequality", &qm::experiments::exp_sum_inequality, py::arg("h"), py::arg("k"));

  m.def(
      "run_sweep",
      [](const std::string& experiment, std::optional<std::string> grid, std::optional<double> alpha,
         std::optional<double> beta, double tol, unsigned jobs) {
        const auto id = qm::experiments::parse_experiment(experiment);
        if (!id) throw std::invalid_argument("unknown experiment " + experiment);
        auto g = qm::experiments::SweepGrid::defaults(*id);
        if (grid) {
          const auto parsed = qm::experiments::SweepGrid::parse(*grid);
          const double a = g.alpha;
          const double b = g.beta;
          g = parsed;
          g.alpha = a;
          g.beta = b;
        }
        if (alpha) g.alpha = *alpha;
        if (beta) g.beta = *beta;
        qm::experiments::SweepResult result;
        {
          py::gil_scoped_release release;
          result = qm::experiments::run_sweep(*id, g, make_options(tol, 200000), jobs);
        }
        std::ostringstream csv;
        qm::experiments::write_csv(csv, result);
        return py::make_tuple(result.records, csv.str());
      },
      py::arg("experiment"), py::arg("grid") = py::none(), py::arg("alpha") = py::none(),
      py::arg("beta") = py::none(), py::arg("tol") = 1e-3, py::arg("jobs") = 0,
      "Returns (records, csv_text).");
}
