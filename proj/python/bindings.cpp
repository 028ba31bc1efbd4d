#include "surfcl/cli.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace surfcl;

namespace {

py::dict norms_dict(const ErrorNorms& e) {
  py::dict d;
  d["l1"] = e.l1;
  d["l2"] = e.l2;
  d["linf"] = e.linf;
  return d;
}

}  // namespace

PYBIND11_MODULE(_surfcl, m) {
  m.doc() = "Narrow-band solver for conservation laws on implicit curves and surfaces";

  py::register_exception<Error>(m, "SurfclError", PyExc_RuntimeError);

  m.def("experiment_ids", &experiment_ids);
  m.def("list_experiments", [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& id : experiment_ids()) out.emplace_back(id, make_problem(id).description);
    return out;
  });

  m.def("signed_distance", [](const std::string& shape, const Vec3& x) { return Shape::parse(shape).signed_distance(x); },
        py::arg("shape"), py::arg("x"));
  m.def("closest_point", [](const std::string& shape, const Vec3& x) { return Shape::parse(shape).closest_point(x); },
        py::arg("shape"), py::arg("x"));
  m.def("pushforward_matrix", &pushforward_matrix, py::arg("phi"), py::arg("hessian"), py::arg("dim"),
        "(I - phi H)^-1 restricted to the first dim axes.");

  m.def(
      "error_norms",
      [](const std::vector<double>& samples, const std::vector<double>& exact, const std::vector<double>& weights) {
        return norms_dict(error_norms(samples, exact, weights));
      },
      py::arg("samples"), py::arg("exact"), py::arg("weights"));
  m.def(
      "convergence_rate",
      [](const std::vector<double>& dx, const std::vector<double>& errors) { return convergence_rate(dx, errors); },
      py::arg("dx"), py::arg("errors"));

  // Keys as in the CLI long flags; values may be strings or numbers.
  m.def(
      "run_experiment",
      [](const py::dict& config) {
        RunConfig c;
        for (const auto& [k, v] : config) {
          std::string value;
          if (py::isinstance<py::list>(v) || py::isinstance<py::tuple>(v)) {
            for (const auto& item : v) value += (value.empty() ? "" : ",") + py::str(item).cast<std::string>();
          } else {
            value = py::str(v).cast<std::string>();
          }
          c.set(py::str(k).cast<std::string>(), value);
        }
        RunReport r;
        {
          py::gil_scoped_release release;
          r = run_experiment(c);
        }
        py::dict out;
        out["output_dir"] = r.output_dir;
        out["report"] = r.json;
        py::list rows;
        for (const auto& row : r.errors) {
          py::dict d = norms_dict(row.norms);
          d["dx"] = row.dx;
          d["n"] = row.n;
          rows.append(d);
        }
        out["errors"] = rows;
        py::dict rates;
        rates["l1"] = r.rates.l1;
        rates["l2"] = r.rates.l2;
        rates["linf"] = r.rates.linf;
        out["rates"] = rates;
        out["notes"] = r.rates.notes;
        out["wall_seconds"] = r.wall_seconds;
        return out;
      },
      py::arg("config"));
}
