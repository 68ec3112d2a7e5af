#include <string>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "go4align/config.hpp"
#include "go4align/error.hpp"
#include "go4align/experiment.hpp"
#include "go4align/grouping.hpp"
#include "go4align/indicators.hpp"
#include "go4align/metrics.hpp"
#include "go4align/server.hpp"
#include "go4align/weighters.hpp"

namespace py = pybind11;
using namespace go4align;

namespace {

ClusterEngine parse_engine(const std::string& name) {
  if (name == "exact") return ClusterEngine::kExact;
  if (name == "lloyd") return ClusterEngine::kLloyd;
  throw Error(ErrorCode::kConfig, "engine must be 'exact' or 'lloyd', got '" + name + "'");
}

std::vector<std::vector<int>> assignment_rows(const AssignmentMatrix& g) {
  std::vector<std::vector<int>> rows(g.groups(), std::vector<int>(g.tasks()));
  for (std::size_t k = 0; k < g.groups(); ++k) {
    for (std::size_t m = 0; m < g.tasks(); ++m) rows[k][m] = g(k, m);
  }
  return rows;
}

py::dict summary_dict(const RunSummary& s) {
  py::dict d;
  d["strategy"] = s.strategy;
  d["agrm_wrap"] = s.agrm_wrap;
  d["k"] = s.k;
  d["seed"] = s.seed;
  d["iterations"] = s.iterations;
  d["final_risks"] = s.final_risks;
  d["optimum_risks"] = s.optimum_risks;
  d["relative_drop_pct"] = s.relative_drop_pct;
  d["delta_m_pct"] = s.delta_m_pct;
  d["epochs_to_converge"] = s.epochs_to_converge;
  d["convergence_difference"] = s.convergence_difference;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Risk-guided adaptive group task weighting";

  static py::handle error_type =
      py::exception<Error>(m, "Error", PyExc_ValueError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(error_type)(e.what());
      inst.attr("code") = to_string(e.code());
      PyErr_SetObject(error_type.ptr(), inst.ptr());
    }
  });

  m.attr("DEFAULT_BETA") = kDefaultBeta;

  m.def("init_smoothness", &init_smoothness, py::arg("task_count"));
  m.def("scale_vector", [](const Vector& r) { return scale_vector(r); }, py::arg("risks"));
  m.def("smoothness_update",
        [](const Vector& q, const Vector& r, double beta) { return smoothness_update(q, r, beta); },
        py::arg("prev"), py::arg("risks"), py::arg("beta") = kDefaultBeta);
  m.def("group_indicator",
        [](const Vector& p, const Vector& q) { return group_indicator(p, q); },
        py::arg("scale"), py::arg("smoothness"));

  py::class_<Grouping>(m, "Grouping")
      .def_readonly("labels", &Grouping::labels)
      .def_readonly("omega", &Grouping::omega)
      .def_readonly("objective", &Grouping::objective)
      .def_readonly("k", &Grouping::k)
      .def_property_readonly("assignment",
                             [](const Grouping& g) { return assignment_rows(g.assignment); })
      .def("__repr__", [](const Grouping& g) {
        return "Grouping(k=" + std::to_string(g.k) +
               ", objective=" + std::to_string(g.objective) + ")";
      });

  m.def("kmeans_1d_exact", [](const Vector& v, std::size_t k) { return kmeans_1d_exact(v, k); },
        py::arg("values"), py::arg("k"));
  m.def("kmeans_lloyd",
        [](const Vector& v, std::size_t k, std::size_t restarts, std::uint64_t seed) {
          return kmeans_lloyd(v, k, restarts, seed);
        },
        py::arg("values"), py::arg("k"), py::arg("restarts") = 8, py::arg("seed") = 0);
  m.def("group_weights",
        [](const Vector& gamma, const Labels& labels, std::size_t k) {
          return group_weights(gamma, AssignmentMatrix::from_labels(labels, k));
        },
        py::arg("indicators"), py::arg("labels"), py::arg("k"));
  m.def("task_weights",
        [](const Vector& omega, const Labels& labels) {
          return task_weights(omega, AssignmentMatrix::from_labels(labels, omega.size()));
        },
        py::arg("omega"), py::arg("labels"));

  py::class_<WeighterOutput>(m, "WeighterOutput")
      .def_readonly("weights", &WeighterOutput::weights)
      .def_readonly("grouping", &WeighterOutput::grouping)
      .def_readonly("aux_loss", &WeighterOutput::aux_loss);

  py::class_<Weighter>(m, "Weighter")
      .def(py::init([](std::size_t task_count, const std::string& strategy, double beta,
                       std::size_t k, std::size_t cadence, const std::string& engine,
                       std::size_t restarts, double temperature, std::size_t epoch_length,
                       double uw_lr, bool wrap, std::uint64_t seed) {
             WeighterConfig c;
             c.strategy = parse_strategy(strategy);
             c.beta = beta;
             c.k = k;
             c.cadence = cadence;
             c.engine = parse_engine(engine);
             c.restarts = restarts;
             c.temperature = temperature;
             c.epoch_length = epoch_length;
             c.uw_lr = uw_lr;
             c.agrm_wrap = wrap;
             c.seed = seed;
             return Weighter(c, task_count);
           }),
           py::arg("task_count"), py::arg("strategy") = "go4align",
           py::arg("beta") = kDefaultBeta, py::arg("k") = 2, py::arg("cadence") = 1,
           py::arg("engine") = "exact", py::arg("restarts") = 8, py::arg("temperature") = 2.0,
           py::arg("epoch_length") = 50, py::arg("uw_lr") = 1e-2, py::arg("agrm_wrap") = false,
           py::arg("seed") = 0)
      .def("weigh", [](Weighter& w, const Vector& r) { return w.weigh(r); }, py::arg("risks"))
      .def_property_readonly("iteration", &Weighter::iteration)
      .def_property_readonly("task_count", &Weighter::task_count)
      .def_property_readonly("indicators",
                             [](const Weighter& w) { return w.indicator_state().indicators; })
      .def_property_readonly("smoothness",
                             [](const Weighter& w) { return w.indicator_state().smoothness; });

  m.def("agrm_wrap",
        [](const Vector& base, std::size_t k, const std::string& engine, std::size_t restarts,
           std::uint64_t seed) { return agrm_wrap(base, k, parse_engine(engine), restarts, seed); },
        py::arg("base_weights"), py::arg("k"), py::arg("engine") = "exact",
        py::arg("restarts") = 8, py::arg("seed") = 0);

  m.def("delta_m",
        [](const Vector& method, const Vector& baseline, const std::vector<bool>& higher) {
          return delta_m(method, baseline, higher);
        },
        py::arg("method"), py::arg("baseline"), py::arg("higher_better"));
  m.def("convergence_difference",
        [](const Vector& epochs) { return convergence_difference(epochs); }, py::arg("epochs"));
  m.def("elbow_select", &elbow_select, py::arg("scores"));

  py::class_<WeightServer>(m, "WeightServer")
      .def(py::init([](double beta, std::size_t k, std::size_t cadence,
                       const std::string& engine, std::size_t restarts, std::uint64_t seed) {
             ServerConfig c;
             c.beta = beta;
             c.k = k;
             c.cadence = cadence;
             c.engine = parse_engine(engine);
             c.restarts = restarts;
             c.seed = seed;
             return WeightServer(c);
           }),
           py::arg("beta") = kDefaultBeta, py::arg("k") = 2, py::arg("cadence") = 1,
           py::arg("engine") = "exact", py::arg("restarts") = 8, py::arg("seed") = 0)
      .def("handle", &WeightServer::handle, py::arg("line"))
      .def_property_readonly("requests_served", &WeightServer::requests_served);

  m.def("run_config",
        [](const std::string& yaml) {
          const RunConfig config = parse_run_config(yaml);
          RunResult r;
          {
            py::gil_scoped_release release;
            r = run_experiment(config);
          }
          return summary_dict(r.summary);
        },
        py::arg("yaml"), "Runs an experiment described by a YAML config string.");
}
