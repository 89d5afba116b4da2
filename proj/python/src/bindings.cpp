#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <variant>

#include "vmprox/dataset.hpp"
#include "vmprox/diagnostics.hpp"
#include "vmprox/errors.hpp"
#include "vmprox/model.hpp"
#include "vmprox/prox.hpp"
#include "vmprox/run_spec.hpp"
#include "vmprox/solvers.hpp"
#include "vmprox/verify.hpp"

namespace py = pybind11;
using namespace vmprox;

namespace {

template <class F>
py::array_t<double> column(const RunTrace& trace, F field) {
  py::array_t<double> out(static_cast<py::ssize_t>(trace.epochs.size()));
  auto view = out.mutable_unchecked<1>();
  for (std::size_t k = 0; k < trace.epochs.size(); ++k) {
    view(static_cast<py::ssize_t>(k)) = static_cast<double>(field(trace.epochs[k]));
  }
  return out;
}

py::dict trace_dict(const RunTrace& trace) {
  py::dict d;
  d["epoch"] = column(trace, [](const EpochRecord& r) { return r.epoch; });
  d["passes"] = column(trace, [](const EpochRecord& r) { return r.passes; });
  d["seconds"] = column(trace, [](const EpochRecord& r) { return r.seconds; });
  d["objective"] = column(trace, [](const EpochRecord& r) { return r.objective; });
  d["gap"] = column(trace, [](const EpochRecord& r) { return r.gap; });
  d["grad_map_norm"] = column(trace, [](const EpochRecord& r) { return r.grad_map_norm; });
  d["u_min"] = column(trace, [](const EpochRecord& r) { return r.u_min; });
  d["u_max"] = column(trace, [](const EpochRecord& r) { return r.u_max; });
  d["alpha1"] = column(trace, [](const EpochRecord& r) { return r.alpha1; });
  d["alpha2"] = column(trace, [](const EpochRecord& r) { return r.alpha2; });
  d["t_k"] = column(trace, [](const EpochRecord& r) { return r.t_k; });
  d["w"] = trace.last_iterate;
  if (trace.sample) d["w_a"] = trace.sample->w;
  d["initial_objective"] = trace.initial_objective;
  d["total_inner_steps"] = trace.total_inner_steps;
  return d;
}

InnerSize to_inner_size(const std::variant<int, std::string>& m) {
  if (const int* v = std::get_if<int>(&m)) {
    if (*v < 1) throw ConfigError("m must be >= 1");
    return InnerSize{static_cast<double>(*v), false};
  }
  return parse_inner_size(std::get<std::string>(m));
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Variance-reduced proximal stochastic solvers with a diagonal BB metric.";

  static py::exception<Error> base(mod, "VmproxError");
  py::register_exception<ParseError>(mod, "ParseError", base.ptr());
  py::register_exception<ConfigError>(mod, "ConfigError", base.ptr());
  py::register_exception<DivergenceError>(mod, "DivergenceError", base.ptr());
  py::register_exception<RateHypothesisError>(mod, "RateHypothesisError", base.ptr());
  py::register_exception<MaxIterationsError>(mod, "MaxIterationsError", base.ptr());
  py::register_exception<MetricError>(mod, "MetricError", base.ptr());
  py::register_exception<DegenerateRowError>(mod, "DegenerateRowError", base.ptr());

  py::class_<Dataset>(mod, "Dataset")
      .def_property_readonly("n", &Dataset::n)
      .def_property_readonly("d", &Dataset::d)
      .def_property_readonly("nnz", &Dataset::nnz)
      .def_property_readonly("labels", [](const Dataset& ds) {
        Vector b(static_cast<Eigen::Index>(ds.n()));
        for (std::size_t i = 0; i < ds.n(); ++i) b[static_cast<Eigen::Index>(i)] = ds.label(i);
        return b;
      })
      .def("to_libsvm", &serialize_libsvm)
      .def("normalized", &normalize_rows)
      .def("lipschitz", [](const Dataset& ds, double lambda2) { return component_lipschitz(ds, lambda2).per_component; },
           py::arg("lambda2") = 0.0)
      .def("__repr__", [](const Dataset& ds) {
        return "<Dataset n=" + std::to_string(ds.n()) + " d=" + std::to_string(ds.d()) +
               " nnz=" + std::to_string(ds.nnz()) + ">";
      });

  mod.def(
      "parse_libsvm",
      [](const std::string& text, std::optional<std::size_t> dim) { return parse_libsvm(text, {dim}); },
      py::arg("text"), py::arg("dim") = py::none());
  mod.def(
      "load_libsvm",
      [](const std::string& path, std::optional<std::size_t> dim) {
        return load_libsvm(resolve_data_path(path), {dim});
      },
      py::arg("path"), py::arg("dim") = py::none(),
      "Reads a LIBSVM file (plain or gzip), also looking under $VMPROX_DATA_DIR.");

  mod.def(
      "reference",
      [](const Dataset& ds, double lambda1, double lambda2, double tol) {
        ReferenceOptions opts;
        opts.tol = tol;
        ReferenceSolution ref;
        {
          py::gil_scoped_release release;
          const LogisticRidge smooth(ds, lambda2);
          ref = compute_reference(smooth, Regularizer::lasso(lambda1), opts);
        }
        py::dict d;
        d["w"] = ref.w;
        d["value"] = ref.value;
        d["residual"] = ref.residual;
        d["iterations"] = ref.iterations;
        d["polished"] = ref.polished;
        return d;
      },
      py::arg("dataset"), py::arg("lambda1") = 1e-5, py::arg("lambda2") = 1e-4, py::arg("tol") = 1e-13);

  mod.def(
      "run",
      [](const Dataset& ds, const std::string& algorithm, double lambda1, double lambda2,
         const std::variant<int, std::string>& m, int b, int epochs, double eta0, double omega,
         const std::string& sampling, std::uint64_t seed, std::optional<double> metric_cap,
         std::optional<double> reference_value) {
        SolverConfig c;
        c.algorithm = parse_algorithm(algorithm);
        c.m = to_inner_size(m).resolve(ds.n());
        c.b = b;
        c.epochs = epochs;
        c.eta0 = eta0;
        c.metric.omega = omega;
        if (metric_cap) c.metric.cap = *metric_cap;
        c.sampling = parse_sampling_scheme(sampling);
        c.seed = seed;
        validate(c, ds.n());
        RunOptions opts;
        opts.reference_value = reference_value;
        RunTrace trace;
        {
          py::gil_scoped_release release;
          const LogisticRidge smooth(ds, lambda2);
          trace = run(c, smooth, Regularizer::lasso(lambda1), opts);
        }
        return trace_dict(trace);
      },
      py::arg("dataset"), py::arg("algorithm") = "VM-mSRGBB", py::arg("lambda1") = 1e-5,
      py::arg("lambda2") = 1e-4, py::arg("m") = std::string("0.07n"), py::arg("b") = 4, py::arg("epochs") = 30,
      py::arg("eta0") = 0.1, py::arg("omega") = 1.0, py::arg("sampling") = "uniform", py::arg("seed") = 1,
      py::arg("metric_cap") = py::none(), py::arg("reference_value") = py::none(),
      "Runs one solver; returns the per-epoch trace as numpy arrays plus the final and sampled iterates.");

  mod.def(
      "scaled_prox",
      [](const Vector& w, const Vector& u, double lambda1, double lambda2) {
        return scaled_prox(Regularizer::elastic_net(lambda1, lambda2), DiagonalMetric(u), w);
      },
      py::arg("w"), py::arg("u"), py::arg("lambda1"), py::arg("lambda2") = 0.0);

  mod.def(
      "theoretical_rate",
      [](double modulus, double l_omega, double u_min, double u_max, int m, int b) {
        return theoretical_rate(RateInputs{modulus, l_omega, u_min, u_max, m, b}).value;
      },
      py::arg("modulus"), py::arg("l_omega"), py::arg("u_min"), py::arg("u_max"), py::arg("m"), py::arg("b"));

  mod.def(
      "verify",
      [](std::uint64_t seed) {
        VerifyReport report;
        {
          py::gil_scoped_release release;
          report = run_verification({seed, Fault::None});
        }
        py::list out;
        for (const auto& c : report.checks) {
          out.append(py::dict(py::arg("name") = c.name, py::arg("passed") = c.pass, py::arg("worst") = c.worst,
                              py::arg("tolerance") = c.tolerance));
        }
        return out;
      },
      py::arg("seed") = VerifyOptions{}.seed);

  py::list names;
  for (auto a : all_algorithms()) names.append(to_string(a));
  mod.attr("ALGORITHMS") = names;
}
