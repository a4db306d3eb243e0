#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <sstream>

#include "smaup/cli.hpp"
#include "smaup/critical_values.hpp"
#include "smaup/error.hpp"
#include "smaup/experiments.hpp"
#include "smaup/io.hpp"
#include "smaup/regionalize.hpp"
#include "smaup/sar.hpp"
#include "smaup/smaup_core.hpp"
#include "smaup/spatial_weights.hpp"

namespace py = pybind11;
using namespace smaup;

namespace {

NullDistribution make_null(int n, std::vector<double> values) {
  NullDistribution d;
  d.n = n;
  std::sort(values.begin(), values.end());
  d.replicates = static_cast<int>(values.size());
  d.values = std::move(values);
  return d;
}

SmaupOptions make_options(std::optional<double> rho, bool bilinear) {
  SmaupOptions o;
  o.rho_override = rho;
  o.lookup = bilinear ? CriticalLookup::Bilinear : CriticalLookup::Nearest;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "S-maup: sensitivity of spatially intensive variables to areal aggregation";
  m.attr("__version__") = io::toolkit_version();

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<StallError>(m, "StallError", PyExc_RuntimeError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<SpatialWeights>(m, "SpatialWeights")
      .def_static("from_neighbors", &SpatialWeights::from_neighbors, py::arg("neighbors"), py::arg("standardize") = true)
      .def_static("lattice", &build_lattice_rook, py::arg("rows"), py::arg("cols"), py::arg("standardize") = true)
      .def_static(
          "from_adjacency_text",
          [](const std::string& text, bool standardize) { return from_adjacency_text(text, standardize).weights; },
          py::arg("text"), py::arg("standardize") = true)
      .def_static(
          "from_geojson", [](const std::string& text, bool standardize) { return from_geojson(text, standardize); },
          py::arg("text"), py::arg("standardize") = true)
      .def_static(
          "from_json", [](const std::string& text) { return io::weights_from_json(io::json::parse(text)); },
          py::arg("text"))
      .def_property_readonly("n", &SpatialWeights::n)
      .def_property_readonly("edge_count", &SpatialWeights::edge_count)
      .def_property_readonly("standardized", &SpatialWeights::standardized)
      .def_property_readonly("neighbors", &SpatialWeights::neighbor_lists)
      .def_property_readonly("weights", &SpatialWeights::weight_lists)
      .def("eigenvalues", &SpatialWeights::eigenvalues)
      .def("is_connected", [](const SpatialWeights& w) { return is_connected(w); })
      .def("to_json", [](const SpatialWeights& w) { return io::to_json(w).dump(); })
      .def("to_adjacency_text", [](const SpatialWeights& w) { return to_adjacency_text(w); })
      .def(py::self == py::self)
      .def("__repr__", [](const SpatialWeights& w) {
        return "<SpatialWeights n=" + std::to_string(w.n()) + " edges=" + std::to_string(w.edge_count()) + ">";
      });

  m.def(
      "generate_sar",
      [](const SpatialWeights& w, double rho, std::uint64_t seed) {
        const auto y = generate_sar(w, {rho, seed});
        return std::vector<double>(y.values().begin(), y.values().end());
      },
      py::arg("w"), py::arg("rho"), py::arg("seed"));
  m.def(
      "estimate_rho", [](const SpatialWeights& w, std::vector<double> y) { return estimate_rho(w, AreaVariable(std::move(y), w)); },
      py::arg("w"), py::arg("y"));
  m.def(
      "permute_to_rho",
      [](const SpatialWeights& w, std::vector<double> y, double target, double window, int max_retries,
         std::uint64_t seed) {
        const auto r = generate_with_target_rho(w, AreaVariable(std::move(y), w), target, window, max_retries, seed);
        return py::make_tuple(std::vector<double>(r.variable.values().begin(), r.variable.values().end()),
                              r.estimated_rho, r.attempts);
      },
      py::arg("w"), py::arg("y"), py::arg("target"), py::arg("window") = 0.5, py::arg("max_retries") = 100,
      py::arg("seed") = 0);
  m.def(
      "random_regions", [](const SpatialWeights& w, int k, std::uint64_t seed) { return random_regions(w, k, seed).assignment; },
      py::arg("w"), py::arg("k"), py::arg("seed"));
  m.def(
      "aggregate_mean",
      [](const std::vector<double>& y, std::vector<int> assignment, int k) {
        return aggregate_mean(y, Regionalization{std::move(assignment), k}).region_means;
      },
      py::arg("y"), py::arg("assignment"), py::arg("k"));

  m.def("l_of_theta", [](double t) { return l_of_theta(t); }, py::arg("theta"));
  m.def("eta_of_theta", [](double t) { return eta_of_theta(t); }, py::arg("theta"));
  m.def("tau_of_theta", [](double t) { return tau_of_theta(t); }, py::arg("theta"));
  m.def("m_statistic", [](double rho, double theta) { return m_statistic(rho, theta); }, py::arg("rho"), py::arg("theta"));
  m.def(
      "critical_value",
      [](double n, double rho, double alpha, bool bilinear) {
        return critical_value(n, rho, alpha, bilinear ? CriticalLookup::Bilinear : CriticalLookup::Nearest);
      },
      py::arg("n"), py::arg("rho"), py::arg("alpha"), py::arg("bilinear") = false);
  m.def("critical_values_csv", [] { return CriticalValueTable::embedded().to_csv(); });

  // Results cross as JSON text; the package wrapper turns them into dicts.
  m.def(
      "_smaup_test",
      [](const SpatialWeights& w, std::vector<double> y, int k, double alpha, std::optional<std::vector<double>> null,
         std::optional<double> rho, bool bilinear) {
        const AreaVariable v(std::move(y), w);
        std::optional<NullDistribution> nd;
        if (null) nd = make_null(static_cast<int>(w.n()), *null);
        const auto opts = make_options(rho, bilinear);
        return io::to_json(smaup_test(v, w, k, alpha, nd ? &*nd : nullptr, opts), opts.params).dump();
      },
      py::arg("w"), py::arg("y"), py::arg("k"), py::arg("alpha") = 0.05, py::arg("null") = py::none(),
      py::arg("rho") = py::none(), py::arg("bilinear") = false);
  m.def(
      "min_safe_k",
      [](const SpatialWeights& w, std::vector<double> y, double alpha, int k_min, std::optional<int> k_max,
         std::optional<std::vector<double>> null, std::optional<double> rho) -> std::optional<int> {
        const AreaVariable v(std::move(y), w);
        std::optional<NullDistribution> nd;
        if (null) nd = make_null(static_cast<int>(w.n()), *null);
        return min_safe_k(v, w, alpha, k_min, k_max.value_or(static_cast<int>(w.n())), nd ? &*nd : nullptr,
                          make_options(rho, false))
            .k;
      },
      py::arg("w"), py::arg("y"), py::arg("alpha") = 0.05, py::arg("k_min") = 1, py::arg("k_max") = py::none(),
      py::arg("null") = py::none(), py::arg("rho") = py::none());

  m.def(
      "generate_null",
      [](int n, double rho, int replicates, int r, std::uint64_t seed, std::size_t workers) {
        experiments::NullConfig c;
        c.n = n;
        c.rho = rho;
        c.replicates = replicates;
        c.master_seed = seed;
        c.workers = workers;
        c.instance.r = r;
        py::gil_scoped_release release;
        return experiments::generate_null(c).values;
      },
      py::arg("n"), py::arg("rho"), py::arg("replicates"), py::arg("r") = 30, py::arg("seed") = 0,
      py::arg("workers") = 1);
  m.def(
      "_power_size",
      [](const std::string& kind, std::vector<int> n_list, std::vector<double> rho_list, int instances, double alpha,
         std::uint64_t seed, std::size_t workers) {
        experiments::PowerSizeConfig c;
        c.n_list = std::move(n_list);
        c.rho_list = std::move(rho_list);
        c.instances = instances;
        c.alpha = alpha;
        c.master_seed = seed;
        c.workers = workers;
        if (kind != "power" && kind != "size") throw InputError("kind must be 'power' or 'size'");
        std::string out;
        {
          py::gil_scoped_release release;
          out = io::to_json(kind == "power" ? experiments::power_experiment(c) : experiments::size_experiment(c)).dump();
        }
        return out;
      },
      py::arg("kind"), py::arg("n_list"), py::arg("rho_list"), py::arg("instances"), py::arg("alpha") = 0.05,
      py::arg("seed") = 0, py::arg("workers") = 1);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs a command line in-process; returns (exit_code, stdout, stderr).");
}
