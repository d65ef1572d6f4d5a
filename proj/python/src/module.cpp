// Python bindings. Instances and reports cross the boundary as JSON text so
// the Python side stays a thin dict-based wrapper.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "datamarket/cli.hpp"
#include "datamarket/equilibrium.hpp"
#include "datamarket/errors.hpp"
#include "datamarket/instances.hpp"
#include "datamarket/io.hpp"
#include "datamarket/learning.hpp"
#include "datamarket/metrics.hpp"
#include "datamarket/validate.hpp"

namespace py = pybind11;
namespace dm = datamarket;

namespace {

std::string generate_json(const std::string& spec_json) {
  const auto spec = dm::generator_spec_from_json(
      nlohmann::json::parse(spec_json.empty() ? "{}" : spec_json));
  return dm::dump_instance(dm::generate(spec));
}

// Parse and re-serialize: validates and canonicalizes instance text.
std::string canonical_json(const std::string& instance_json) {
  return dm::dump_instance(dm::parse_instance(instance_json));
}

std::string analyze_json(const std::string& instance_json,
                         std::uint64_t budget) {
  const auto instance = dm::parse_instance(instance_json);
  return dm::report_to_json(instance, dm::wrae(instance, budget)).dump();
}

std::string validate_json(const std::string& instance_json) {
  const auto instance = dm::parse_instance(instance_json);
  return dm::checks_to_json(dm::validate_instance(instance)).dump();
}

std::string dynamics_json(const std::string& instance_json,
                          std::vector<std::uint32_t> start,
                          std::vector<int> order, int max_rounds) {
  const auto instance = dm::parse_instance(instance_json);
  const auto profile = dm::Profile::from_masks(start, instance.sellers());
  return dm::dynamics_to_json(
             dm::sequential_best_response(instance, profile, order, max_rounds))
      .dump();
}

py::dict simulate_summary(const std::string& instance_json,
                          std::int64_t horizon, std::uint64_t seed,
                          const std::vector<std::string>& learners,
                          const std::string& alpha, bool curves,
                          std::uint64_t budget) {
  const auto instance = dm::parse_instance(instance_json);
  dm::SimulationConfig config;
  config.horizon = horizon;
  config.seed = seed;
  config.learners.clear();
  for (const auto& name : learners) {
    config.learners.push_back(dm::learner_kind_from_string(name));
  }
  if (alpha == "corollary") {
    config.alpha = dm::AlphaSchedule::corollary();
  } else if (!alpha.empty()) {
    config.alpha = dm::AlphaSchedule::fixed(std::stod(alpha));
  }

  dm::SimulationTrace trace;
  dm::RegretSeries series;
  {
    py::gil_scoped_release release;
    trace = dm::simulate(instance, config);
    series = dm::regret_series(instance, trace, budget);
  }

  py::list final_effective;
  for (const auto& curve : series.effective_cumulative) {
    final_effective.append(curve.empty() ? 0.0 : curve.back());
  }
  py::dict out;
  out["rounds"] = trace.rounds();
  out["seed"] = trace.seed;
  out["effective_regret"] = final_effective;
  out["welfare_regret"] =
      series.welfare_cumulative.empty() ? 0.0 : series.welfare_cumulative.back();
  out["realized_welfare_regret"] = series.realized_welfare_cumulative.empty()
                                       ? 0.0
                                       : series.realized_welfare_cumulative.back();
  out["final_profile"] = trace.rounds() > 0
                             ? trace.profile(trace.rounds()).masks()
                             : std::vector<std::uint32_t>{};
  if (curves) {
    out["effective_curves"] = series.effective_cumulative;
    out["welfare_curve"] = series.welfare_cumulative;
  }
  return out;
}

py::tuple run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"datamarket"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = 0;
  {
    py::gil_scoped_release release;
    code = dm::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Fixed-price data market: equilibria, learning, regret";

  py::register_exception<dm::ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<dm::BudgetError>(m, "BudgetError",
                                          PyExc_RuntimeError);
  py::register_exception<dm::UnsupportedModelError>(m, "UnsupportedModelError",
                                                    PyExc_RuntimeError);

  m.attr("FORMAT_VERSION") = dm::kFormatVersion;
  m.attr("DEFAULT_BUDGET") = dm::kDefaultProfileBudget;

  m.def("generate_json", &generate_json, py::arg("spec_json") = "");
  m.def("canonical_json", &canonical_json, py::arg("instance_json"));
  m.def("analyze_json", &analyze_json, py::arg("instance_json"),
        py::arg("budget") = dm::kDefaultProfileBudget);
  m.def("validate_json", &validate_json, py::arg("instance_json"));
  m.def("dynamics_json", &dynamics_json, py::arg("instance_json"),
        py::arg("start"), py::arg("order"), py::arg("max_rounds") = 1000);
  m.def("simulate_summary", &simulate_summary, py::arg("instance_json"),
        py::arg("horizon") = 1000, py::arg("seed") = 0,
        py::arg("learners") = std::vector<std::string>{"zooming"},
        py::arg("alpha") = "", py::arg("curves") = false,
        py::arg("budget") = dm::kDefaultProfileBudget);
  m.def("alpha_corollary", &dm::alpha_corollary, py::arg("phase_horizon"),
        py::arg("k"));
  m.def("confidence_radius", &dm::confidence_radius, py::arg("pulls"),
        py::arg("horizon"));
  m.def("run_cli", &run_cli, py::arg("args"));
}
