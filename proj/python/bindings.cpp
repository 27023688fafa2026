#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "winquant/aomg.hpp"
#include "winquant/baselines.hpp"
#include "winquant/bench.hpp"
#include "winquant/errors.hpp"
#include "winquant/frequency_map.hpp"
#include "winquant/metrics.hpp"
#include "winquant/stream_driver.hpp"
#include "winquant/workloads.hpp"

namespace py = pybind11;
using namespace winquant;

namespace {

std::vector<std::int64_t> values_of(const std::vector<Event>& events) {
  std::vector<std::int64_t> out;
  out.reserve(events.size());
  for (const Event& e : events) out.push_back(e.value);
  return out;
}

std::vector<Event> events_of(const std::vector<std::int64_t>& values) {
  return make_events(values);
}

SubWindowSummary tail_summary(std::vector<std::int64_t> topk, std::vector<std::int64_t> samplek) {
  SubWindowSummary s;
  s.topk = std::move(topk);
  s.samplek = std::move(samplek);
  return s;
}

py::dict estimate_dict(const Estimate& e) {
  py::dict d;
  d["phi"] = e.phi;
  d["value"] = e.value;
  d["method"] = std::string(to_string(e.method));
  d["error_bound"] = e.error_bound;
  d["density"] = e.density;
  return d;
}

RunConfig make_config(const std::string& policy, std::uint64_t window, std::uint64_t period,
                      const std::vector<double>& phis, const std::string& source,
                      std::uint64_t count, std::uint64_t seed, int quantize_digits,
                      std::optional<std::uint64_t> k_t, std::optional<std::uint64_t> k_s,
                      std::optional<std::uint64_t> budget, double epsilon, bool oracle,
                      std::optional<double> psi) {
  RunConfig cfg;
  cfg.policy = policy_from_string(policy);
  cfg.window = window;
  cfg.period = period;
  cfg.phis = phis;
  cfg.source = source;
  cfg.generator.count = count;
  cfg.generator.seed = seed;
  if (psi) cfg.generator.psi = *psi;
  cfg.quantize_digits = quantize_digits;
  cfg.k_t = k_t;
  cfg.k_s = k_s;
  cfg.budget = budget;
  cfg.epsilon = epsilon;
  cfg.oracle = oracle;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_winquant, m) {
  m.doc() = "Sliding-window quantile estimation";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<EmptyWindowError>(m, "EmptyWindowError", base.ptr());
  py::register_exception<StateCorruptionError>(m, "StateCorruptionError", base.ptr());
  py::register_exception<WarmupError>(m, "WarmupError", base.ptr());
  py::register_exception<NotEnabledError>(m, "NotEnabledError", base.ptr());
  py::register_exception<UndefinedBoundError>(m, "UndefinedBoundError", base.ptr());
  py::register_exception<InsufficientDataError>(m, "InsufficientDataError", base.ptr());

  m.def("quantize", &quantize, py::arg("value"), py::arg("sig_digits"));
  m.def("quantile_rank", &quantile_rank, py::arg("phi"), py::arg("total"));
  m.def("tail_rank", &tail_rank, py::arg("phi"), py::arg("total"));

  py::class_<FrequencyMap>(m, "FrequencyMap")
      .def(py::init<>())
      .def("accumulate", &FrequencyMap::accumulate, py::arg("value"))
      .def("deaccumulate", &FrequencyMap::deaccumulate, py::arg("value"))
      .def(
          "quantiles",
          [](const FrequencyMap& fm, const std::vector<double>& phis) {
            return fm.compute_result(QuantileSet(phis));
          },
          py::arg("phis"))
      .def("value_at_rank", &FrequencyMap::value_at_rank, py::arg("rank"))
      .def("count_below", &FrequencyMap::count_below, py::arg("value"))
      .def("largest", &FrequencyMap::largest, py::arg("k"))
      .def_property_readonly("total", &FrequencyMap::total)
      .def_property_readonly("distinct", &FrequencyMap::distinct)
      .def("__len__", &FrequencyMap::total)
      .def("entries", [](const FrequencyMap& fm) {
        return std::vector<std::pair<std::int64_t, std::uint64_t>>(fm.entries().begin(),
                                                                   fm.entries().end());
      });

  m.def(
      "sliding_quantiles",
      [](const std::vector<std::int64_t>& values, std::uint64_t window, std::uint64_t period,
         const std::vector<double>& phis) {
        const auto events = events_of(values);
        return drive(std::span<const Event>(events), WindowSpec(window, period),
                     ExactSlidingOperator(QuantileSet(phis)));
      },
      py::arg("values"), py::arg("window"), py::arg("period"), py::arg("phis"),
      "Exact quantiles of every full window.");

  m.def(
      "aomg_quantiles",
      [](const std::vector<std::int64_t>& values, std::uint64_t window, std::uint64_t period,
         const std::vector<double>& phis, std::uint64_t k_t, std::uint64_t k_s, bool error_bounds) {
        const auto events = events_of(values);
        FewKConfig fewk;
        fewk.k_t = k_t;
        fewk.k_s = k_s;
        AomgOperator op(WindowSpec(window, period), QuantileSet(phis),
                        AomgOptions{fewk, error_bounds, 0.05});
        py::list out;
        for (const auto& result : drive(std::span<const Event>(events), WindowSpec(window, period), op)) {
          py::list row;
          for (const Estimate& e : result) row.append(estimate_dict(e));
          out.append(row);
        }
        return out;
      },
      py::arg("values"), py::arg("window"), py::arg("period"), py::arg("phis"),
      py::arg("k_t") = 0, py::arg("k_s") = 0, py::arg("error_bounds") = true,
      "Two-level estimates of every full window as lists of dicts.");

  m.def("error_bound", &error_bound, py::arg("phi"), py::arg("n"), py::arg("m"), py::arg("density"),
        py::arg("alpha") = 0.05);
  m.def("upper_normal_quantile", &upper_normal_quantile, py::arg("p"));
  m.def(
      "burst_statistic",
      [](const std::vector<std::int64_t>& current, const std::vector<std::int64_t>& previous) {
        return burst_statistic(current, previous);
      },
      py::arg("current"), py::arg("previous"));
  m.def(
      "detect_burst",
      [](const std::vector<std::int64_t>& current, const std::vector<std::int64_t>& previous,
         double tau) { return detect_burst(current, previous, tau); },
      py::arg("current"), py::arg("previous"), py::arg("tau") = 0.5);
  m.def(
      "topk_merge",
      [](const std::vector<std::vector<std::int64_t>>& lists, double phi, std::uint64_t window_size) {
        std::vector<SubWindowSummary> s;
        for (const auto& l : lists) s.push_back(tail_summary(l, {}));
        return topk_merge(s, phi, window_size);
      },
      py::arg("topk_lists"), py::arg("phi"), py::arg("window_size"));
  m.def(
      "samplek_merge",
      [](const std::vector<std::vector<std::int64_t>>& lists, double phi, std::uint64_t window_size,
         double alpha) {
        std::vector<SubWindowSummary> s;
        for (const auto& l : lists) s.push_back(tail_summary({}, l));
        return samplek_merge(s, phi, window_size, alpha);
      },
      py::arg("sample_lists"), py::arg("phi"), py::arg("window_size"), py::arg("alpha"));

  m.def("value_error", &value_error, py::arg("estimate"), py::arg("exact"));
  m.def(
      "rank_error",
      [](double value, std::vector<std::int64_t> window, double phi) {
        std::sort(window.begin(), window.end());
        return rank_error(value, window, phi);
      },
      py::arg("value"), py::arg("window"), py::arg("phi"));

  m.def(
      "generate",
      [](const std::string& kind, std::uint64_t count, std::uint64_t seed, std::optional<double> psi) {
        GeneratorSpec spec;
        spec.kind = generator_kind_from_string(kind);
        spec.count = count;
        spec.seed = seed;
        if (psi) spec.psi = *psi;
        return values_of(generate(spec));
      },
      py::arg("kind"), py::arg("count"), py::arg("seed") = 1, py::arg("psi") = py::none());
  m.def(
      "inject_burst",
      [](const std::vector<std::int64_t>& values, std::uint64_t window, std::uint64_t period,
         double phi, double multiplier, std::uint64_t every) {
        BurstSpec b{phi, multiplier, every};
        return values_of(inject_burst(events_of(values), b, WindowSpec(window, period)));
      },
      py::arg("values"), py::arg("window"), py::arg("period"), py::arg("phi") = 0.999,
      py::arg("multiplier") = 10.0, py::arg("every") = 0);

  m.def(
      "run",
      [](const std::string& policy, std::uint64_t window, std::uint64_t period,
         const std::vector<double>& phis, const std::string& source, std::uint64_t count,
         std::uint64_t seed, int quantize_digits, std::optional<std::uint64_t> k_t,
         std::optional<std::uint64_t> k_s, std::optional<std::uint64_t> budget, double epsilon,
         bool oracle, std::optional<double> psi) {
        const RunConfig cfg = make_config(policy, window, period, phis, source, count, seed,
                                          quantize_digits, k_t, k_s, budget, epsilon, oracle, psi);
        RunReport report;
        {
          py::gil_scoped_release release;
          report = run(cfg);
        }
        return to_json(report);
      },
      py::arg("policy") = "aomg", py::arg("window") = 128 * 1024, py::arg("period") = 16 * 1024,
      py::arg("phis") = std::vector<double>{0.5, 0.9, 0.99, 0.999}, py::arg("source") = "normal",
      py::arg("count") = 1000000, py::arg("seed") = 1, py::arg("quantize_digits") = 3,
      py::arg("k_t") = py::none(), py::arg("k_s") = py::none(), py::arg("budget") = py::none(),
      py::arg("epsilon") = 0.015, py::arg("oracle") = true, py::arg("psi") = py::none(),
      "Runs the benchmark harness and returns the report as a JSON string.");
}
