#include "winquant/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "json.hpp"

#include "winquant/baselines.hpp"
#include "winquant/errors.hpp"
#include "winquant/metrics.hpp"
#include "winquant/stream_driver.hpp"

namespace winquant {

using nlohmann::json;

std::string_view to_string(PolicyId p) {
  switch (p) {
    case PolicyId::aomg:
      return "aomg";
    case PolicyId::aomg_nofewk:
      return "aomg-nofewk";
    case PolicyId::exact:
      return "exact";
    case PolicyId::sampling:
      return "sampling";
  }
  return "unknown";
}

PolicyId policy_from_string(std::string_view name) {
  for (PolicyId p : {PolicyId::aomg, PolicyId::aomg_nofewk, PolicyId::exact, PolicyId::sampling}) {
    if (to_string(p) == name) {
      return p;
    }
  }
  throw ConfigError("unknown policy '" + std::string(name) + "'");
}

WindowSpec RunConfig::window_spec() const {
  if (quantize_digits < 0) {
    throw ConfigError("quantize digits must be >= 0");
  }
  return WindowSpec(window, period);
}

FewKConfig resolve_fewk(const RunConfig& cfg) {
  const WindowSpec w = cfg.window_spec();
  const double phi_max = QuantileSet(cfg.phis).max();
  FewKConfig fewk;
  if (cfg.policy == PolicyId::aomg_nofewk) {
    fewk = FewKConfig::disabled();
  } else if (cfg.k_t || cfg.k_s) {
    fewk.k_t = cfg.k_t.value_or(0);
    fewk.k_s = cfg.k_s.value_or(0);
  } else {
    const std::uint64_t governed = tail_rank(phi_max, w.size());
    const std::uint64_t budget = cfg.budget.value_or(w.subwindows() * ((governed + 1) / 2));
    fewk = FewKConfig::from_budget(budget, w, phi_max, cfg.kt_multiplier, cfg.si_threshold,
                                   cfg.burst_tau);
  }
  fewk.si_threshold = cfg.si_threshold;
  fewk.burst_tau = cfg.burst_tau;
  return fewk;
}

std::vector<Event> load_source(const RunConfig& cfg) {
  const WindowSpec w = cfg.window_spec();
  std::vector<Event> events;
  if (cfg.source.starts_with("csv:")) {
    events = read_csv(cfg.source.substr(4), cfg.csv);
  } else {
    GeneratorSpec spec = cfg.generator;
    spec.kind = generator_kind_from_string(cfg.source);
    events = generate(spec);
  }
  if (cfg.burst) {
    events = inject_burst(std::move(events), *cfg.burst, w);
  }
  return events;
}

namespace {

using Clock = std::chrono::steady_clock;

struct PipelineOutput {
  std::vector<std::vector<Estimate>> evaluations;
  std::uint64_t peak_space = 0;
  std::uint64_t analytical_space = 0;
  std::uint64_t timed_events = 0;
  double timed_seconds = 0;
};

std::vector<Estimate> as_estimates(const std::vector<std::int64_t>& values, const QuantileSet& qs,
                                   Method method) {
  std::vector<Estimate> out;
  out.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out.push_back(Estimate{qs[i], static_cast<double>(values[i]), method, std::nullopt, std::nullopt});
  }
  return out;
}

// The first window is consumed untimed; the clock covers the remainder.
template <class Op, class Convert>
void execute(Op op, const WindowSpec& w, std::span<const Event> events, PipelineOutput& out,
             Convert convert) {
  WindowDriver<Op> driver(w, std::move(op));
  const std::size_t warm = std::min<std::size_t>(w.size(), events.size());
  auto record = [&](auto&& result) {
    out.evaluations.push_back(convert(result));
    out.peak_space = std::max<std::uint64_t>(out.peak_space,
                                             driver.op().observed_space(driver.state()));
  };
  for (std::size_t i = 0; i < warm; ++i) {
    if (auto r = driver.push(events[i])) record(*r);
  }
  const auto start = Clock::now();
  for (std::size_t i = warm; i < events.size(); ++i) {
    if (auto r = driver.push(events[i])) record(*r);
  }
  out.timed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  out.timed_events = events.size() - warm;
}

PipelineOutput execute_policy(const RunConfig& cfg, std::span<const Event> events) {
  const WindowSpec w = cfg.window_spec();
  const QuantileSet qs(cfg.phis);
  PipelineOutput out;
  switch (cfg.policy) {
    case PolicyId::aomg:
    case PolicyId::aomg_nofewk: {
      AomgOperator op(w, qs, AomgOptions{resolve_fewk(cfg), cfg.error_bounds, 0.05});
      out.analytical_space = op.analytical_space();
      execute(std::move(op), w, events, out, [](const std::vector<Estimate>& r) { return r; });
      break;
    }
    case PolicyId::exact:
      out.analytical_space = 2 * w.size() + 1;
      execute(ExactSlidingOperator(qs), w, events, out,
              [&](const std::vector<std::int64_t>& r) { return as_estimates(r, qs, Method::exact); });
      break;
    case PolicyId::sampling: {
      SamplingOperator op(w, qs, EpsilonConfig(cfg.epsilon));
      out.analytical_space = op.samples_per_subwindow() * w.subwindows() + 2 * w.period() + 1;
      execute(std::move(op), w, events, out,
              [&](const std::vector<std::int64_t>& r) { return as_estimates(r, qs, Method::sampling); });
      break;
    }
  }
  return out;
}

std::vector<Event> quantized(const RunConfig& cfg, std::span<const Event> raw) {
  std::vector<Event> out(raw.begin(), raw.end());
  if (cfg.quantize_digits > 0) {
    for (Event& e : out) {
      e.value = quantize(e.value, cfg.quantize_digits);
    }
  }
  return out;
}

std::string describe_burst(const BurstSpec& b) {
  std::ostringstream s;
  s << b.phi_target << ',' << b.multiplier << ',' << b.every_nth_subwindow;
  return s.str();
}

ReportConfig echo(const RunConfig& cfg, std::uint64_t events) {
  const FewKConfig fewk = cfg.policy == PolicyId::aomg || cfg.policy == PolicyId::aomg_nofewk
                              ? resolve_fewk(cfg)
                              : FewKConfig::disabled();
  ReportConfig c;
  c.policy = std::string(to_string(cfg.policy));
  c.window = cfg.window;
  c.period = cfg.period;
  const QuantileSet qs(cfg.phis);
  c.phis.assign(qs.phis().begin(), qs.phis().end());
  c.source = cfg.source;
  const bool csv = cfg.source.starts_with("csv:");
  c.seed = csv ? 0 : cfg.generator.seed;
  c.count = events;
  c.rng_id = csv ? "none" : std::string(SplitMix64::kId);
  c.quantize_digits = cfg.quantize_digits;
  c.k_t = fewk.k_t;
  c.k_s = fewk.k_s;
  c.si_threshold = cfg.si_threshold;
  c.burst_tau = cfg.burst_tau;
  c.epsilon = cfg.epsilon;
  if (cfg.burst) c.burst = describe_burst(*cfg.burst);
  c.oracle = cfg.oracle;
  return c;
}

}  // namespace

std::vector<PhiSummary> summarize(std::span<const EvaluationRecord> records,
                                  std::span<const double> phis) {
  std::vector<PhiSummary> out;
  for (double phi : phis) {
    PhiSummary s;
    s.phi = phi;
    double value_sum = 0, rank_sum = 0;
    std::uint64_t value_n = 0, rank_n = 0, bounded = 0, covered = 0;
    for (const auto& r : records) {
      if (r.phi != phi) continue;
      ++s.evaluations;
      if (r.exact) {
        if (r.value_error_pct) {
          value_sum += *r.value_error_pct;
          ++value_n;
        } else {
          ++s.excluded;
        }
        if (r.error_bound) {
          ++bounded;
          covered += std::abs(r.estimate - *r.exact) <= *r.error_bound ? 1 : 0;
        }
      }
      if (r.rank_error) {
        rank_sum += *r.rank_error;
        ++rank_n;
      }
    }
    if (value_n > 0) s.avg_value_error_pct = value_sum / static_cast<double>(value_n);
    if (rank_n > 0) s.avg_rank_error = rank_sum / static_cast<double>(rank_n);
    if (bounded > 0) s.bound_coverage = static_cast<double>(covered) / static_cast<double>(bounded);
    out.push_back(s);
  }
  return out;
}

RunReport run(const RunConfig& cfg) {
  const std::vector<Event> events = load_source(cfg);
  return run_on_events(cfg, events);
}

RunReport run_on_events(const RunConfig& cfg, std::span<const Event> raw) {
  const WindowSpec w = cfg.window_spec();
  const QuantileSet qs(cfg.phis);
  const std::vector<Event> input = quantized(cfg, raw);

  const auto wall = Clock::now();
  PipelineOutput out = execute_policy(cfg, input);

  RunReport report;
  report.config = echo(cfg, raw.size());
  report.events = raw.size();
  report.observed_space = out.peak_space;
  report.analytical_space = out.analytical_space;
  if (raw.size() >= 2 * w.size() && out.timed_seconds > 0.0) {
    report.throughput_mevs = static_cast<double>(out.timed_events) / out.timed_seconds / 1e6;
  }

  std::vector<std::int64_t> window;
  for (std::size_t e = 0; e < out.evaluations.size(); ++e) {
    const std::vector<Estimate>& estimates = out.evaluations[e];
    if (cfg.oracle) {
      const auto first = raw.begin() + static_cast<std::ptrdiff_t>(e * w.period());
      window.clear();
      std::transform(first, first + static_cast<std::ptrdiff_t>(w.size()), std::back_inserter(window),
                     [](const Event& ev) { return ev.value; });
      std::sort(window.begin(), window.end());
    }
    for (const Estimate& est : estimates) {
      EvaluationRecord rec;
      rec.eval_index = e;
      rec.phi = est.phi;
      rec.estimate = est.value;
      rec.method = std::string(to_string(est.method));
      rec.error_bound = est.error_bound;
      if (cfg.oracle) {
        const double exact = static_cast<double>(window[quantile_rank(est.phi, w.size()) - 1]);
        rec.exact = exact;
        rec.value_error_pct = value_error(est.value, exact);
        rec.rank_error = rank_error(est.value, window, est.phi);
      }
      report.evaluations.push_back(std::move(rec));
    }
  }
  report.per_phi = summarize(report.evaluations, qs.phis());
  report.elapsed_seconds = std::chrono::duration<double>(Clock::now() - wall).count();
  return report;
}

double measure_throughput(const RunConfig& cfg, std::span<const Event> raw) {
  const WindowSpec w = cfg.window_spec();
  if (raw.size() < 2 * w.size()) {
    throw InsufficientDataError("throughput needs at least two windows of events");
  }
  const std::vector<Event> input = quantized(cfg, raw);
  const PipelineOutput out = execute_policy(cfg, input);
  if (!(out.timed_seconds > 0.0)) {
    throw InsufficientDataError("timed section too short to measure");
  }
  return static_cast<double>(out.timed_events) / out.timed_seconds / 1e6;
}

// ---- serialization ----

namespace {

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

std::string to_json(const RunReport& r) {
  json config = {
      {"policy", r.config.policy},
      {"window", {{"size", r.config.window}, {"period", r.config.period}}},
      {"phis", r.config.phis},
      {"source", r.config.source},
      {"seed", r.config.seed},
      {"count", r.config.count},
      {"rng_id", r.config.rng_id},
      {"quantize_digits", r.config.quantize_digits},
      {"fewk",
       {{"k_t", r.config.k_t},
        {"k_s", r.config.k_s},
        {"si_threshold", r.config.si_threshold},
        {"burst_tau", r.config.burst_tau}}},
      {"epsilon", r.config.epsilon},
      {"burst_inject", opt(r.config.burst)},
      {"oracle", r.config.oracle},
  };
  json evaluations = json::array();
  for (const auto& e : r.evaluations) {
    evaluations.push_back({{"eval_index", e.eval_index},
                           {"phi", e.phi},
                           {"estimate", e.estimate},
                           {"exact", opt(e.exact)},
                           {"method", e.method},
                           {"error_bound", opt(e.error_bound)},
                           {"value_error_pct", opt(e.value_error_pct)},
                           {"rank_error", opt(e.rank_error)}});
  }
  json per_phi = json::array();
  for (const auto& p : r.per_phi) {
    per_phi.push_back({{"phi", p.phi},
                       {"evaluations", p.evaluations},
                       {"excluded", p.excluded},
                       {"avg_value_error_pct", opt(p.avg_value_error_pct)},
                       {"avg_rank_error", opt(p.avg_rank_error)},
                       {"bound_coverage", opt(p.bound_coverage)}});
  }
  json doc = {
      {"schema", "winquant.run_report"},
      {"schema_version", r.schema_version},
      {"config", config},
      {"aggregates",
       {{"per_phi", per_phi},
        {"events", r.events},
        {"observed_space", r.observed_space},
        {"analytical_space", r.analytical_space},
        {"throughput_mevs", opt(r.throughput_mevs)},
        {"elapsed_seconds", r.elapsed_seconds}}},
      {"evaluations", evaluations},
  };
  return doc.dump(2);
}

RunReport report_from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    if (doc.value("schema", "") != "winquant.run_report") {
      throw DataError("not a run report document");
    }
    RunReport r;
    r.schema_version = doc.at("schema_version").get<int>();
    if (r.schema_version != RunReport::kSchemaVersion) {
      throw DataError("unsupported report schema version " + std::to_string(r.schema_version));
    }
    const json& c = doc.at("config");
    r.config.policy = c.at("policy").get<std::string>();
    r.config.window = c.at("window").at("size").get<std::uint64_t>();
    r.config.period = c.at("window").at("period").get<std::uint64_t>();
    r.config.phis = c.at("phis").get<std::vector<double>>();
    r.config.source = c.at("source").get<std::string>();
    r.config.seed = c.at("seed").get<std::uint64_t>();
    r.config.count = c.at("count").get<std::uint64_t>();
    r.config.rng_id = c.at("rng_id").get<std::string>();
    r.config.quantize_digits = c.at("quantize_digits").get<int>();
    r.config.k_t = c.at("fewk").at("k_t").get<std::uint64_t>();
    r.config.k_s = c.at("fewk").at("k_s").get<std::uint64_t>();
    r.config.si_threshold = c.at("fewk").at("si_threshold").get<double>();
    r.config.burst_tau = c.at("fewk").at("burst_tau").get<double>();
    r.config.epsilon = c.at("epsilon").get<double>();
    r.config.burst = get_opt<std::string>(c, "burst_inject");
    r.config.oracle = c.at("oracle").get<bool>();

    const json& a = doc.at("aggregates");
    for (const auto& p : a.at("per_phi")) {
      PhiSummary s;
      s.phi = p.at("phi").get<double>();
      s.evaluations = p.at("evaluations").get<std::uint64_t>();
      s.excluded = p.at("excluded").get<std::uint64_t>();
      s.avg_value_error_pct = get_opt<double>(p, "avg_value_error_pct");
      s.avg_rank_error = get_opt<double>(p, "avg_rank_error");
      s.bound_coverage = get_opt<double>(p, "bound_coverage");
      r.per_phi.push_back(s);
    }
    r.events = a.at("events").get<std::uint64_t>();
    r.observed_space = a.at("observed_space").get<std::uint64_t>();
    r.analytical_space = a.at("analytical_space").get<std::uint64_t>();
    r.throughput_mevs = get_opt<double>(a, "throughput_mevs");
    r.elapsed_seconds = a.at("elapsed_seconds").get<double>();

    for (const auto& e : doc.at("evaluations")) {
      EvaluationRecord rec;
      rec.eval_index = e.at("eval_index").get<std::uint64_t>();
      rec.phi = e.at("phi").get<double>();
      rec.estimate = e.at("estimate").get<double>();
      rec.exact = get_opt<double>(e, "exact");
      rec.method = e.at("method").get<std::string>();
      rec.error_bound = get_opt<double>(e, "error_bound");
      rec.value_error_pct = get_opt<double>(e, "value_error_pct");
      rec.rank_error = get_opt<double>(e, "rank_error");
      r.evaluations.push_back(std::move(rec));
    }
    return r;
  } catch (const json::exception& ex) {
    throw DataError(std::string("malformed run report: ") + ex.what());
  }
}

std::string to_csv(const RunReport& r) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "eval_index,phi,estimate,exact,method,error_bound,value_error_pct,rank_error\n";
  auto cell = [&](const std::optional<double>& v) {
    if (v) out << *v;
  };
  for (const auto& e : r.evaluations) {
    out << e.eval_index << ',' << e.phi << ',' << e.estimate << ',';
    cell(e.exact);
    out << ',' << e.method << ',';
    cell(e.error_bound);
    out << ',';
    cell(e.value_error_pct);
    out << ',';
    cell(e.rank_error);
    out << '\n';
  }
  return out.str();
}

}  // namespace winquant
