#pragma once

// Benchmark harness: source -> quantization -> window policy, with the
// value/rank error, space and throughput metrics computed against a
// sort-based oracle over the unquantized stream.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "winquant/aomg.hpp"
#include "winquant/workloads.hpp"

namespace winquant {

enum class PolicyId { aomg, aomg_nofewk, exact, sampling };

std::string_view to_string(PolicyId p);
/// Throws ConfigError for unknown names.
PolicyId policy_from_string(std::string_view name);

struct RunConfig {
  PolicyId policy = PolicyId::aomg;
  std::uint64_t window = 128 * 1024;
  std::uint64_t period = 16 * 1024;
  std::vector<double> phis{0.5, 0.9, 0.99, 0.999};
  /// "normal", "uniform", "ar1", "heavytail" or "csv:PATH".
  std::string source = "normal";
  /// Generator parameters; `kind` is taken from `source`.
  GeneratorSpec generator{};
  CsvOptions csv{};
  /// Significant digits kept at ingestion; 0 disables quantization.
  int quantize_digits = 3;
  std::optional<std::uint64_t> k_t;
  std::optional<std::uint64_t> k_s;
  /// Few-k budget B per window; defaults to half of the exact requirement.
  std::optional<std::uint64_t> budget;
  double kt_multiplier = 1.0;
  double si_threshold = 10.0;
  double burst_tau = 0.5;
  std::optional<BurstSpec> burst;
  double epsilon = 0.015;
  bool oracle = true;
  bool error_bounds = true;

  /// Throws ConfigError on an invalid combination.
  WindowSpec window_spec() const;
};

/// Few-k settings the AOMG policies run with.
FewKConfig resolve_fewk(const RunConfig& cfg);

struct ReportConfig {
  std::string policy;
  std::uint64_t window = 0;
  std::uint64_t period = 0;
  std::vector<double> phis;
  std::string source;
  std::uint64_t seed = 0;
  std::uint64_t count = 0;
  std::string rng_id;
  int quantize_digits = 0;
  std::uint64_t k_t = 0;
  std::uint64_t k_s = 0;
  double si_threshold = 0;
  double burst_tau = 0;
  double epsilon = 0;
  std::optional<std::string> burst;
  bool oracle = true;

  friend bool operator==(const ReportConfig&, const ReportConfig&) = default;
};

struct EvaluationRecord {
  std::uint64_t eval_index = 0;
  double phi = 0;
  double estimate = 0;
  std::optional<double> exact;
  std::string method;
  std::optional<double> error_bound;
  std::optional<double> value_error_pct;
  std::optional<double> rank_error;

  friend bool operator==(const EvaluationRecord&, const EvaluationRecord&) = default;
};

struct PhiSummary {
  double phi = 0;
  std::uint64_t evaluations = 0;
  /// Records whose value error is undefined (exact value 0).
  std::uint64_t excluded = 0;
  std::optional<double> avg_value_error_pct;
  std::optional<double> avg_rank_error;
  /// Fraction of bounded records with |estimate - exact| <= error_bound.
  std::optional<double> bound_coverage;

  friend bool operator==(const PhiSummary&, const PhiSummary&) = default;
};

struct RunReport {
  static constexpr int kSchemaVersion = 1;

  int schema_version = kSchemaVersion;
  ReportConfig config;
  std::vector<EvaluationRecord> evaluations;
  std::vector<PhiSummary> per_phi;
  std::uint64_t events = 0;
  std::uint64_t observed_space = 0;
  std::uint64_t analytical_space = 0;
  std::optional<double> throughput_mevs;
  double elapsed_seconds = 0;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

/// Generates or reads the configured stream and applies burst injection.
/// Values are not quantized here.
std::vector<Event> load_source(const RunConfig& cfg);

/// load_source + run_on_events.
RunReport run(const RunConfig& cfg);

/// Runs the configured policy over `raw` (quantized at ingestion) and
/// scores it against the exact quantiles of the unquantized stream.
RunReport run_on_events(const RunConfig& cfg, std::span<const Event> raw);

/// Single-threaded events per second (in millions) after the first window,
/// oracle off. Throws InsufficientDataError for fewer than two windows.
double measure_throughput(const RunConfig& cfg, std::span<const Event> raw);

/// Recomputes per-phi aggregates from evaluation records.
std::vector<PhiSummary> summarize(std::span<const EvaluationRecord> records,
                                  std::span<const double> phis);

std::string to_json(const RunReport& report);
/// Throws DataError on malformed or unsupported documents.
RunReport report_from_json(std::string_view text);
/// One row per evaluation and phi.
std::string to_csv(const RunReport& report);

}  // namespace winquant
