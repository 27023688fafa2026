#pragma once

// Two-level sub-window quantile estimation.
//
// Level 1 keeps an exact frequency map of the in-flight sub-window and, when
// the sub-window closes, reduces it to a SubWindowSummary: the exact
// sub-window quantile per phi plus optional tail values. Level 2 keeps the
// last n summaries and averages their per-phi quantiles. High quantiles that
// are starved of data (period * (1 - phi) below a threshold) or hit by a
// burst are answered from the merged tail values instead (few-k merging).

#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "winquant/frequency_map.hpp"
#include "winquant/window.hpp"

namespace winquant {

enum class Method { level2_mean, top_k, sample_k, exact, sampling };

std::string_view to_string(Method m);
/// Throws ConfigError for unknown names.
Method method_from_string(std::string_view name);

/// A per-phi answer. `error_bound` is only set for level2_mean.
struct Estimate {
  double phi = 0;
  double value = 0;
  Method method = Method::level2_mean;
  std::optional<double> error_bound;
  std::optional<double> density;

  friend bool operator==(const Estimate&, const Estimate&) = default;
};

/// Few-k budget per sub-window: k_t largest values for top-k merging and
/// k_s interval samples of the tracked tail for sample-k merging.
struct FewKConfig {
  std::uint64_t k_t = 0;
  std::uint64_t k_s = 0;
  double si_threshold = 10.0;
  double burst_tau = 0.5;

  bool topk_enabled() const noexcept { return k_t > 0; }
  bool samplek_enabled() const noexcept { return k_s > 0; }
  /// B = (k_t + k_s) * n.
  std::uint64_t budget(const WindowSpec& w) const noexcept { return (k_t + k_s) * w.subwindows(); }

  static FewKConfig disabled() { return {}; }

  /// Splits a per-window budget B. k_t = ceil(R / n) * kt_multiplier, where
  /// R = tail_rank(phi_max, N), and only when period * (1 - phi_max) trips
  /// the statistical-inefficiency threshold; the rest of B / n goes to k_s.
  static FewKConfig from_budget(std::uint64_t budget, const WindowSpec& w, double phi_max,
                                double kt_multiplier = 1.0, double si_threshold = 10.0,
                                double burst_tau = 0.5);

  /// k_t = round(topk_fraction * R), k_s = round(samplek_fraction * R).
  static FewKConfig from_fractions(double topk_fraction, double samplek_fraction,
                                   const WindowSpec& w, double phi_max);

  friend bool operator==(const FewKConfig&, const FewKConfig&) = default;
};

/// How the tracked tail of a closing sub-window is reduced.
struct TailPlan {
  std::uint64_t k_t = 0;
  /// Largest values tracked for sampling: min(P, R).
  std::uint64_t tracked = 0;
  /// Sampling interval i = ceil(R / k_s); every i-th ranked value is kept.
  std::uint64_t interval = 0;
  std::uint64_t k_s = 0;
  /// Governing tail rank R = tail_rank(phi_max, N).
  std::uint64_t governed_rank = 0;

  static TailPlan make(const FewKConfig& cfg, const WindowSpec& w, double phi_max);

  /// Effective sampling fraction 1 / i (0 when sampling is off).
  double alpha() const noexcept { return interval == 0 ? 0.0 : 1.0 / static_cast<double>(interval); }
};

struct SubWindowSummary {
  /// Exact sub-window quantile per phi (non-decreasing).
  std::vector<std::int64_t> quantiles;
  /// Empirical density at each sub-window quantile, when computable.
  std::vector<std::optional<double>> densities;
  /// k_t largest values, descending.
  std::vector<std::int64_t> topk;
  /// Interval samples of the tracked tail, descending.
  std::vector<std::int64_t> samplek;
  std::uint64_t count = 0;
  /// Set when this sub-window's samples dominate its predecessor's.
  bool burst_trigger = false;

  /// Number of stored variables (quantiles, densities, tail values).
  std::size_t variables() const noexcept;

  friend bool operator==(const SubWindowSummary&, const SubWindowSummary&) = default;
};

/// Builds the summary of a complete sub-window. Throws EmptyWindowError on
/// an empty map.
SubWindowSummary close_subwindow(const FrequencyMap& map, const QuantileSet& qs,
                                 const TailPlan& plan, bool with_density = true);

/// Ring of the last n summaries with per-phi running sums.
class SlidingAggregate {
 public:
  SlidingAggregate(std::size_t subwindows, std::size_t quantiles);

  /// Throws ConfigError when the ring is already full or the summary has the
  /// wrong number of quantiles.
  void push(SubWindowSummary s);
  /// Throws EmptyWindowError when the ring is empty.
  SubWindowSummary pop_oldest();

  bool full() const noexcept { return ring_.size() == capacity_; }
  std::size_t size() const noexcept { return ring_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  const std::deque<SubWindowSummary>& ring() const noexcept { return ring_; }

  std::int64_t running_sum(std::size_t q) const { return sums_.at(q); }
  /// Throws WarmupError unless the ring is full.
  double mean(std::size_t q) const;
  /// Mean of the defined densities of phi q, if any are defined.
  std::optional<double> mean_density(std::size_t q) const;
  /// Number of sub-windows in the ring that raised a burst trigger.
  std::size_t burst_triggers() const noexcept { return triggers_; }
  std::size_t summary_variables() const noexcept { return variables_; }

 private:
  std::size_t capacity_;
  std::deque<SubWindowSummary> ring_;
  std::vector<std::int64_t> sums_;
  std::vector<double> density_sums_;
  std::vector<std::size_t> density_counts_;
  std::size_t triggers_ = 0;
  std::size_t variables_ = 0;
};

/// y_a per phi. Throws WarmupError unless the ring is full.
std::vector<double> aggregate_mean(const SlidingAggregate& agg);

/// Merges every summary's top-k values and returns the value at rank
/// tail_rank(phi, window_size) from the top, or the smallest merged value
/// when fewer are available. Throws NotEnabledError if no summary carries
/// top-k values.
double topk_merge(std::span<const SubWindowSummary> summaries, double phi,
                  std::uint64_t window_size);

/// Merges every summary's samples and returns the value at rank
/// ceil(alpha * tail_rank(phi, window_size)) from the top (best effort when
/// short). Throws NotEnabledError for alpha <= 0.
double samplek_merge(std::span<const SubWindowSummary> summaries, double phi,
                     std::uint64_t window_size, double alpha);

/// U = sum_i sum_j sign(x_i - y_j) over the first min(|x|, |y|) entries of
/// each list (x = current, y = previous).
std::int64_t burst_statistic(std::span<const std::int64_t> current,
                             std::span<const std::int64_t> previous);

/// True iff U / n_s^2 > tau: the current samples are stochastically larger.
bool detect_burst(std::span<const std::int64_t> current, std::span<const std::int64_t> previous,
                  double tau);

struct OutcomeCandidates {
  Estimate level2;
  std::optional<Estimate> top_k;
  std::optional<Estimate> sample_k;
};

/// Sample-k when a burst is flagged, else top-k when period * (1 - phi) is
/// below the threshold, else the Level-2 mean. A method is only chosen when
/// both configured and present among the candidates.
Estimate select_outcome(double phi, std::uint64_t period, const FewKConfig& cfg, bool burst,
                        const OutcomeCandidates& candidates);

/// Upper-tail standard normal quantile: z with P(Z > z) = p.
double upper_normal_quantile(double p);

/// Half-width e_b = 2 z_{alpha/2} sqrt(phi (1 - phi)) / (sqrt(n m) f).
/// Throws UndefinedBoundError for density <= 0 and ConfigError for
/// out-of-range arguments.
double error_bound(double phi, std::uint64_t n, std::uint64_t m, double density,
                   double alpha_conf = 0.05);

/// Finite-difference density of the empirical distribution at its
/// phi-quantile: mass of [v(phi - d), v(phi + d)) over the value span, with
/// d = 0.01 doubled until the two values differ. Throws UndefinedBoundError
/// for fewer than 100 elements or a single distinct value.
double estimate_density(const FrequencyMap& map, double phi);

/// Descending multiset of tail values merged across the ring.
class TailMultiset {
 public:
  void insert(std::span<const std::int64_t> values);
  /// Removes one instance of each value; throws StateCorruptionError when a
  /// value is missing.
  void erase(std::span<const std::int64_t> values);
  /// Value at 1-based rank from the top, or the smallest when rank > size.
  std::optional<std::int64_t> nth_largest(std::uint64_t rank) const;
  std::size_t size() const noexcept { return values_.size(); }

 private:
  std::multiset<std::int64_t, std::greater<>> values_;
};

struct AomgOptions {
  FewKConfig fewk;
  bool error_bounds = true;
  double confidence_alpha = 0.05;
};

/// The two-level estimator as a sub-window operator for WindowDriver.
class AomgOperator {
 public:
  struct State {
    FrequencyMap inflight;
    SlidingAggregate aggregate;
    TailMultiset merged_topk;
    TailMultiset merged_samples;
    std::vector<std::int64_t> previous_samples;
    std::size_t last_inflight_distinct = 0;
  };
  using Result = std::vector<Estimate>;

  AomgOperator(WindowSpec window, QuantileSet qs, AomgOptions options = {});

  State initial_state() const;
  void accumulate(State& s, const Event& e) const { s.inflight.accumulate(e.value); }
  void close_subwindow(State& s) const;
  void expire_subwindow(State& s) const;
  /// Throws WarmupError before the first full window.
  Result compute_result(const State& s) const;

  /// Variables held: in-flight keys x2 + total (at its last peak), summary
  /// contents and the per-phi running sums.
  std::size_t observed_space(const State& s) const;
  /// l (N / P) + P + (k_t + k_s)(N / P).
  std::size_t analytical_space() const;

  const WindowSpec& window() const noexcept { return window_; }
  const QuantileSet& quantiles() const noexcept { return qs_; }
  const AomgOptions& options() const noexcept { return options_; }
  const TailPlan& plan() const noexcept { return plan_; }

 private:
  WindowSpec window_;
  QuantileSet qs_;
  AomgOptions options_;
  TailPlan plan_;
};

}  // namespace winquant
