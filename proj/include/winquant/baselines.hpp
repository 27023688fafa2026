#pragma once

#include <cstdint>
#include <deque>
#include <set>
#include <vector>

#include "winquant/frequency_map.hpp"
#include "winquant/stream_driver.hpp"
#include "winquant/window.hpp"

namespace winquant {

/// Exact sliding-window quantiles: one frequency map over the whole window
/// with per-element accumulate and deaccumulate.
class ExactSlidingOperator {
 public:
  using State = FrequencyMap;
  using Result = std::vector<std::int64_t>;

  explicit ExactSlidingOperator(QuantileSet qs) : qs_(std::move(qs)) {}

  State initial_state() const { return {}; }
  void accumulate(State& s, const Event& e) const { s.accumulate(e.value); }
  void deaccumulate(State& s, const Event& e) const { s.deaccumulate(e.value); }
  Result compute_result(const State& s) const { return s.compute_result(qs_); }

  /// Keys x2 + total.
  std::size_t observed_space(const State& s) const { return 2 * s.distinct() + 1; }

  const QuantileSet& quantiles() const noexcept { return qs_; }

 private:
  QuantileSet qs_;
};

inline ExactSlidingOperator exact_sliding_operator(QuantileSet qs) {
  return ExactSlidingOperator(std::move(qs));
}

struct EpsilonConfig {
  /// Throws ConfigError unless 0 < epsilon < 1.
  explicit EpsilonConfig(double eps);
  double epsilon;
};

/// Rank-error interval-sampling baseline (a simplified stand-in for the
/// randomized sampling sketches in the literature). Each closed sub-window
/// keeps s = min(P, ceil(2 / eps)) values taken at the centre of s equal
/// rank intervals, so every sample stands for at most eps / 2 of its
/// sub-window; a query returns the merged sample whose share of the window
/// covers rank ceil(phi N).
class SamplingOperator {
 public:
  struct State {
    FrequencyMap inflight;
    std::deque<std::vector<std::int64_t>> ring;
    std::multiset<std::int64_t> merged;
    std::size_t last_inflight_distinct = 0;
  };
  using Result = std::vector<std::int64_t>;

  SamplingOperator(WindowSpec window, QuantileSet qs, EpsilonConfig cfg);

  State initial_state() const { return {}; }
  void accumulate(State& s, const Event& e) const { s.inflight.accumulate(e.value); }
  void close_subwindow(State& s) const;
  void expire_subwindow(State& s) const;
  Result compute_result(const State& s) const;

  std::size_t observed_space(const State& s) const;
  std::size_t samples_per_subwindow() const noexcept { return per_subwindow_; }

 private:
  WindowSpec window_;
  QuantileSet qs_;
  EpsilonConfig cfg_;
  std::size_t per_subwindow_;
};

inline SamplingOperator sampling_baseline(WindowSpec window, QuantileSet qs, EpsilonConfig cfg) {
  return SamplingOperator(window, std::move(qs), cfg);
}

}  // namespace winquant
