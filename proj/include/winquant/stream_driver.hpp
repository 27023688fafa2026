#pragma once

// Incremental-operator contract and the count-based window driver.
//
// An element-level operator supplies
//
//   State initial_state() const;
//   void accumulate(State&, const Event&) const;
//   void deaccumulate(State&, const Event&) const;
//   Result compute_result(const State&) const;
//
// A sub-window operator replaces per-element deaccumulation with a
// summary-level expiry hook: the driver calls close_subwindow() after every
// `period` elements and expire_subwindow() once the oldest closed sub-window
// leaves the window.

#include <concepts>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "winquant/errors.hpp"
#include "winquant/window.hpp"

namespace winquant {

template <class Op>
concept IncrementalOperator = requires(const Op& op, typename Op::State& state,
                                       const typename Op::State& cstate, const Event& e) {
  typename Op::Result;
  { op.initial_state() } -> std::same_as<typename Op::State>;
  op.accumulate(state, e);
  op.deaccumulate(state, e);
  { op.compute_result(cstate) } -> std::convertible_to<typename Op::Result>;
};

template <class Op>
concept SubWindowOperator = requires(const Op& op, typename Op::State& state,
                                     const typename Op::State& cstate, const Event& e) {
  typename Op::Result;
  { op.initial_state() } -> std::same_as<typename Op::State>;
  op.accumulate(state, e);
  op.close_subwindow(state);
  op.expire_subwindow(state);
  { op.compute_result(cstate) } -> std::convertible_to<typename Op::Result>;
};

template <class Op>
concept WindowOperator = IncrementalOperator<Op> || SubWindowOperator<Op>;

/// Pushes events through an operator and emits one result per period once
/// the first full window has been seen. Tumbling windows reset the state
/// after each result instead of deaccumulating.
template <WindowOperator Op>
class WindowDriver {
 public:
  using State = typename Op::State;
  using Result = typename Op::Result;

  WindowDriver(WindowSpec spec, Op op)
      : spec_(spec), op_(std::move(op)), state_(op_.initial_state()) {}

  /// Returns a result when this event completes an evaluation.
  std::optional<Result> push(const Event& e) {
    op_.accumulate(state_, e);
    ++consumed_;
    if constexpr (SubWindowOperator<Op>) {
      return push_subwindow();
    } else {
      return push_element(e);
    }
  }

  const Op& op() const noexcept { return op_; }
  const State& state() const noexcept { return state_; }
  const WindowSpec& spec() const noexcept { return spec_; }
  std::uint64_t consumed() const noexcept { return consumed_; }
  std::uint64_t evaluations() const noexcept { return evaluations_; }

 private:
  std::optional<Result> push_subwindow() {
    if (consumed_ % spec_.period() != 0) {
      return std::nullopt;
    }
    if (closed_ == spec_.subwindows()) {
      op_.expire_subwindow(state_);
      --closed_;
    }
    op_.close_subwindow(state_);
    ++closed_;
    if (closed_ < spec_.subwindows()) {
      return std::nullopt;
    }
    ++evaluations_;
    return op_.compute_result(state_);
  }

  std::optional<Result> push_element(const Event& e) {
    if (!spec_.tumbling()) {
      window_.push_back(e);
    }
    if (consumed_ % spec_.period() != 0 || consumed_ < spec_.size()) {
      return std::nullopt;
    }
    if (spec_.tumbling()) {
      Result result = op_.compute_result(state_);
      state_ = op_.initial_state();
      ++evaluations_;
      return result;
    }
    while (window_.size() > spec_.size()) {
      op_.deaccumulate(state_, window_.front());
      window_.pop_front();
    }
    ++evaluations_;
    return op_.compute_result(state_);
  }

  WindowSpec spec_;
  Op op_;
  State state_;
  std::deque<Event> window_;
  std::uint64_t consumed_ = 0;
  std::uint64_t closed_ = 0;
  std::uint64_t evaluations_ = 0;
};

/// Runs a finite stream through `op`; yields floor((len - N) / P) + 1 results
/// for len >= N and none otherwise.
template <WindowOperator Op>
std::vector<typename Op::Result> drive(std::span<const Event> stream, const WindowSpec& spec,
                                       Op op) {
  WindowDriver<Op> driver(spec, std::move(op));
  std::vector<typename Op::Result> results;
  for (const Event& e : stream) {
    if (auto r = driver.push(e)) {
      results.push_back(std::move(*r));
    }
  }
  return results;
}

/// The reference {Count, Sum} average operator.
struct AverageOperator {
  struct State {
    std::uint64_t count = 0;
    long double sum = 0;
  };
  using Result = double;

  State initial_state() const { return {}; }
  void accumulate(State& s, const Event& e) const {
    ++s.count;
    s.sum += static_cast<long double>(e.value);
  }
  void deaccumulate(State& s, const Event& e) const {
    --s.count;
    s.sum -= static_cast<long double>(e.value);
  }
  Result compute_result(const State& s) const {
    if (s.count == 0) {
      throw EmptyWindowError("average of an empty window");
    }
    return static_cast<double>(s.sum / static_cast<long double>(s.count));
  }
};

inline AverageOperator average_operator() { return {}; }

/// Wraps a plain value sequence as events numbered from `first_seq`.
std::vector<Event> make_events(std::span<const std::int64_t> values, std::uint64_t first_seq = 0);

}  // namespace winquant
