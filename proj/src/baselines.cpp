#include "winquant/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "winquant/errors.hpp"

namespace winquant {

EpsilonConfig::EpsilonConfig(double eps) : epsilon(eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw ConfigError("epsilon must lie in (0, 1)");
  }
}

SamplingOperator::SamplingOperator(WindowSpec window, QuantileSet qs, EpsilonConfig cfg)
    : window_(window), qs_(std::move(qs)), cfg_(cfg) {
  const auto samples = static_cast<std::uint64_t>(std::ceil(2.0 / cfg_.epsilon));
  per_subwindow_ = static_cast<std::size_t>(std::min(window_.period(), samples));
}

void SamplingOperator::close_subwindow(State& s) const {
  if (s.inflight.empty()) {
    throw EmptyWindowError("cannot close an empty sub-window");
  }
  const std::uint64_t total = s.inflight.total();
  const std::size_t count = std::min<std::size_t>(per_subwindow_, total);
  const double interval = static_cast<double>(total) / static_cast<double>(count);
  std::vector<std::uint64_t> ranks;
  ranks.reserve(count);
  for (std::size_t j = 1; j <= count; ++j) {
    const double centre = (static_cast<double>(j) - 0.5) * interval;
    ranks.push_back(std::clamp<std::uint64_t>(static_cast<std::uint64_t>(std::ceil(centre)), 1, total));
  }
  std::vector<std::int64_t> samples;
  samples.reserve(count);
  for (const auto& p : s.inflight.locate(ranks)) {
    samples.push_back(p.value);
  }
  s.last_inflight_distinct = s.inflight.distinct();
  s.inflight.clear();
  s.merged.insert(samples.begin(), samples.end());
  s.ring.push_back(std::move(samples));
}

void SamplingOperator::expire_subwindow(State& s) const {
  if (s.ring.empty()) {
    throw EmptyWindowError("no sub-window to expire");
  }
  for (std::int64_t v : s.ring.front()) {
    auto it = s.merged.find(v);
    if (it == s.merged.end()) {
      throw StateCorruptionError("sampling baseline lost a sample");
    }
    s.merged.erase(it);
  }
  s.ring.pop_front();
}

SamplingOperator::Result SamplingOperator::compute_result(const State& s) const {
  if (s.merged.empty()) {
    throw EmptyWindowError("sampling baseline holds no samples");
  }
  // Each sample stands for an equal share of the window's ranks.
  const double weight = static_cast<double>(window_.size()) / static_cast<double>(s.merged.size());
  Result out;
  out.reserve(qs_.size());
  for (double phi : qs_.phis()) {
    const auto r = static_cast<double>(quantile_rank(phi, window_.size()));
    auto j = static_cast<std::size_t>(std::ceil(r / weight - 1e-9));
    j = std::clamp<std::size_t>(j, 1, s.merged.size());
    out.push_back(*std::next(s.merged.begin(), static_cast<std::ptrdiff_t>(j - 1)));
  }
  return out;
}

std::size_t SamplingOperator::observed_space(const State& s) const {
  const std::size_t inflight = std::max(s.inflight.distinct(), s.last_inflight_distinct);
  return 2 * inflight + 1 + s.merged.size();
}

}  // namespace winquant
