#include "winquant/frequency_map.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "winquant/errors.hpp"

namespace winquant {

std::int64_t quantize(std::int64_t value, int sig_digits) {
  if (sig_digits < 1) {
    throw ConfigError("quantization needs at least one significant digit");
  }
  // Work on the magnitude as unsigned so INT64_MIN is representable.
  const bool negative = value < 0;
  std::uint64_t magnitude = negative ? 0 - static_cast<std::uint64_t>(value)
                                     : static_cast<std::uint64_t>(value);
  int digits = 0;
  for (std::uint64_t v = magnitude; v != 0; v /= 10) {
    ++digits;
  }
  if (digits <= sig_digits) {
    return value;
  }
  std::uint64_t scale = 1;
  for (int i = 0; i < digits - sig_digits; ++i) {
    scale *= 10;
  }
  magnitude = magnitude / scale * scale;
  return negative ? static_cast<std::int64_t>(0 - magnitude) : static_cast<std::int64_t>(magnitude);
}

std::uint64_t quantile_rank(double phi, std::uint64_t total) {
  if (total == 0) {
    return 0;
  }
  const double exact = phi * static_cast<double>(total);
  const double nearest = std::round(exact);
  double rank = std::ceil(exact);
  if (std::abs(exact - nearest) <= 1e-9 * std::max(1.0, exact)) {
    rank = nearest;
  }
  if (rank < 1.0) {
    return 1;
  }
  if (rank > static_cast<double>(total)) {
    return total;
  }
  return static_cast<std::uint64_t>(rank);
}

std::uint64_t tail_rank(double phi, std::uint64_t total) {
  if (total == 0) {
    return 0;
  }
  return total - quantile_rank(phi, total) + 1;
}

QuantileSet::QuantileSet(std::vector<double> phis) : phis_(std::move(phis)) {
  if (phis_.empty()) {
    throw ConfigError("quantile set is empty");
  }
  for (double phi : phis_) {
    if (!(phi > 0.0 && phi <= 1.0)) {
      throw ConfigError("quantile " + std::to_string(phi) + " is outside (0, 1]");
    }
  }
  std::sort(phis_.begin(), phis_.end());
  phis_.erase(std::unique(phis_.begin(), phis_.end()), phis_.end());
}

void FrequencyMap::deaccumulate(std::int64_t value) {
  auto it = entries_.find(value);
  if (it == entries_.end()) {
    throw StateCorruptionError("deaccumulate of absent value " + std::to_string(value));
  }
  if (--it->second == 0) {
    entries_.erase(it);
  }
  --total_;
}

std::vector<std::int64_t> FrequencyMap::compute_result(const QuantileSet& qs) const {
  if (total_ == 0) {
    throw EmptyWindowError("quantile of an empty frequency map");
  }
  std::vector<std::int64_t> result(qs.size(), 0);
  std::size_t i = 0;
  std::uint64_t rank = quantile_rank(qs[i], total_);
  std::uint64_t running = 0;
  for (const auto& [key, count] : entries_) {
    running += count;
    while (running >= rank) {
      result[i] = key;
      if (++i == qs.size()) {
        return result;
      }
      rank = quantile_rank(qs[i], total_);
    }
  }
  return result;
}

std::vector<FrequencyMap::RankPoint> FrequencyMap::locate(
    std::span<const std::uint64_t> ranks) const {
  if (total_ == 0) {
    throw EmptyWindowError("rank lookup in an empty frequency map");
  }
  std::vector<RankPoint> points;
  points.reserve(ranks.size());
  std::size_t i = 0;
  std::uint64_t running = 0;
  for (const auto& [key, count] : entries_) {
    const std::uint64_t below = running;
    running += count;
    while (i < ranks.size() && running >= ranks[i]) {
      points.push_back({key, below});
      ++i;
    }
    if (i == ranks.size()) {
      break;
    }
  }
  // Ranks beyond the total resolve to the maximum.
  while (points.size() < ranks.size()) {
    const auto& last = *entries_.rbegin();
    points.push_back({last.first, total_ - last.second});
  }
  return points;
}

std::int64_t FrequencyMap::value_at_rank(std::uint64_t rank) const {
  const std::uint64_t r = std::clamp<std::uint64_t>(rank, 1, std::max<std::uint64_t>(total_, 1));
  return locate(std::span<const std::uint64_t>(&r, 1)).front().value;
}

std::uint64_t FrequencyMap::count_below(std::int64_t value) const {
  std::uint64_t below = 0;
  for (auto it = entries_.begin(); it != entries_.end() && it->first < value; ++it) {
    below += it->second;
  }
  return below;
}

std::vector<std::int64_t> FrequencyMap::largest(std::size_t k) const {
  std::vector<std::int64_t> out;
  out.reserve(std::min<std::uint64_t>(k, total_));
  for (auto it = entries_.rbegin(); it != entries_.rend() && out.size() < k; ++it) {
    for (std::uint64_t c = 0; c < it->second && out.size() < k; ++c) {
      out.push_back(it->first);
    }
  }
  return out;
}

}  // namespace winquant
