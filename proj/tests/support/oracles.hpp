#pragma once

// Reference implementations used by the tests. Deliberately naive: full
// sorts, linear scans and string manipulation, sharing no code with the
// library beyond the Event type.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <string>
#include <vector>

#include "winquant/window.hpp"

namespace oracle {

// Smallest 1-based r with r >= phi * n (relative slack for binary phi).
inline std::uint64_t rank(double phi, std::uint64_t n) {
  const long double target = static_cast<long double>(phi) * static_cast<long double>(n);
  std::uint64_t r = 1;
  while (r < n && static_cast<long double>(r) < target * (1.0L - 1e-12L)) {
    ++r;
  }
  return r;
}

inline std::int64_t quantile(std::vector<std::int64_t> values, double phi) {
  std::sort(values.begin(), values.end());
  return values[rank(phi, values.size()) - 1];
}

inline std::vector<std::int64_t> quantiles(std::vector<std::int64_t> values,
                                           std::span<const double> phis) {
  std::sort(values.begin(), values.end());
  std::vector<std::int64_t> out;
  for (double phi : phis) out.push_back(values[rank(phi, values.size()) - 1]);
  return out;
}

inline std::vector<std::int64_t> slice(std::span<const winquant::Event> events, std::size_t first,
                                       std::size_t count) {
  std::vector<std::int64_t> out;
  for (std::size_t i = first; i < first + count; ++i) out.push_back(events[i].value);
  return out;
}

inline std::vector<std::int64_t> values(std::span<const winquant::Event> events) {
  return slice(events, 0, events.size());
}

// Keeps the leading `digits` characters of the decimal magnitude and
// replaces the rest with zeros.
inline std::int64_t quantize(std::int64_t v, int digits) {
  const bool negative = v < 0;
  std::string s = std::to_string(v);
  if (negative) s.erase(0, 1);
  for (std::size_t i = static_cast<std::size_t>(digits); i < s.size(); ++i) s[i] = '0';
  const std::int64_t magnitude = std::stoll(s);
  return negative ? -magnitude : magnitude;
}

// Rank of `value` in the window by linear scan: the tied rank nearest the
// exact rank, else whichever neighbouring rank is nearer the exact rank,
// clamped to [1, N].
inline double rank_error(double value, std::vector<std::int64_t> window, double phi) {
  std::sort(window.begin(), window.end());
  const auto n = static_cast<std::int64_t>(window.size());
  const auto r = static_cast<std::int64_t>(rank(phi, window.size()));
  std::int64_t best = -1;
  for (std::int64_t i = 1; i <= n; ++i) {
    if (static_cast<double>(window[i - 1]) == value &&
        (best < 0 || std::llabs(i - r) < std::llabs(best - r))) {
      best = i;
    }
  }
  if (best < 0) {
    std::int64_t below = 0;
    for (std::int64_t v : window) below += static_cast<double>(v) < value ? 1 : 0;
    if (below == 0) {
      best = 1;
    } else if (below == n) {
      best = n;
    } else {
      best = std::llabs(below - r) <= std::llabs(below + 1 - r) ? below : below + 1;
    }
  }
  return static_cast<double>(std::llabs(best - r)) / static_cast<double>(n);
}

}  // namespace oracle
