#include "winquant/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "winquant/errors.hpp"
#include "winquant/frequency_map.hpp"

namespace winquant {

std::optional<double> value_error(double estimate, double exact) {
  if (exact == 0.0) {
    return std::nullopt;
  }
  return std::abs(estimate - exact) / std::abs(exact) * 100.0;
}

double rank_error(double value, std::span<const std::int64_t> sorted_window, double phi) {
  if (sorted_window.empty()) {
    throw EmptyWindowError("rank error over an empty window");
  }
  const auto n = static_cast<std::int64_t>(sorted_window.size());
  const auto r = static_cast<std::int64_t>(quantile_rank(phi, sorted_window.size()));
  // Elements strictly below / not above the value.
  const auto below = std::lower_bound(sorted_window.begin(), sorted_window.end(), value,
                                      [](std::int64_t e, double v) { return static_cast<double>(e) < v; }) -
                     sorted_window.begin();
  const auto upto = std::upper_bound(sorted_window.begin(), sorted_window.end(), value,
                                     [](double v, std::int64_t e) { return v < static_cast<double>(e); }) -
                    sorted_window.begin();
  std::int64_t returned;
  if (upto > below) {
    returned = std::clamp(r, below + 1, upto);
  } else {
    returned = std::clamp(r, below, below + 1);
  }
  returned = std::clamp<std::int64_t>(returned, 1, n);
  return static_cast<double>(std::abs(r - returned)) / static_cast<double>(n);
}

}  // namespace winquant
