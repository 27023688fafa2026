#pragma once

#include <cstdint>
#include <optional>
#include <span>

namespace winquant {

/// |a - b| / b * 100. Undefined (nullopt) for b == 0.
std::optional<double> value_error(double estimate, double exact);

/// |r - r'| / N, where r = ceil(phi N) and r' is the rank of `value` in the
/// ascending `sorted_window`. Among tied ranks the one nearest r is used; a
/// value between two elements takes whichever adjacent rank is nearer r;
/// values outside the window clamp to 1 or N.
double rank_error(double value, std::span<const std::int64_t> sorted_window, double phi);

}  // namespace winquant
