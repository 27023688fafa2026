#include "winquant/window.hpp"

#include <string>

#include "winquant/errors.hpp"

namespace winquant {

WindowSpec::WindowSpec(std::uint64_t size, std::uint64_t period) : size_(size), period_(period) {
  if (period_ == 0) {
    throw ConfigError("window period must be at least 1");
  }
  if (size_ < period_) {
    throw ConfigError("window size " + std::to_string(size_) + " is smaller than period " +
                      std::to_string(period_));
  }
  if (size_ % period_ != 0) {
    throw ConfigError("window size " + std::to_string(size_) + " is not a multiple of period " +
                      std::to_string(period_));
  }
}

}  // namespace winquant
