#pragma once

#include <cstdint>

namespace winquant {

/// One stream element. `seq` stands in for the timestamp under count-based
/// windows and strictly increases within a stream.
struct Event {
  std::int64_t value = 0;
  std::uint64_t seq = 0;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Count-based window: evaluate the last `size` elements every `period`
/// elements. The window is split into size/period sub-windows.
class WindowSpec {
 public:
  /// Throws ConfigError unless period >= 1, size >= period and
  /// size % period == 0.
  WindowSpec(std::uint64_t size, std::uint64_t period);

  std::uint64_t size() const noexcept { return size_; }
  std::uint64_t period() const noexcept { return period_; }
  std::uint64_t subwindows() const noexcept { return size_ / period_; }
  bool tumbling() const noexcept { return size_ == period_; }

  friend bool operator==(const WindowSpec&, const WindowSpec&) = default;

 private:
  std::uint64_t size_;
  std::uint64_t period_;
};

}  // namespace winquant
