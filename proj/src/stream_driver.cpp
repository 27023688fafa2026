#include "winquant/stream_driver.hpp"

namespace winquant {

std::vector<Event> make_events(std::span<const std::int64_t> values, std::uint64_t first_seq) {
  std::vector<Event> out;
  out.reserve(values.size());
  for (std::int64_t v : values) {
    out.push_back({v, first_seq++});
  }
  return out;
}

}  // namespace winquant
