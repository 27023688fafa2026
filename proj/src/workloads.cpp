#include "winquant/workloads.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "winquant/errors.hpp"
#include "winquant/frequency_map.hpp"

namespace winquant {

double SplitMix64::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_open0();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::string_view to_string(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::normal:
      return "normal";
    case GeneratorKind::uniform:
      return "uniform";
    case GeneratorKind::ar1:
      return "ar1";
    case GeneratorKind::heavytail:
      return "heavytail";
  }
  return "unknown";
}

GeneratorKind generator_kind_from_string(std::string_view name) {
  for (GeneratorKind k : {GeneratorKind::normal, GeneratorKind::uniform, GeneratorKind::ar1,
                          GeneratorKind::heavytail}) {
    if (to_string(k) == name) {
      return k;
    }
  }
  throw ConfigError("unknown generator '" + std::string(name) + "'");
}

void GeneratorSpec::validate() const {
  if (count == 0) {
    throw ConfigError("generator count must be at least 1");
  }
  switch (kind) {
    case GeneratorKind::normal:
      if (!(sd >= 0.0)) throw ConfigError("normal sd must be non-negative");
      break;
    case GeneratorKind::uniform:
      if (lo > hi) throw ConfigError("uniform lo exceeds hi");
      break;
    case GeneratorKind::ar1:
      if (!(psi >= 0.0 && psi < 1.0)) throw ConfigError("ar1 psi must lie in [0, 1)");
      if (!(sd >= 0.0)) throw ConfigError("ar1 sd must be non-negative");
      break;
    case GeneratorKind::heavytail:
      if (!(body_scale > 0.0)) throw ConfigError("heavytail body scale must be positive");
      if (!(body_sigma >= 0.0)) throw ConfigError("heavytail body sigma must be non-negative");
      if (!(tail_exponent > 0.0)) throw ConfigError("heavytail tail exponent must be positive");
      if (!(tail_probability >= 0.0 && tail_probability <= 1.0))
        throw ConfigError("heavytail tail probability must lie in [0, 1]");
      if (!(tail_start_factor > 0.0)) throw ConfigError("heavytail tail start must be positive");
      if (!(episode_rate >= 0.0 && episode_rate <= 1.0))
        throw ConfigError("heavytail episode rate must lie in [0, 1]");
      if (!(episode_length >= 1.0)) throw ConfigError("heavytail episode length must be >= 1");
      if (!(episode_tail_probability >= 0.0 && episode_tail_probability <= 1.0))
        throw ConfigError("heavytail episode tail probability must lie in [0, 1]");
      break;
  }
}

namespace {

std::int64_t to_value(double x) {
  constexpr double kLimit = 9.0e18;
  return static_cast<std::int64_t>(std::llround(std::clamp(x, -kLimit, kLimit)));
}

}  // namespace

std::vector<Event> generate(const GeneratorSpec& spec) {
  spec.validate();
  SplitMix64 rng(spec.seed);
  std::vector<Event> out;
  out.reserve(spec.count);
  auto emit = [&](std::int64_t v) { out.push_back({v, out.size()}); };

  switch (spec.kind) {
    case GeneratorKind::normal:
      for (std::uint64_t i = 0; i < spec.count; ++i) {
        emit(to_value(spec.mean + spec.sd * rng.normal()));
      }
      break;
    case GeneratorKind::uniform: {
      const auto span = static_cast<double>(spec.hi - spec.lo) + 1.0;
      for (std::uint64_t i = 0; i < spec.count; ++i) {
        const auto offset = static_cast<std::int64_t>(std::floor(rng.uniform() * span));
        emit(spec.lo + std::min<std::int64_t>(offset, spec.hi - spec.lo));
      }
      break;
    }
    case GeneratorKind::ar1: {
      // Stationary start; the innovation scale keeps the marginal at N(mean, sd).
      const double innovation = spec.sd * std::sqrt(1.0 - spec.psi * spec.psi);
      double deviation = spec.sd * rng.normal();
      emit(to_value(spec.mean + deviation));
      for (std::uint64_t i = 1; i < spec.count; ++i) {
        deviation = spec.psi * deviation + innovation * rng.normal();
        emit(to_value(spec.mean + deviation));
      }
      break;
    }
    case GeneratorKind::heavytail: {
      const double tail_start = spec.tail_start_factor * spec.body_scale;
      const double episode_end = 1.0 / spec.episode_length;
      bool congested = false;
      for (std::uint64_t i = 0; i < spec.count; ++i) {
        if (!congested && spec.episode_rate > 0.0) {
          congested = rng.uniform() < spec.episode_rate;
        }
        const double p = congested ? spec.episode_tail_probability : spec.tail_probability;
        if (congested) {
          congested = rng.uniform() >= episode_end;
        }
        if (rng.uniform() < p) {
          emit(to_value(tail_start * std::pow(rng.uniform_open0(), -1.0 / spec.tail_exponent)));
        } else {
          emit(to_value(spec.body_scale * std::exp(spec.body_sigma * rng.normal())));
        }
      }
      break;
    }
  }
  return out;
}

void BurstSpec::validate() const {
  if (!(multiplier >= 1.0)) {
    throw ConfigError("burst multiplier must be at least 1");
  }
  if (!(phi_target > 0.0 && phi_target <= 1.0)) {
    throw ConfigError("burst phi must lie in (0, 1]");
  }
}

std::vector<Event> inject_burst(std::vector<Event> stream, const BurstSpec& spec,
                                const WindowSpec& window) {
  spec.validate();
  const std::uint64_t every =
      spec.every_nth_subwindow == 0 ? window.subwindows() : spec.every_nth_subwindow;
  const std::uint64_t period = window.period();
  const std::uint64_t hit = std::min(tail_rank(spec.phi_target, window.size()), period);
  const std::uint64_t full = stream.size() / period;

  std::vector<std::size_t> order(period);
  for (std::uint64_t sub = 0; sub < full; sub += every) {
    const std::size_t base = sub * period;
    for (std::size_t i = 0; i < period; ++i) {
      order[i] = base + i;
    }
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(hit), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        if (stream[a].value != stream[b].value) return stream[a].value > stream[b].value;
                        return a < b;
                      });
    for (std::uint64_t i = 0; i < hit; ++i) {
      Event& e = stream[order[i]];
      e.value = to_value(static_cast<double>(e.value) * spec.multiplier);
    }
  }
  return stream;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

std::vector<Event> parse_csv(std::string_view text, const CsvOptions& options) {
  if (!(options.scale > 0.0)) {
    throw ConfigError("CSV scale must be positive");
  }
  std::vector<Event> out;
  std::size_t line_no = 0;
  std::size_t column = 0;
  bool column_known = false;
  if (!options.column.empty() &&
      std::all_of(options.column.begin(), options.column.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    column = std::stoul(options.column);
    column_known = true;
  }
  bool header_pending = options.header;

  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    if (line.empty()) continue;

    const auto fields = split_fields(line);
    if (header_pending) {
      header_pending = false;
      if (!column_known) {
        auto it = std::find(fields.begin(), fields.end(), options.column);
        if (it == fields.end()) {
          throw ConfigError("CSV header has no column '" + options.column + "'");
        }
        column = static_cast<std::size_t>(it - fields.begin());
        column_known = true;
      }
      continue;
    }
    if (!column_known) {
      throw ConfigError("CSV column '" + options.column + "' needs a header row");
    }
    if (column >= fields.size()) {
      throw DataError("line " + std::to_string(line_no) + ": missing column " + std::to_string(column));
    }
    const std::string_view field = fields[column];
    double x = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), x);
    if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(x)) {
      throw DataError("line " + std::to_string(line_no) + ": cannot parse '" + std::string(field) +
                      "' as a number");
    }
    out.push_back({to_value(x * options.scale), out.size()});
  }
  if (out.empty()) {
    throw ConfigError("CSV input holds no values");
  }
  return out;
}

std::vector<Event> read_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open CSV file " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), options);
}

}  // namespace winquant
