#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "winquant/window.hpp"

namespace winquant {

/// SplitMix64. Fully specified, so streams are reproducible across
/// platforms and implementations; every variate below is derived from it
/// with explicit formulas rather than std:: distributions.
class SplitMix64 {
 public:
  static constexpr std::string_view kId = "splitmix64/box-muller/v1";

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  /// Uniform in (0, 1].
  double uniform_open0() noexcept { return 1.0 - uniform(); }
  /// Standard normal via Box-Muller (both variates used in turn).
  double normal() noexcept;

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

enum class GeneratorKind { normal, uniform, ar1, heavytail };

std::string_view to_string(GeneratorKind k);
/// Throws ConfigError for unknown names.
GeneratorKind generator_kind_from_string(std::string_view name);

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::normal;
  std::uint64_t count = 0;
  std::uint64_t seed = 1;
  // normal, ar1
  double mean = 1e6;
  double sd = 5e4;
  // uniform (inclusive)
  std::int64_t lo = 90;
  std::int64_t hi = 110;
  // ar1
  double psi = 0.0;
  // heavytail: lognormal body with median `body_scale`, Pareto tail from
  // tail_start_factor * body_scale mixed in with `tail_probability`.
  // Congestion episodes start with `episode_rate` per element, last
  // `episode_length` elements on average (geometric) and raise the tail
  // probability to `episode_tail_probability`; episode_rate 0 gives an
  // i.i.d. stream.
  double body_scale = 800.0;
  double body_sigma = 0.35;
  double tail_exponent = 1.3;
  double tail_probability = 0.006;
  double tail_start_factor = 2.5;
  double episode_rate = 2e-6;
  double episode_length = 60.0;
  double episode_tail_probability = 0.8;

  /// Throws ConfigError on invalid parameters.
  void validate() const;

  friend bool operator==(const GeneratorSpec&, const GeneratorSpec&) = default;
};

/// Deterministic stream for `spec`; seq numbers start at 0.
std::vector<Event> generate(const GeneratorSpec& spec);

struct BurstSpec {
  double phi_target = 0.999;
  double multiplier = 10.0;
  /// Every n-th sub-window is hit; 0 means N / P.
  std::uint64_t every_nth_subwindow = 0;

  /// Throws ConfigError for multiplier < 1 or phi outside (0, 1].
  void validate() const;

  friend bool operator==(const BurstSpec&, const BurstSpec&) = default;
};

/// Multiplies the tail_rank(phi_target, N) largest values of sub-windows
/// 0, e, 2e, ... (e = every_nth_subwindow) by the multiplier. Ties between
/// equal values go to the earlier element. Length and all other values are
/// preserved.
std::vector<Event> inject_burst(std::vector<Event> stream, const BurstSpec& spec,
                                const WindowSpec& window);

struct CsvOptions {
  /// Column name (requires a header) or 0-based index.
  std::string column = "0";
  bool header = false;
  double scale = 1.0;
};

/// Reads one value per row, multiplies by `scale` and rounds to integer.
/// Throws ConfigError for a missing or empty file and DataError naming the
/// line for malformed rows.
std::vector<Event> read_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Same as read_csv over in-memory text.
std::vector<Event> parse_csv(std::string_view text, const CsvOptions& options = {});

}  // namespace winquant
