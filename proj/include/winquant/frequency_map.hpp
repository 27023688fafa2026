#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace winquant {

/// Zeroes all but the `sig_digits` most significant decimal digits of
/// `value`, truncating toward zero. Throws ConfigError if sig_digits < 1.
std::int64_t quantize(std::int64_t value, int sig_digits);

/// 1-based rank ceil(phi * total), clamped to [1, total]. Products within
/// 1e-9 of an integer snap to it so that e.g. 0.9 * 10 yields rank 9.
std::uint64_t quantile_rank(double phi, std::uint64_t total);

/// Rank counted from the largest element that holds the phi-quantile:
/// total - quantile_rank(phi, total) + 1. Equals ceil(total * (1 - phi))
/// whenever total * (1 - phi) is not an integer.
std::uint64_t tail_rank(double phi, std::uint64_t total);

/// Sorted, de-duplicated set of quantile fractions in (0, 1].
class QuantileSet {
 public:
  /// Throws ConfigError on an empty list or any phi outside (0, 1].
  explicit QuantileSet(std::vector<double> phis);

  std::span<const double> phis() const noexcept { return phis_; }
  std::size_t size() const noexcept { return phis_.size(); }
  double operator[](std::size_t i) const { return phis_[i]; }
  double max() const noexcept { return phis_.back(); }

  friend bool operator==(const QuantileSet&, const QuantileSet&) = default;

 private:
  std::vector<double> phis_;
};

/// Ordered value -> count multiset. Backed by a red-black tree, so
/// insertion is logarithmic in the number of distinct keys.
class FrequencyMap {
 public:
  using Entries = std::map<std::int64_t, std::uint64_t>;

  /// A value located by rank together with the number of elements that are
  /// strictly smaller than it.
  struct RankPoint {
    std::int64_t value;
    std::uint64_t below;
  };

  void accumulate(std::int64_t value) {
    ++entries_[value];
    ++total_;
  }

  /// Throws StateCorruptionError when `value` is absent.
  void deaccumulate(std::int64_t value);

  /// One value per phi, in the set's order, from a single in-order pass.
  /// Throws EmptyWindowError on an empty map.
  std::vector<std::int64_t> compute_result(const QuantileSet& qs) const;

  /// Locates each 1-based rank (non-decreasing, each in [1, total]) in a
  /// single in-order pass.
  std::vector<RankPoint> locate(std::span<const std::uint64_t> ranks) const;

  std::int64_t value_at_rank(std::uint64_t rank) const;

  /// Number of elements strictly less than `value`.
  std::uint64_t count_below(std::int64_t value) const;

  /// Up to `k` largest values (expanded by multiplicity), descending.
  std::vector<std::int64_t> largest(std::size_t k) const;

  std::uint64_t total() const noexcept { return total_; }
  std::size_t distinct() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return total_ == 0; }
  const Entries& entries() const noexcept { return entries_; }
  void clear() noexcept {
    entries_.clear();
    total_ = 0;
  }

  friend bool operator==(const FrequencyMap&, const FrequencyMap&) = default;

 private:
  Entries entries_;
  std::uint64_t total_ = 0;
};

}  // namespace winquant
