#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "support/oracles.hpp"
#include "winquant/errors.hpp"
#include "winquant/frequency_map.hpp"

using namespace winquant;

TEST(Quantize, KeepsLeadingDigits) {
  EXPECT_EQ(quantize(74265, 3), 74200);
  EXPECT_EQ(quantize(5, 3), 5);
  EXPECT_EQ(quantize(-1874, 3), -1870);
  EXPECT_EQ(quantize(0, 3), 0);
  EXPECT_EQ(quantize(999, 3), 999);
  EXPECT_EQ(quantize(1000, 3), 1000);
  EXPECT_EQ(quantize(1009, 3), 1000);
}

TEST(Quantize, ExtremeMagnitudes) {
  EXPECT_EQ(quantize(std::numeric_limits<std::int64_t>::max(), 3), 9220000000000000000LL);
  EXPECT_EQ(quantize(std::numeric_limits<std::int64_t>::min(), 3), -9220000000000000000LL);
  EXPECT_EQ(quantize(123456789, 1), 100000000);
}

TEST(Quantize, RejectsZeroDigits) { EXPECT_THROW(quantize(10, 0), ConfigError); }

TEST(Quantize, MatchesDigitStringOracle) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20000; ++i) {
    const auto magnitude = std::uniform_int_distribution<int>(0, 17)(rng);
    std::int64_t v = std::uniform_int_distribution<std::int64_t>(0, 9)(rng);
    for (int d = 0; d < magnitude; ++d) v = v * 10 + std::uniform_int_distribution<int>(0, 9)(rng);
    if (rng() & 1) v = -v;
    const int digits = std::uniform_int_distribution<int>(1, 5)(rng);
    const std::int64_t q = quantize(v, digits);
    ASSERT_EQ(q, oracle::quantize(v, digits)) << v;
    EXPECT_EQ(quantize(q, digits), q);
    const double rel = std::abs(static_cast<double>(q - v)) / std::max(1.0, std::abs(static_cast<double>(v)));
    EXPECT_LT(rel, std::pow(10.0, 1 - digits));
  }
}

TEST(Ranks, CeilingConvention) {
  EXPECT_EQ(quantile_rank(0.5, 10), 5u);
  EXPECT_EQ(quantile_rank(0.9, 10), 9u);
  EXPECT_EQ(quantile_rank(0.999, 1000), 999u);
  EXPECT_EQ(quantile_rank(1.0, 7), 7u);
  EXPECT_EQ(quantile_rank(0.01, 10), 1u);
  EXPECT_EQ(tail_rank(0.999, 128 * 1024), 132u);
  EXPECT_EQ(tail_rank(0.999, 8192), 9u);
  EXPECT_EQ(tail_rank(0.8, 10), 3u);
  EXPECT_EQ(tail_rank(1.0, 10), 1u);
}

TEST(Ranks, AgreeWithOracle) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 5000; ++i) {
    const double phi = std::uniform_int_distribution<int>(1, 1000)(rng) / 1000.0;
    const std::uint64_t n = std::uniform_int_distribution<std::uint64_t>(1, 200000)(rng);
    ASSERT_EQ(quantile_rank(phi, n), oracle::rank(phi, n)) << phi << " " << n;
  }
}

TEST(QuantileSet, SortsAndDeduplicates) {
  const QuantileSet qs({0.99, 0.5, 0.9, 0.5});
  EXPECT_EQ(std::vector<double>(qs.phis().begin(), qs.phis().end()), (std::vector<double>{0.5, 0.9, 0.99}));
  EXPECT_DOUBLE_EQ(qs.max(), 0.99);
}

TEST(QuantileSet, RejectsOutOfRange) {
  EXPECT_THROW(QuantileSet({}), ConfigError);
  EXPECT_THROW(QuantileSet({0.0}), ConfigError);
  EXPECT_THROW(QuantileSet({1.5}), ConfigError);
  EXPECT_THROW(QuantileSet({-0.1, 0.5}), ConfigError);
  EXPECT_NO_THROW(QuantileSet({1.0}));
}

TEST(FrequencyMap, AccumulateCollapsesDuplicates) {
  FrequencyMap m;
  m.accumulate(5);
  EXPECT_EQ(m.entries(), (FrequencyMap::Entries{{5, 1}}));
  EXPECT_EQ(m.total(), 1u);
  m.accumulate(5);
  EXPECT_EQ(m.entries(), (FrequencyMap::Entries{{5, 2}}));
  EXPECT_EQ(m.total(), 2u);
}

TEST(FrequencyMap, NarrowRangeStaysSmall) {
  FrequencyMap m;
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10000; ++i) m.accumulate(quantize(std::uniform_int_distribution<int>(90, 110)(rng), 3));
  EXPECT_LE(m.distinct(), 21u);
  EXPECT_EQ(m.total(), 10000u);
}

TEST(FrequencyMap, DeaccumulateRemovesKeysAtZero) {
  FrequencyMap m;
  m.accumulate(5);
  m.accumulate(5);
  m.deaccumulate(5);
  EXPECT_EQ(m.entries(), (FrequencyMap::Entries{{5, 1}}));
  m.deaccumulate(5);
  EXPECT_TRUE(m.empty());
  EXPECT_EQ(m.distinct(), 0u);
}

TEST(FrequencyMap, DeaccumulateAbsentValueIsCorruption) {
  FrequencyMap m;
  EXPECT_THROW(m.deaccumulate(1), StateCorruptionError);
  m.accumulate(2);
  EXPECT_THROW(m.deaccumulate(1), StateCorruptionError);
  EXPECT_EQ(m.total(), 1u);
}

TEST(FrequencyMap, InversePairPreservesResult) {
  FrequencyMap m;
  for (std::int64_t v : {3, 1, 4, 1, 5, 9, 2, 6}) m.accumulate(v);
  const QuantileSet qs({0.25, 0.5, 0.75, 1.0});
  const auto before = m.compute_result(qs);
  m.accumulate(100);
  m.deaccumulate(100);
  EXPECT_EQ(m.compute_result(qs), before);
}

TEST(FrequencyMap, ComputeResultExamples) {
  FrequencyMap single;
  for (int i = 0; i < 100; ++i) single.accumulate(5);
  EXPECT_EQ(single.compute_result(QuantileSet({0.5, 0.99})), (std::vector<std::int64_t>{5, 5}));

  FrequencyMap m;
  for (int i = 0; i < 2; ++i) m.accumulate(1);
  for (int i = 0; i < 3; ++i) m.accumulate(2);
  for (int i = 0; i < 5; ++i) m.accumulate(3);
  EXPECT_EQ(m.compute_result(QuantileSet({0.5})), (std::vector<std::int64_t>{2}));

  FrequencyMap keys;
  for (int v = 1; v <= 1000; ++v) keys.accumulate(v);
  EXPECT_EQ(keys.compute_result(QuantileSet({0.999})), (std::vector<std::int64_t>{999}));
  EXPECT_EQ(keys.compute_result(QuantileSet({1.0})), (std::vector<std::int64_t>{1000}));
}

TEST(FrequencyMap, EmptyResultThrows) {
  EXPECT_THROW(FrequencyMap().compute_result(QuantileSet({0.5})), EmptyWindowError);
}

TEST(FrequencyMap, MatchesExpandedSortOnRandomMaps) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 500; ++trial) {
    FrequencyMap m;
    std::vector<std::int64_t> expanded;
    const int n = std::uniform_int_distribution<int>(1, 300)(rng);
    for (int i = 0; i < n; ++i) {
      const std::int64_t v = std::uniform_int_distribution<std::int64_t>(-20, 20)(rng);
      m.accumulate(v);
      expanded.push_back(v);
    }
    std::vector<double> phis;
    for (int k = 0; k < 5; ++k) phis.push_back(std::uniform_int_distribution<int>(1, 1000)(rng) / 1000.0);
    const QuantileSet qs(phis);
    const auto multi = m.compute_result(qs);
    const auto want = oracle::quantiles(expanded, qs.phis());
    ASSERT_EQ(multi, want);
    for (std::size_t q = 0; q < qs.size(); ++q) {
      EXPECT_EQ(m.compute_result(QuantileSet({qs[q]}))[0], multi[q]);
      EXPECT_EQ(m.value_at_rank(quantile_rank(qs[q], m.total())), multi[q]);
    }
  }
}

TEST(FrequencyMap, LocateReportsElementsBelow) {
  FrequencyMap m;
  for (std::int64_t v : {1, 1, 2, 3, 3, 3}) m.accumulate(v);
  const std::uint64_t ranks[] = {1, 2, 3, 4, 6};
  const auto points = m.locate(ranks);
  ASSERT_EQ(points.size(), 5u);
  EXPECT_EQ(points[0].value, 1);
  EXPECT_EQ(points[0].below, 0u);
  EXPECT_EQ(points[2].value, 2);
  EXPECT_EQ(points[2].below, 2u);
  EXPECT_EQ(points[3].value, 3);
  EXPECT_EQ(points[3].below, 3u);
  EXPECT_EQ(m.count_below(3), 3u);
  EXPECT_EQ(m.count_below(100), 6u);
  EXPECT_EQ(m.count_below(-5), 0u);
}

TEST(FrequencyMap, LargestIsDescendingAndExpanded) {
  FrequencyMap m;
  for (std::int64_t v : {5, 9, 9, 1, 7}) m.accumulate(v);
  EXPECT_EQ(m.largest(3), (std::vector<std::int64_t>{9, 9, 7}));
  EXPECT_EQ(m.largest(10), (std::vector<std::int64_t>{9, 9, 7, 5, 1}));
  EXPECT_TRUE(m.largest(0).empty());
}

TEST(FrequencyMap, CompressionBoundUnderQuantization) {
  // Values below 10^6 quantized to 3 digits: at most 9 * 100 * 6 + 1 keys.
  FrequencyMap m;
  std::mt19937_64 rng(21);
  for (int i = 0; i < 200000; ++i) {
    m.accumulate(quantize(std::uniform_int_distribution<std::int64_t>(0, 999999)(rng), 3));
  }
  EXPECT_LE(m.distinct(), 9u * 100u * 6u + 1u);
  EXPECT_LE(m.distinct(), m.total());
}
