#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "support/oracles.hpp"
#include "winquant/bench.hpp"
#include "winquant/errors.hpp"
#include "winquant/metrics.hpp"
#include "winquant/stream_driver.hpp"

using namespace winquant;

namespace {

RunConfig small_config(PolicyId policy, const std::string& source = "normal") {
  RunConfig cfg;
  cfg.policy = policy;
  cfg.window = 8192;
  cfg.period = 1024;
  cfg.source = source;
  cfg.generator.count = 4 * 8192;
  cfg.generator.seed = 11;
  return cfg;
}

RunReport without_timing(RunReport r) {
  r.throughput_mevs.reset();
  r.elapsed_seconds = 0;
  return r;
}

}  // namespace

TEST(ValueError, Examples) {
  EXPECT_NEAR(*value_error(814, 798), 2.005, 1e-3);
  EXPECT_NEAR(*value_error(74265, 1874), 3862.9, 0.1);
  EXPECT_DOUBLE_EQ(*value_error(5, 5), 0.0);
  EXPECT_DOUBLE_EQ(*value_error(-90, -100), 10.0);
  EXPECT_FALSE(value_error(3, 0).has_value());
}

TEST(RankError, Examples) {
  std::vector<std::int64_t> window(100000);
  std::iota(window.begin(), window.end(), 1);
  EXPECT_DOUBLE_EQ(rank_error(52000, window, 0.5), 0.02);
  EXPECT_DOUBLE_EQ(rank_error(50000, window, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(rank_error(50000.4, window, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(rank_error(-7, window, 0.5), 49999.0 / 100000.0);
  EXPECT_DOUBLE_EQ(rank_error(1e9, window, 0.5), 50000.0 / 100000.0);

  const std::vector<std::int64_t> ties{1, 2, 2, 2, 2, 3};
  EXPECT_DOUBLE_EQ(rank_error(2, ties, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(rank_error(3, ties, 0.5), 3.0 / 6.0);
}

TEST(RankError, MatchesLinearScan) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 3000; ++trial) {
    std::vector<std::int64_t> window(std::uniform_int_distribution<std::size_t>(1, 60)(rng));
    for (auto& x : window) x = std::uniform_int_distribution<std::int64_t>(0, 30)(rng);
    std::sort(window.begin(), window.end());
    const double phi = std::uniform_int_distribution<int>(1, 1000)(rng) / 1000.0;
    double value = std::uniform_int_distribution<int>(-5, 35)(rng);
    if (rng() & 1) value += 0.5;
    ASSERT_DOUBLE_EQ(rank_error(value, window, phi), oracle::rank_error(value, window, phi))
        << value << " " << phi;
  }
}

TEST(Policy, Names) {
  for (PolicyId p : {PolicyId::aomg, PolicyId::aomg_nofewk, PolicyId::exact, PolicyId::sampling}) {
    EXPECT_EQ(policy_from_string(to_string(p)), p);
  }
  EXPECT_THROW(policy_from_string("gk"), ConfigError);
}

TEST(ResolveFewK, DefaultBudgetIsHalfTheExactRequirement) {
  RunConfig cfg;
  cfg.period = 1024;
  const FewKConfig small = resolve_fewk(cfg);
  EXPECT_EQ(small.k_t, 2u);
  EXPECT_EQ(small.k_s, 64u);
  cfg.period = 16 * 1024;
  const FewKConfig large = resolve_fewk(cfg);
  EXPECT_EQ(large.k_t, 0u);
  EXPECT_EQ(large.k_s, 66u);
  cfg.k_t = 5;
  EXPECT_EQ(resolve_fewk(cfg).k_t, 5u);
  EXPECT_EQ(resolve_fewk(cfg).k_s, 0u);
  cfg.policy = PolicyId::aomg_nofewk;
  EXPECT_EQ(resolve_fewk(cfg).budget(cfg.window_spec()), 0u);
}

TEST(Run, ExactPolicyMatchesBruteForce) {
  RunConfig cfg = small_config(PolicyId::exact);
  cfg.quantize_digits = 0;
  const auto events = load_source(cfg);
  const RunReport r = run_on_events(cfg, events);
  ASSERT_EQ(r.evaluations.size(), 25u * cfg.phis.size());
  for (const auto& rec : r.evaluations) {
    const auto want = oracle::quantile(oracle::slice(events, rec.eval_index * 1024, 8192), rec.phi);
    ASSERT_EQ(rec.estimate, static_cast<double>(want));
    ASSERT_EQ(*rec.exact, static_cast<double>(want));
    EXPECT_EQ(*rec.value_error_pct, 0.0);
    EXPECT_EQ(*rec.rank_error, 0.0);
    EXPECT_EQ(rec.method, "exact");
  }
}

TEST(Run, OracleUsesUnquantizedValues) {
  RunConfig cfg = small_config(PolicyId::exact);
  cfg.quantize_digits = 2;
  const auto events = load_source(cfg);
  const RunReport r = run_on_events(cfg, events);
  for (const auto& rec : r.evaluations) {
    const auto raw = oracle::quantile(oracle::slice(events, rec.eval_index * 1024, 8192), rec.phi);
    ASSERT_EQ(*rec.exact, static_cast<double>(raw));
    ASSERT_EQ(rec.estimate, static_cast<double>(oracle::quantize(raw, 2)));
  }
}

TEST(Run, AggregatesEqualRecomputation) {
  const RunReport r = run(small_config(PolicyId::aomg));
  ASSERT_EQ(r.per_phi.size(), 4u);
  for (const PhiSummary& s : r.per_phi) {
    double sum = 0, rank_sum = 0;
    std::uint64_t n = 0, bounded = 0, covered = 0;
    for (const auto& rec : r.evaluations) {
      if (rec.phi != s.phi) continue;
      ++n;
      sum += *rec.value_error_pct;
      rank_sum += *rec.rank_error;
      if (rec.error_bound) {
        ++bounded;
        covered += std::abs(rec.estimate - *rec.exact) <= *rec.error_bound;
      }
    }
    EXPECT_EQ(s.evaluations, n);
    EXPECT_EQ(s.excluded, 0u);
    EXPECT_NEAR(*s.avg_value_error_pct, sum / static_cast<double>(n), 1e-9);
    EXPECT_NEAR(*s.avg_rank_error, rank_sum / static_cast<double>(n), 1e-12);
    if (bounded > 0) {
      EXPECT_NEAR(*s.bound_coverage, static_cast<double>(covered) / static_cast<double>(bounded), 1e-12);
    } else {
      EXPECT_FALSE(s.bound_coverage.has_value());
    }
  }
}

TEST(Run, ZeroExactValuesAreExcluded) {
  std::vector<EvaluationRecord> records(3);
  records[0] = {0, 0.5, 1.0, 0.0, "exact", std::nullopt, std::nullopt, 0.1};
  records[1] = {1, 0.5, 2.0, 2.0, "exact", std::nullopt, 0.0, 0.0};
  records[2] = {2, 0.5, 4.0, 2.0, "exact", std::nullopt, 100.0, 0.2};
  const std::vector<double> phis{0.5};
  const auto s = summarize(records, phis);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].evaluations, 3u);
  EXPECT_EQ(s[0].excluded, 1u);
  EXPECT_DOUBLE_EQ(*s[0].avg_value_error_pct, 50.0);
  EXPECT_NEAR(*s[0].avg_rank_error, 0.1, 1e-12);
}

TEST(Run, DeterministicApartFromTiming) {
  const RunConfig cfg = small_config(PolicyId::aomg, "heavytail");
  EXPECT_EQ(without_timing(run(cfg)), without_timing(run(cfg)));
}

TEST(Run, NoOracleLeavesErrorsUnset) {
  RunConfig cfg = small_config(PolicyId::sampling);
  cfg.oracle = false;
  const RunReport r = run(cfg);
  ASSERT_FALSE(r.evaluations.empty());
  for (const auto& rec : r.evaluations) {
    EXPECT_FALSE(rec.exact.has_value());
    EXPECT_FALSE(rec.rank_error.has_value());
  }
  EXPECT_FALSE(r.per_phi[0].avg_value_error_pct.has_value());
}

TEST(Space, UniformAomgIsSmall) {
  RunConfig cfg = small_config(PolicyId::aomg_nofewk, "uniform");
  cfg.phis = {0.5, 0.9, 0.99, 0.999};
  const RunReport r = run(cfg);
  // l * n quantiles and densities, 2 * 21 keys plus the total, and the
  // per-phi running sums of quantiles and densities.
  EXPECT_LE(r.observed_space, 4u * 8u * 2u + 2u * 21u + 1u + 2u * 4u);
  EXPECT_EQ(r.analytical_space, 4u * 8u + 1024u);
}

TEST(Space, ExactAllDistinctIsTwiceTheWindow) {
  RunConfig cfg = small_config(PolicyId::exact);
  cfg.quantize_digits = 0;
  std::vector<std::int64_t> v(4 * 8192);
  std::iota(v.begin(), v.end(), 0);
  const RunReport r = run_on_events(cfg, make_events(v));
  EXPECT_EQ(r.observed_space, 2u * 8192u + 1u);
  EXPECT_EQ(r.analytical_space, 2u * 8192u + 1u);
}

TEST(Space, AnalyticalAomgWithoutFewK) {
  RunConfig cfg;
  cfg.policy = PolicyId::aomg_nofewk;
  cfg.source = "uniform";
  cfg.generator.count = 2 * 128 * 1024;
  const RunReport r = run(cfg);
  EXPECT_EQ(r.analytical_space, 16416u);
}

TEST(Throughput, NeedsTwoWindows) {
  const RunConfig cfg = small_config(PolicyId::exact);
  const auto events = load_source(cfg);
  const std::span<const Event> short_span(events.data(), 8192 + 100);
  EXPECT_THROW(measure_throughput(cfg, short_span), InsufficientDataError);
  EXPECT_GT(measure_throughput(cfg, events), 0.0);
}

TEST(Report, JsonRoundTrip) {
  RunConfig cfg = small_config(PolicyId::aomg, "heavytail");
  cfg.burst = BurstSpec{0.999, 10.0, 0};
  const RunReport r = run(cfg);
  const std::string text = to_json(r);
  EXPECT_NE(text.find("\"schema\": \"winquant.run_report\""), std::string::npos);
  EXPECT_EQ(report_from_json(text), r);
  EXPECT_EQ(r.config.burst, "0.999,10,0");
  EXPECT_EQ(r.config.rng_id, SplitMix64::kId);
}

TEST(Report, MalformedJson) {
  EXPECT_THROW(report_from_json("{"), DataError);
  EXPECT_THROW(report_from_json("{\"schema\": \"other\"}"), DataError);
  std::string text = to_json(run(small_config(PolicyId::exact)));
  const auto at = text.find("\"schema_version\": 1");
  ASSERT_NE(at, std::string::npos);
  text.replace(at, 19, "\"schema_version\": 9");
  EXPECT_THROW(report_from_json(text), DataError);
}

TEST(Report, CsvRows) {
  const RunReport r = run(small_config(PolicyId::aomg_nofewk));
  const std::string csv = to_csv(r);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "eval_index,phi,estimate,exact,method,error_bound,value_error_pct,rank_error");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 7);
  }
  EXPECT_EQ(rows, r.evaluations.size());
}

TEST(RunConfig, Validation) {
  RunConfig cfg;
  cfg.period = 1000;
  EXPECT_THROW(run(cfg), ConfigError);
  cfg = RunConfig{};
  cfg.quantize_digits = -1;
  EXPECT_THROW(cfg.window_spec(), ConfigError);
  cfg = RunConfig{};
  cfg.source = "zipf";
  cfg.generator.count = 10;
  EXPECT_THROW(run(cfg), ConfigError);
  cfg.source = "normal";
  cfg.phis = {1.2};
  EXPECT_THROW(run(cfg), ConfigError);
}
