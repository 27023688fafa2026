#include "winquant/aomg.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numeric>
#include <string>

#include "winquant/errors.hpp"

namespace winquant {

namespace {

constexpr double kDensityDelta = 0.01;
constexpr std::uint64_t kMinDensitySamples = 100;

struct DensityRanks {
  std::uint64_t lo;
  std::uint64_t hi;
};

DensityRanks density_ranks(double phi, double delta, std::uint64_t total) {
  const double lo_phi = phi - delta;
  const double hi_phi = std::min(phi + delta, 1.0);
  return {lo_phi > 0.0 ? quantile_rank(lo_phi, total) : 1, quantile_rank(hi_phi, total)};
}

std::optional<double> density_from_points(const FrequencyMap::RankPoint& lo,
                                          const FrequencyMap::RankPoint& hi, std::uint64_t total) {
  if (hi.value <= lo.value) {
    return std::nullopt;
  }
  const double mass = static_cast<double>(hi.below - lo.below) / static_cast<double>(total);
  return mass / static_cast<double>(hi.value - lo.value);
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::level2_mean:
      return "level2-mean";
    case Method::top_k:
      return "top-k";
    case Method::sample_k:
      return "sample-k";
    case Method::exact:
      return "exact";
    case Method::sampling:
      return "sampling";
  }
  return "unknown";
}

Method method_from_string(std::string_view name) {
  for (Method m : {Method::level2_mean, Method::top_k, Method::sample_k, Method::exact,
                   Method::sampling}) {
    if (to_string(m) == name) {
      return m;
    }
  }
  throw ConfigError("unknown estimate method '" + std::string(name) + "'");
}

FewKConfig FewKConfig::from_budget(std::uint64_t budget, const WindowSpec& w, double phi_max,
                                   double kt_multiplier, double si_threshold, double burst_tau) {
  if (kt_multiplier < 0.0) {
    throw ConfigError("top-k multiplier must be non-negative");
  }
  FewKConfig cfg;
  cfg.si_threshold = si_threshold;
  cfg.burst_tau = burst_tau;
  const std::uint64_t n = w.subwindows();
  const std::uint64_t per_subwindow = budget / n;
  const std::uint64_t governed = tail_rank(phi_max, w.size());
  if (static_cast<double>(w.period()) * (1.0 - phi_max) < si_threshold) {
    const auto spread = static_cast<double>((governed + n - 1) / n);
    cfg.k_t = std::min<std::uint64_t>(
        static_cast<std::uint64_t>(std::ceil(spread * kt_multiplier)), per_subwindow);
  }
  cfg.k_s = per_subwindow - cfg.k_t;
  return cfg;
}

FewKConfig FewKConfig::from_fractions(double topk_fraction, double samplek_fraction,
                                      const WindowSpec& w, double phi_max) {
  if (topk_fraction < 0.0 || samplek_fraction < 0.0) {
    throw ConfigError("few-k fractions must be non-negative");
  }
  const auto governed = static_cast<double>(tail_rank(phi_max, w.size()));
  FewKConfig cfg;
  cfg.k_t = static_cast<std::uint64_t>(std::llround(topk_fraction * governed));
  cfg.k_s = static_cast<std::uint64_t>(std::llround(samplek_fraction * governed));
  return cfg;
}

TailPlan TailPlan::make(const FewKConfig& cfg, const WindowSpec& w, double phi_max) {
  TailPlan plan;
  plan.governed_rank = tail_rank(phi_max, w.size());
  plan.k_t = std::min(cfg.k_t, w.period());
  if (cfg.k_s > 0) {
    plan.tracked = std::min(w.period(), plan.governed_rank);
    plan.interval = std::max<std::uint64_t>(1, (plan.governed_rank + cfg.k_s - 1) / cfg.k_s);
    plan.k_s = std::min(cfg.k_s, plan.tracked / plan.interval);
  }
  return plan;
}

std::size_t SubWindowSummary::variables() const noexcept {
  const auto defined = static_cast<std::size_t>(
      std::count_if(densities.begin(), densities.end(), [](const auto& d) { return d.has_value(); }));
  return quantiles.size() + defined + topk.size() + samplek.size();
}

SubWindowSummary close_subwindow(const FrequencyMap& map, const QuantileSet& qs,
                                 const TailPlan& plan, bool with_density) {
  if (map.empty()) {
    throw EmptyWindowError("cannot close an empty sub-window");
  }
  const std::uint64_t total = map.total();
  const bool density = with_density && total >= kMinDensitySamples;

  // Every rank needed (quantiles and density end points) in one pass.
  std::vector<std::uint64_t> ranks;
  ranks.reserve(qs.size() * 3);
  for (double phi : qs.phis()) {
    ranks.push_back(quantile_rank(phi, total));
    if (density) {
      const DensityRanks d = density_ranks(phi, kDensityDelta, total);
      ranks.push_back(d.lo);
      ranks.push_back(d.hi);
    }
  }
  std::vector<std::size_t> order(ranks.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ranks[a] < ranks[b]; });
  std::vector<std::uint64_t> sorted_ranks(ranks.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    sorted_ranks[i] = ranks[order[i]];
  }
  const auto located = map.locate(sorted_ranks);
  std::vector<FrequencyMap::RankPoint> points(ranks.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    points[order[i]] = located[i];
  }

  SubWindowSummary s;
  s.count = total;
  s.quantiles.reserve(qs.size());
  s.densities.reserve(qs.size());
  const std::size_t stride = density ? 3 : 1;
  for (std::size_t q = 0; q < qs.size(); ++q) {
    s.quantiles.push_back(points[q * stride].value);
    if (!density) {
      s.densities.emplace_back();
      continue;
    }
    auto f = density_from_points(points[q * stride + 1], points[q * stride + 2], total);
    if (!f) {
      try {
        f = estimate_density(map, qs[q]);
      } catch (const UndefinedBoundError&) {
      }
    }
    s.densities.push_back(f);
  }

  const std::uint64_t wanted = std::max(plan.k_t, plan.tracked);
  if (wanted > 0) {
    std::vector<std::int64_t> tail = map.largest(wanted);
    s.topk.assign(tail.begin(), tail.begin() + static_cast<std::ptrdiff_t>(
                                                   std::min<std::size_t>(plan.k_t, tail.size())));
    if (plan.k_s > 0) {
      const std::size_t tracked = std::min<std::size_t>(plan.tracked, tail.size());
      for (std::size_t pos = plan.interval; pos <= tracked && s.samplek.size() < plan.k_s;
           pos += plan.interval) {
        s.samplek.push_back(tail[pos - 1]);
      }
    }
  }
  return s;
}

SlidingAggregate::SlidingAggregate(std::size_t subwindows, std::size_t quantiles)
    : capacity_(subwindows),
      sums_(quantiles, 0),
      density_sums_(quantiles, 0.0),
      density_counts_(quantiles, 0) {
  if (subwindows == 0 || quantiles == 0) {
    throw ConfigError("sliding aggregate needs at least one sub-window and one quantile");
  }
}

void SlidingAggregate::push(SubWindowSummary s) {
  if (full()) {
    throw ConfigError("sliding aggregate ring is full");
  }
  if (s.quantiles.size() != sums_.size() || s.densities.size() != sums_.size()) {
    throw ConfigError("summary quantile count does not match the aggregate");
  }
  for (std::size_t q = 0; q < sums_.size(); ++q) {
    sums_[q] += s.quantiles[q];
    if (s.densities[q]) {
      density_sums_[q] += *s.densities[q];
      ++density_counts_[q];
    }
  }
  triggers_ += s.burst_trigger ? 1 : 0;
  variables_ += s.variables();
  ring_.push_back(std::move(s));
}

SubWindowSummary SlidingAggregate::pop_oldest() {
  if (ring_.empty()) {
    throw EmptyWindowError("sliding aggregate ring is empty");
  }
  SubWindowSummary s = std::move(ring_.front());
  ring_.pop_front();
  for (std::size_t q = 0; q < sums_.size(); ++q) {
    sums_[q] -= s.quantiles[q];
    if (s.densities[q]) {
      density_sums_[q] -= *s.densities[q];
      --density_counts_[q];
    }
  }
  triggers_ -= s.burst_trigger ? 1 : 0;
  variables_ -= s.variables();
  return s;
}

double SlidingAggregate::mean(std::size_t q) const {
  if (!full()) {
    throw WarmupError("sliding aggregate holds " + std::to_string(ring_.size()) + " of " +
                      std::to_string(capacity_) + " sub-windows");
  }
  return static_cast<double>(static_cast<long double>(sums_.at(q)) /
                             static_cast<long double>(capacity_));
}

std::optional<double> SlidingAggregate::mean_density(std::size_t q) const {
  if (density_counts_.at(q) == 0) {
    return std::nullopt;
  }
  return density_sums_[q] / static_cast<double>(density_counts_[q]);
}

std::vector<double> aggregate_mean(const SlidingAggregate& agg) {
  std::vector<double> out;
  const std::size_t l = agg.ring().empty() ? 0 : agg.ring().front().quantiles.size();
  if (!agg.full()) {
    throw WarmupError("sliding aggregate is not full");
  }
  out.reserve(l);
  for (std::size_t q = 0; q < l; ++q) {
    out.push_back(agg.mean(q));
  }
  return out;
}

double topk_merge(std::span<const SubWindowSummary> summaries, double phi,
                  std::uint64_t window_size) {
  std::vector<std::int64_t> merged;
  for (const auto& s : summaries) {
    merged.insert(merged.end(), s.topk.begin(), s.topk.end());
  }
  if (merged.empty()) {
    throw NotEnabledError("top-k merging needs k_t > 0");
  }
  std::sort(merged.begin(), merged.end(), std::greater<>());
  const std::uint64_t rank = std::min<std::uint64_t>(tail_rank(phi, window_size), merged.size());
  return static_cast<double>(merged[rank - 1]);
}

double samplek_merge(std::span<const SubWindowSummary> summaries, double phi,
                     std::uint64_t window_size, double alpha) {
  if (!(alpha > 0.0)) {
    throw NotEnabledError("sample-k merging needs a positive sampling fraction");
  }
  std::vector<std::int64_t> merged;
  for (const auto& s : summaries) {
    merged.insert(merged.end(), s.samplek.begin(), s.samplek.end());
  }
  if (merged.empty()) {
    throw NotEnabledError("sample-k merging needs k_s > 0");
  }
  std::sort(merged.begin(), merged.end(), std::greater<>());
  const std::uint64_t target = quantile_rank(std::min(alpha, 1.0), tail_rank(phi, window_size));
  const std::uint64_t rank = std::min<std::uint64_t>(target, merged.size());
  return static_cast<double>(merged[rank - 1]);
}

std::int64_t burst_statistic(std::span<const std::int64_t> current,
                             std::span<const std::int64_t> previous) {
  const std::size_t n = std::min(current.size(), previous.size());
  std::vector<std::int64_t> y(previous.begin(), previous.begin() + static_cast<std::ptrdiff_t>(n));
  std::sort(y.begin(), y.end());
  std::int64_t u = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto below = std::lower_bound(y.begin(), y.end(), current[i]) - y.begin();
    const auto above = y.end() - std::upper_bound(y.begin(), y.end(), current[i]);
    u += below - above;
  }
  return u;
}

bool detect_burst(std::span<const std::int64_t> current, std::span<const std::int64_t> previous,
                  double tau) {
  const std::size_t n = std::min(current.size(), previous.size());
  if (n == 0) {
    return false;
  }
  const double u = static_cast<double>(burst_statistic(current, previous));
  return u / (static_cast<double>(n) * static_cast<double>(n)) > tau;
}

Estimate select_outcome(double phi, std::uint64_t period, const FewKConfig& cfg, bool burst,
                        const OutcomeCandidates& candidates) {
  if (burst && cfg.samplek_enabled() && candidates.sample_k) {
    return *candidates.sample_k;
  }
  if (static_cast<double>(period) * (1.0 - phi) < cfg.si_threshold && cfg.topk_enabled() &&
      candidates.top_k) {
    return *candidates.top_k;
  }
  return candidates.level2;
}

double upper_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ConfigError("normal tail probability must lie in (0, 1)");
  }
  return boost::math::quantile(boost::math::complement(boost::math::normal_distribution<>(), p));
}

double error_bound(double phi, std::uint64_t n, std::uint64_t m, double density,
                   double alpha_conf) {
  if (!(phi > 0.0 && phi < 1.0)) {
    throw ConfigError("error bound needs phi in (0, 1)");
  }
  if (!(alpha_conf > 0.0 && alpha_conf < 1.0)) {
    throw ConfigError("confidence level alpha must lie in (0, 1)");
  }
  if (n == 0 || m == 0) {
    throw ConfigError("error bound needs n, m >= 1");
  }
  if (!(density > 0.0)) {
    throw UndefinedBoundError("error bound needs a positive density");
  }
  const double z = upper_normal_quantile(alpha_conf / 2.0);
  return 2.0 * z * std::sqrt(phi * (1.0 - phi)) /
         (std::sqrt(static_cast<double>(n) * static_cast<double>(m)) * density);
}

double estimate_density(const FrequencyMap& map, double phi) {
  if (map.total() < kMinDensitySamples) {
    throw UndefinedBoundError("density estimate needs at least 100 elements");
  }
  for (double delta = kDensityDelta;; delta *= 2.0) {
    const DensityRanks d = density_ranks(phi, delta, map.total());
    const std::uint64_t ranks[] = {d.lo, d.hi};
    const auto points = map.locate(ranks);
    if (auto f = density_from_points(points[0], points[1], map.total())) {
      return *f;
    }
    if (phi - delta <= 0.0 && phi + delta >= 1.0) {
      throw UndefinedBoundError("density undefined: a single distinct value");
    }
  }
}

void TailMultiset::insert(std::span<const std::int64_t> values) {
  for (std::int64_t v : values) {
    values_.insert(v);
  }
}

void TailMultiset::erase(std::span<const std::int64_t> values) {
  for (std::int64_t v : values) {
    auto it = values_.find(v);
    if (it == values_.end()) {
      throw StateCorruptionError("merged tail is missing value " + std::to_string(v));
    }
    values_.erase(it);
  }
}

std::optional<std::int64_t> TailMultiset::nth_largest(std::uint64_t rank) const {
  if (values_.empty()) {
    return std::nullopt;
  }
  if (rank >= values_.size()) {
    return *values_.rbegin();
  }
  return *std::next(values_.begin(), static_cast<std::ptrdiff_t>(std::max<std::uint64_t>(rank, 1) - 1));
}

AomgOperator::AomgOperator(WindowSpec window, QuantileSet qs, AomgOptions options)
    : window_(window),
      qs_(std::move(qs)),
      options_(options),
      plan_(TailPlan::make(options.fewk, window, qs_.max())) {}

AomgOperator::State AomgOperator::initial_state() const {
  return State{{}, SlidingAggregate(window_.subwindows(), qs_.size()), {}, {}, {}, 0};
}

void AomgOperator::close_subwindow(State& s) const {
  SubWindowSummary summary = winquant::close_subwindow(s.inflight, qs_, plan_, options_.error_bounds);
  s.last_inflight_distinct = s.inflight.distinct();
  s.inflight.clear();
  if (plan_.k_s > 0) {
    summary.burst_trigger = detect_burst(summary.samplek, s.previous_samples, options_.fewk.burst_tau);
    s.previous_samples = summary.samplek;
  }
  s.merged_topk.insert(summary.topk);
  s.merged_samples.insert(summary.samplek);
  s.aggregate.push(std::move(summary));
}

void AomgOperator::expire_subwindow(State& s) const {
  const SubWindowSummary old = s.aggregate.pop_oldest();
  s.merged_topk.erase(old.topk);
  s.merged_samples.erase(old.samplek);
}

AomgOperator::Result AomgOperator::compute_result(const State& s) const {
  if (!s.aggregate.full()) {
    throw WarmupError("AOMG result requested before the first full window");
  }
  const bool burst = s.aggregate.burst_triggers() > 0;
  Result out;
  out.reserve(qs_.size());
  for (std::size_t q = 0; q < qs_.size(); ++q) {
    const double phi = qs_[q];
    OutcomeCandidates c;
    c.level2 = Estimate{phi, s.aggregate.mean(q), Method::level2_mean, std::nullopt, std::nullopt};
    if (options_.error_bounds && phi < 1.0) {
      if (auto f = s.aggregate.mean_density(q); f && *f > 0.0) {
        c.level2.density = f;
        c.level2.error_bound = error_bound(phi, window_.subwindows(), window_.period(), *f,
                                           options_.confidence_alpha);
      }
    }
    const std::uint64_t rank = tail_rank(phi, window_.size());
    if (plan_.k_t > 0) {
      if (auto v = s.merged_topk.nth_largest(rank)) {
        c.top_k = Estimate{phi, static_cast<double>(*v), Method::top_k, std::nullopt, std::nullopt};
      }
    }
    if (plan_.k_s > 0 && rank <= plan_.governed_rank) {
      if (auto v = s.merged_samples.nth_largest(quantile_rank(plan_.alpha(), rank))) {
        c.sample_k = Estimate{phi, static_cast<double>(*v), Method::sample_k, std::nullopt, std::nullopt};
      }
    }
    out.push_back(select_outcome(phi, window_.period(), options_.fewk, burst, c));
  }
  return out;
}

std::size_t AomgOperator::observed_space(const State& s) const {
  const std::size_t inflight = std::max(s.inflight.distinct(), s.last_inflight_distinct);
  const std::size_t running = qs_.size() * (options_.error_bounds ? 2 : 1);
  return 2 * inflight + 1 + s.aggregate.summary_variables() + running;
}

std::size_t AomgOperator::analytical_space() const {
  const std::size_t n = window_.subwindows();
  return qs_.size() * n + window_.period() + (plan_.k_t + plan_.k_s) * n;
}

}  // namespace winquant
