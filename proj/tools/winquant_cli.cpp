// winquant: run a windowed quantile policy over a generated or CSV stream
// and write a JSON or CSV run report.
//
// Exit codes: 0 success, 2 configuration error, 3 data error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "winquant/bench.hpp"
#include "winquant/errors.hpp"

namespace {

constexpr int kConfigExit = 2;
constexpr int kDataExit = 3;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, sep);) {
    out.push_back(item);
  }
  return out;
}

winquant::BurstSpec parse_burst(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) {
    throw winquant::ConfigError("--burst-inject expects \"phi,multiplier,every\"");
  }
  try {
    winquant::BurstSpec b;
    b.phi_target = std::stod(parts[0]);
    b.multiplier = std::stod(parts[1]);
    b.every_nth_subwindow = std::stoull(parts[2]);
    b.validate();
    return b;
  } catch (const std::logic_error&) {
    throw winquant::ConfigError("cannot parse --burst-inject \"" + text + "\"");
  }
}

void print_summary(const winquant::RunReport& r) {
  std::fprintf(stderr, "policy=%s window=%llu period=%llu events=%llu evaluations=%zu\n",
               r.config.policy.c_str(), static_cast<unsigned long long>(r.config.window),
               static_cast<unsigned long long>(r.config.period),
               static_cast<unsigned long long>(r.events), r.evaluations.size() / std::max<std::size_t>(1, r.per_phi.size()));
  for (const auto& p : r.per_phi) {
    std::fprintf(stderr, "  Q%-6g value_err=%s%% rank_err=%s\n", p.phi,
                 p.avg_value_error_pct ? std::to_string(*p.avg_value_error_pct).c_str() : "n/a",
                 p.avg_rank_error ? std::to_string(*p.avg_rank_error).c_str() : "n/a");
  }
  std::fprintf(stderr, "  space observed=%llu analytical=%llu throughput=%s M ev/s\n",
               static_cast<unsigned long long>(r.observed_space),
               static_cast<unsigned long long>(r.analytical_space),
               r.throughput_mevs ? std::to_string(*r.throughput_mevs).c_str() : "n/a");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sliding-window approximate quantile benchmark"};

  winquant::RunConfig cfg;
  std::string policy = "aomg";
  std::string phis = "0.5,0.9,0.99,0.999";
  std::string burst;
  std::string out_path;
  std::string format = "json";
  bool no_oracle = false;
  std::uint64_t kt = 0, ks = 0, budget = 0;

  app.add_option("--policy", policy, "aomg | aomg-nofewk | exact | sampling")
      ->check(CLI::IsMember({"aomg", "aomg-nofewk", "exact", "sampling"}));
  app.add_option("--window", cfg.window, "Window size N (elements)");
  app.add_option("--period", cfg.period, "Window period P (elements)");
  app.add_option("--phis", phis, "Comma-separated quantiles in (0, 1]");
  app.add_option("--source", cfg.source, "normal | uniform | ar1 | heavytail | csv:PATH");
  app.add_option("--seed", cfg.generator.seed, "Generator seed");
  app.add_option("--count", cfg.generator.count, "Generated element count")->default_val(1000000);
  app.add_option("--quantize-digits", cfg.quantize_digits, "Significant digits kept (0 = off)")
      ->default_val(3);
  auto* kt_opt = app.add_option("--kt", kt, "Top-k values per sub-window");
  auto* ks_opt = app.add_option("--ks", ks, "Sample-k values per sub-window");
  auto* budget_opt = app.add_option("--budget", budget, "Few-k budget B per window");
  app.add_option("--kt-multiplier", cfg.kt_multiplier, "Scale for the default k_t");
  app.add_option("--si-threshold", cfg.si_threshold, "Statistical-inefficiency threshold")
      ->default_val(10.0);
  app.add_option("--burst-tau", cfg.burst_tau, "Normalized burst statistic threshold")
      ->default_val(0.5);
  app.add_option("--burst-inject", burst, "Inject bursts: \"phi,multiplier,every\" (every 0 = N/P)");
  app.add_option("--epsilon", cfg.epsilon, "Rank-error parameter of the sampling baseline");
  app.add_option("--out", out_path, "Report path (default: stdout)");
  app.add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--no-oracle", no_oracle, "Skip error metrics");
  app.add_option("--mean", cfg.generator.mean, "normal/ar1 mean");
  app.add_option("--sd", cfg.generator.sd, "normal/ar1 standard deviation");
  app.add_option("--lo", cfg.generator.lo, "uniform lower bound");
  app.add_option("--hi", cfg.generator.hi, "uniform upper bound");
  app.add_option("--psi", cfg.generator.psi, "ar1 coefficient");
  app.add_option("--csv-column", cfg.csv.column, "CSV column name or 0-based index");
  app.add_flag("--csv-header", cfg.csv.header, "CSV has a header row");
  app.add_option("--csv-scale", cfg.csv.scale, "Fixed-point factor applied to CSV values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigExit;
  }

  try {
    cfg.policy = winquant::policy_from_string(policy);
    cfg.phis.clear();
    for (const auto& p : split(phis, ',')) {
      try {
        cfg.phis.push_back(std::stod(p));
      } catch (const std::logic_error&) {
        throw winquant::ConfigError("cannot parse quantile '" + p + "'");
      }
    }
    if (*kt_opt) cfg.k_t = kt;
    if (*ks_opt) cfg.k_s = ks;
    if (*budget_opt) cfg.budget = budget;
    if (!burst.empty()) cfg.burst = parse_burst(burst);
    cfg.oracle = !no_oracle;

    const winquant::RunReport report = winquant::run(cfg);
    const std::string text = format == "csv" ? winquant::to_csv(report) : winquant::to_json(report) + "\n";
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) {
        throw winquant::ConfigError("cannot write " + out_path);
      }
      out << text;
    }
    print_summary(report);
    return 0;
  } catch (const winquant::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kDataExit;
  } catch (const winquant::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigExit;
  } catch (const winquant::InsufficientDataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kDataExit;
  } catch (const winquant::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kDataExit;
  }
}
