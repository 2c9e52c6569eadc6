// Copyright 2026 The asymdigest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// -----------------------------------------------------------------------------
// File: bench.hpp
// -----------------------------------------------------------------------------
//
// Accuracy experiments: repeated trials of digesting random samples, then
// measuring at each probe quantile q
//
//   error            = |F(quantile(q)) - q|      (F the true CDF)
//   normalized error = error / min(q, 1 - q)
//
// and the centroid count of the fully compressed digest.
//
// Samples come from std::mt19937_64 seeded with base_seed + trial index. The
// conversions from raw 64-bit outputs to uniform, exponential and log-normal
// variates are written out here (rather than using <random> distributions,
// whose output differs between standard libraries) so reports are
// reproducible across platforms.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "asymdigest/descriptor.hpp"
#include "asymdigest/digest.hpp"

namespace asymdigest {

enum class DistributionKind { Uniform01, Exponential, LogNormal };

struct Distribution {
  DistributionKind kind = DistributionKind::Uniform01;
  double rate = 1.0;   // Exponential
  double mu = 0.0;     // LogNormal
  double sigma = 1.0;  // LogNormal

  static Distribution uniform() { return {}; }
  static Distribution exponential(double rate) {
    return {DistributionKind::Exponential, rate, 0.0, 1.0};
  }
  static Distribution lognormal(double mu, double sigma) {
    return {DistributionKind::LogNormal, 1.0, mu, sigma};
  }

  double cdf(double x) const {
    switch (kind) {
      case DistributionKind::Uniform01:
        return std::clamp(x, 0.0, 1.0);
      case DistributionKind::Exponential:
        return x <= 0.0 ? 0.0 : -std::expm1(-rate * x);
      case DistributionKind::LogNormal:
        if (x <= 0.0) return 0.0;
        return 0.5 * std::erfc(-(std::log(x) - mu) / (sigma * std::numbers::sqrt2));
    }
    return 0.0;
  }

  std::string name() const {
    switch (kind) {
      case DistributionKind::Uniform01:
        return "uniform";
      case DistributionKind::Exponential:
        return "exponential";
      case DistributionKind::LogNormal:
        return "lognormal";
    }
    return "";
  }
};

/// mt19937_64 plus portable variate conversions.
class SampleStream {
 public:
  explicit SampleStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double next(const Distribution& dist) {
    switch (dist.kind) {
      case DistributionKind::Uniform01:
        return uniform();
      case DistributionKind::Exponential:
        return -std::log1p(-uniform()) / dist.rate;
      case DistributionKind::LogNormal: {
        // Box-Muller, cosine branch only.
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double z = std::sqrt(-2.0 * std::log(u1)) *
                         std::cos(2.0 * std::numbers::pi * u2);
        return std::exp(dist.mu + dist.sigma * z);
      }
    }
    return 0.0;
  }

 private:
  std::mt19937_64 engine_;
};

inline std::vector<double> default_probe_quantiles() {
  return {0.001, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999};
}

struct BenchConfig {
  std::string scale_descriptor = "k2:glued@0.5";
  double compression = 100.0;
  std::size_t samples_per_trial = 100000;
  std::size_t trials = 20;
  Distribution distribution;
  std::vector<double> probe_quantiles = default_probe_quantiles();
  std::uint64_t base_seed = 42;
  // Worker threads for run_experiment; 0 picks hardware_concurrency().
  std::size_t threads = 0;
};

inline void validate(const BenchConfig& config) {
  if (!std::isfinite(config.compression) || config.compression <= 0.0) {
    throw std::invalid_argument("compression must be positive");
  }
  if (config.samples_per_trial == 0) throw std::invalid_argument("samples must be positive");
  if (config.trials == 0) throw std::invalid_argument("trials must be positive");
  if (config.probe_quantiles.empty()) throw std::invalid_argument("no probe quantiles");
  for (std::size_t i = 0; i < config.probe_quantiles.size(); ++i) {
    const double q = config.probe_quantiles[i];
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("probe quantiles must lie in (0, 1)");
    if (i > 0 && !(q > config.probe_quantiles[i - 1])) {
      throw std::invalid_argument("probe quantiles must be strictly increasing");
    }
  }
  const auto& d = config.distribution;
  if (d.kind == DistributionKind::Exponential && !(d.rate > 0.0 && std::isfinite(d.rate))) {
    throw std::invalid_argument("exponential rate must be positive");
  }
  if (d.kind == DistributionKind::LogNormal &&
      !(d.sigma > 0.0 && std::isfinite(d.sigma) && std::isfinite(d.mu))) {
    throw std::invalid_argument("log-normal sigma must be positive");
  }
}

/// |F(quantile(q)) - q|.
template <typename Cdf>
double estimate_error(const Digest& digest, double q, Cdf&& true_cdf) {
  return std::abs(true_cdf(digest.quantile(q)) - q);
}

inline double normalized_error(double error, double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::domain_error("normalized error needs q in (0, 1)");
  return error / std::min(q, 1.0 - q);
}

/// Horizontal axis for error plots: log10(q) below the median, 0 at the
/// median and -log10(1 - q) above it, so both tails read in decades.
inline double axis_transform(double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::domain_error("axis transform needs q in (0, 1)");
  if (q < 0.5) return std::log10(q);
  if (q == 0.5) return 0.0;
  return -std::log10(1.0 - q);
}

struct TrialResult {
  std::vector<double> errors;
  std::vector<double> normalized_errors;
  std::size_t centroid_count = 0;

  friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

namespace detail {

inline TrialResult run_trial(const BenchConfig& config, const ScaleSpec& scale,
                             std::size_t trial_index) {
  SampleStream stream(config.base_seed + trial_index);
  Digest digest(config.compression, scale, false);
  for (std::size_t i = 0; i < config.samples_per_trial; ++i) {
    digest.add(stream.next(config.distribution));
  }
  digest.compress();

  TrialResult result;
  result.centroid_count = digest.centroid_count();
  auto cdf = [&](double x) { return config.distribution.cdf(x); };
  for (double q : config.probe_quantiles) {
    const double err = estimate_error(digest, q, cdf);
    result.errors.push_back(err);
    result.normalized_errors.push_back(normalized_error(err, q));
  }
  return result;
}

}  // namespace detail

/// One trial, fully determined by (config, trial_index).
inline TrialResult run_trial(const BenchConfig& config, std::size_t trial_index) {
  validate(config);
  const ScaleSpec scale = parse_scale(config.scale_descriptor, config.compression);
  return detail::run_trial(config, scale, trial_index);
}

struct Percentiles {
  double p5 = 0.0;
  double p25 = 0.0;
  double p50 = 0.0;
  double p75 = 0.0;
  double p95 = 0.0;
};

/// Linear interpolation between order statistics at rank (n - 1) p.
inline double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("percentile of empty sample");
  std::sort(values.begin(), values.end());
  const double rank = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double t = rank - static_cast<double>(lo);
  return values[lo] + t * (values[hi] - values[lo]);
}

inline Percentiles summarize(const std::vector<double>& values) {
  return {percentile(values, 0.05), percentile(values, 0.25), percentile(values, 0.50),
          percentile(values, 0.75), percentile(values, 0.95)};
}

struct QuantileStats {
  double q = 0.0;
  double axis = 0.0;
  Percentiles error;
  Percentiles normalized_error;
};

struct AggregateReport {
  std::vector<QuantileStats> per_quantile;
  std::vector<std::size_t> centroid_counts;
  BenchConfig config;

  double mean_centroid_count() const {
    if (centroid_counts.empty()) return 0.0;
    const double sum = std::accumulate(centroid_counts.begin(), centroid_counts.end(), 0.0);
    return sum / static_cast<double>(centroid_counts.size());
  }
};

/// Folds a list of trial results (in trial order) into a report.
inline AggregateReport aggregate(const BenchConfig& config,
                                 const std::vector<TrialResult>& trials) {
  AggregateReport report;
  report.config = config;
  for (const auto& t : trials) report.centroid_counts.push_back(t.centroid_count);
  for (std::size_t p = 0; p < config.probe_quantiles.size(); ++p) {
    std::vector<double> errs;
    std::vector<double> nerrs;
    for (const auto& t : trials) {
      errs.push_back(t.errors[p]);
      nerrs.push_back(t.normalized_errors[p]);
    }
    const double q = config.probe_quantiles[p];
    report.per_quantile.push_back({q, axis_transform(q), summarize(errs), summarize(nerrs)});
  }
  return report;
}

/// Runs all trials, in parallel when threads allow. Results are assembled in
/// trial order, so the report does not depend on scheduling. The first
/// failing trial stops the remaining work and its exception is rethrown.
inline AggregateReport run_experiment(const BenchConfig& config) {
  validate(config);
  const ScaleSpec scale = parse_scale(config.scale_descriptor, config.compression);

  std::size_t workers = config.threads;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, config.trials);

  std::vector<TrialResult> results(config.trials);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto work = [&] {
    while (!failed.load()) {
      const std::size_t index = next.fetch_add(1);
      if (index >= config.trials) return;
      try {
        results[index] = detail::run_trial(config, scale, index);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
  return aggregate(config, results);
}

// ---------------------------------------------------------------------------
// Report output
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& quantile_csv_columns() {
  static const std::vector<std::string> columns = {
      "q",        "axis",     "err_p5",   "err_p25",  "err_p50",  "err_p75",
      "err_p95",  "nerr_p5",  "nerr_p25", "nerr_p50", "nerr_p75", "nerr_p95"};
  return columns;
}

inline void write_quantile_csv(std::ostream& out, const AggregateReport& report) {
  const auto& columns = quantile_csv_columns();
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : report.per_quantile) {
    const double values[] = {row.q,
                             row.axis,
                             row.error.p5,
                             row.error.p25,
                             row.error.p50,
                             row.error.p75,
                             row.error.p95,
                             row.normalized_error.p5,
                             row.normalized_error.p25,
                             row.normalized_error.p50,
                             row.normalized_error.p75,
                             row.normalized_error.p95};
    for (std::size_t i = 0; i < std::size(values); ++i) {
      out << (i ? "," : "") << detail::format_number(values[i]);
    }
    out << '\n';
  }
}

inline void write_trials_csv(std::ostream& out, const AggregateReport& report) {
  out << "trial,centroid_count\n";
  for (std::size_t i = 0; i < report.centroid_counts.size(); ++i) {
    out << i << ',' << report.centroid_counts[i] << '\n';
  }
}

inline nlohmann::json to_json(const Percentiles& p) {
  return {{"p5", p.p5}, {"p25", p.p25}, {"p50", p.p50}, {"p75", p.p75}, {"p95", p.p95}};
}

inline nlohmann::json to_json(const BenchConfig& config) {
  nlohmann::json dist = {{"kind", config.distribution.name()}};
  if (config.distribution.kind == DistributionKind::Exponential) {
    dist["rate"] = config.distribution.rate;
  } else if (config.distribution.kind == DistributionKind::LogNormal) {
    dist["mu"] = config.distribution.mu;
    dist["sigma"] = config.distribution.sigma;
  }
  return {{"scale_descriptor", config.scale_descriptor},
          {"compression", config.compression},
          {"samples_per_trial", config.samples_per_trial},
          {"trials", config.trials},
          {"distribution", dist},
          {"probe_quantiles", config.probe_quantiles},
          {"base_seed", config.base_seed}};
}

/// JSON document: config echo, the per-quantile table (same field names as
/// the CSV) and the per-trial centroid counts.
inline nlohmann::json to_json(const AggregateReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.per_quantile) {
    rows.push_back({{"q", row.q},
                    {"axis", row.axis},
                    {"err_p5", row.error.p5},
                    {"err_p25", row.error.p25},
                    {"err_p50", row.error.p50},
                    {"err_p75", row.error.p75},
                    {"err_p95", row.error.p95},
                    {"nerr_p5", row.normalized_error.p5},
                    {"nerr_p25", row.normalized_error.p25},
                    {"nerr_p50", row.normalized_error.p50},
                    {"nerr_p75", row.normalized_error.p75},
                    {"nerr_p95", row.normalized_error.p95}});
  }
  nlohmann::json trials = nlohmann::json::array();
  for (std::size_t i = 0; i < report.centroid_counts.size(); ++i) {
    trials.push_back({{"trial", i}, {"centroid_count", report.centroid_counts[i]}});
  }
  return {{"config", to_json(report.config)},
          {"per_quantile", rows},
          {"trials", trials},
          {"mean_centroid_count", report.mean_centroid_count()}};
}

}  // namespace asymdigest
