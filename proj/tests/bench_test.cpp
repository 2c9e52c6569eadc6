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

#include "asymdigest/bench.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "test_support.hpp"

namespace asymdigest {
namespace {

BenchConfig small_config(const char* scale, std::size_t trials = 5) {
  BenchConfig c;
  c.scale_descriptor = scale;
  c.samples_per_trial = 20000;
  c.trials = trials;
  return c;
}

TEST(Error, ExactEstimateIsZero) {
  Digest d(100, ScaleSpec::k0(100));
  d.add(0.5);
  EXPECT_EQ(estimate_error(d, 0.5, [](double x) { return x; }), 0.0);
}

TEST(Error, ShiftedEstimate) {
  Digest d(100, ScaleSpec::k0(100));
  d.add(0.52);
  EXPECT_NEAR(estimate_error(d, 0.5, [](double x) { return x; }), 0.02, 1e-15);
}

TEST(Error, TailErrorOfLogOdds) {
  BenchConfig c;
  c.scale_descriptor = "k2";
  c.probe_quantiles = {0.999};
  const auto report = run_experiment(c);
  EXPECT_LE(report.per_quantile[0].error.p50, 1e-3);
}

TEST(NormalizedError, Examples) {
  EXPECT_DOUBLE_EQ(normalized_error(0.02, 0.5), 0.04);
  EXPECT_NEAR(normalized_error(0.001, 0.99), 0.1, 1e-12);
  EXPECT_EQ(normalized_error(0.0, 0.3), 0.0);
  EXPECT_THROW(normalized_error(0.1, 0.0), std::domain_error);
  EXPECT_THROW(normalized_error(0.1, 1.0), std::domain_error);
}

TEST(AxisTransform, Examples) {
  EXPECT_EQ(axis_transform(0.5), 0.0);
  EXPECT_DOUBLE_EQ(axis_transform(0.01), -2.0);
  EXPECT_NEAR(axis_transform(0.999), 3.0, 1e-12);
  EXPECT_NEAR(axis_transform(0.25), std::log10(0.25), 1e-15);
  EXPECT_THROW(axis_transform(0.0), std::domain_error);
  EXPECT_THROW(axis_transform(1.0), std::domain_error);
}

TEST(Distribution, Cdfs) {
  EXPECT_EQ(Distribution::uniform().cdf(-1), 0.0);
  EXPECT_EQ(Distribution::uniform().cdf(0.3), 0.3);
  EXPECT_EQ(Distribution::uniform().cdf(2), 1.0);
  EXPECT_NEAR(Distribution::exponential(2).cdf(1), 1 - std::exp(-2.0), 1e-15);
  EXPECT_NEAR(Distribution::lognormal(0, 1).cdf(1), 0.5, 1e-15);
}

TEST(SampleStream, MatchesDistributions) {
  // Sample means against the analytic means.
  for (const auto& dist : {Distribution::uniform(), Distribution::exponential(4),
                           Distribution::lognormal(0.5, 0.25)}) {
    SampleStream s(3);
    double sum = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) sum += s.next(dist);
    double mean = 0.5;
    if (dist.kind == DistributionKind::Exponential) mean = 0.25;
    if (dist.kind == DistributionKind::LogNormal) mean = std::exp(0.5 + 0.25 * 0.25 / 2);
    EXPECT_NEAR(sum / n, mean, 0.01 * mean) << dist.name();
  }
}

TEST(RunTrial, Deterministic) {
  const auto c = small_config("k2:glued@0.5");
  EXPECT_EQ(run_trial(c, 3), run_trial(c, 3));
}

TEST(RunTrial, SeedSeparation) {
  BenchConfig c = small_config("k0");
  SampleStream a(c.base_seed + 0);
  SampleStream b(c.base_seed + 1);
  bool differ = false;
  for (int i = 0; i < 10; ++i) differ |= a.uniform() != b.uniform();
  EXPECT_TRUE(differ);
  EXPECT_NE(run_trial(c, 0).errors, run_trial(c, 1).errors);
}

TEST(RunTrial, LinearCentroidBand) {
  BenchConfig c = small_config("k0");
  c.samples_per_trial = 100000;
  const auto t = run_trial(c, 0);
  EXPECT_GE(t.centroid_count, 25u);
  EXPECT_LE(t.centroid_count, 100u);
}

TEST(RunTrial, RejectsInvalidConfig) {
  BenchConfig c = small_config("k0");
  c.probe_quantiles = {0.5, 0.25};
  EXPECT_THROW(run_trial(c, 0), std::invalid_argument);
  c.probe_quantiles = {0.0};
  EXPECT_THROW(run_trial(c, 0), std::invalid_argument);
  c = small_config("bogus");
  EXPECT_THROW(run_trial(c, 0), std::invalid_argument);
  c = small_config("k0");
  c.compression = -5;
  EXPECT_THROW(run_trial(c, 0), std::invalid_argument);
}

TEST(Percentile, LinearInterpolation) {
  const std::vector<double> v = {4, 1, 3, 2, 5};
  EXPECT_EQ(percentile(v, 0.0), 1.0);
  EXPECT_EQ(percentile(v, 0.5), 3.0);
  EXPECT_EQ(percentile(v, 1.0), 5.0);
  EXPECT_DOUBLE_EQ(percentile(v, 0.05), 1.2);
  EXPECT_DOUBLE_EQ(percentile(v, 0.75), 4.0);
  EXPECT_THROW(percentile({}, 0.5), std::invalid_argument);
}

TEST(RunExperiment, SingleTrialCollapsesPercentiles) {
  const auto c = small_config("k1", 1);
  const auto report = run_experiment(c);
  const auto trial = run_trial(c, 0);
  ASSERT_EQ(report.per_quantile.size(), c.probe_quantiles.size());
  for (std::size_t i = 0; i < report.per_quantile.size(); ++i) {
    const auto& e = report.per_quantile[i].error;
    for (double v : {e.p5, e.p25, e.p50, e.p75, e.p95}) EXPECT_EQ(v, trial.errors[i]);
    EXPECT_EQ(report.per_quantile[i].normalized_error.p50, trial.normalized_errors[i]);
  }
}

TEST(RunExperiment, ThreadCountDoesNotMatter) {
  auto c = small_config("k3:glued@0.5", 7);
  c.threads = 1;
  const auto serial = run_experiment(c);
  c.threads = 4;
  const auto parallel = run_experiment(c);
  std::ostringstream a, b;
  write_quantile_csv(a, serial);
  write_quantile_csv(b, parallel);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(serial.centroid_counts, parallel.centroid_counts);
}

TEST(RunExperiment, PercentilesOrdered) {
  const auto report = run_experiment(small_config("k2", 9));
  for (const auto& row : report.per_quantile) {
    for (const auto* p : {&row.error, &row.normalized_error}) {
      EXPECT_LE(p->p5, p->p25);
      EXPECT_LE(p->p25, p->p50);
      EXPECT_LE(p->p50, p->p75);
      EXPECT_LE(p->p75, p->p95);
    }
    EXPECT_EQ(row.axis, axis_transform(row.q));
  }
  EXPECT_EQ(report.centroid_counts.size(), 9u);
}

TEST(RunExperiment, SymmetricScalesAreRoughlySymmetric) {
  for (const char* scale : {"k0", "k1", "k2"}) {
    BenchConfig c;
    c.scale_descriptor = scale;
    c.probe_quantiles = {0.01, 0.1, 0.25, 0.75, 0.9, 0.99};
    const auto r = run_experiment(c);
    for (std::size_t i = 0; i < 3; ++i) {
      const double lo = r.per_quantile[i].error.p50;
      const double hi = r.per_quantile[5 - i].error.p50;
      EXPECT_LE(std::max(lo, hi), 3 * std::min(lo, hi)) << scale << " q=" << r.per_quantile[i].q;
    }
  }
}

TEST(RunExperiment, GluedTailShape) {
  BenchConfig c;
  c.probe_quantiles = {0.9, 0.99, 0.999};
  for (const char* scale : {"k1:glued@0.5", "k2:glued@0.5", "k3:glued@0.5"}) {
    c.scale_descriptor = scale;
    const auto r = run_experiment(c);
    EXPECT_LE(r.per_quantile[2].normalized_error.p50, 1.0) << scale;
    EXPECT_LT(r.per_quantile[2].error.p50, r.per_quantile[0].error.p50) << scale;
  }
}

TEST(RunExperiment, CentroidOrdering) {
  for (int i = 1; i <= 3; ++i) {
    BenchConfig c;
    c.scale_descriptor = "k" + std::to_string(i);
    const double symmetric = run_experiment(c).mean_centroid_count();
    c.scale_descriptor += ":glued@0.5";
    EXPECT_LT(run_experiment(c).mean_centroid_count(), symmetric) << i;
  }
}

TEST(Report, CsvColumns) {
  const auto report = run_experiment(small_config("k0", 2));
  std::ostringstream csv;
  write_quantile_csv(csv, report);
  std::istringstream lines(csv.str());
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header,
            "q,axis,err_p5,err_p25,err_p50,err_p75,err_p95,nerr_p5,nerr_p25,nerr_p50,nerr_p75,"
            "nerr_p95");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  EXPECT_EQ(rows, 9);

  std::ostringstream trials;
  write_trials_csv(trials, report);
  EXPECT_EQ(trials.str().substr(0, 21), "trial,centroid_count\n");
}

TEST(Report, JsonEmbedsConfigAndTables) {
  auto c = small_config("k1:glued@0.5", 2);
  c.distribution = Distribution::exponential(2);
  const auto doc = to_json(run_experiment(c));
  EXPECT_EQ(doc["config"]["scale_descriptor"], "k1:glued@0.5");
  EXPECT_EQ(doc["config"]["base_seed"], 42);
  EXPECT_EQ(doc["config"]["distribution"]["rate"], 2.0);
  EXPECT_EQ(doc["per_quantile"].size(), 9u);
  EXPECT_TRUE(doc["per_quantile"][0].contains("nerr_p95"));
  EXPECT_EQ(doc["trials"].size(), 2u);
  EXPECT_TRUE(doc["trials"][1].contains("centroid_count"));
}

}  // namespace
}  // namespace asymdigest
