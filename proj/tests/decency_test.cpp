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

#include "asymdigest/decency.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "test_support.hpp"

namespace asymdigest {
namespace {

const std::vector<double> kAlphas = interior_grid(99);
const std::vector<double> kQs = closed_grid(999);

// Specs that should pass on the default grids.
std::vector<ScaleSpec> decent_specs() {
  std::vector<ScaleSpec> specs = {
      ScaleSpec::k0(100),
      ScaleSpec::k1(100),
      ScaleSpec::k2(100, NormalizerKind::Identity),
      ScaleSpec::k3(100, NormalizerKind::Identity),
      ScaleSpec::polynomial_unchecked(2, 2, 100),
  };
  for (double p : {0.25, 0.5, 0.75}) {
    specs.push_back(make_glued(ScaleSpec::k1(100), p));
    specs.push_back(make_glued(ScaleSpec::k2(100), p));
    specs.push_back(make_glued(ScaleSpec::k3(100), p));
  }
  return specs;
}

TEST(Grids, Shapes) {
  EXPECT_EQ(kAlphas.size(), 99u);
  EXPECT_DOUBLE_EQ(kAlphas.front(), 0.01);
  EXPECT_DOUBLE_EQ(kAlphas.back(), 0.99);
  EXPECT_EQ(kQs.front(), 0.0);
  EXPECT_EQ(kQs.back(), 1.0);
  EXPECT_THROW(closed_grid(1), std::invalid_argument);
}

TEST(CheckDecency, LinearPasses) {
  const auto report = check_decency(ScaleSpec::k0(100));
  EXPECT_TRUE(report.passed());
  EXPECT_EQ(report.alpha_grid.size(), 99u);
  EXPECT_EQ(report.q_grid.size(), 999u);
  EXPECT_EQ(report.tolerance, 1e-9);
}

TEST(CheckDecency, GluedLogOddsPasses) {
  EXPECT_TRUE(check_decency(make_glued(ScaleSpec::k2(100), 0.5)).passed());
}

TEST(CheckDecency, CatalogPasses) {
  for (const auto& spec : decent_specs()) {
    EXPECT_TRUE(check_decency(spec).passed()) << spec.descriptor();
  }
}

TEST(CheckDecency, BareQuadraticFailsNearZero) {
  const auto report = check_decency(ScaleSpec::polynomial_unchecked(2, 0, 2), kAlphas, kQs, 1e-9);
  ASSERT_FALSE(report.passed());
  bool found = false;
  for (const auto& v : report.violations) {
    EXPECT_GT(v.magnitude, 1e-9);
    if (v.branch == InsertSide::LeftInsert && std::abs(v.alpha - 0.5) < 1e-12 && v.q < 0.01) {
      found = true;
    }
  }
  EXPECT_TRUE(found);

  // Independent check at alpha = 1/2: g(q) = (1/2 + q/2)^2 - q^2, so
  // g'(q) = 1/2 - 3q/2 and g'(0) = 2 alpha (1 - alpha) > 0.
  auto g = [](double q) { return std::pow(0.5 + 0.5 * q, 2) - q * q; };
  EXPECT_NEAR(testing::central_slope(g, 0.01, 1e-4), 0.5 - 1.5 * 0.01, 1e-9);
  EXPECT_GT(g(0.001) - g(0.0), 0.0);
}

TEST(CheckDecency, HalfSlopeGlueFails) {
  const auto base = ScaleSpec::k2(1, NormalizerKind::Identity);
  const double p = 0.5;
  const double slope = derivative(base, p, 1);
  auto broken = [&](double q) {
    if (q <= p) return evaluate(base, p, 1) + 0.5 * slope * (q - p);
    return detail::evaluate_extended(base, q, 1);
  };
  const auto qs = testing::uniform_grid(1e-6, 1 - 1e-6, 999);
  EXPECT_FALSE(check_decency(broken, kAlphas, qs, 1e-9).passed());
}

TEST(CheckDecency, StepFunctionFails) {
  auto step = [](double q) { return q < 0.5 ? 0.0 : 1.0; };
  const auto report = check_decency(step, kAlphas, kQs, 1e-9);
  ASSERT_FALSE(report.passed());
  EXPECT_GE(report.violations.front().magnitude, 1.0 - 1e-12);
}

TEST(CheckDecency, ReportsBothBranches) {
  // q^2 fails on the left branch; its reflection fails on the right one.
  const auto quad = ScaleSpec::polynomial_unchecked(2, 0, 2);
  bool left = false;
  bool right = false;
  for (const auto& v : check_decency(reflect(quad), kAlphas, kQs, 1e-9).violations) {
    left |= v.branch == InsertSide::LeftInsert;
    right |= v.branch == InsertSide::RightInsert;
  }
  EXPECT_TRUE(right);
  EXPECT_FALSE(left);
}

TEST(CheckDecency, MaxViolationsStopsEarly) {
  const auto quad = ScaleSpec::polynomial_unchecked(2, 0, 2);
  EXPECT_EQ(check_decency(quad, kAlphas, kQs, 1e-9, 1e6, 1e-6, 3).violations.size(), 3u);
}

TEST(CheckDecency, RejectsBadGrids) {
  const std::vector<double> bad_alpha = {0.0, 0.5};
  const std::vector<double> unsorted = {0.5, 0.25};
  EXPECT_THROW(check_decency(ScaleSpec::k0(1), bad_alpha, kQs, 0), std::invalid_argument);
  EXPECT_THROW(check_decency(ScaleSpec::k0(1), kAlphas, unsorted, 0), std::invalid_argument);
  EXPECT_THROW(check_decency(ScaleSpec::k0(1), kAlphas, kQs, -1), std::invalid_argument);
}

TEST(Properties, ConvexCone) {
  const auto specs = decent_specs();
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> pick(0, specs.size() - 1);
  std::uniform_real_distribution<double> weight(0.01, 10.0);
  const auto qs = testing::uniform_grid(1e-6, 1 - 1e-6, 999);
  for (int trial = 0; trial < 12; ++trial) {
    const auto& a = specs[pick(rng)];
    const auto& b = specs[pick(rng)];
    const double wa = weight(rng);
    const double wb = weight(rng);
    auto sum = [&](double x, double cx) {
      return wa * detail::evaluate_pair(a, x, cx, 1e6) + wb * detail::evaluate_pair(b, x, cx, 1e6);
    };
    EXPECT_TRUE(check_decency(sum, kAlphas, qs, 1e-9).passed())
        << wa << " * " << a.descriptor() << " + " << wb << " * " << b.descriptor();
  }
}

TEST(Properties, ScaleInvariance) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> factor(0.1, 50.0);
  for (const auto& spec : decent_specs()) {
    const double tolerance = 1e-9;
    ASSERT_TRUE(check_decency(spec, kAlphas, kQs, tolerance).passed());
    for (int i = 0; i < 3; ++i) {
      const double c = factor(rng);
      const auto scaled = spec.with_delta(spec.delta() * c);
      EXPECT_TRUE(check_decency(scaled, kAlphas, kQs, tolerance * c).passed())
          << spec.descriptor() << " x " << c;
    }
  }
}

TEST(Properties, ReflectionClosure) {
  for (const auto& spec : decent_specs()) {
    EXPECT_TRUE(check_decency(reflect(spec)).passed()) << spec.descriptor();
  }
}

TEST(EstimateMinB, QuadraticAtMostTwo) {
  const double b = estimate_min_b(2);
  EXPECT_LE(b, 2.0);
  EXPECT_GT(b, 1.0);
  EXPECT_TRUE(check_decency(ScaleSpec::polynomial_unchecked(2, b, 100)).passed());
}

TEST(EstimateMinB, CubicIsFiniteAndPasses) {
  const double b = estimate_min_b(3);
  EXPECT_GT(b, 0.0);
  EXPECT_LE(b, 30.0);
  EXPECT_TRUE(check_decency(ScaleSpec::polynomial_unchecked(3, b, 100)).passed());
  // Just below the estimate the same grid finds a violation.
  EXPECT_FALSE(check_decency(ScaleSpec::polynomial_unchecked(3, 0.999 * b, 100)).passed());
}

TEST(EstimateMinB, FailsWhenCeilingTooLow) {
  EXPECT_THROW(estimate_min_b(3, 100, 0.1), std::runtime_error);
  EXPECT_THROW(estimate_min_b(1), std::invalid_argument);
}

TEST(MakePolynomial, UsesEstimatedThresholdAboveDegreeTwo) {
  const double b = estimate_min_b(4);
  EXPECT_NO_THROW(make_polynomial(4, b));
  EXPECT_THROW(make_polynomial(4, 0.9 * b), std::invalid_argument);
}

}  // namespace
}  // namespace asymdigest
