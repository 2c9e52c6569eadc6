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
// File: decency.hpp
// -----------------------------------------------------------------------------
//
// Grid-based check that a scale function keeps every cluster's k-size bounded
// when samples are inserted, for all positive multiples of the function.
//
// Inserting a fraction alpha of new weight to the left of a cluster maps its
// quantile span [q1, q2] to [alpha + (1 - alpha) q1, alpha + (1 - alpha) q2];
// inserting to the right maps it to [(1 - alpha) q1, (1 - alpha) q2]. The
// function is decent exactly when, for every alpha, both
//
//   g(q) = k(alpha + (1 - alpha) q) - k(q)
//   h(q) = k((1 - alpha) q) - k(q)
//
// are non-increasing on [0, 1]. The checker tests this on a finite grid, so an
// empty report is a certificate for that grid only.

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "asymdigest/scale.hpp"

namespace asymdigest {

enum class InsertSide { LeftInsert, RightInsert };

inline const char* to_string(InsertSide side) {
  return side == InsertSide::LeftInsert ? "LeftInsert" : "RightInsert";
}

struct Violation {
  double alpha = 0.0;
  double q = 0.0;  // left end of the grid step where the increase was seen
  InsertSide branch = InsertSide::LeftInsert;
  double magnitude = 0.0;
};

struct DecencyReport {
  std::vector<Violation> violations;
  std::vector<double> alpha_grid;
  std::vector<double> q_grid;
  double tolerance = 0.0;

  bool passed() const { return violations.empty(); }
};

/// `count` points i / (count + 1), i = 1..count, strictly inside (0, 1).
inline std::vector<double> interior_grid(std::size_t count) {
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = static_cast<double>(i + 1) / static_cast<double>(count + 1);
  }
  return grid;
}

/// `count` evenly spaced points covering [0, 1], both ends included.
inline std::vector<double> closed_grid(std::size_t count) {
  if (count < 2) throw std::invalid_argument("closed grid needs >= 2 points");
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return grid;
}

struct DecencyOptions {
  std::size_t alpha_count = 99;
  std::size_t q_count = 999;
  double tolerance = 1e-9;
  // q is clipped to [clip, 1 - clip] for functions that diverge at an end.
  double endpoint_clip = 1e-6;
  // Only affects k2/k3 normalization, which is a positive constant per n.
  double sample_count = 1e6;
  // Stop after this many violations; the search in estimate_min_b only
  // needs to know whether there is one.
  std::size_t max_violations = std::numeric_limits<std::size_t>::max();
};

namespace detail {

inline void check_grids(std::span<const double> alpha_grid,
                        std::span<const double> q_grid) {
  for (double a : alpha_grid) {
    if (!(a > 0.0 && a < 1.0)) {
      throw std::invalid_argument("alpha grid values must lie in (0, 1)");
    }
  }
  for (std::size_t i = 0; i < q_grid.size(); ++i) {
    if (!(q_grid[i] >= 0.0 && q_grid[i] <= 1.0)) {
      throw std::invalid_argument("q grid values must lie in [0, 1]");
    }
    if (i > 0 && !(q_grid[i] > q_grid[i - 1])) {
      throw std::invalid_argument("q grid must be strictly increasing");
    }
  }
}

// `k(x, cx)` evaluates the scale function at x, with cx = 1 - x supplied
// separately so that callers which know the complement exactly can pass it.
//
// The comparison is done as k(a2) - k(a1) versus k(q2) - k(q1) rather than
// by differencing g and h, which keeps rounding away from near-zero slopes.
template <typename PairFn>
DecencyReport check_decency_pairs(PairFn&& k, std::span<const double> alpha_grid,
                                  std::span<const double> q_grid, double tolerance,
                                  std::size_t max_violations) {
  check_grids(alpha_grid, q_grid);
  if (!(tolerance >= 0.0)) {
    throw std::invalid_argument("tolerance must be non-negative");
  }

  DecencyReport report;
  report.alpha_grid.assign(alpha_grid.begin(), alpha_grid.end());
  report.q_grid.assign(q_grid.begin(), q_grid.end());
  report.tolerance = tolerance;

  const std::size_t m = q_grid.size();
  if (m < 2) return report;

  std::vector<double> k_at_q(m);
  for (std::size_t i = 0; i < m; ++i) k_at_q[i] = k(q_grid[i], 1.0 - q_grid[i]);

  std::vector<double> k_left(m);
  std::vector<double> k_right(m);
  for (double alpha : alpha_grid) {
    const double keep = 1.0 - alpha;
    for (std::size_t i = 0; i < m; ++i) {
      const double q = q_grid[i];
      const double c = 1.0 - q;
      // Left insert: alpha + (1 - alpha) q, complement (1 - alpha)(1 - q).
      k_left[i] = k(alpha + keep * q, keep * c);
      // Right insert: (1 - alpha) q, complement alpha + (1 - alpha)(1 - q).
      k_right[i] = k(keep * q, alpha + keep * c);
    }
    for (std::size_t i = 0; i + 1 < m; ++i) {
      const double before = k_at_q[i + 1] - k_at_q[i];
      const double left_increase = (k_left[i + 1] - k_left[i]) - before;
      if (left_increase > tolerance) {
        report.violations.push_back({alpha, q_grid[i], InsertSide::LeftInsert, left_increase});
      }
      const double right_increase = (k_right[i + 1] - k_right[i]) - before;
      if (right_increase > tolerance) {
        report.violations.push_back({alpha, q_grid[i], InsertSide::RightInsert, right_increase});
      }
      if (report.violations.size() >= max_violations) return report;
    }
  }
  return report;
}

}  // namespace detail

/// Checks the monotonicity conditions for an arbitrary scale function
/// `k : [0, 1] -> R`. Works for functions outside the ScaleSpec catalog, e.g.
/// sums of specs or deliberately broken fixtures.
template <typename ScaleFn>
  requires std::invocable<ScaleFn&, double>
DecencyReport check_decency(
    ScaleFn&& k, std::span<const double> alpha_grid,
    std::span<const double> q_grid, double tolerance,
    std::size_t max_violations = std::numeric_limits<std::size_t>::max()) {
  return detail::check_decency_pairs([&](double x, double) { return k(x); }, alpha_grid,
                                     q_grid, tolerance, max_violations);
}

/// Same check for a function of (q, 1 - q), for callers that can evaluate
/// accurately from the complement near q = 1 (e.g. sums of log-based specs).
template <typename PairFn>
  requires(std::invocable<PairFn&, double, double> && !std::invocable<PairFn&, double>)
DecencyReport check_decency(
    PairFn&& k, std::span<const double> alpha_grid,
    std::span<const double> q_grid, double tolerance,
    std::size_t max_violations = std::numeric_limits<std::size_t>::max()) {
  return detail::check_decency_pairs(k, alpha_grid, q_grid, tolerance, max_violations);
}

/// Checks a catalog spec. Where the spec diverges at an endpoint the q grid
/// is clipped to [clip, 1 - clip] first.
inline DecencyReport check_decency(
    const ScaleSpec& spec, std::span<const double> alpha_grid,
    std::span<const double> q_grid, double tolerance,
    double sample_count = 1e6, double endpoint_clip = 1e-6,
    std::size_t max_violations = std::numeric_limits<std::size_t>::max()) {
  std::vector<double> clipped(q_grid.begin(), q_grid.end());
  const bool low_diverges = !std::isfinite(detail::evaluate_pair(spec, 0.0, 1.0, sample_count));
  const bool high_diverges = !std::isfinite(detail::evaluate_pair(spec, 1.0, 0.0, sample_count));
  if (low_diverges || high_diverges) {
    const double lo = low_diverges ? endpoint_clip : 0.0;
    const double hi = high_diverges ? 1.0 - endpoint_clip : 1.0;
    std::vector<double> kept;
    kept.reserve(clipped.size());
    for (double q : clipped) {
      const double c = std::clamp(q, lo, hi);
      if (kept.empty() || c > kept.back()) kept.push_back(c);
    }
    clipped = std::move(kept);
  }
  auto k = [&](double x, double cx) { return detail::evaluate_pair(spec, x, cx, sample_count); };
  return detail::check_decency_pairs(k, alpha_grid, std::span<const double>(clipped), tolerance,
                                     max_violations);
}

inline DecencyReport check_decency(const ScaleSpec& spec,
                                   const DecencyOptions& options = {}) {
  const auto alphas = interior_grid(options.alpha_count);
  const auto qs = closed_grid(options.q_count);
  return check_decency(spec, alphas, qs, options.tolerance,
                       options.sample_count, options.endpoint_clip,
                       options.max_violations);
}

/// Smallest B (to bisection precision) for which q^n + Bq passes the grid
/// check. The grid uses `grid_resolution - 1` alpha values and
/// `10 * grid_resolution - 1` q values, so the default of 100 matches the
/// default DecencyOptions grids.
///
/// Passing is monotone in B: the linear term only subtracts B * alpha * dq
/// from every increment of g and h. Throws std::runtime_error if no B up to
/// `ceiling` (default 10 n) passes.
inline double estimate_min_b(int degree, int grid_resolution = 100,
                             double ceiling = 0.0) {
  if (degree < 2) throw std::invalid_argument("degree must be at least 2");
  if (grid_resolution < 2) {
    throw std::invalid_argument("grid resolution must be at least 2");
  }
  if (ceiling <= 0.0) ceiling = 10.0 * degree;

  const auto alphas = interior_grid(static_cast<std::size_t>(grid_resolution) - 1);
  const auto qs = closed_grid(10 * static_cast<std::size_t>(grid_resolution) - 1);
  auto passes = [&](double b) {
    // Unit coefficient: decency is a property of the ray, not the scale.
    // Zero tolerance so the answer stays on the passing side once the
    // function is scaled up by a larger delta.
    const auto spec =
        ScaleSpec::polynomial_unchecked(degree, b, 2.0 * (1.0 + b));
    return check_decency(spec, alphas, qs, 0.0, 1.0, 0.0, 1).passed();
  };

  if (!passes(ceiling)) {
    throw std::runtime_error("no B <= " + detail::format_number(ceiling) +
                             " makes q^" + std::to_string(degree) +
                             " + Bq pass the decency grid");
  }
  if (passes(0.0)) return 0.0;

  double lo = 0.0;
  double hi = ceiling;
  while (hi - lo > 1e-9 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (passes(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

/// Validated polynomial scale function (delta / (2 (1 + B))) (q^n + Bq).
/// For n = 2 the threshold is the exact B >= 2; for larger n it is the grid
/// estimate from estimate_min_b().
inline ScaleSpec make_polynomial(int degree, double b, double delta = 100.0) {
  if (degree < 2) throw std::invalid_argument("degree must be at least 2");
  const double threshold = degree == 2 ? 2.0 : estimate_min_b(degree);
  if (!(b >= threshold)) {
    throw std::invalid_argument(
        "B = " + detail::format_number(b) + " is below the decency threshold " +
        detail::format_number(threshold) + " for degree " +
        std::to_string(degree));
  }
  return ScaleSpec::polynomial_unchecked(degree, b, delta);
}

}  // namespace asymdigest
