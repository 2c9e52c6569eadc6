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

// Oracles shared by the test binaries. Nothing here calls into the library's
// scale formulas; the closed forms are written out again from scratch.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace asymdigest::testing {

// Five-point central difference, O(h^4).
inline double central_slope(const std::function<double(double)>& f, double x, double h) {
  return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}

// Second-order one-sided differences at x.
inline double left_slope(const std::function<double(double)>& f, double x, double h) {
  return (3 * f(x) - 4 * f(x - h) + f(x - 2 * h)) / (2 * h);
}
inline double right_slope(const std::function<double(double)>& f, double x, double h) {
  return (-3 * f(x) + 4 * f(x + h) - f(x + 2 * h)) / (2 * h);
}

// Unnormalized closed forms.
inline double half_arcsine(double q) { return 0.5 * std::asin(2 * q - 1); }
inline double log_odds(double q) { return std::log(q / (1 - q)); }
inline double k3_form(double q) { return q <= 0.5 ? std::log(2 * q) : -std::log(2 * (1 - q)); }

// Tangent line of f at p, evaluated at q, with the slope from finite
// differences.
inline double tangent_oracle(const std::function<double(double)>& f, double p, double q) {
  const double h = 1e-4 * std::min(p, 1 - p);
  return f(p) + central_slope(f, p, h) * (q - p);
}

// Exact sorted-data quantile: the sample of rank floor(q N), clamped.
inline double sorted_quantile(const std::vector<double>& sorted, double q) {
  const auto n = sorted.size();
  auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(n)));
  return sorted[std::min(idx, n - 1)];
}

inline std::vector<double> uniform_samples(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& x : out) x = u(rng);
  return out;
}

inline std::vector<double> uniform_grid(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

}  // namespace asymdigest::testing
