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
// File: digest.hpp
// -----------------------------------------------------------------------------
//
// Merging t-digest. Insertions go to an unsorted buffer; compress() sorts the
// buffer into the centroid list and greedily merges neighbours while the
// merged cluster's k-size k(q_right) - k(q_left) stays at most 1.
//
// The k-size test is applied directly to the scale function (no precomputed
// size bound), so any ScaleSpec works, including the asymmetric glued and
// reflected ones.
//
// Example:
//
//   asymdigest::Digest digest(100, asymdigest::parse_scale("k2:glued@0.5"));
//   for (double latency : latencies) digest.add(latency);
//   digest.compress();
//   double p99 = digest.quantile(0.99);

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "asymdigest/scale.hpp"

namespace asymdigest {

struct Centroid {
  double mean = 0.0;
  double weight = 0.0;

  friend bool operator==(const Centroid&, const Centroid&) = default;
};

/// Thrown by queries on a digest that has seen no data.
class empty_digest_error : public std::logic_error {
 public:
  empty_digest_error() : std::logic_error("digest is empty") {}
};

/// Tolerance applied by validate_ksize().
inline constexpr double kKSizeSlack = 1e-6;

class Digest {
 public:
  /// The scale is rebound to `compression` so the two always agree.
  Digest(double compression, const ScaleSpec& scale,
         bool alternating_sort = false)
      : compression_(checked_compression(compression)),
        scale_(scale.with_delta(compression)),
        alternating_sort_(alternating_sort) {}

  /// Builds a digest directly from a centroid list, e.g. when deserializing.
  /// `total_weight` defaults to the sum of the centroid weights.
  static Digest from_centroids(double compression, const ScaleSpec& scale,
                               std::vector<Centroid> centroids,
                               double min_value, double max_value,
                               std::optional<double> total_weight = {},
                               bool alternating_sort = false) {
    Digest digest(compression, scale, alternating_sort);
    double sum = 0.0;
    for (std::size_t i = 0; i < centroids.size(); ++i) {
      const Centroid& c = centroids[i];
      if (!std::isfinite(c.mean) || !std::isfinite(c.weight) || c.weight <= 0.0) {
        throw std::invalid_argument("centroid needs a finite mean and positive weight");
      }
      if (i > 0 && c.mean < centroids[i - 1].mean) {
        throw std::invalid_argument("centroids must be sorted by mean");
      }
      sum += c.weight;
    }
    if (!centroids.empty() &&
        !(min_value <= centroids.front().mean && centroids.back().mean <= max_value)) {
      throw std::invalid_argument("min/max must bracket the centroid means");
    }
    digest.centroids_ = std::move(centroids);
    if (!digest.centroids_.empty()) {
      digest.min_ = min_value;
      digest.max_ = max_value;
    }
    digest.total_weight_ = total_weight.value_or(sum);
    return digest;
  }

  void add(double value, double weight = 1.0) {
    if (!std::isfinite(value)) {
      throw std::invalid_argument("cannot add a non-finite value");
    }
    if (!std::isfinite(weight) || weight <= 0.0) {
      throw std::invalid_argument("weight must be positive and finite");
    }
    buffer_.push_back({value, weight});
    min_ = std::min(min_, value);
    max_ = std::max(max_, value);
    total_weight_ += weight;
    if (buffer_.size() >= buffer_capacity()) compress();
  }

  /// Folds the buffer into the centroid list. A no-op when nothing is
  /// buffered.
  void compress() {
    if (buffer_.empty()) return;
    std::stable_sort(buffer_.begin(), buffer_.end(), by_mean);
    std::vector<Centroid> items;
    items.reserve(centroids_.size() + buffer_.size());
    // std::merge is stable: on equal means, existing centroids come first.
    std::merge(centroids_.begin(), centroids_.end(), buffer_.begin(),
               buffer_.end(), std::back_inserter(items), by_mean);
    buffer_.clear();

    const bool reverse = alternating_sort_ && (merge_passes_ % 2 == 1);
    ++merge_passes_;
    if (reverse) std::reverse(items.begin(), items.end());
    centroids_ = merge_pass(items, reverse);
    if (reverse) std::reverse(centroids_.begin(), centroids_.end());
  }

  /// Estimated value at quantile q. quantile(0) and quantile(1) are the exact
  /// extremes. Between centroids the estimate interpolates linearly, with
  /// each centroid's weight split evenly around its mean; weight-1 centroids
  /// are exact points.
  double quantile(double q) const {
    if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("quantile outside [0, 1]");
    if (!buffer_.empty()) return flushed().quantile(q);
    if (centroids_.empty()) throw empty_digest_error();

    const auto knots = interpolation_knots();
    const double index = q * knots.back().position;
    auto upper = std::upper_bound(
        knots.begin(), knots.end(), index,
        [](double value, const Knot& k) { return value < k.position; });
    if (upper == knots.end()) return knots.back().value;
    const Knot& hi = *upper;
    const Knot& lo = *std::prev(upper);
    const double t = (index - lo.position) / (hi.position - lo.position);
    return std::clamp(lo.value + t * (hi.value - lo.value), lo.value, hi.value);
  }

  /// Estimated fraction of the weight at or below x. Point masses count half
  /// their weight at their own location.
  double cdf(double x) const {
    if (std::isnan(x)) throw std::domain_error("cdf of NaN");
    if (!buffer_.empty()) return flushed().cdf(x);
    if (centroids_.empty()) throw empty_digest_error();
    if (x < min_) return 0.0;
    if (x > max_) return 1.0;

    const auto knots = interpolation_knots();
    const double total = knots.back().position;
    auto first = std::lower_bound(
        knots.begin(), knots.end(), x,
        [](const Knot& k, double value) { return k.value < value; });
    auto last = std::upper_bound(
        first, knots.end(), x,
        [](double value, const Knot& k) { return value < k.value; });
    double position;
    if (first != last) {
      position = 0.5 * (first->position + std::prev(last)->position);
    } else {
      const Knot& hi = *first;
      const Knot& lo = *std::prev(first);
      position = lo.position +
                 (hi.position - lo.position) * (x - lo.value) / (hi.value - lo.value);
    }
    return std::clamp(position / total, 0.0, 1.0);
  }

  /// Indices of clusters with weight > 1 whose k-size exceeds 1 + 1e-6.
  /// Clusters sitting exactly at the minimum or maximum are point masses and
  /// carry no interpolation error, so they are exempt.
  std::vector<std::size_t> validate_ksize() const {
    if (!buffer_.empty()) return flushed().validate_ksize();
    std::vector<std::size_t> bad;
    const double total = centroid_weight();
    double before = 0.0;
    for (std::size_t i = 0; i < centroids_.size(); ++i) {
      const Centroid& c = centroids_[i];
      const double after = std::min(total, before + c.weight);
      const double size = ksize(before, after, total);
      before += c.weight;
      if (c.weight <= 1.0 || is_point_mass(c.mean)) continue;
      if (!(size <= 1.0 + kKSizeSlack)) bad.push_back(i);
    }
    return bad;
  }

  std::size_t centroid_count() const {
    if (!buffer_.empty()) return flushed().centroid_count();
    return centroids_.size();
  }

  std::span<const Centroid> centroids() const { return centroids_; }
  std::size_t buffered() const { return buffer_.size(); }
  bool empty() const { return total_weight_ == 0.0; }
  double total_weight() const { return total_weight_; }
  double compression() const { return compression_; }
  const ScaleSpec& scale() const { return scale_; }
  bool alternating_sort() const { return alternating_sort_; }
  double min() const { return min_; }
  double max() const { return max_; }

  /// Buffer size that triggers an automatic compress: ten times the larger
  /// of delta and the current centroid count.
  std::size_t buffer_capacity() const {
    const auto expected = std::max(static_cast<std::size_t>(std::ceil(compression_)),
                                   centroids_.size());
    return 10 * expected;
  }

  friend Digest merge(const Digest& a, const Digest& b);

 private:
  struct Knot {
    double position;  // cumulative weight
    double value;
  };

  static bool by_mean(const Centroid& a, const Centroid& b) {
    return a.mean < b.mean;
  }

  static double checked_compression(double compression) {
    if (!std::isfinite(compression) || compression <= 0.0) {
      throw std::invalid_argument("compression must be positive");
    }
    return compression;
  }

  bool is_point_mass(double mean) const { return mean == min_ || mean == max_; }

  // k-size of the cluster spanning cumulative weights [before, after].
  double ksize(double before, double after, double total) const {
    return detail::evaluate_pair(scale_, after / total, (total - after) / total, total) -
           detail::evaluate_pair(scale_, before / total, (total - before) / total, total);
  }

  double centroid_weight() const {
    double sum = 0.0;
    for (const auto& c : centroids_) sum += c.weight;
    return sum;
  }

  Digest flushed() const {
    Digest copy = *this;
    copy.compress();
    return copy;
  }

  // One greedy pass over `items`, sorted in processing order. In a reverse
  // pass quantiles are measured from the right, so k is applied as
  // x -> -k(1 - x), which is again non-decreasing in x.
  std::vector<Centroid> merge_pass(const std::vector<Centroid>& items,
                                   bool reverse) const {
    std::vector<Centroid> out;
    if (items.empty()) return out;
    double total = 0.0;
    for (const auto& c : items) total += c.weight;

    // k at cumulative weight w (counted in processing order).
    auto k = [&](double w) {
      w = std::min(w, total);
      const double x = w / total;
      const double cx = (total - w) / total;
      return reverse ? -detail::evaluate_pair(scale_, cx, x, total)
                     : detail::evaluate_pair(scale_, x, cx, total);
    };

    Centroid current = items.front();
    double before = 0.0;
    double k_left = k(0.0);

    for (std::size_t i = 1; i < items.size(); ++i) {
      const Centroid& next = items[i];
      const double merged_weight = current.weight + next.weight;
      const bool tied_extreme =
          next.mean == current.mean && is_point_mass(current.mean);
      if (tied_extreme || k(before + merged_weight) - k_left <= 1.0) {
        const double mean =
            current.mean + (next.mean - current.mean) * (next.weight / merged_weight);
        current.mean = std::clamp(mean, std::min(current.mean, next.mean),
                                  std::max(current.mean, next.mean));
        current.weight = merged_weight;
      } else {
        out.push_back(current);
        before += current.weight;
        k_left = k(before);
        current = next;
      }
    }
    out.push_back(current);
    return out;
  }

  // Piecewise-linear map from cumulative weight to value. Extra knots pin the
  // extremes: the first and last samples are exact, as is every weight-1
  // centroid.
  std::vector<Knot> interpolation_knots() const {
    std::vector<Knot> knots;
    knots.reserve(2 * centroids_.size() + 4);
    knots.push_back({0.0, min_});
    double before = 0.0;
    const std::size_t last = centroids_.size() - 1;
    for (std::size_t i = 0; i < centroids_.size(); ++i) {
      const Centroid& c = centroids_[i];
      if (c.weight == 1.0) {
        knots.push_back({before, c.mean});
        knots.push_back({before + 1.0, c.mean});
      } else {
        if (i == 0 && c.weight >= 2.0 && min_ < c.mean) knots.push_back({1.0, min_});
        knots.push_back({before + c.weight / 2.0, c.mean});
        if (i == last && c.weight >= 2.0 && c.mean < max_) {
          knots.push_back({before + c.weight - 1.0, max_});
        }
      }
      before += c.weight;
    }
    knots.push_back({before, max_});
    return knots;
  }

  double compression_;
  ScaleSpec scale_;
  bool alternating_sort_;
  std::vector<Centroid> centroids_;
  std::vector<Centroid> buffer_;
  double total_weight_ = 0.0;
  double min_ = std::numeric_limits<double>::infinity();
  double max_ = -std::numeric_limits<double>::infinity();
  std::size_t merge_passes_ = 0;
};

/// Union of two digests. Both must share compression and scale descriptor.
inline Digest merge(const Digest& a, const Digest& b) {
  if (a.compression_ != b.compression_ || !same_scale(a.scale_, b.scale_)) {
    throw std::invalid_argument("cannot merge digests with different compression or scale");
  }
  Digest out = a;
  out.buffer_.insert(out.buffer_.end(), b.centroids_.begin(), b.centroids_.end());
  out.buffer_.insert(out.buffer_.end(), b.buffer_.begin(), b.buffer_.end());
  out.min_ = std::min(a.min_, b.min_);
  out.max_ = std::max(a.max_, b.max_);
  out.total_weight_ = a.total_weight_ + b.total_weight_;
  out.compress();
  return out;
}

}  // namespace asymdigest
