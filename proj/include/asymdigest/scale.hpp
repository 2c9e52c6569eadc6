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
// File: scale.hpp
// -----------------------------------------------------------------------------
//
// Scale functions for the t-digest. A scale function k maps quantile space
// [0, 1] to the reals; a cluster spanning quantiles [q_left, q_right] is
// admissible when its k-size k(q_right) - k(q_left) is at most 1.
//
// The catalog covers the four classic functions (k0 linear, k1 arcsine, k2
// log-odds, k3 log-tail), polynomials q^n + Bq, and two combinators:
//
//   * glued: the base function on (p, 1] and its tangent line at p on [0, p].
//     Accuracy is the base's near q = 1 and uniform (k0-like) below p.
//   * reflected: q -> C - k(1 - q), which moves the emphasis to the other tail.
//
// ScaleSpec values are immutable and cheap to copy; composite specs share
// their base through a shared_ptr to const.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace asymdigest {

/// Thrown when a scale function is evaluated where it diverges (k2 and k3 at
/// the endpoints of quantile space).
class divergence_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class ScaleFamily { K0, K1, K2, K3, Polynomial, Glued, Reflected };

/// How the k2/k3 normalizer Z(n) is computed.
enum class NormalizerKind {
  Reference,  // Z(n) = max(1, 4 ln(n / delta) + 24)
  Identity,   // Z(n) = 1, the "unnormalized" forms
  Custom,
};

using NormalizerFn = std::function<double(double sample_count, double delta)>;

/// Default Z(n). Non-decreasing in n; floored at 1 so that it stays positive
/// when n is much smaller than delta.
inline double reference_normalizer(double sample_count, double delta) {
  return std::max(1.0, 4.0 * std::log(sample_count / delta) + 24.0);
}

namespace detail {

inline std::string format_number(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

}  // namespace detail

class ScaleSpec {
 public:
  static ScaleSpec k0(double delta) { return leaf(ScaleFamily::K0, delta); }
  static ScaleSpec k1(double delta) { return leaf(ScaleFamily::K1, delta); }

  static ScaleSpec k2(double delta,
                      NormalizerKind kind = NormalizerKind::Reference) {
    return normalized(ScaleFamily::K2, delta, kind, nullptr);
  }
  static ScaleSpec k2(double delta, NormalizerFn custom) {
    return normalized(ScaleFamily::K2, delta, NormalizerKind::Custom,
                      std::move(custom));
  }
  static ScaleSpec k3(double delta,
                      NormalizerKind kind = NormalizerKind::Reference) {
    return normalized(ScaleFamily::K3, delta, kind, nullptr);
  }
  static ScaleSpec k3(double delta, NormalizerFn custom) {
    return normalized(ScaleFamily::K3, delta, NormalizerKind::Custom,
                      std::move(custom));
  }

  /// (delta / (2 (1 + B))) (q^n + Bq), without any decency check. Use
  /// make_polynomial() for the validated constructor.
  static ScaleSpec polynomial_unchecked(int degree, double b, double delta) {
    if (degree < 2) {
      throw std::invalid_argument("polynomial degree must be at least 2");
    }
    if (!std::isfinite(b) || b < 0.0) {
      throw std::invalid_argument("polynomial coefficient B must be >= 0");
    }
    ScaleSpec spec = leaf(ScaleFamily::Polynomial, delta);
    spec.poly_degree_ = degree;
    spec.poly_b_ = b;
    return spec;
  }

  ScaleFamily family() const { return family_; }

  /// Compression parameter. Composite specs report their base's value.
  double delta() const { return base_ ? base_->delta() : delta_; }

  std::optional<double> glue_point() const {
    if (family_ == ScaleFamily::Glued) return glue_point_;
    return std::nullopt;
  }
  const ScaleSpec* base() const { return base_.get(); }
  int poly_degree() const { return poly_degree_; }
  double poly_b() const { return poly_b_; }
  NormalizerKind normalizer_kind() const { return normalizer_kind_; }

  /// Z(n) for k2/k3 leaves; 1 for every other leaf.
  double normalizer(double sample_count) const {
    if (family_ != ScaleFamily::K2 && family_ != ScaleFamily::K3) return 1.0;
    switch (normalizer_kind_) {
      case NormalizerKind::Reference:
        return reference_normalizer(sample_count, delta_);
      case NormalizerKind::Identity:
        return 1.0;
      case NormalizerKind::Custom:
        return custom_normalizer_(sample_count, delta_);
    }
    return 1.0;
  }

  /// Same shape with a different compression parameter (applied to leaves).
  ScaleSpec with_delta(double delta) const {
    ScaleSpec copy = *this;
    if (base_) {
      copy.base_ = std::make_shared<const ScaleSpec>(base_->with_delta(delta));
    } else {
      check_delta(delta);
      copy.delta_ = delta;
    }
    return copy;
  }

  /// Canonical text form, e.g. "k2:glued@0.5" or "reflect(k1:glued@0.25)".
  /// Does not encode delta. Custom normalizers render as ":custom", which
  /// the descriptor parser rejects.
  std::string descriptor() const {
    switch (family_) {
      case ScaleFamily::K0:
        return "k0";
      case ScaleFamily::K1:
        return "k1";
      case ScaleFamily::K2:
        return "k2" + normalizer_suffix();
      case ScaleFamily::K3:
        return "k3" + normalizer_suffix();
      case ScaleFamily::Polynomial:
        return "poly:n=" + std::to_string(poly_degree_) +
               ",b=" + detail::format_number(poly_b_);
      case ScaleFamily::Glued:
        return base_->descriptor() + ":glued@" +
               detail::format_number(glue_point_);
      case ScaleFamily::Reflected:
        return "reflect(" + base_->descriptor() + ")";
    }
    return {};
  }

 private:
  friend ScaleSpec make_glued(const ScaleSpec& base, double p);
  friend ScaleSpec reflect(const ScaleSpec& spec);

  ScaleSpec() = default;

  static void check_delta(double delta) {
    if (!std::isfinite(delta) || delta <= 0.0) {
      throw std::invalid_argument("compression parameter must be positive");
    }
  }

  static ScaleSpec leaf(ScaleFamily family, double delta) {
    check_delta(delta);
    ScaleSpec spec;
    spec.family_ = family;
    spec.delta_ = delta;
    return spec;
  }

  static ScaleSpec normalized(ScaleFamily family, double delta,
                              NormalizerKind kind, NormalizerFn custom) {
    if (kind == NormalizerKind::Custom && !custom) {
      throw std::invalid_argument("custom normalizer requires a function");
    }
    ScaleSpec spec = leaf(family, delta);
    spec.normalizer_kind_ = kind;
    spec.custom_normalizer_ = std::move(custom);
    return spec;
  }

  std::string normalizer_suffix() const {
    switch (normalizer_kind_) {
      case NormalizerKind::Reference:
        return "";
      case NormalizerKind::Identity:
        return ":raw";
      case NormalizerKind::Custom:
        return ":custom";
    }
    return "";
  }

  ScaleFamily family_ = ScaleFamily::K0;
  double delta_ = 0.0;
  double glue_point_ = 0.0;
  std::shared_ptr<const ScaleSpec> base_;
  int poly_degree_ = 0;
  double poly_b_ = 0.0;
  NormalizerKind normalizer_kind_ = NormalizerKind::Reference;
  NormalizerFn custom_normalizer_;
};

namespace detail {

// Extended-real evaluation: returns +-inf where the function diverges instead
// of throwing. The digest's compression loop relies on this to keep the first
// and last samples as singletons under k2/k3.
//
// The *_pair forms take q together with its complement c = 1 - q, computed by
// the caller. Near q = 1 the caller can usually form c far more accurately
// than 1 - q (e.g. as (1 - alpha)(1 - q) or (N - w) / N), and the log and
// arcsine tails are evaluated from c directly.
double evaluate_pair(const ScaleSpec& spec, double q, double c, double sample_count);
double derivative_pair(const ScaleSpec& spec, double q, double c, double sample_count);

inline double coefficient(const ScaleSpec& spec, double sample_count) {
  const double delta = spec.delta();
  switch (spec.family()) {
    case ScaleFamily::K0:
      return delta / 2.0;
    case ScaleFamily::K1:
      return delta / std::numbers::pi;
    case ScaleFamily::K2:
    case ScaleFamily::K3:
      return delta / spec.normalizer(sample_count);
    case ScaleFamily::Polynomial:
      return delta / (2.0 * (1.0 + spec.poly_b()));
    default:
      return 1.0;
  }
}

// C such that q -> C - base(1 - q) keeps base's range when both endpoints are
// finite; otherwise the reflection is centred so that reflect(reflect(k)) = k.
inline double reflection_constant(const ScaleSpec& base, double sample_count) {
  const double lo = evaluate_pair(base, 0.0, 1.0, sample_count);
  const double hi = evaluate_pair(base, 1.0, 0.0, sample_count);
  if (std::isfinite(lo) && std::isfinite(hi)) return lo + hi;
  return 2.0 * evaluate_pair(base, 0.5, 0.5, sample_count);
}

inline double evaluate_pair(const ScaleSpec& spec, double q, double c,
                            double sample_count) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  constexpr double quarter_pi = std::numbers::pi / 4.0;
  switch (spec.family()) {
    case ScaleFamily::K0:
      return coefficient(spec, sample_count) * q;
    case ScaleFamily::K1:
      // (1/2) asin(2q - 1), written via asin(sqrt(.)) to keep precision at
      // both ends.
      if (q <= 0.5) {
        return coefficient(spec, sample_count) * (std::asin(std::sqrt(std::max(q, 0.0))) - quarter_pi);
      }
      return coefficient(spec, sample_count) * (quarter_pi - std::asin(std::sqrt(std::max(c, 0.0))));
    case ScaleFamily::K2:
      if (q <= 0.0) return -inf;
      if (c <= 0.0) return inf;
      return coefficient(spec, sample_count) * (std::log(q) - std::log(c));
    case ScaleFamily::K3:
      if (q <= 0.0) return -inf;
      if (c <= 0.0) return inf;
      if (q <= 0.5) return coefficient(spec, sample_count) * std::log(2.0 * q);
      return -coefficient(spec, sample_count) * std::log(2.0 * c);
    case ScaleFamily::Polynomial:
      return coefficient(spec, sample_count) *
             (std::pow(q, spec.poly_degree()) + spec.poly_b() * q);
    case ScaleFamily::Glued: {
      const ScaleSpec& base = *spec.base();
      const double p = *spec.glue_point();
      if (q > p) return evaluate_pair(base, q, c, sample_count);
      return derivative_pair(base, p, 1.0 - p, sample_count) * (q - p) +
             evaluate_pair(base, p, 1.0 - p, sample_count);
    }
    case ScaleFamily::Reflected: {
      const ScaleSpec& base = *spec.base();
      return reflection_constant(base, sample_count) -
             evaluate_pair(base, c, q, sample_count);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

inline double derivative_pair(const ScaleSpec& spec, double q, double c,
                              double sample_count) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (spec.family()) {
    case ScaleFamily::K0:
      return coefficient(spec, sample_count);
    case ScaleFamily::K1: {
      const double r = q * c;
      if (r <= 0.0) return inf;
      return coefficient(spec, sample_count) / (2.0 * std::sqrt(r));
    }
    case ScaleFamily::K2: {
      const double r = q * c;
      if (r <= 0.0) return inf;
      return coefficient(spec, sample_count) / r;
    }
    case ScaleFamily::K3:
      if (q <= 0.0 || c <= 0.0) return inf;
      if (q <= 0.5) return coefficient(spec, sample_count) / q;
      return coefficient(spec, sample_count) / c;
    case ScaleFamily::Polynomial: {
      const int n = spec.poly_degree();
      return coefficient(spec, sample_count) *
             (n * std::pow(q, n - 1) + spec.poly_b());
    }
    case ScaleFamily::Glued: {
      const double p = *spec.glue_point();
      if (q > p) return derivative_pair(*spec.base(), q, c, sample_count);
      return derivative_pair(*spec.base(), p, 1.0 - p, sample_count);
    }
    case ScaleFamily::Reflected:
      return derivative_pair(*spec.base(), c, q, sample_count);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

inline double evaluate_extended(const ScaleSpec& spec, double q, double sample_count) {
  return evaluate_pair(spec, q, 1.0 - q, sample_count);
}

inline double derivative_extended(const ScaleSpec& spec, double q, double sample_count) {
  return derivative_pair(spec, q, 1.0 - q, sample_count);
}

inline void check_query(double q, double sample_count) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::domain_error("quantile outside [0, 1]");
  }
  if (!(sample_count > 0.0)) {
    throw std::domain_error("sample count must be positive");
  }
}

}  // namespace detail

/// k(q) for the given spec. sample_count feeds the k2/k3 normalizer.
///
/// Throws std::domain_error when q is outside [0, 1] and divergence_error at
/// the endpoints where the function is unbounded.
inline double evaluate(const ScaleSpec& spec, double q, double sample_count) {
  detail::check_query(q, sample_count);
  const double value = detail::evaluate_extended(spec, q, sample_count);
  if (!std::isfinite(value)) {
    throw divergence_error("scale function " + spec.descriptor() +
                           " diverges at q = " + detail::format_number(q));
  }
  return value;
}

/// dk/dq. At a glue point this is the shared slope of both pieces.
inline double derivative(const ScaleSpec& spec, double q,
                         double sample_count) {
  detail::check_query(q, sample_count);
  const double slope = detail::derivative_extended(spec, q, sample_count);
  if (!std::isfinite(slope)) {
    throw std::domain_error("derivative of " + spec.descriptor() +
                            " diverges at q = " + detail::format_number(q));
  }
  return slope;
}

/// Tangent-line gluing: base on (p, 1], its tangent line at p on [0, p].
inline ScaleSpec make_glued(const ScaleSpec& base, double p) {
  switch (base.family()) {
    case ScaleFamily::K1:
    case ScaleFamily::K2:
    case ScaleFamily::K3:
    case ScaleFamily::Polynomial:
      break;
    default:
      throw std::invalid_argument("cannot glue over " + base.descriptor());
  }
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("glue point must lie in (0, 1)");
  }
  ScaleSpec spec;
  spec.family_ = ScaleFamily::Glued;
  spec.glue_point_ = p;
  spec.base_ = std::make_shared<const ScaleSpec>(base);
  return spec;
}

/// q -> C - spec(1 - q). Reflecting twice gives back the original spec.
inline ScaleSpec reflect(const ScaleSpec& spec) {
  if (spec.family() == ScaleFamily::Reflected) return *spec.base();
  ScaleSpec out;
  out.family_ = ScaleFamily::Reflected;
  out.base_ = std::make_shared<const ScaleSpec>(spec);
  return out;
}

/// True when every point of `spec` is finite on [0, 1].
inline bool finite_on_closed_interval(const ScaleSpec& spec,
                                      double sample_count = 1.0) {
  return std::isfinite(detail::evaluate_extended(spec, 0.0, sample_count)) &&
         std::isfinite(detail::evaluate_extended(spec, 1.0, sample_count));
}

inline bool same_scale(const ScaleSpec& a, const ScaleSpec& b) {
  return a.delta() == b.delta() && a.descriptor() == b.descriptor();
}

}  // namespace asymdigest
