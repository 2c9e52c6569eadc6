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

// Text descriptors for scale functions:
//
//   descriptor := "reflect(" descriptor ")" | leaf
//   leaf       := family { ":" modifier }
//   family     := "k0" | "k1" | "k2" | "k3" | "poly:n=" int ",b=" number
//   modifier   := "glued@" number | "raw"
//
// "raw" selects the unnormalized k2/k3 (Z(n) = 1). Matching is
// case-insensitive and ignores surrounding whitespace.

#pragma once

#include <cctype>
#include <charconv>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "asymdigest/decency.hpp"
#include "asymdigest/scale.hpp"

namespace asymdigest {

class descriptor_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline std::string lowercase_trimmed(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) {
    ++begin;
  }
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) {
    --end;
  }
  std::string out(text.substr(begin, end - begin));
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline double parse_decimal(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    throw descriptor_error("invalid " + std::string(what) + ": '" +
                           std::string(text) + "'");
  }
  return value;
}

inline std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

inline ScaleSpec parse_leaf(std::string_view text, double delta, bool validate) {
  const auto tokens = split(text, ':');
  std::size_t next = 1;
  std::optional<ScaleSpec> spec;
  bool raw = false;
  std::optional<double> glue;

  const std::string_view family = tokens[0];
  if (family == "poly") {
    if (tokens.size() < 2) throw descriptor_error("poly needs n=<int>,b=<num>");
    std::optional<int> degree;
    std::optional<double> b;
    for (auto param : split(tokens[1], ',')) {
      if (param.starts_with("n=")) {
        const double n = parse_decimal(param.substr(2), "polynomial degree");
        if (n != std::floor(n)) throw descriptor_error("degree must be an integer");
        degree = static_cast<int>(n);
      } else if (param.starts_with("b=")) {
        b = parse_decimal(param.substr(2), "polynomial coefficient");
      } else {
        throw descriptor_error("unknown poly parameter '" + std::string(param) + "'");
      }
    }
    if (!degree || !b) throw descriptor_error("poly needs both n= and b=");
    try {
      spec = validate ? make_polynomial(*degree, *b, delta)
                      : ScaleSpec::polynomial_unchecked(*degree, *b, delta);
    } catch (const std::invalid_argument& e) {
      throw descriptor_error(e.what());
    }
    next = 2;
  } else if (family != "k0" && family != "k1" && family != "k2" &&
             family != "k3") {
    throw descriptor_error("unknown scale family '" + std::string(family) + "'");
  }

  for (; next < tokens.size(); ++next) {
    const std::string_view mod = tokens[next];
    if (mod == "raw") {
      if (raw) throw descriptor_error("duplicate ':raw'");
      raw = true;
    } else if (mod.starts_with("glued@")) {
      if (glue) throw descriptor_error("duplicate ':glued@'");
      glue = parse_decimal(mod.substr(6), "glue point");
    } else {
      throw descriptor_error("unknown modifier '" + std::string(mod) + "'");
    }
  }

  const auto kind = raw ? NormalizerKind::Identity : NormalizerKind::Reference;
  if (family == "k0") spec = ScaleSpec::k0(delta);
  if (family == "k1") spec = ScaleSpec::k1(delta);
  if (family == "k2") spec = ScaleSpec::k2(delta, kind);
  if (family == "k3") spec = ScaleSpec::k3(delta, kind);
  if (raw && family != "k2" && family != "k3") {
    throw descriptor_error("':raw' only applies to k2 and k3");
  }

  if (glue) {
    try {
      return make_glued(*spec, *glue);
    } catch (const std::logic_error& e) {
      throw descriptor_error(e.what());
    }
  }
  return *spec;
}

inline ScaleSpec parse_descriptor(std::string_view text, double delta,
                                  bool validate) {
  constexpr std::string_view reflect_prefix = "reflect(";
  if (text.starts_with(reflect_prefix)) {
    if (!text.ends_with(')')) throw descriptor_error("unbalanced reflect(...)");
    const auto inner = text.substr(reflect_prefix.size(),
                                   text.size() - reflect_prefix.size() - 1);
    return reflect(parse_descriptor(inner, delta, validate));
  }
  if (text.empty()) throw descriptor_error("empty scale descriptor");
  return parse_leaf(text, delta, validate);
}

}  // namespace detail

/// Parses a descriptor such as "k2:glued@0.5" into a spec with compression
/// `delta`. With `validate` false, polynomials skip the decency threshold.
/// Throws descriptor_error on malformed input.
inline ScaleSpec parse_scale(std::string_view text, double delta = 100.0,
                             bool validate = true) {
  const std::string normalized = detail::lowercase_trimmed(text);
  try {
    return detail::parse_descriptor(normalized, delta, validate);
  } catch (const descriptor_error&) {
    throw;
  } catch (const std::exception& e) {
    throw descriptor_error(std::string(text) + ": " + e.what());
  }
}

}  // namespace asymdigest
