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
// File: serialize.hpp
// -----------------------------------------------------------------------------
//
// Flat digest record, binary or JSON. Binary layout, every field a 64-bit
// IEEE double in little-endian byte order:
//
//   format_version
//   compression
//   scale length in bytes, followed by that many bytes of descriptor text
//   total_weight
//   min
//   max
//   centroid_count
//   centroid_count x (mean, weight), ascending by mean
//
// The JSON form uses the same field names, with "scale" holding the
// descriptor and "centroids" an array of {"mean", "weight"} objects. An empty
// digest stores min/max as null in JSON.
//
// Buffered samples are compressed before writing. Custom normalizers have no
// descriptor and cannot be serialized.

#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "asymdigest/descriptor.hpp"
#include "asymdigest/digest.hpp"

namespace asymdigest {

inline constexpr double kFormatVersion = 1.0;

class format_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void put_f64(std::vector<std::uint8_t>& out, double value) {
  const auto bits = std::bit_cast<std::uint64_t>(value);
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
}

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  double f64() {
    need(8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) {
      bits |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    }
    pos_ += 8;
    return std::bit_cast<double>(bits);
  }

  std::size_t count(const char* what) {
    const double value = f64();
    if (!(value >= 0.0 && value <= 9007199254740992.0) || value != std::floor(value)) {
      throw format_error(std::string("bad ") + what);
    }
    return static_cast<std::size_t>(value);
  }

  std::string text(std::size_t length) {
    need(length);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), length);
    pos_ += length;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw format_error("truncated digest record");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

inline std::string serializable_descriptor(const Digest& digest) {
  std::string text = digest.scale().descriptor();
  if (text.find("custom") != std::string::npos) {
    throw format_error("digests with a custom normalizer cannot be serialized");
  }
  return text;
}

inline Digest rebuild(double version, double compression, const std::string& scale,
                      double total_weight, double min_value, double max_value,
                      std::vector<Centroid> centroids) {
  if (version != kFormatVersion) {
    throw format_error("unsupported format version " + format_number(version));
  }
  try {
    return Digest::from_centroids(compression, parse_scale(scale, compression, false),
                                  std::move(centroids), min_value, max_value,
                                  total_weight);
  } catch (const std::invalid_argument& e) {
    throw format_error(e.what());
  }
}

}  // namespace detail

inline std::vector<std::uint8_t> to_binary(const Digest& input) {
  Digest digest = input;
  digest.compress();
  const std::string scale = detail::serializable_descriptor(digest);
  std::vector<std::uint8_t> out;
  out.reserve(64 + scale.size() + 16 * digest.centroid_count());
  detail::put_f64(out, kFormatVersion);
  detail::put_f64(out, digest.compression());
  detail::put_f64(out, static_cast<double>(scale.size()));
  out.insert(out.end(), scale.begin(), scale.end());
  detail::put_f64(out, digest.total_weight());
  detail::put_f64(out, digest.min());
  detail::put_f64(out, digest.max());
  detail::put_f64(out, static_cast<double>(digest.centroid_count()));
  for (const Centroid& c : digest.centroids()) {
    detail::put_f64(out, c.mean);
    detail::put_f64(out, c.weight);
  }
  return out;
}

inline Digest from_binary(std::span<const std::uint8_t> bytes) {
  detail::ByteReader in(bytes);
  const double version = in.f64();
  const double compression = in.f64();
  const std::string scale = in.text(in.count("descriptor length"));
  const double total_weight = in.f64();
  const double min_value = in.f64();
  const double max_value = in.f64();
  const std::size_t count = in.count("centroid count");
  if (count > bytes.size() / 16) throw format_error("truncated digest record");
  std::vector<Centroid> centroids(count);
  for (auto& c : centroids) {
    c.mean = in.f64();
    c.weight = in.f64();
  }
  if (!in.done()) throw format_error("trailing bytes after digest record");
  return detail::rebuild(version, compression, scale, total_weight, min_value,
                         max_value, std::move(centroids));
}

inline nlohmann::json to_json(const Digest& input) {
  Digest digest = input;
  digest.compress();
  nlohmann::json doc;
  doc["format_version"] = kFormatVersion;
  doc["compression"] = digest.compression();
  doc["scale"] = detail::serializable_descriptor(digest);
  doc["total_weight"] = digest.total_weight();
  if (digest.centroid_count() == 0) {
    doc["min"] = nullptr;
    doc["max"] = nullptr;
  } else {
    doc["min"] = digest.min();
    doc["max"] = digest.max();
  }
  doc["centroid_count"] = digest.centroid_count();
  auto& list = doc["centroids"] = nlohmann::json::array();
  for (const Centroid& c : digest.centroids()) {
    list.push_back({{"mean", c.mean}, {"weight", c.weight}});
  }
  return doc;
}

inline Digest digest_from_json(const nlohmann::json& doc) {
  try {
    std::vector<Centroid> centroids;
    for (const auto& item : doc.at("centroids")) {
      centroids.push_back({item.at("mean").get<double>(), item.at("weight").get<double>()});
    }
    if (doc.at("centroid_count").get<std::size_t>() != centroids.size()) {
      throw format_error("centroid_count does not match centroid list");
    }
    const auto& min_field = doc.at("min");
    const auto& max_field = doc.at("max");
    const double min_value = min_field.is_null() ? std::numeric_limits<double>::infinity()
                                                 : min_field.get<double>();
    const double max_value = max_field.is_null() ? -std::numeric_limits<double>::infinity()
                                                 : max_field.get<double>();
    return detail::rebuild(doc.at("format_version").get<double>(),
                           doc.at("compression").get<double>(),
                           doc.at("scale").get<std::string>(),
                           doc.at("total_weight").get<double>(), min_value, max_value,
                           std::move(centroids));
  } catch (const nlohmann::json::exception& e) {
    throw format_error(e.what());
  }
}

}  // namespace asymdigest
