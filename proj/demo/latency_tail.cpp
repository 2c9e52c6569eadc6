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

// Summarizes a skewed "latency" stream with a symmetric and a glued scale
// function and compares upper-tail estimates and memory (centroid count).

#include <cstdio>
#include <string>

#include "asymdigest/asymdigest.hpp"

int main() {
  using namespace asymdigest;
  const Distribution latency = Distribution::lognormal(3.0, 0.8);

  for (const std::string descriptor : {"k2", "k2:glued@0.5", "k3", "k3:glued@0.5"}) {
    Digest digest(100, parse_scale(descriptor));
    SampleStream stream(7);
    for (int i = 0; i < 200000; ++i) digest.add(stream.next(latency));
    digest.compress();

    std::printf("%-14s centroids=%4zu", descriptor.c_str(), digest.centroid_count());
    for (double q : {0.5, 0.99, 0.999}) {
      const double estimate = digest.quantile(q);
      std::printf("  p%-5g=%8.3f (err %.1e)", q * 100, estimate,
                  std::abs(latency.cdf(estimate) - q));
    }
    std::printf("\n");
  }
  return 0;
}
