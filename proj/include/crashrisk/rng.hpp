// Copyright 2026 The crashrisk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace crashrisk {

/// Seeded generator whose every derived quantity is defined here, never by
/// the standard library's distribution classes (those differ across
/// implementations). mt19937_64 itself is fully specified by the standard.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, bound), bound > 0. Unbiased.
  std::uint64_t uniform_index(std::uint64_t bound);
  /// Standard normal via the Marsaglia polar method.
  double normal();
  /// Gamma(shape, scale), Marsaglia-Tsang.
  double gamma(double shape, double scale);
  /// Poisson(mean).
  std::uint64_t poisson(double mean);
  /// NB2 draw with mean mu and dispersion alpha (variance mu + alpha mu^2),
  /// as a gamma-Poisson mixture. alpha == 0 gives a Poisson draw.
  std::uint64_t negbin2(double mu, double alpha);

  template <class T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = uniform_index(i);
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for the named substream `index` of a master seed. Used to give each
/// consumer (split, tree t, simulator) an independent deterministic stream.
std::uint64_t substream_seed(std::uint64_t master, std::string_view name, std::uint64_t index = 0);

inline Rng substream(std::uint64_t master, std::string_view name, std::uint64_t index = 0) {
  return Rng(substream_seed(master, name, index));
}

}  // namespace crashrisk
