// Copyright 2026 The empkit Authors.
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

#include <gmpxx.h>

#include <cstdint>
#include <random>
#include <string>

namespace empkit {

/// Exact rational scalar. Every oracle computation in the library runs on it.
using Scalar = mpq_class;

inline std::string to_string(const Scalar& value) { return value.get_str(); }

/// 64-bit mixing function (splitmix64 finalizer). Used to derive independent
/// child seeds from a global seed and a stable index.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic generator of random rationals.
///
/// std::uniform_int_distribution is implementation-defined, so bounded draws
/// are done by rejection on the raw mt19937_64 stream; the same seed yields
/// the same values on every platform.
class RationalSampler {
 public:
  static constexpr std::int64_t kMinNumerator = 1'000;
  static constexpr std::int64_t kMaxNumerator = 1'000'000;
  static constexpr std::int64_t kMaxDenominator = 1'000;

  explicit RationalSampler(std::uint64_t seed) : engine_(seed) {}

  /// Uniform integer in [lo, hi].
  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t draw = engine_();
    while (draw >= limit) draw = engine_();
    return lo + static_cast<std::int64_t>(draw % span);
  }

  /// Nonzero rational: numerator in +-[1e3, 1e6], denominator in [1, 1e3].
  Scalar nonzero() {
    Scalar value;
    do {
      const std::int64_t magnitude = uniform(kMinNumerator, kMaxNumerator);
      const std::int64_t sign = uniform(0, 1) == 0 ? -1 : 1;
      const std::int64_t den = uniform(1, kMaxDenominator);
      value = Scalar(mpz_class(static_cast<long>(sign * magnitude)),
                     mpz_class(static_cast<long>(den)));
      value.canonicalize();
    } while (value == 0);
    return value;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace empkit
