// Copyright 2026 The instahide-toolkit Authors.
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

#include <array>
#include <cstdint>
#include <limits>

#include <boost/random/normal_distribution.hpp>

namespace ih {

/// Names a reproducible random stream. Two equal values always produce the
/// same sequence; distinct stream ids are treated as independent.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  /// Derives a sub-stream, e.g. per epoch or per sample.
  RngStream child(std::uint64_t id) const noexcept;

  friend bool operator==(const RngStream&, const RngStream&) = default;
};

/// xoshiro256** engine keyed by an RngStream. Satisfies
/// UniformRandomBitGenerator so it can drive Boost distributions.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(RngStream stream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Standard normal (ziggurat).
  double normal() noexcept;
  /// Unbiased integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  std::array<std::uint64_t, 4> state_{};
  boost::random::normal_distribution<double> normal_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace ih
