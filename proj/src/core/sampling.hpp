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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "core/image.hpp"
#include "core/rng.hpp"

namespace ih {

inline constexpr std::uint64_t kRejectionCap = 1'000'000;

struct Coefficients {
  std::vector<double> lambda;

  std::size_t k() const noexcept { return lambda.size(); }
  double l2() const noexcept;
};

struct SignMask {
  std::vector<std::int8_t> signs;

  std::size_t size() const noexcept { return signs.size(); }
  static SignMask identity(std::size_t d) { return {std::vector<std::int8_t>(d, 1)}; }
  friend bool operator==(const SignMask&, const SignMask&) = default;
};

/// Uniform on [0,1]^k, l1-normalized, conditioned on max <= c1 by rejection.
/// c1*k < 1 -> kInfeasible. c1*k == 1 returns the single feasible point.
Coefficients sample_coefficients(std::size_t k, double c1, Rng& rng);
Coefficients sample_coefficients(std::size_t k, double c1, RngStream stream);

/// i.i.d. uniform signs, 64 per generator draw.
SignMask sample_sign_mask(std::size_t d, Rng& rng);
SignMask sample_sign_mask(std::size_t d, RngStream stream);

/// Distinct indices from [0, n) excluding `exclude` (pass n for none),
/// in draw order. Partial Fisher-Yates over a sparse swap map.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count,
                                                    std::size_t exclude, Rng& rng);

}  // namespace ih
