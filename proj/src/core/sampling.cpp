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

#include "core/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "core/error.hpp"

namespace ih {

double Coefficients::l2() const noexcept {
  double s = 0.0;
  for (double v : lambda) s += v * v;
  return std::sqrt(s);
}

Coefficients sample_coefficients(std::size_t k, double c1, Rng& rng) {
  require(k >= 1, ErrorCode::kInvalidArgument, "sample_coefficients: k must be >= 1");
  require(std::isfinite(c1) && c1 > 0.0 && c1 <= 1.0, ErrorCode::kInvalidArgument,
          "sample_coefficients: c1 must lie in (0, 1]");
  const double slack = c1 * static_cast<double>(k) - 1.0;
  if (slack < -1e-12)
    fail(ErrorCode::kInfeasible, "sample_coefficients: c1*k < 1 (k=" + std::to_string(k) +
                                     ", c1=" + std::to_string(c1) + ")");
  Coefficients out;
  if (slack <= 1e-12) {
    out.lambda.assign(k, 1.0 / static_cast<double>(k));
    return out;
  }
  out.lambda.resize(k);
  for (std::uint64_t attempt = 0; attempt < kRejectionCap; ++attempt) {
    double sum = 0.0;
    for (double& v : out.lambda) {
      v = rng.uniform();
      sum += v;
    }
    if (!(sum > 0.0)) continue;
    double mx = 0.0;
    for (double& v : out.lambda) {
      v /= sum;
      mx = std::max(mx, v);
    }
    if (mx <= c1) return out;
  }
  fail(ErrorCode::kInfeasible, "sample_coefficients: rejection cap reached");
}

Coefficients sample_coefficients(std::size_t k, double c1, RngStream stream) {
  Rng rng(stream);
  return sample_coefficients(k, c1, rng);
}

SignMask sample_sign_mask(std::size_t d, Rng& rng) {
  require(d >= 1, ErrorCode::kInvalidArgument, "sample_sign_mask: d must be >= 1");
  SignMask m;
  m.signs.resize(d);
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < d; ++i) {
    if (i % 64 == 0) bits = rng();
    m.signs[i] = (bits & 1u) ? std::int8_t{1} : std::int8_t{-1};
    bits >>= 1;
  }
  return m;
}

SignMask sample_sign_mask(std::size_t d, RngStream stream) {
  Rng rng(stream);
  return sample_sign_mask(d, rng);
}

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count,
                                                    std::size_t exclude, Rng& rng) {
  const std::size_t pool = n - (exclude < n ? 1 : 0);
  require(count <= pool, ErrorCode::kInvalidArgument,
          "sample_without_replacement: not enough items");
  // Virtual array [0, pool) mapped onto [0, n) \ {exclude}.
  std::unordered_map<std::size_t, std::size_t> swaps;
  auto value_at = [&](std::size_t i) {
    auto it = swaps.find(i);
    return it == swaps.end() ? i : it->second;
  };
  std::vector<std::size_t> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pool - i));
    const std::size_t vi = value_at(i), vj = value_at(j);
    swaps[j] = vi;
    swaps[i] = vj;
    out.push_back(vj < exclude || exclude >= n ? vj : vj + 1);
  }
  return out;
}

}  // namespace ih
