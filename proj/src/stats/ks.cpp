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


#include "stats/ks.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "core/error.hpp"

namespace ih {

double kolmogorov_survival(double lambda) noexcept {
  if (!(lambda > 0.0)) return 1.0;
  const double a2 = -2.0 * lambda * lambda;
  double sum = 0.0;
  double sign = 2.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = sign * std::exp(a2 * j * j);
    sum += term;
    if (std::fabs(term) <= 1e-16) return std::clamp(sum, 0.0, 1.0);
    sign = -sign;
  }
  return 1.0;
}

KsResult ks_two_sample_sorted(std::span<const double> a, std::span<const double> b) {
  require(!a.empty() && !b.empty(), ErrorCode::kInsufficientData, "ks_two_sample: empty sample");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  // Past the end of either side the gap can only shrink.
  const double ne = na * nb / (na + nb);
  return {d, kolmogorov_survival(std::sqrt(ne) * d)};
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  return ks_two_sample_sorted(sa, sb);
}

KsResult ks_uniform(std::span<const double> u) {
  require(!u.empty(), ErrorCode::kInsufficientData, "ks_uniform: empty sample");
  std::vector<double> s(u.begin(), u.end());
  std::sort(s.begin(), s.end());
  require(s.front() >= 0.0 && s.back() <= 1.0, ErrorCode::kInvalidArgument,
          "ks_uniform: values must lie in [0,1]");
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    d = std::max(d, static_cast<double>(i + 1) / n - s[i]);
    d = std::max(d, s[i] - static_cast<double>(i) / n);
  }
  return {d, kolmogorov_survival(std::sqrt(n) * d)};
}

}  // namespace ih
