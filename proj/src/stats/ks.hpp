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

#include <span>

namespace ih {

struct KsResult {
  double statistic = 0.0;
  double pvalue = 1.0;
};

/// Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2), at most 100
/// terms. Returns 1 when the series has not converged (small lambda).
double kolmogorov_survival(double lambda) noexcept;

/// Two-sample KS with the asymptotic p-value at n_e = |a||b|/(|a|+|b|).
/// Empty input -> kInsufficientData. A single observation is allowed.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);
/// Same, for inputs already sorted ascending.
KsResult ks_two_sample_sorted(std::span<const double> a, std::span<const double> b);

/// One-sample KS against U[0,1]. Values outside [0,1] -> kInvalidArgument.
KsResult ks_uniform(std::span<const double> u);

}  // namespace ih
