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
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "core/rng.hpp"

namespace ih {

using Json = nlohmann::ordered_json;

struct ConcentrationCheckConfig {
  std::size_t d = 3072;
  std::size_t n = 1000;
  std::size_t k = 4;
  std::optional<double> sigma2;  // default 1/d
  double delta = 0.01;
  std::size_t trials = 1000;
  double beta = 2.0;

  double variance() const { return sigma2.value_or(1.0 / static_cast<double>(d)); }
  void validate() const;  // kValidation
  Json to_json() const;
};

struct CheckReport {
  std::string check;
  Json config = Json::object();
  Json rows = Json::array();
  bool pass = false;
  bool precondition_violated = false;  // pass is then meaningless

  /// pass is written as null when the precondition is violated.
  Json to_json() const;
};

/// Frequency rule shared by the checks: freq <= bound + 3 sqrt(b(1-b)/trials).
double three_se_limit(double bound, std::size_t trials) noexcept;

/// X = |x|^2 for x ~ N(0, sigma2 I_k). Upper tail
/// X - k s2 >= (2 sqrt(kt) + 2t) s2 and lower tail k s2 - X >= 2 sqrt(kt) s2
/// are each compared with exp(-t) for every t in `ts`.
CheckReport check_chi_square_tail(const ConcentrationCheckConfig& cfg, RngStream stream,
                                  const std::vector<double>& ts = {0.0, 1.0, 2.0, 4.0});

/// Sum of d independent U[-1,1] variables against the Bernstein bound, with t
/// solved so the bound equals each level.
CheckReport check_bernstein(const ConcentrationCheckConfig& cfg, RngStream stream,
                            const std::vector<double>& levels = {0.5, 0.1, 0.01});

/// |<u, e>| for u ~ N(0, s1^2 I_d) and a fixed e drawn once from N(0, s2^2 I_d),
/// against 2 s1 |e|_2 sqrt(log(d/delta)) + s1 |e|_inf log^1.5(d/delta).
CheckReport check_fixed_vector_concentration(const ConcentrationCheckConfig& cfg,
                                             RngStream stream,
                                             std::optional<double> sigma1 = std::nullopt,
                                             std::optional<double> sigma2 = std::nullopt);

/// |<u, e>| for independent u ~ N(0, s1^2 I_d), e ~ N(0, s2^2 I_d), against
/// 1e4 s1 s2 sqrt(d) log^2(d/delta). Reports the measured (1-delta) quantile
/// and the constant it implies in place of 1e4.
CheckReport check_inner_product_concentration(const ConcentrationCheckConfig& cfg,
                                              RngStream stream,
                                              std::optional<double> sigma1 = std::nullopt,
                                              std::optional<double> sigma2 = std::nullopt);

enum class GapTheorem { kB1, kB2 };

const char* to_string(GapTheorem which) noexcept;
GapTheorem parse_gap_theorem(const std::string& name);  // "B1" / "B2"

/// B2: xtilde = sum of k members of an n-vector Gaussian set; the gap holds
/// when every member score |<xtilde, x_t>| is >= beta times every non-member
/// score.
/// B1: n vectors split into thirds X1, X2, X3; per trial one x1 in X1 and one
/// x3 in X3, and the gap holds when |<x3+x1, x3+x2>| >= beta |<x3+x1, x2+x2'>|
/// for all x2 and all distinct x2, x2' in X2.
/// Passes when the holding frequency is >= 1 - delta - 0.03.
CheckReport check_theorem_gap(const ConcentrationCheckConfig& cfg, GapTheorem which,
                              RngStream stream);

/// Right-hand side of the scope condition, (2 beta)^-1 sqrt(d) log^2(nd/delta).
double gap_scope_bound(const ConcentrationCheckConfig& cfg);

}  // namespace ih
