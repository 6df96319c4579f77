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
#include <vector>

#include "attacks/report.hpp"
#include "utility/model.hpp"

namespace ih {

struct GradMatchOptions {
  std::size_t steps = 2000;
  double lr = 0.05;
  double tolerance = 0.0;   // stop once D_g <= tolerance
  std::size_t fd_probes = 10;
  std::size_t trajectory_stride = 10;  // D_g samples kept in the report
};

struct GradMatchInit {
  std::vector<double> x;
  std::vector<double> y;
};

/// Random start: x ~ N(0, 1/d), y ~ N(0, 1).
GradMatchInit gradient_matching_init(std::size_t d, std::size_t classes, RngStream stream);

/// D_g(x, y) = |g(x, y) - observed|^2 and its analytic gradient.
struct GradMatchEval {
  double D = 0.0;
  std::vector<double> dx;
  std::vector<double> dy;
};
GradMatchEval gradient_matching_objective(const LinearSoftmaxModel& model,
                                          const Gradient& observed, const std::vector<double>& x,
                                          const std::vector<double>& y);

/// Plain gradient descent on (x, y). The reconstruction holds the recovered
/// x; `truth`, when given, adds a correlation metric. Non-finite D_g ->
/// kDiverged.
AttackReport gradient_matching_attack(const Gradient& observed, const LinearSoftmaxModel& model,
                                      const Dims& dims, const GradMatchOptions& opts,
                                      RngStream stream, const Image* truth = nullptr);

}  // namespace ih
