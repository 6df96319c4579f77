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
#include <span>
#include <vector>

#include "attacks/report.hpp"
#include "encrypt/encrypt.hpp"

namespace ih {

/// <xtilde_a, xtilde_b>.
double pair_share_score(const EncryptedSample& a, const EncryptedSample& b);

/// Geometric midpoint between the shared-source scale nu/k and the
/// disjoint-pair maximum nu*sqrt(2 ln(2P/delta))/sqrt(d), nu = mean |xtilde|^2.
double pair_midpoint_threshold(double nu, std::size_t k, std::size_t pairs, std::size_t d,
                               double delta);

struct PairOptions {
  std::size_t k = 2;
  double delta = 0.01;
  std::optional<double> threshold;  // default: pair_midpoint_threshold
};

/// Scores all pairs, links pairs with |score| >= threshold, and clusters by
/// connected components. With `keys`, pairs sharing a private source are
/// the ground truth for precision/recall.
AttackReport pair_detection_attack(std::span<const EncryptedSample> history,
                                   const PairOptions& opts,
                                   const std::vector<EncryptionKey>* keys = nullptr);

/// Coordinate-wise mean.
Image average_reconstruct(std::span<const Image> cluster);
Image average_reconstruct(std::span<const Image* const> cluster);

}  // namespace ih
