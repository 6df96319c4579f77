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
#include "core/image.hpp"
#include "core/sampling.hpp"
#include "publicprep/patchset.hpp"

namespace ih {

/// Geometric midpoint between the member scale |x|*zbar/sqrt(k) and the
/// non-member maximum |x|*zbar*sqrt(2 ln(2N/delta))/sqrt(d).
double scan_midpoint_threshold(double xtilde_norm, double mean_candidate_norm, std::size_t N,
                               std::size_t d, std::size_t k, double delta);

struct ScanOptions {
  std::size_t k = 4;
  double delta = 0.01;
  std::optional<double> threshold;
  std::size_t top = 20;  // entries kept in top_scores
};

/// Scores every candidate by <xtilde, z>, ranks them, and flags candidates at
/// or above the threshold. `members` (candidate ids) enables recall/rank metrics.
AttackReport public_scan_attack(const Image& xtilde, std::span<const Image> candidates,
                                const ScanOptions& opts,
                                const std::vector<std::size_t>* members = nullptr);
AttackReport public_scan_attack(const Image& xtilde, const PatchSet& pub, const ScanOptions& opts,
                                const std::vector<std::size_t>* members = nullptr);

/// xtilde - sum lambda_j z_j. Without lambda, lambda is the least-squares fit
/// of xtilde on the members; rank-deficient members -> kDegenerate.
Image recover_private_residual(const Image& xtilde, std::span<const Image> members,
                               const std::optional<Coefficients>& lambda = std::nullopt);

/// Least-squares coefficients of xtilde on the members.
std::vector<double> fit_member_coefficients(const Image& xtilde, std::span<const Image> members);

/// <x^2, s^2> - |x|^2 |s|^2 / d, with coordinate-wise squares.
double braverman_statistic(const Image& xtilde, const Image& s);

/// Ranks candidates by the statistic (descending).
AttackReport braverman_attack(const Image& xtilde, std::span<const Image> candidates,
                              std::size_t top = 20,
                              const std::vector<std::size_t>* members = nullptr);

}  // namespace ih
