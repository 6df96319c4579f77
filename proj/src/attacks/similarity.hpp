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
#include <span>
#include <vector>

#include "attacks/report.hpp"
#include "core/dataset.hpp"
#include "encrypt/encrypt.hpp"
#include "publicprep/patchset.hpp"

namespace ih {

/// Mean local SSIM over 8x8 windows at stride 4, per channel, with
/// C1 = (0.01 L)^2 and C2 = (0.03 L)^2. Planes smaller than 8 use one window
/// spanning the plane.
double ssim(const Image& a, const Image& b, double dynamic_range);

/// 2 * max |pixel| over the given images.
double symmetric_range(std::span<const Image> images);

/// Precomputed window statistics for repeated SSIM queries against a fixed set.
class SsimIndex {
 public:
  SsimIndex(std::span<const Image> images, double dynamic_range);

  std::size_t size() const noexcept { return count_; }
  double dynamic_range() const noexcept { return range_; }
  /// SSIM of `query` against every indexed image.
  std::vector<double> scores(const Image& query) const;

 private:
  struct Layout {
    std::size_t channels = 0, height = 0, width = 0, wh = 0, ww = 0;
    std::vector<std::size_t> ys, xs;
  };
  void window_stats(const Image& im, double* mu, double* var) const;

  Layout lay_;
  Dims dims_{};
  std::size_t count_ = 0;
  std::size_t windows_ = 0;
  double range_ = 1.0;
  std::span<const Image> images_;
  std::vector<double> mu_, var_;
};

struct SimilarityOptions {
  std::size_t m = 100;
  std::size_t k = 6;
};

/// Demasks via the oracle, ranks the index by SSIM, and reports a hit when any
/// true public source appears in the top m. `db_sources[j]` names the source
/// image behind database entry j; `true_sources` are the key's public sources.
AttackReport similarity_search_attack(const Image& xtilde, const SsimIndex& db,
                                      std::span<const std::uint32_t> db_sources,
                                      const SignMask& truth_mask, double oracle_p, Rng& rng,
                                      const std::vector<std::uint32_t>& true_sources,
                                      const SimilarityOptions& opts);

enum class AveragingMode { kStrong, kWeak };

struct AveragingOptions {
  AveragingMode mode = AveragingMode::kStrong;
  std::size_t m = 5;
  double oracle_p = 0.25;
  std::size_t max_probes = 0;  // 0: all targets (strong) or all samples (weak)
};

/// Harness-side averaging attack over a history with known keys. Strong mode
/// averages the demasked encryptions of each private image; weak mode picks
/// each probe's SSIM top-m neighbours among the demasked history.
AttackReport averaging_attack(std::span<const Encryption> history, const Dataset& originals,
                              const AveragingOptions& opts, RngStream stream);

}  // namespace ih
