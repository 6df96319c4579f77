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
#include <string>
#include <vector>

#include "json.hpp"

#include "core/image.hpp"
#include "core/rng.hpp"
#include "encrypt/encrypt.hpp"
#include "stats/protocol.hpp"

namespace ih {

using Json = nlohmann::ordered_json;

// Each runner returns {"experiment", "config", "metrics", ...}; metrics are
// plain numbers so callers can compare them against tolerances.

enum class ScanView { kPlain, kMasked, kOracle };

const char* to_string(ScanView v) noexcept;
ScanView parse_scan_view(const std::string& name);

/// Public scan against a fixed set of n Gaussian N(0, 1/d) images; each
/// trial mixes k random members with equal weight (xtilde = sum x_i).
/// kMasked applies a fresh sign mask, kOracle then demasks it with the
/// sign oracle at oracle_p.
struct ScanExperiment {
  Dims dims{3, 32, 32};
  std::size_t n = 1000;
  std::size_t k = 4;
  std::size_t trials = 1000;
  double delta = 0.01;
  ScanView view = ScanView::kPlain;
  double oracle_p = 0.25;
};
Json run_scan_experiment(const ScanExperiment& cfg, RngStream stream);

/// Pair detection over a full encryption history of n normalized Gaussian
/// private images.
struct PairExperiment {
  Dims dims{3, 32, 32};
  std::size_t n = 50;
  std::uint32_t epochs = 50;
  SchemeParams params{Scheme::kMixup, 2, 0.65, 0.3, false};
  double delta = 0.01;
};
Json run_pair_experiment(const PairExperiment& cfg, RngStream stream);

/// Similarity search with cropped public patches. Encryption draws from one
/// random crop of each white-noise source; the attacker indexes an
/// independent crop of the same sources.
struct SimilarityExperiment {
  std::size_t sources = 10000;
  Dims source_dims{3, 48, 48};
  std::uint16_t crop = 32;
  std::size_t private_n = 100;
  SchemeParams params{Scheme::kCross, 6, 0.65, 0.3, true};
  std::size_t m = 100;
  double oracle_p = 0.25;
  std::size_t samples = 50;
};
Json run_similarity_experiment(const SimilarityExperiment& cfg, RngStream stream);

/// KS indistinguishability protocol on normalized Gaussian private images,
/// with a cropped white-noise public set for the cross scheme.
struct KsExperiment {
  Dims dims{3, 32, 32};
  std::size_t private_n = 100;
  std::size_t public_sources = 2000;
  Dims source_dims{3, 48, 48};
  SchemeParams params{Scheme::kCross, 4, 0.65, 0.3, true};
  std::size_t picks = 10;
  std::size_t per_image = 400;
  std::size_t probe_encryptions = 50;
};
Json run_ks_experiment(const KsExperiment& cfg, RngStream stream, std::string* csv = nullptr);

/// Gradient matching against a random linear softmax model, once on a plain
/// victim and once on an encryption of it.
struct GradMatchExperiment {
  Dims dims{3, 32, 32};
  std::uint16_t classes = 10;
  std::size_t private_n = 100;
  SchemeParams params{Scheme::kInside, 4, 0.65, 0.3, true};
  std::size_t steps = 2000;
  double lr = 0.05;
};
Json run_gradmatch_experiment(const GradMatchExperiment& cfg, RngStream stream);

/// Vanilla training, then inside-scheme training with per-epoch
/// re-encryption for each k, evaluated with encrypted inference.
struct UtilityExperiment {
  Dims dims{3, 8, 8};
  std::uint16_t classes = 4;
  std::size_t n_train = 400;
  std::size_t n_test = 400;
  double noise = 0.7;
  std::vector<std::size_t> ks{1, 2, 4};
  double c1 = 0.65;  // used for k >= 2; k = 1 forces c1 = 1
  bool masked = true;
  std::uint32_t epochs = 50;
  double lr = 0.1;
  std::size_t E = 10;
  std::string feature = "raw-abs";
};
Json run_utility_experiment(const UtilityExperiment& cfg, RngStream stream);

}  // namespace ih
