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
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "core/dataset.hpp"
#include "core/image.hpp"
#include "core/rng.hpp"
#include "encrypt/encrypt.hpp"
#include "publicprep/patchset.hpp"

namespace ih {

using Json = nlohmann::ordered_json;

struct StatisticProfile {
  double mean = 0.0;
  double std = 0.0;  // population
  double total_variation = 0.0;
  std::vector<double> probes;

  /// mean, std, total_variation, probes...
  std::vector<double> values() const;
};

/// Anisotropic TV: sum of |horizontal| and |vertical| neighbour differences,
/// per channel.
double total_variation(const Image& x);

/// Probe indices are flat pixel offsets; out of range -> kInvalidArgument.
StatisticProfile statistic_profile(const Image& x, std::span<const std::size_t> probes);

struct KsProtocolOptions {
  std::size_t picks = 10;
  std::size_t per_image = 400;
  std::size_t probe_encryptions = 50;
  std::size_t probe_locations = 4;
  SchemeParams params{};
  const PatchSet* pub = nullptr;  // required for the cross scheme
};

/// Averaged p-values per picked image (rows) and statistic (columns).
struct KsTable {
  std::vector<std::size_t> picks;
  std::vector<std::size_t> probe_locations;
  std::vector<std::string> statistics;
  std::vector<std::vector<double>> all;
  std::vector<std::vector<double>> other;

  double min_pvalue() const;
  double max_all_other_gap() const;
  Json to_json() const;
  /// One row per pick; columns <stat>_all,<stat>_other for each statistic.
  std::string to_csv() const;
};

/// Encrypts each picked image per_image times. The first probe_encryptions of
/// them are each tested, as a single observation, against the pooled
/// statistics of all picked images (All) and of the other picks (Other).
KsTable indistinguishability_protocol(const Dataset& priv, const KsProtocolOptions& opts,
                                      RngStream stream);

}  // namespace ih
