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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "core/image.hpp"
#include "core/rng.hpp"
#include "core/sampling.hpp"

namespace ih {

using Json = nlohmann::ordered_json;

struct AttackReport {
  std::string attack;
  Json params = Json::object();
  std::map<std::string, double> metrics;
  std::vector<std::pair<std::uint64_t, double>> top_scores;
  std::vector<std::int64_t> decisions;
  Json details = Json::object();
  std::optional<Image> reconstruction;
  std::string reconstruction_path;

  double metric(const std::string& name) const;  // kInvalidArgument if absent
  bool has_metric(const std::string& name) const { return metrics.count(name) > 0; }

  /// {attack, params, metrics, top_scores, decisions, details, reconstruction_path?}
  Json to_json() const;
};

/// Parametric stand-in for a learned demasker: each coordinate's true sign is
/// restored with probability 1 - p and flipped otherwise.
struct SignOracle {
  double p = 0.25;
  RngStream stream{};

  void validate() const;  // p must lie in [0, 0.5]
};

Image demask_with_oracle(const Image& xtilde, const SignMask& truth, double p, Rng& rng);

/// Ranked (id, score) pairs: score descending, id ascending on ties.
std::vector<std::pair<std::uint64_t, double>> rank_scores(const std::vector<double>& scores);

}  // namespace ih
