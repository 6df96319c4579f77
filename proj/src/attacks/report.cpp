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

#include "attacks/report.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/error.hpp"

namespace ih {

double AttackReport::metric(const std::string& name) const {
  auto it = metrics.find(name);
  if (it == metrics.end()) fail(ErrorCode::kInvalidArgument, "no metric named " + name);
  return it->second;
}

Json AttackReport::to_json() const {
  Json j;
  j["attack"] = attack;
  j["params"] = params;
  Json m = Json::object();
  for (const auto& [k, v] : metrics) m[k] = std::isfinite(v) ? Json(v) : Json(nullptr);
  j["metrics"] = m;
  Json top = Json::array();
  for (const auto& [id, s] : top_scores)
    top.push_back(Json::array({id, std::isfinite(s) ? Json(s) : Json(nullptr)}));
  j["top_scores"] = top;
  j["decisions"] = decisions;
  j["details"] = details;
  if (!reconstruction_path.empty()) j["reconstruction_path"] = reconstruction_path;
  return j;
}

void SignOracle::validate() const {
  require(std::isfinite(p) && p >= 0.0 && p <= 0.5, ErrorCode::kValidation,
          "sign oracle error rate must lie in [0, 0.5]");
}

Image demask_with_oracle(const Image& xtilde, const SignMask& truth, double p, Rng& rng) {
  require(xtilde.size() == truth.size(), ErrorCode::kDimMismatch,
          "demask: mask length differs from image");
  require(std::isfinite(p) && p >= 0.0 && p <= 0.5, ErrorCode::kValidation,
          "demask: error rate must lie in [0, 0.5]");
  Image out = xtilde;
  auto px = out.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    const bool wrong = p > 0.0 && rng.uniform() < p;
    const bool flip = (truth.signs[i] < 0) != wrong;
    if (flip) px[i] = -px[i];
  }
  return out;
}

std::vector<std::pair<std::uint64_t, double>> rank_scores(const std::vector<double>& scores) {
  std::vector<std::pair<std::uint64_t, double>> r(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) r[i] = {i, scores[i]};
  std::sort(r.begin(), r.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return r;
}

}  // namespace ih
