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

#include <filesystem>
#include <string>
#include <vector>

#include "core/dataset.hpp"
#include "core/image.hpp"
#include "core/rng.hpp"

namespace ih::testing {

inline std::filesystem::path temp_dir(const std::string& tag) {
  auto p = std::filesystem::temp_directory_path() / ("ih_unit_" + tag);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline Image gaussian_image(Dims dims, Rng& rng, double scale) {
  std::vector<float> px(dims.size());
  for (float& v : px) v = static_cast<float>(scale * rng.normal());
  return Image(dims, std::move(px));
}

inline Image from_values(std::vector<float> v) {
  const auto n = static_cast<std::uint16_t>(v.size());
  return Image(Dims{1, 1, n}, std::move(v));
}

}  // namespace ih::testing
