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
#include <filesystem>
#include <utility>
#include <vector>

#include "core/dataset.hpp"
#include "core/image.hpp"
#include "core/rng.hpp"

namespace ih {

struct CropOffset {
  std::uint16_t y = 0;
  std::uint16_t x = 0;
  friend bool operator==(const CropOffset&, const CropOffset&) = default;
};

struct Provenance {
  std::uint32_t source_index = 0;
  CropOffset offset;
  std::uint32_t keypoints = 0;
};

struct PatchSet {
  Dims dims{};
  std::vector<Image> patches;
  std::vector<Provenance> provenance;
  bool normalized = false;

  std::size_t size() const noexcept { return patches.size(); }
  bool empty() const noexcept { return patches.empty(); }
};

/// Uniform crop offsets over all valid positions; patches are exact windows.
std::vector<std::pair<Image, CropOffset>> random_crop(const Image& source, std::uint16_t height,
                                                      std::uint16_t width, std::size_t count,
                                                      Rng& rng);

/// Harris corner count on the luminance plane: Sobel gradients, 3x3 box
/// structure tensor, R = det - 0.06 tr^2, 3x3 non-max suppression, keep
/// R > 0.01 max(R). Images smaller than 3x3 -> kDegenerate.
std::uint32_t keypoint_count(const Image& patch);

struct PatchSetOptions {
  std::uint16_t height = 32;
  std::uint16_t width = 32;
  std::size_t per_image = 1;
  std::uint32_t min_keypoints = 40;  // 0 disables the flatness filter
  bool normalize = true;
};

struct PatchSetResult {
  PatchSet patchset;
  std::size_t generated = 0;
  double retention = 0.0;  // retained / generated
};

PatchSetResult build_patchset(const Dataset& publicdata, const PatchSetOptions& opts,
                              RngStream stream);

/// IHDS payload plus `<path>.provenance.csv`.
void save_patchset(const PatchSet& ps, const std::filesystem::path& path);
PatchSet load_patchset(const std::filesystem::path& path);
std::filesystem::path provenance_path(const std::filesystem::path& path);

}  // namespace ih
