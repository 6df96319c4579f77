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

namespace ih {

/// Channel-major, row-major image geometry.
struct Dims {
  std::uint16_t channels = 0;
  std::uint16_t height = 0;
  std::uint16_t width = 0;

  std::size_t size() const noexcept {
    return std::size_t{channels} * height * width;
  }
  friend bool operator==(const Dims&, const Dims&) = default;
};

/// A flattened d-dimensional pixel vector, f32 storage.
class Image {
 public:
  Image() = default;
  explicit Image(Dims dims);  // zero-filled
  Image(Dims dims, std::vector<float> pixels);

  const Dims& dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return pixels_.size(); }

  std::span<const float> pixels() const noexcept { return pixels_; }
  std::span<float> pixels() noexcept { return pixels_; }

  float operator[](std::size_t i) const noexcept { return pixels_[i]; }
  float& operator[](std::size_t i) noexcept { return pixels_[i]; }

  float at(std::size_t c, std::size_t y, std::size_t x) const noexcept {
    return pixels_[(c * dims_.height + y) * dims_.width + x];
  }

  bool all_finite() const noexcept;

  /// Bitwise equality of dims and pixel payload.
  friend bool operator==(const Image& a, const Image& b) noexcept;

 private:
  Dims dims_{};
  std::vector<float> pixels_;
};

struct LabelVector {
  std::vector<float> weights;

  double sum() const noexcept;
  friend bool operator==(const LabelVector&, const LabelVector&) = default;
};

/// (x - mean(x)) / |x - mean(x)|_2. Throws kDegenerate on a constant image.
Image normalize_image(const Image& x);

/// Sequential f64 accumulation over f32 inputs; order is fixed.
double inner_product(std::span<const float> a, std::span<const float> b);
double inner_product(const Image& a, const Image& b);

double squared_norm(std::span<const float> a) noexcept;

/// Pearson correlation in f64. Returns 0 when either side is constant.
double correlation(std::span<const float> a, std::span<const float> b);

void require_same_dims(const Image& a, const Image& b, const char* what);

}  // namespace ih
