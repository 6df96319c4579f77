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

#include "core/image.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "core/error.hpp"

namespace ih {

Image::Image(Dims dims) : dims_(dims), pixels_(dims.size(), 0.0f) {}

Image::Image(Dims dims, std::vector<float> pixels)
    : dims_(dims), pixels_(std::move(pixels)) {
  require(pixels_.size() == dims_.size(), ErrorCode::kDimMismatch,
          "image payload has " + std::to_string(pixels_.size()) +
              " values, dims require " + std::to_string(dims_.size()));
}

bool Image::all_finite() const noexcept {
  for (float v : pixels_)
    if (!std::isfinite(v)) return false;
  return true;
}

bool operator==(const Image& a, const Image& b) noexcept {
  return a.dims_ == b.dims_ && a.pixels_.size() == b.pixels_.size() &&
         (a.pixels_.empty() ||
          std::memcmp(a.pixels_.data(), b.pixels_.data(),
                      a.pixels_.size() * sizeof(float)) == 0);
}

double LabelVector::sum() const noexcept {
  double s = 0.0;
  for (float w : weights) s += w;
  return s;
}

void require_same_dims(const Image& a, const Image& b, const char* what) {
  if (a.dims() != b.dims() || a.size() != b.size())
    fail(ErrorCode::kDimMismatch, std::string(what) + ": dimension mismatch (" +
                                      std::to_string(a.size()) + " vs " +
                                      std::to_string(b.size()) + ")");
}

Image normalize_image(const Image& x) {
  require(x.size() > 0, ErrorCode::kDegenerate, "normalize_image: empty image");
  require(x.all_finite(), ErrorCode::kValidation, "normalize_image: non-finite pixel");
  double mean = 0.0;
  for (float v : x.pixels()) mean += v;
  mean /= static_cast<double>(x.size());

  double norm2 = 0.0;
  for (float v : x.pixels()) {
    const double c = v - mean;
    norm2 += c * c;
  }
  const double norm = std::sqrt(norm2);
  if (!(norm > 0.0)) fail(ErrorCode::kDegenerate, "normalize_image: constant image");

  std::vector<float> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = static_cast<float>((x[i] - mean) / norm);
  return Image(x.dims(), std::move(out));
}

double inner_product(std::span<const float> a, std::span<const float> b) {
  require(a.size() == b.size(), ErrorCode::kDimMismatch,
          "inner_product: length mismatch (" + std::to_string(a.size()) + " vs " +
              std::to_string(b.size()) + ")");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return acc;
}

double inner_product(const Image& a, const Image& b) {
  return inner_product(a.pixels(), b.pixels());
}

double squared_norm(std::span<const float> a) noexcept {
  double acc = 0.0;
  for (float v : a) acc += static_cast<double>(v) * v;
  return acc;
}

double correlation(std::span<const float> a, std::span<const float> b) {
  require(a.size() == b.size() && !a.empty(), ErrorCode::kDimMismatch,
          "correlation: length mismatch");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace ih
