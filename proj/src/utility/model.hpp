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
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "core/dataset.hpp"
#include "core/image.hpp"
#include "core/rng.hpp"
#include "encrypt/encrypt.hpp"

namespace ih {

/// How an image is turned into model input. kRawAbs appends |x| to x, which
/// keeps a sign-invariant view available to a linear model.
enum class FeatureMap { kRaw, kRawAbs };

const char* to_string(FeatureMap f) noexcept;
FeatureMap parse_feature_map(std::string_view name);
std::size_t feature_width(FeatureMap f, std::size_t d) noexcept;
std::vector<double> features(FeatureMap f, std::span<const float> x);

/// softmax(W phi(x) + b); W is C x dim, row-major.
struct LinearSoftmaxModel {
  std::size_t classes = 0;
  std::size_t dim = 0;
  FeatureMap feature = FeatureMap::kRaw;
  std::vector<double> W;
  std::vector<double> b;

  static LinearSoftmaxModel zeros(std::size_t classes, std::size_t dim,
                                  FeatureMap f = FeatureMap::kRaw);
  bool all_finite() const noexcept;
};

struct Gradient {
  std::vector<double> W;  // C x dim
  std::vector<double> b;  // C

  double squared_norm() const noexcept;
};

std::vector<double> softmax(std::span<const double> z);
std::vector<double> logits(const LinearSoftmaxModel& m, std::span<const double> phi);

std::vector<double> forward(const LinearSoftmaxModel& m, const Image& x);

struct LossGrad {
  double loss = 0.0;
  Gradient grad;
};

/// Soft-target cross-entropy -sum y log p. The logit gradient is
/// (sum y) p - y, which reduces to p - y for normalized targets.
LossGrad loss_and_gradient(const LinearSoftmaxModel& m, const Image& x, const LabelVector& y);

struct TrainOptions {
  std::uint32_t epochs = 50;
  double lr = 0.1;
  double momentum = 0.9;
  std::size_t batch = 128;
  double l2 = 1e-4;
};

struct TrainSample {
  const Image* x = nullptr;
  const LabelVector* y = nullptr;
};

/// Produces the training set for one epoch. Returned storage must stay valid
/// until the next call.
using EpochProvider = std::function<std::vector<TrainSample>(std::uint32_t epoch)>;

struct TrainResult {
  LinearSoftmaxModel model;
  std::vector<double> epoch_loss;
};

/// Minibatch SGD with heavy-ball momentum and l2 weight decay. Each epoch
/// shuffles the provider's samples with a stream derived from `stream`.
TrainResult train(LinearSoftmaxModel model, const EpochProvider& provider,
                  const TrainOptions& opts, RngStream stream);

/// Mean of forward() over E fresh encryptions of x.
std::vector<double> predict_encrypted(const LinearSoftmaxModel& m, const Image& x,
                                      const Dataset& pool, const SchemeParams& params,
                                      const PatchSet* pub, std::size_t E, RngStream stream);

std::size_t argmax(std::span<const double> v) noexcept;
std::size_t argmax(std::span<const float> v) noexcept;

enum class EvalMode { kPlain, kEncrypted };

struct EvalOptions {
  EvalMode mode = EvalMode::kPlain;
  SchemeParams params;
  const Dataset* pool = nullptr;
  const PatchSet* pub = nullptr;
  std::size_t E = 10;
};

/// Top-1 accuracy against argmax of the true label.
double evaluate(const LinearSoftmaxModel& m, const Dataset& test, const EvalOptions& opts,
                RngStream stream);

/// IHMD: "IHMD" | C u16 | dim u32 | W then b as f32 LE.
void save_model(const LinearSoftmaxModel& m, const std::filesystem::path& path);
LinearSoftmaxModel load_model(const std::filesystem::path& path);
std::vector<std::uint8_t> encode_model(const LinearSoftmaxModel& m);
LinearSoftmaxModel decode_model(const std::vector<std::uint8_t>& bytes);

/// IHMD stores only the input width; recover the feature map from the image
/// width (dim == d -> raw, dim == 2d -> raw-abs).
void bind_feature_map(LinearSoftmaxModel& m, std::size_t image_dim);

}  // namespace ih
