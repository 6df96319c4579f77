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
#include <string>
#include <string_view>
#include <vector>

#include "core/dataset.hpp"
#include "core/image.hpp"
#include "core/rng.hpp"
#include "core/sampling.hpp"
#include "publicprep/patchset.hpp"

namespace ih {

enum class Scheme { kMixup, kInside, kCross };

const char* to_string(Scheme s) noexcept;
Scheme parse_scheme(std::string_view name);  // kInvalidArgument on unknown

struct SchemeParams {
  Scheme scheme = Scheme::kInside;
  std::size_t k = 4;
  double c1 = 0.65;
  double c2 = 0.3;
  bool apply_mask = true;  // ignored for mixup, which never masks

  bool masked() const noexcept { return scheme != Scheme::kMixup && apply_mask; }
  /// Throws kValidation for out-of-range parameters, kInfeasible for
  /// constraint combinations with no feasible lambda.
  void validate() const;
};

enum class SourceTag : std::uint8_t { kPrivate = 0, kPublic = 1, kExternal = 2 };

struct SourceRef {
  SourceTag tag = SourceTag::kPrivate;
  std::uint32_t index = 0;
  friend bool operator==(const SourceRef&, const SourceRef&) = default;
};

/// One-time key. Harness-side only; never serialized into challenge output.
struct EncryptionKey {
  std::vector<SourceRef> sources;
  Coefficients lambda;
  SignMask mask;
};

struct EncryptedSample {
  Image xtilde;
  LabelVector ytilde;
  std::uint32_t epoch = 0;
  std::uint32_t sample_id = 0;
};

struct Encryption {
  EncryptedSample sample;
  EncryptionKey key;
};

struct MixSource {
  const Image* image = nullptr;
  const LabelVector* label = nullptr;  // null: contributes no label mass
};

/// xtilde = sum lambda_j x_j, ytilde = sum lambda_j y_j (labelled sources only).
EncryptedSample mixup_encrypt(std::span<const MixSource> sources, const Coefficients& lambda);

/// output_i = sigma_i * x_i.
Image apply_mask(const Image& x, const SignMask& sigma);
void apply_mask_inplace(Image& x, const SignMask& sigma);

Encryption instahide_encrypt_inside(const Dataset& priv, std::size_t i, std::size_t k, double c1,
                                    RngStream stream, bool mask = true);

Encryption instahide_encrypt_cross(const Dataset& priv, std::size_t i, const PatchSet& pub,
                                   std::size_t k, double c1, double c2, RngStream stream,
                                   bool mask = true);

/// Lambda with max <= c1 and lambda_0 + lambda_1 >= c2, by joint rejection.
Coefficients sample_cross_coefficients(std::size_t k, double c1, double c2, Rng& rng);

/// Dispatch on params.scheme for a single private image.
Encryption encrypt_one(const Dataset& priv, std::size_t i, const SchemeParams& params,
                       const PatchSet* pub, RngStream stream);

/// Encrypts an image outside the private set (encrypted inference). Partners
/// come from `pool` (and `pub` for cross); the label is not mixed.
Encryption encrypt_external(const Image& x, const Dataset& pool, const SchemeParams& params,
                            const PatchSet* pub, RngStream stream);

/// One encryption per private image with per-sample streams
/// base.child(epoch).child(i), then a seeded re-batching permutation.
std::vector<Encryption> encrypt_epoch_with_keys(const Dataset& priv, const SchemeParams& params,
                                                std::uint32_t epoch, RngStream base,
                                                const PatchSet* pub = nullptr);
std::vector<EncryptedSample> encrypt_epoch(const Dataset& priv, const SchemeParams& params,
                                           std::uint32_t epoch, RngStream base,
                                           const PatchSet* pub = nullptr);

/// Epochs [0, epochs) concatenated in order.
std::vector<Encryption> encrypt_history(const Dataset& priv, const SchemeParams& params,
                                        std::uint32_t epochs, RngStream base,
                                        const PatchSet* pub = nullptr);

}  // namespace ih
