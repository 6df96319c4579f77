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

#include "encrypt/encrypt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "core/error.hpp"

namespace ih {

const char* to_string(Scheme s) noexcept {
  switch (s) {
    case Scheme::kMixup: return "mixup";
    case Scheme::kInside: return "inside";
    case Scheme::kCross: return "cross";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "mixup") return Scheme::kMixup;
  if (name == "inside") return Scheme::kInside;
  if (name == "cross") return Scheme::kCross;
  fail(ErrorCode::kInvalidArgument, "unknown scheme '" + std::string(name) + "'");
}

void SchemeParams::validate() const {
  require(k >= 1, ErrorCode::kValidation, "k must be >= 1");
  require(std::isfinite(c1) && c1 > 0.0 && c1 <= 1.0, ErrorCode::kValidation,
          "c1 must lie in (0, 1]");
  if (c1 * static_cast<double>(k) < 1.0 - 1e-12)
    fail(ErrorCode::kInfeasible, "c1*k < 1: no feasible coefficients");
  if (scheme == Scheme::kCross) {
    require(k >= 3, ErrorCode::kValidation, "cross scheme requires k >= 3");
    require(std::isfinite(c2) && c2 >= 0.0, ErrorCode::kValidation, "c2 must be >= 0");
    if (c2 > 1.0 || c2 > 2.0 * c1)
      fail(ErrorCode::kInfeasible, "c2 exceeds the reachable private coefficient mass");
  }
}

EncryptedSample mixup_encrypt(std::span<const MixSource> sources, const Coefficients& lambda) {
  require(!sources.empty(), ErrorCode::kInvalidArgument, "mixup_encrypt: no sources");
  require(sources.size() == lambda.k(), ErrorCode::kDimMismatch,
          "mixup_encrypt: |sources| != len(lambda)");
  const Image& first = *sources[0].image;
  const std::size_t d = first.size();
  std::size_t classes = 0;
  for (const auto& s : sources) {
    require(s.image != nullptr, ErrorCode::kInvalidArgument, "mixup_encrypt: null image");
    require_same_dims(first, *s.image, "mixup_encrypt");
    if (s.label) {
      if (classes == 0) classes = s.label->weights.size();
      require(s.label->weights.size() == classes, ErrorCode::kDimMismatch,
              "mixup_encrypt: class count mismatch");
    }
  }

  std::vector<double> acc(d, 0.0);
  std::vector<double> yacc(classes, 0.0);
  for (std::size_t j = 0; j < sources.size(); ++j) {
    const double l = lambda.lambda[j];
    const auto px = sources[j].image->pixels();
    for (std::size_t t = 0; t < d; ++t) acc[t] += l * px[t];
    if (sources[j].label)
      for (std::size_t c = 0; c < classes; ++c) yacc[c] += l * sources[j].label->weights[c];
  }
  EncryptedSample out;
  std::vector<float> px(d);
  for (std::size_t t = 0; t < d; ++t) px[t] = static_cast<float>(acc[t]);
  out.xtilde = Image(first.dims(), std::move(px));
  out.ytilde.weights.resize(classes);
  for (std::size_t c = 0; c < classes; ++c)
    out.ytilde.weights[c] = static_cast<float>(std::clamp(yacc[c], 0.0, 1.0));
  return out;
}

void apply_mask_inplace(Image& x, const SignMask& sigma) {
  require(x.size() == sigma.size(), ErrorCode::kDimMismatch, "apply_mask: dimension mismatch");
  auto px = x.pixels();
  for (std::size_t i = 0; i < px.size(); ++i)
    if (sigma.signs[i] < 0) px[i] = -px[i];
}

Image apply_mask(const Image& x, const SignMask& sigma) {
  Image out = x;
  apply_mask_inplace(out, sigma);
  return out;
}

Coefficients sample_cross_coefficients(std::size_t k, double c1, double c2, Rng& rng) {
  require(k >= 3, ErrorCode::kValidation, "cross coefficients require k >= 3");
  require(std::isfinite(c2) && c2 >= 0.0, ErrorCode::kValidation, "c2 must be >= 0");
  if (c2 > 1.0 || c2 > 2.0 * c1)
    fail(ErrorCode::kInfeasible, "c2 exceeds the reachable private coefficient mass");
  for (std::uint64_t attempt = 0; attempt < kRejectionCap; ++attempt) {
    Coefficients c = sample_coefficients(k, c1, rng);
    if (c.lambda[0] + c.lambda[1] >= c2) return c;
  }
  fail(ErrorCode::kInfeasible, "cross coefficients: rejection cap reached (c1=" +
                                   std::to_string(c1) + ", c2=" + std::to_string(c2) + ")");
}

namespace {

void require_labels(const Dataset& priv, const char* what) {
  require(priv.labeled(), ErrorCode::kValidation, std::string(what) + ": labels required");
}

Encryption finish(std::vector<MixSource> sources, std::vector<SourceRef> refs, Coefficients lam,
                  bool mask, Rng& rng) {
  Encryption e;
  e.sample = mixup_encrypt(sources, lam);
  const std::size_t d = e.sample.xtilde.size();
  e.key.mask = mask ? sample_sign_mask(d, rng) : SignMask::identity(d);
  if (mask) apply_mask_inplace(e.sample.xtilde, e.key.mask);
  e.key.sources = std::move(refs);
  e.key.lambda = std::move(lam);
  return e;
}

Encryption inside_core(const Image& x0, const LabelVector* y0, SourceRef ref0,
                       const Dataset& pool, std::size_t exclude, std::size_t k, double c1,
                       bool mask, Rng& rng) {
  const std::size_t partners = k - 1;
  auto idx = sample_without_replacement(pool.size(), partners, exclude, rng);
  Coefficients lam = sample_coefficients(k, c1, rng);
  std::vector<MixSource> src{{&x0, y0}};
  std::vector<SourceRef> refs{ref0};
  for (std::size_t j : idx) {
    src.push_back({&pool.images[j], pool.labeled() ? &pool.labels[j] : nullptr});
    refs.push_back({SourceTag::kPrivate, static_cast<std::uint32_t>(j)});
  }
  return finish(std::move(src), std::move(refs), std::move(lam), mask, rng);
}

Encryption cross_core(const Image& x0, const LabelVector* y0, SourceRef ref0,
                      const Dataset& pool, std::size_t exclude, const PatchSet& pub,
                      std::size_t k, double c1, double c2, bool mask, Rng& rng) {
  require(k >= 3, ErrorCode::kValidation, "cross scheme requires k >= 3");
  require(!pub.empty(), ErrorCode::kInfeasible, "cross scheme: public patch set is empty");
  require(pub.size() >= k - 2, ErrorCode::kInsufficientData,
          "cross scheme: public patch set smaller than k-2");
  require(pub.dims == x0.dims(), ErrorCode::kDimMismatch,
          "cross scheme: public patch dims differ from private dims");
  const std::size_t other = sample_without_replacement(pool.size(), 1, exclude, rng)[0];
  auto pub_idx = sample_without_replacement(pub.size(), k - 2, pub.size(), rng);
  Coefficients lam = sample_cross_coefficients(k, c1, c2, rng);
  std::vector<MixSource> src{{&x0, y0},
                             {&pool.images[other], pool.labeled() ? &pool.labels[other] : nullptr}};
  std::vector<SourceRef> refs{ref0, {SourceTag::kPrivate, static_cast<std::uint32_t>(other)}};
  for (std::size_t j : pub_idx) {
    src.push_back({&pub.patches[j], nullptr});
    refs.push_back({SourceTag::kPublic, static_cast<std::uint32_t>(j)});
  }
  return finish(std::move(src), std::move(refs), std::move(lam), mask, rng);
}

}  // namespace

Encryption instahide_encrypt_inside(const Dataset& priv, std::size_t i, std::size_t k, double c1,
                                    RngStream stream, bool mask) {
  require(k >= 1, ErrorCode::kValidation, "k must be >= 1");
  require(k <= priv.size(), ErrorCode::kInvalidArgument,
          "inside scheme: k=" + std::to_string(k) + " exceeds dataset size " +
              std::to_string(priv.size()));
  require(i < priv.size(), ErrorCode::kInvalidArgument, "sample index out of range");
  require_labels(priv, "inside scheme");
  Rng rng(stream);
  return inside_core(priv.images[i], &priv.labels[i],
                     {SourceTag::kPrivate, static_cast<std::uint32_t>(i)}, priv, i, k, c1, mask,
                     rng);
}

Encryption instahide_encrypt_cross(const Dataset& priv, std::size_t i, const PatchSet& pub,
                                   std::size_t k, double c1, double c2, RngStream stream,
                                   bool mask) {
  require(i < priv.size(), ErrorCode::kInvalidArgument, "sample index out of range");
  require(priv.size() >= 2, ErrorCode::kInsufficientData,
          "cross scheme needs at least 2 private images");
  require_labels(priv, "cross scheme");
  Rng rng(stream);
  return cross_core(priv.images[i], &priv.labels[i],
                    {SourceTag::kPrivate, static_cast<std::uint32_t>(i)}, priv, i, pub, k, c1, c2,
                    mask, rng);
}

Encryption encrypt_one(const Dataset& priv, std::size_t i, const SchemeParams& params,
                       const PatchSet* pub, RngStream stream) {
  switch (params.scheme) {
    case Scheme::kMixup: {
      require(params.k <= priv.size(), ErrorCode::kInvalidArgument,
              "mixup: k exceeds dataset size");
      require(i < priv.size(), ErrorCode::kInvalidArgument, "sample index out of range");
      Rng rng(stream);
      return inside_core(priv.images[i], priv.labeled() ? &priv.labels[i] : nullptr,
                         {SourceTag::kPrivate, static_cast<std::uint32_t>(i)}, priv, i, params.k,
                         params.c1, false, rng);
    }
    case Scheme::kInside:
      return instahide_encrypt_inside(priv, i, params.k, params.c1, stream, params.apply_mask);
    case Scheme::kCross:
      require(pub != nullptr, ErrorCode::kInvalidArgument, "cross scheme needs a patch set");
      return instahide_encrypt_cross(priv, i, *pub, params.k, params.c1, params.c2, stream,
                                     params.apply_mask);
  }
  fail(ErrorCode::kInvalidArgument, "unknown scheme");
}

Encryption encrypt_external(const Image& x, const Dataset& pool, const SchemeParams& params,
                            const PatchSet* pub, RngStream stream) {
  params.validate();
  Rng rng(stream);
  const SourceRef self{SourceTag::kExternal, 0};
  const std::size_t none = pool.size();
  if (params.scheme == Scheme::kCross) {
    require(pub != nullptr, ErrorCode::kInvalidArgument, "cross scheme needs a patch set");
    require(pool.size() >= 1, ErrorCode::kInsufficientData, "cross inference needs a pool");
    Encryption e = cross_core(x, nullptr, self, pool, none, *pub, params.k, params.c1,
                              params.c2, params.masked(), rng);
    e.sample.ytilde.weights.clear();
    return e;
  }
  require(params.k - 1 <= pool.size(), ErrorCode::kInsufficientData,
          "inference pool smaller than k-1");
  Encryption e = inside_core(x, nullptr, self, pool, none, params.k, params.c1, params.masked(),
                             rng);
  e.sample.ytilde.weights.clear();
  return e;
}

std::vector<Encryption> encrypt_epoch_with_keys(const Dataset& priv, const SchemeParams& params,
                                                std::uint32_t epoch, RngStream base,
                                                const PatchSet* pub) {
  params.validate();
  const RngStream es = base.child(epoch);
  std::vector<Encryption> out;
  out.reserve(priv.size());
  for (std::size_t i = 0; i < priv.size(); ++i) {
    Encryption e = encrypt_one(priv, i, params, pub, es.child(i));
    e.sample.epoch = epoch;
    e.sample.sample_id = static_cast<std::uint32_t>(i);
    out.push_back(std::move(e));
  }
  Rng perm(es.child(std::numeric_limits<std::uint64_t>::max()));
  for (std::size_t i = out.size(); i > 1; --i) std::swap(out[i - 1], out[perm.below(i)]);
  return out;
}

std::vector<EncryptedSample> encrypt_epoch(const Dataset& priv, const SchemeParams& params,
                                           std::uint32_t epoch, RngStream base,
                                           const PatchSet* pub) {
  std::vector<EncryptedSample> out;
  for (auto& e : encrypt_epoch_with_keys(priv, params, epoch, base, pub))
    out.push_back(std::move(e.sample));
  return out;
}

std::vector<Encryption> encrypt_history(const Dataset& priv, const SchemeParams& params,
                                        std::uint32_t epochs, RngStream base,
                                        const PatchSet* pub) {
  std::vector<Encryption> out;
  out.reserve(std::size_t{epochs} * priv.size());
  for (std::uint32_t t = 0; t < epochs; ++t)
    for (auto& e : encrypt_epoch_with_keys(priv, params, t, base, pub)) out.push_back(std::move(e));
  return out;
}

}  // namespace ih
