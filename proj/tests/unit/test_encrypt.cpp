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

#include <cmath>
#include <set>

#include "doctest.h"
#include "core/error.hpp"
#include "encrypt/challenge.hpp"
#include "encrypt/encrypt.hpp"
#include "helpers.hpp"

using namespace ih;

namespace {

Dataset gaussian_private(std::size_t n, std::uint64_t seed, std::uint16_t classes = 10) {
  Dataset d;
  d.dims = {3, 32, 32};
  d.classes = classes;
  Rng rng({seed, 0});
  for (std::size_t i = 0; i < n; ++i) {
    d.images.push_back(normalize_image(ih::testing::gaussian_image(d.dims, rng, 1.0)));
    LabelVector y{std::vector<float>(classes, 0.0f)};
    y.weights[i % classes] = 1.0f;
    d.labels.push_back(y);
  }
  d.normalized = true;
  return d;
}

PatchSet gaussian_patches(std::size_t n, std::uint64_t seed) {
  PatchSet ps;
  ps.dims = {3, 32, 32};
  ps.normalized = true;
  Rng rng({seed, 1});
  for (std::size_t i = 0; i < n; ++i) {
    ps.patches.push_back(normalize_image(ih::testing::gaussian_image(ps.dims, rng, 1.0)));
    ps.provenance.push_back({static_cast<std::uint32_t>(i), {}, 50});
  }
  return ps;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{0};
}

}  // namespace

TEST_CASE("mixup_encrypt examples") {
  Image x = ih::testing::from_values({0.25f, -1.5f, 3.0f});
  LabelVector y{{0.0f, 1.0f}};
  MixSource one[] = {{&x, &y}};
  auto out = mixup_encrypt(one, Coefficients{{1.0}});
  CHECK(out.xtilde == x);
  CHECK(out.ytilde == y);

  Image e1 = ih::testing::from_values({1, 0, 0, 0});
  Image e2 = ih::testing::from_values({0, 1, 0, 0});
  MixSource two[] = {{&e1, nullptr}, {&e2, nullptr}};
  auto mix = mixup_encrypt(two, Coefficients{{0.5, 0.5}});
  CHECK(mix.xtilde == ih::testing::from_values({0.5f, 0.5f, 0, 0}));

  Image bad = ih::testing::from_values({1, 0});
  MixSource mism[] = {{&e1, nullptr}, {&bad, nullptr}};
  CHECK(code_of([&] { mixup_encrypt(mism, Coefficients{{0.5, 0.5}}); }) ==
        ErrorCode::kDimMismatch);
  CHECK(code_of([&] { mixup_encrypt(two, Coefficients{{1.0}}); }) == ErrorCode::kDimMismatch);
}

TEST_CASE("mixup norm tracks lambda l2 norm for Gaussian sources") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng rng({s, 3});
    std::vector<Image> xs;
    for (int j = 0; j < 4; ++j)
      xs.push_back(normalize_image(ih::testing::gaussian_image({3, 32, 32}, rng, 1.0)));
    auto lam = sample_coefficients(4, 0.65, rng);
    std::vector<MixSource> src;
    for (auto& x : xs) src.push_back({&x, nullptr});
    auto out = mixup_encrypt(src, lam);
    const double n = std::sqrt(squared_norm(out.xtilde.pixels()));
    CHECK(n > lam.l2() * 0.8);
    CHECK(n < lam.l2() * 1.2);
  }
}

TEST_CASE("mixup is linear in the sources") {
  Rng rng({4, 4});
  Image a = ih::testing::gaussian_image({1, 4, 4}, rng, 1.0);
  Image b = ih::testing::gaussian_image({1, 4, 4}, rng, 1.0);
  Image a2 = a, b2 = b;
  for (std::size_t i = 0; i < a.size(); ++i) {
    a2[i] *= 2.0f;
    b2[i] *= 2.0f;
  }
  Coefficients lam{{0.3, 0.7}};
  MixSource s1[] = {{&a, nullptr}, {&b, nullptr}};
  MixSource s2[] = {{&a2, nullptr}, {&b2, nullptr}};
  auto m1 = mixup_encrypt(s1, lam), m2 = mixup_encrypt(s2, lam);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(m2.xtilde[i] == 2.0f * m1.xtilde[i]);
}

TEST_CASE("apply_mask algebra") {
  Rng rng({5, 5});
  for (int t = 0; t < 50; ++t) {
    Image x = ih::testing::gaussian_image({3, 8, 8}, rng, 1.0);
    SignMask s = sample_sign_mask(x.size(), rng);
    Image m = apply_mask(x, s);
    CHECK(apply_mask(m, s) == x);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(m[i]) == std::abs(x[i]));
  }
  Image x = ih::testing::from_values({1, -2, 3});
  CHECK(apply_mask(x, SignMask::identity(3)) == x);
  CHECK(code_of([&] { apply_mask(x, SignMask::identity(4)); }) == ErrorCode::kDimMismatch);
}

TEST_CASE("inside encryption examples") {
  Dataset priv = gaussian_private(12, 1);
  auto e = instahide_encrypt_inside(priv, 3, 1, 1.0, {9, 9});
  CHECK(e.key.sources.size() == 1);
  CHECK(e.sample.xtilde == apply_mask(priv.images[3], e.key.mask));
  CHECK(e.sample.ytilde == priv.labels[3]);

  Dataset tiny = gaussian_private(3, 2);
  CHECK(code_of([&] { instahide_encrypt_inside(tiny, 0, 4, 0.65, {1, 1}); }) ==
        ErrorCode::kInvalidArgument);

  auto a = instahide_encrypt_inside(priv, 5, 4, 0.65, RngStream{7, 0}.child(0).child(5));
  auto b = instahide_encrypt_inside(priv, 5, 4, 0.65, RngStream{7, 0}.child(0).child(5));
  auto c = instahide_encrypt_inside(priv, 5, 4, 0.65, RngStream{7, 0}.child(1).child(5));
  CHECK(a.sample.xtilde == b.sample.xtilde);
  CHECK(a.key.mask == b.key.mask);
  CHECK(a.key.sources == b.key.sources);
  CHECK(!(a.key.mask == c.key.mask));

  CHECK(a.key.sources[0] == SourceRef{SourceTag::kPrivate, 5});
  std::set<std::uint32_t> idx;
  for (auto& s : a.key.sources) idx.insert(s.index);
  CHECK(idx.size() == 4);
  CHECK(a.sample.ytilde.sum() == doctest::Approx(1.0).epsilon(1e-6));

  Dataset unlabeled = priv;
  unlabeled.labels.clear();
  unlabeled.classes = 0;
  CHECK(code_of([&] { instahide_encrypt_inside(unlabeled, 0, 2, 0.65, {1, 1}); }) ==
        ErrorCode::kValidation);
}

TEST_CASE("inside label conservation") {
  Dataset priv = gaussian_private(20, 3);
  for (std::uint64_t s = 0; s < 200; ++s) {
    auto e = instahide_encrypt_inside(priv, s % 20, 4, 0.65, {s, 11});
    CHECK(std::abs(e.sample.ytilde.sum() - 1.0) <= 1e-6);
    for (float w : e.sample.ytilde.weights) CHECK((w >= 0.0f && w <= 1.0f));
  }
}

TEST_CASE("cross encryption examples") {
  Dataset priv = gaussian_private(10, 4);
  PatchSet pub = gaussian_patches(50, 4);
  for (std::uint64_t s = 0; s < 100; ++s) {
    auto e = instahide_encrypt_cross(priv, s % 10, pub, 4, 0.65, 0.3, {s, 12});
    const double sum = e.sample.ytilde.sum();
    CHECK(sum >= 0.3 - 1e-6);
    CHECK(sum <= 1.0 + 1e-6);
    CHECK(sum == doctest::Approx(e.key.lambda.lambda[0] + e.key.lambda.lambda[1]).epsilon(1e-6));
    for (double l : e.key.lambda.lambda) CHECK(l <= 0.65);
  }
  CHECK(code_of([&] { instahide_encrypt_cross(priv, 0, pub, 3, 1.0, 1.0, {1, 1}); }) ==
        ErrorCode::kInfeasible);
  CHECK(code_of([&] { instahide_encrypt_cross(priv, 0, pub, 4, 0.65, 1.2, {1, 1}); }) ==
        ErrorCode::kInfeasible);
  CHECK(code_of([&] { instahide_encrypt_cross(priv, 0, pub, 4, 0.2, 0.3, {1, 1}); }) ==
        ErrorCode::kInfeasible);
  CHECK(code_of([&] { instahide_encrypt_cross(priv, 0, PatchSet{}, 4, 0.65, 0.3, {1, 1}); }) ==
        ErrorCode::kInfeasible);
  CHECK(code_of([&] { instahide_encrypt_cross(priv, 0, pub, 2, 0.65, 0.3, {1, 1}); }) ==
        ErrorCode::kValidation);
}

TEST_CASE("cross keys: two private tags and distinct public indices") {
  Dataset priv = gaussian_private(10, 5);
  PatchSet pub = gaussian_patches(10000, 5);
  for (std::uint64_t s = 0; s < 100; ++s) {
    auto e = instahide_encrypt_cross(priv, s % 10, pub, 6, 0.65, 0.3, {s, 13});
    int priv_tags = 0;
    std::set<std::uint32_t> pubs;
    for (auto& r : e.key.sources) {
      if (r.tag == SourceTag::kPrivate) ++priv_tags;
      else pubs.insert(r.index);
    }
    CHECK(priv_tags == 2);
    CHECK(pubs.size() == 4);
    CHECK(e.key.sources[0].index == s % 10);
    CHECK(e.key.sources[1].index != s % 10);
  }
}

TEST_CASE("encrypt_epoch examples") {
  Dataset priv = gaussian_private(10, 6);
  PatchSet pub = gaussian_patches(30, 6);
  for (Scheme sch : {Scheme::kMixup, Scheme::kInside, Scheme::kCross}) {
    SchemeParams p;
    p.scheme = sch;
    auto out = encrypt_epoch(priv, p, 3, {1, 0}, &pub);
    CHECK(out.size() == 10);
    std::set<std::uint32_t> ids;
    for (auto& s : out) {
      CHECK(s.epoch == 3);
      ids.insert(s.sample_id);
    }
    CHECK(ids.size() == 10);
  }

  SchemeParams p;
  auto e0 = encrypt_epoch_with_keys(priv, p, 0, {2, 0});
  auto e1 = encrypt_epoch_with_keys(priv, p, 1, {2, 0});
  for (auto& a : e0)
    for (auto& b : e1) CHECK(!(a.key.mask == b.key.mask));

  bool permuted = false;
  for (std::size_t i = 0; i < e0.size(); ++i) permuted |= e0[i].sample.sample_id != i;
  CHECK(permuted);

  auto again = encrypt_epoch_with_keys(priv, p, 0, {2, 0});
  for (std::size_t i = 0; i < e0.size(); ++i) CHECK(again[i].sample.xtilde == e0[i].sample.xtilde);
}

TEST_CASE("mixup scheme never masks") {
  Dataset priv = gaussian_private(6, 7);
  SchemeParams p;
  p.scheme = Scheme::kMixup;
  p.k = 2;
  p.c1 = 1.0;
  for (auto& e : encrypt_epoch_with_keys(priv, p, 0, {3, 0}))
    CHECK(e.key.mask == SignMask::identity(priv.dims.size()));
}

TEST_CASE("key freshness across a history") {
  Dataset priv = gaussian_private(50, 8);
  PatchSet pub = gaussian_patches(200, 8);
  SchemeParams p;
  p.scheme = Scheme::kCross;
  p.k = 6;
  auto hist = encrypt_history(priv, p, 50, {4, 0}, &pub);
  CHECK(hist.size() == 2500);
  std::set<std::vector<std::int8_t>> masks;
  for (auto& e : hist) masks.insert(e.key.mask.signs);
  CHECK(masks.size() == hist.size());
}

TEST_CASE("scheme params validation") {
  SchemeParams p;
  p.validate();
  p.scheme = Scheme::kCross;
  p.k = 2;
  CHECK(code_of([&] { p.validate(); }) == ErrorCode::kValidation);
  p.k = 4;
  p.c1 = 0.2;
  CHECK(code_of([&] { p.validate(); }) == ErrorCode::kInfeasible);
  CHECK(parse_scheme("cross") == Scheme::kCross);
  CHECK(code_of([] { parse_scheme("bogus"); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("encrypt_external for inference") {
  Dataset pool = gaussian_private(8, 9);
  Rng rng({10, 0});
  Image x = normalize_image(ih::testing::gaussian_image(pool.dims, rng, 1.0));
  SchemeParams p;
  p.k = 1;
  p.c1 = 1.0;
  p.apply_mask = false;
  CHECK(encrypt_external(x, pool, p, nullptr, {1, 1}).sample.xtilde == x);
  p.apply_mask = true;
  auto e = encrypt_external(x, pool, p, nullptr, {1, 1});
  CHECK(e.sample.xtilde == apply_mask(x, e.key.mask));
  CHECK(e.key.sources[0].tag == SourceTag::kExternal);
}

TEST_CASE("challenge export and leakage guard") {
  auto dir = ih::testing::temp_dir("challenge");
  Dataset priv = gaussian_private(10, 11);
  PatchSet pub = gaussian_patches(40, 11);
  SchemeParams p;
  p.scheme = Scheme::kCross;
  p.k = 6;
  std::vector<EncryptedSample> samples;
  for (auto& e : encrypt_history(priv, p, 5, {5, 0}, &pub)) samples.push_back(e.sample);
  Dataset pubd = to_challenge_dataset(samples, priv.classes);
  ChallengeMeta meta{p, 5, priv.size(), samples.size()};
  write_challenge(pubd, meta, {&priv.images, &pub.patches}, dir / "c.ihds");
  CHECK(load_dataset(dir / "c.ihds").size() == 50);
  const std::string text = challenge_meta_text(meta);
  CHECK(text.find("scheme=cross") != std::string::npos);
  CHECK(text.find("k=6") != std::string::npos);
  CHECK(text.find("seed") == std::string::npos);

  Dataset leaky = pubd;
  leaky.images[7] = priv.images[2];
  CHECK(count_plaintext_rows(leaky, {&priv.images}) == 1);
  CHECK(code_of([&] { write_challenge(leaky, meta, {&priv.images}, dir / "l.ihds"); }) ==
        ErrorCode::kValidation);
  CHECK(!std::filesystem::exists(dir / "l.ihds"));
}
