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

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "attacks/gradmatch.hpp"
#include "attacks/pair.hpp"
#include "attacks/report.hpp"
#include "attacks/scan.hpp"
#include "attacks/similarity.hpp"
#include "core/error.hpp"
#include "helpers.hpp"

using namespace ih;
using ih::testing::gaussian_image;

namespace {

constexpr Dims kDims{3, 32, 32};
constexpr double kD = 3072.0;

Image unit_gaussian(Rng& rng) { return normalize_image(gaussian_image(kDims, rng, 1.0)); }

Image iid_gaussian(Rng& rng) { return gaussian_image(kDims, rng, 1.0 / std::sqrt(kD)); }

Image add(const Image& a, const Image& b, double wa = 1.0, double wb = 1.0) {
  std::vector<float> px(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) px[i] = static_cast<float>(wa * a[i] + wb * b[i]);
  return Image(a.dims(), std::move(px));
}

EncryptedSample as_sample(Image x) {
  EncryptedSample s;
  s.xtilde = std::move(x);
  return s;
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

TEST_CASE("pair_share_score examples") {
  Rng rng({1, 0});
  Image a = add(unit_gaussian(rng), unit_gaussian(rng), 0.3, 0.7);
  CHECK(pair_share_score(as_sample(a), as_sample(a)) ==
        doctest::Approx(squared_norm(a.pixels())).epsilon(1e-12));
  CHECK(code_of([&] {
          pair_share_score(as_sample(a), as_sample(ih::testing::from_values({1, 2})));
        }) == ErrorCode::kDimMismatch);
}

TEST_CASE("pair scores: disjoint bound and shared-source gap") {
  const double n = 2, delta = 0.01;
  const double L = std::log(kD * n / delta);
  const double bound = 4.0 * std::sqrt(kD) * L * L / kD;
  int within = 0, gap = 0;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    Rng rng({t, 21});
    Image x1 = iid_gaussian(rng), x2 = iid_gaussian(rng), x2p = iid_gaussian(rng),
          x3 = iid_gaussian(rng), x4 = iid_gaussian(rng);
    const double disjoint = pair_share_score(as_sample(add(x1, x2)), as_sample(add(x3, x4)));
    within += std::abs(disjoint) <= bound;
    const double shared = pair_share_score(as_sample(add(x3, x1)), as_sample(add(x3, x2)));
    const double other = pair_share_score(as_sample(add(x3, x1)), as_sample(add(x2, x2p)));
    gap += std::abs(shared) >= 2.0 * std::abs(other);
  }
  CHECK(within >= 990);
  CHECK(gap >= 950);
}

TEST_CASE("pair_detection_attack edge cases") {
  Rng rng({2, 0});
  std::vector<EncryptedSample> one{as_sample(unit_gaussian(rng))};
  auto rep = pair_detection_attack(one, {});
  CHECK(rep.decisions.empty());
  CHECK(rep.metric("pairs") == 0.0);
  CHECK(code_of([] { pair_detection_attack(std::span<const EncryptedSample>{}, {}); }) ==
        ErrorCode::kInsufficientData);
}

TEST_CASE("pair_detection_attack finds shared sources on a small mixup history") {
  Dataset priv;
  priv.dims = kDims;
  priv.classes = 2;
  Rng rng({3, 0});
  for (int i = 0; i < 10; ++i) {
    priv.images.push_back(unit_gaussian(rng));
    priv.labels.push_back(LabelVector{{1, 0}});
  }
  SchemeParams p;
  p.scheme = Scheme::kMixup;
  p.k = 2;
  p.c1 = 1.0;
  auto hist = encrypt_history(priv, p, 5, {4, 0});
  std::vector<EncryptedSample> samples;
  std::vector<EncryptionKey> keys;
  for (auto& e : hist) {
    samples.push_back(e.sample);
    keys.push_back(e.key);
  }
  PairOptions o;
  o.k = 2;
  auto rep = pair_detection_attack(samples, o, &keys);
  CHECK(rep.metric("precision") >= 0.95);
  CHECK(rep.metric("base_rate") > 0.0);
  CHECK(rep.metric("precision_at_k") > rep.metric("base_rate"));
  CHECK(rep.decisions.size() == samples.size());
  CHECK(rep.to_json().contains("top_scores"));
}

TEST_CASE("average_reconstruct examples") {
  Rng rng({5, 0});
  Image x = unit_gaussian(rng);
  std::vector<Image> same(3, x);
  CHECK(average_reconstruct(same) == x);

  double prev = -1.0;
  for (std::size_t m : {2u, 8u, 32u}) {
    double corr = 0.0;
    for (std::uint64_t t = 0; t < 20; ++t) {
      Rng r({t, m});
      std::vector<Image> cl;
      for (std::size_t j = 0; j < m; ++j) cl.push_back(add(x, unit_gaussian(r), 0.4, 0.6));
      corr += correlation(average_reconstruct(cl).pixels(), x.pixels());
    }
    CHECK(corr > prev);
    prev = corr;
  }
  std::vector<Image> mism{x, ih::testing::from_values({1, 2})};
  CHECK(code_of([&] { average_reconstruct(mism); }) == ErrorCode::kDimMismatch);
}

TEST_CASE("public_scan_attack examples") {
  Rng rng({6, 0});
  std::vector<Image> pub;
  for (int j = 0; j < 200; ++j) pub.push_back(unit_gaussian(rng));
  ScanOptions o;
  o.k = 1;
  std::vector<std::size_t> members{17};
  auto rep = public_scan_attack(pub[17], pub, o, &members);
  CHECK(rep.top_scores.front().first == 17);
  CHECK(rep.metric("recall") == 1.0);
  CHECK(rep.metric("rank_of_truth") == 1.0);
  CHECK(rep.metric("all_members_top") == 1.0);
  CHECK(code_of([&] { public_scan_attack(pub[0], std::span<const Image>{}, o); }) ==
        ErrorCode::kInsufficientData);

  // Equal-weight 4-mix: all members above all others.
  Image mix = add(add(pub[1], pub[2]), add(pub[3], pub[4]));
  o.k = 4;
  std::vector<std::size_t> four{1, 2, 3, 4};
  auto r4 = public_scan_attack(mix, pub, o, &four);
  CHECK(r4.metric("separation") > 0.0);
  CHECK(r4.metric("recall") == 1.0);
  CHECK(r4.metric("beta_gap") >= 2.0);
}

TEST_CASE("scan_midpoint_threshold lies between the two scales") {
  const double t = scan_midpoint_threshold(2.0, 1.0, 1000, 3072, 4, 0.01);
  CHECK(t < 2.0 / 2.0);
  CHECK(t > 2.0 * std::sqrt(2 * std::log(2000 / 0.01)) / std::sqrt(3072.0));
  CHECK_THROWS_AS(scan_midpoint_threshold(1, 1, 10, 10, 1, 0.0), Error);
}

TEST_CASE("recover_private_residual examples") {
  Rng rng({7, 0});
  Image xp = unit_gaussian(rng), z = unit_gaussian(rng);
  Image xt = add(xp, z, 0.4, 0.6);
  std::vector<Image> members{z};
  Image res = recover_private_residual(xt, members, Coefficients{{0.6}});
  double err = 0, nn = 0;
  for (std::size_t i = 0; i < res.size(); ++i) {
    const double want = 0.4 * xp[i];
    err += (res[i] - want) * (res[i] - want);
    nn += want * want;
  }
  CHECK(std::sqrt(err / nn) <= 1e-5);

  // Least squares without lambda recovers the same residual up to noise.
  Image ols = recover_private_residual(xt, members);
  CHECK(correlation(ols.pixels(), xp.pixels()) > 0.99);

  int low = 0;
  for (std::uint64_t t = 0; t < 20; ++t) {
    Rng r({t, 9});
    Image p = unit_gaussian(r), a = unit_gaussian(r), wrong = unit_gaussian(r);
    Image mix = add(p, a, 0.3, 0.7);
    std::vector<Image> wm{wrong};
    low += correlation(recover_private_residual(mix, wm).pixels(), p.pixels()) < 0.5;
  }
  CHECK(low == 20);

  std::vector<Image> dep{z, add(z, z, 2.0, 0.0)};
  CHECK(code_of([&] { recover_private_residual(xt, dep); }) == ErrorCode::kDegenerate);
}

TEST_CASE("braverman_statistic examples") {
  Image x = ih::testing::from_values({1, 2, 0, 0});
  Image s = ih::testing::from_values({0, 0, 3, -1});
  CHECK(braverman_statistic(x, s) == doctest::Approx(-(1.0 / 4) * 5 * 10));

  Rng rng({8, 0});
  for (int t = 0; t < 20; ++t) {
    Image m = add(unit_gaussian(rng), unit_gaussian(rng), 0.5, 0.5);
    Image masked = apply_mask(m, sample_sign_mask(m.size(), rng));
    Image c = unit_gaussian(rng);
    CHECK(braverman_statistic(m, c) == braverman_statistic(masked, c));
  }
  CHECK_THROWS_AS(braverman_statistic(x, ih::testing::from_values({1})), Error);
}

TEST_CASE("braverman attack ranks members ahead, less so for larger k") {
  const std::size_t N = 2000;
  double gap4 = 0.0, gap6 = 0.0;
  for (std::uint64_t t = 0; t < 6; ++t) {
    Rng rng({t, 31});
    std::vector<Image> pub;
    for (std::size_t j = 0; j < N; ++j) pub.push_back(iid_gaussian(rng));
    for (std::size_t k : {4u, 6u}) {
      Image mix = pub[0];
      std::vector<std::size_t> mem{0};
      for (std::size_t j = 1; j < k; ++j) {
        mix = add(mix, pub[j]);
        mem.push_back(j);
      }
      mix = apply_mask(mix, sample_sign_mask(mix.size(), rng));
      auto rep = braverman_attack(mix, pub, 10, &mem);
      const double g = rep.metric("nonmember_median_rank") - rep.metric("member_median_rank");
      (k == 4 ? gap4 : gap6) += g;
    }
  }
  CHECK(gap4 > 0.0);
  CHECK(gap6 < gap4);
}

TEST_CASE("demask_with_oracle examples") {
  Rng rng({9, 0});
  Image m = unit_gaussian(rng);
  SignMask s = sample_sign_mask(m.size(), rng);
  Image xt = apply_mask(m, s);
  CHECK(demask_with_oracle(xt, s, 0.0, rng) == m);

  Image half = demask_with_oracle(xt, s, 0.5, rng);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < m.size(); ++i) agree += (half[i] == m[i]);
  const double f = static_cast<double>(agree) / m.size();
  CHECK(f > 0.48);
  CHECK(f < 0.52);
  CHECK_THROWS_AS(demask_with_oracle(xt, s, 0.6, rng), Error);
  CHECK_THROWS_AS(demask_with_oracle(xt, SignMask::identity(3), 0.1, rng), Error);
}

TEST_CASE("ssim examples") {
  Rng rng({10, 0});
  for (int t = 0; t < 10; ++t) {
    Image a = unit_gaussian(rng), b = unit_gaussian(rng);
    const double L = 2.0 * 0.1;
    CHECK(ssim(a, a, L) == doctest::Approx(1.0).epsilon(1e-12));
    // Windows start on even coordinates, so 2x2 saddle cells make every
    // window zero-mean and only the structure term changes sign.
    Image tex(kDims);
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t y = 0; y < 32; y += 2)
        for (std::size_t x = 0; x < 32; x += 2) {
          const float v = static_cast<float>(rng.normal());
          tex[(c * 32 + y) * 32 + x] = v;
          tex[(c * 32 + y + 1) * 32 + x + 1] = v;
          tex[(c * 32 + y) * 32 + x + 1] = -v;
          tex[(c * 32 + y + 1) * 32 + x] = -v;
        }
    const double Lt = symmetric_range(std::span<const Image>(&tex, 1));
    CHECK(ssim(tex, add(tex, tex, -1.0, 0.0), Lt) < 0.0);
    CHECK(std::abs(ssim(a, b, L) - ssim(b, a, L)) <= 1e-9);
    const double v = ssim(a, b, L);
    CHECK((v >= -1.0 && v <= 1.0));
  }
  Image a = unit_gaussian(rng);
  CHECK_THROWS_AS(ssim(a, a, 0.0), Error);
  CHECK_THROWS_AS(ssim(a, ih::testing::from_values({1}), 1.0), Error);
  // Planes smaller than the window use one window.
  Image s1 = ih::testing::from_values({1, 2, 3});
  CHECK(ssim(s1, s1, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("ssim index agrees with direct ssim") {
  Rng rng({11, 0});
  std::vector<Image> db;
  for (int j = 0; j < 5; ++j) db.push_back(unit_gaussian(rng));
  SsimIndex idx(db, 0.3);
  Image q = unit_gaussian(rng);
  auto sc = idx.scores(q);
  for (std::size_t j = 0; j < db.size(); ++j)
    CHECK(sc[j] == doctest::Approx(ssim(q, db[j], 0.3)).epsilon(1e-10));
}

TEST_CASE("similarity_search_attack examples") {
  Rng rng({12, 0});
  std::vector<Image> db;
  std::vector<std::uint32_t> src;
  for (std::uint32_t j = 0; j < 50; ++j) {
    db.push_back(unit_gaussian(rng));
    src.push_back(j);
  }
  SsimIndex idx(db, symmetric_range(db));
  Image mix = add(db[7], unit_gaussian(rng), 0.95, 0.05);
  SignMask s = sample_sign_mask(mix.size(), rng);
  Image xt = apply_mask(mix, s);
  SimilarityOptions o;
  o.m = 1;
  auto rep = similarity_search_attack(xt, idx, src, s, 0.0, rng, {7}, o);
  CHECK(rep.metric("hit") == 1.0);
  CHECK(rep.metric("best_true_rank") == 1.0);

  o.m = 0;
  CHECK(similarity_search_attack(xt, idx, src, s, 0.0, rng, {7}, o).metric("hit") == 0.0);
  o.m = 51;
  CHECK(code_of([&] { similarity_search_attack(xt, idx, src, s, 0.0, rng, {7}, o); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("averaging_attack examples") {
  Dataset priv;
  priv.dims = kDims;
  priv.classes = 2;
  Rng rng({13, 0});
  for (int i = 0; i < 6; ++i) {
    priv.images.push_back(unit_gaussian(rng));
    priv.labels.push_back(LabelVector{{0, 1}});
  }
  SchemeParams p;
  p.k = 1;
  p.c1 = 1.0;
  auto hist = encrypt_history(priv, p, 4, {1, 0});
  AveragingOptions o;
  o.oracle_p = 0.0;
  auto rep = averaging_attack(hist, priv, o, {2, 0});
  REQUIRE(rep.reconstruction.has_value());
  for (std::size_t i = 0; i < priv.dims.size(); ++i)
    CHECK(std::abs((*rep.reconstruction)[i] - priv.images[0][i]) <= 1e-5);
  CHECK(rep.metric("correlation") == doctest::Approx(1.0));

  o.mode = AveragingMode::kWeak;
  o.m = hist.size();
  CHECK(code_of([&] { averaging_attack(hist, priv, o, {2, 0}); }) ==
        ErrorCode::kInvalidArgument);
  o.m = 3;
  auto weak = averaging_attack(hist, priv, o, {2, 0});
  CHECK(weak.metric("neighbour_precision") == doctest::Approx(1.0));
  CHECK(code_of([&] { averaging_attack(std::span<const Encryption>{}, priv, o, {2, 0}); }) ==
        ErrorCode::kInsufficientData);
}

TEST_CASE("gradient matching: fixed point exits at step 0") {
  auto m = LinearSoftmaxModel::zeros(4, 12);
  Rng rng({14, 0});
  for (double& w : m.W) w = rng.normal() / std::sqrt(12.0);
  const Dims dims{1, 3, 4};
  const RngStream stream{15, 0};
  auto init = gradient_matching_init(12, 4, stream.child(0));
  Gradient g;
  {
    auto ev = gradient_matching_objective(m, Gradient{std::vector<double>(48, 0.0),
                                                      std::vector<double>(4, 0.0)},
                                          init.x, init.y);
    (void)ev;
    double s = 0;
    for (double v : init.y) s += v;
    std::vector<double> phi = init.x;
    auto p = softmax(logits(m, phi));
    g.b.resize(4);
    g.W.resize(48);
    for (std::size_t c = 0; c < 4; ++c) {
      g.b[c] = s * p[c] - init.y[c];
      for (std::size_t i = 0; i < 12; ++i) g.W[c * 12 + i] = g.b[c] * phi[i];
    }
  }
  auto rep = gradient_matching_attack(g, m, dims, {}, stream);
  CHECK(rep.metric("initial_objective") == 0.0);
  CHECK(rep.metric("steps_run") == 0.0);
}

TEST_CASE("gradient matching recovers a small victim and checks its gradient") {
  const std::size_t C = 5, d = 48;
  auto m = LinearSoftmaxModel::zeros(C, d);
  Rng rng({16, 0});
  for (double& w : m.W) w = rng.normal() / std::sqrt(static_cast<double>(d));
  Image x0 = normalize_image(gaussian_image({3, 4, 4}, rng, 1.0));
  LabelVector y0{std::vector<float>(C, 0.0f)};
  y0.weights[2] = 1.0f;
  auto g = loss_and_gradient(m, x0, y0).grad;
  GradMatchOptions o;
  o.steps = 3000;
  o.lr = 0.1;
  auto rep = gradient_matching_attack(g, m, x0.dims(), o, {17, 0}, &x0);
  CHECK(rep.metric("fd_rel_error") <= 1e-4);
  CHECK(rep.metric("final_objective") < rep.metric("initial_objective"));
  CHECK(rep.metric("correlation") >= 0.99);
  CHECK(rep.details["trajectory"].size() > 2);

  o.lr = 1e9;
  CHECK(code_of([&] { gradient_matching_attack(g, m, x0.dims(), o, {17, 0}); }) ==
        ErrorCode::kDiverged);
}

TEST_CASE("gradient matching objective matches finite differences with the abs lift") {
  const std::size_t C = 3, d = 6;
  auto m = LinearSoftmaxModel::zeros(C, 2 * d, FeatureMap::kRawAbs);
  Rng rng({18, 0});
  for (double& w : m.W) w = rng.normal();
  Gradient g{std::vector<double>(C * 2 * d), std::vector<double>(C)};
  for (double& v : g.W) v = 0.1 * rng.normal();
  for (double& v : g.b) v = 0.1 * rng.normal();
  std::vector<double> x(d), y(C);
  for (double& v : x) v = rng.normal();
  for (double& v : y) v = rng.normal();
  auto ev = gradient_matching_objective(m, g, x, y);
  const double h = 1e-6;
  for (std::size_t i = 0; i < d; ++i) {
    auto up = x, dn = x;
    up[i] += h;
    dn[i] -= h;
    const double fd = (gradient_matching_objective(m, g, up, y).D -
                       gradient_matching_objective(m, g, dn, y).D) / (2 * h);
    CHECK(fd == doctest::Approx(ev.dx[i]).epsilon(1e-5));
  }
  for (std::size_t c = 0; c < C; ++c) {
    auto up = y, dn = y;
    up[c] += h;
    dn[c] -= h;
    const double fd = (gradient_matching_objective(m, g, x, up).D -
                       gradient_matching_objective(m, g, x, dn).D) / (2 * h);
    CHECK(fd == doctest::Approx(ev.dy[c]).epsilon(1e-5));
  }
}

TEST_CASE("report json layout") {
  AttackReport r;
  r.attack = "x";
  r.metrics["b"] = 1.0;
  r.metrics["a"] = std::nan("");
  r.top_scores = {{3, 0.5}};
  auto j = r.to_json();
  CHECK(j["metrics"]["a"].is_null());
  CHECK(j.begin().key() == "attack");
  CHECK(!j.contains("reconstruction_path"));
  r.reconstruction_path = "rec.ihds";
  CHECK(r.to_json()["reconstruction_path"] == "rec.ihds");
  CHECK_THROWS_AS(r.metric("zzz"), Error);
}
