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

#include "attacks/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "attacks/pair.hpp"
#include "core/error.hpp"

namespace ih {

namespace {

constexpr std::size_t kWin = 8;
constexpr std::size_t kStride = 4;

std::vector<std::size_t> starts(std::size_t extent, std::size_t win) {
  std::vector<std::size_t> s;
  for (std::size_t p = 0; p + win <= extent; p += kStride) s.push_back(p);
  return s;
}

double local_ssim(double mu_a, double mu_b, double va, double vb, double cov, double C1,
                  double C2) {
  return ((2 * mu_a * mu_b + C1) * (2 * cov + C2)) /
         ((mu_a * mu_a + mu_b * mu_b + C1) * (va + vb + C2));
}

}  // namespace

double ssim(const Image& a, const Image& b, double L) {
  require_same_dims(a, b, "ssim");
  require(std::isfinite(L) && L > 0.0, ErrorCode::kInvalidArgument,
          "ssim: dynamic range must be positive");
  const Dims& d = a.dims();
  const std::size_t wh = std::min<std::size_t>(kWin, d.height);
  const std::size_t ww = std::min<std::size_t>(kWin, d.width);
  const auto ys = starts(d.height, wh), xs = starts(d.width, ww);
  const double C1 = (0.01 * L) * (0.01 * L), C2 = (0.03 * L) * (0.03 * L);
  const double n = static_cast<double>(wh * ww);
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t c = 0; c < d.channels; ++c)
    for (std::size_t y0 : ys)
      for (std::size_t x0 : xs) {
        double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
        for (std::size_t y = y0; y < y0 + wh; ++y)
          for (std::size_t x = x0; x < x0 + ww; ++x) {
            const double u = a.at(c, y, x), v = b.at(c, y, x);
            sa += u;
            sb += v;
            saa += u * u;
            sbb += v * v;
            sab += u * v;
          }
        const double ma = sa / n, mb = sb / n;
        const double va = std::max(0.0, saa / n - ma * ma);
        const double vb = std::max(0.0, sbb / n - mb * mb);
        total += local_ssim(ma, mb, va, vb, sab / n - ma * mb, C1, C2);
        ++count;
      }
  return total / static_cast<double>(count);
}

double symmetric_range(std::span<const Image> images) {
  double mx = 0.0;
  for (const Image& im : images)
    for (float v : im.pixels()) mx = std::max(mx, static_cast<double>(std::abs(v)));
  return mx > 0.0 ? 2.0 * mx : 1.0;
}

SsimIndex::SsimIndex(std::span<const Image> images, double dynamic_range)
    : count_(images.size()), range_(dynamic_range), images_(images) {
  require(!images.empty(), ErrorCode::kInsufficientData, "ssim index: no images");
  require(std::isfinite(dynamic_range) && dynamic_range > 0.0, ErrorCode::kInvalidArgument,
          "ssim index: dynamic range must be positive");
  dims_ = images.front().dims();
  lay_.channels = dims_.channels;
  lay_.height = dims_.height;
  lay_.width = dims_.width;
  lay_.wh = std::min<std::size_t>(kWin, dims_.height);
  lay_.ww = std::min<std::size_t>(kWin, dims_.width);
  lay_.ys = starts(dims_.height, lay_.wh);
  lay_.xs = starts(dims_.width, lay_.ww);
  windows_ = lay_.channels * lay_.ys.size() * lay_.xs.size();
  mu_.resize(count_ * windows_);
  var_.resize(count_ * windows_);
  for (std::size_t j = 0; j < count_; ++j) {
    require(images[j].dims() == dims_, ErrorCode::kDimMismatch, "ssim index: mixed dims");
    window_stats(images[j], &mu_[j * windows_], &var_[j * windows_]);
  }
}

void SsimIndex::window_stats(const Image& im, double* mu, double* var) const {
  const double n = static_cast<double>(lay_.wh * lay_.ww);
  std::size_t w = 0;
  for (std::size_t c = 0; c < lay_.channels; ++c)
    for (std::size_t y0 : lay_.ys)
      for (std::size_t x0 : lay_.xs) {
        double s = 0, s2 = 0;
        for (std::size_t y = y0; y < y0 + lay_.wh; ++y)
          for (std::size_t x = x0; x < x0 + lay_.ww; ++x) {
            const double v = im.at(c, y, x);
            s += v;
            s2 += v * v;
          }
        mu[w] = s / n;
        var[w] = std::max(0.0, s2 / n - mu[w] * mu[w]);
        ++w;
      }
}

std::vector<double> SsimIndex::scores(const Image& query) const {
  require(query.dims() == dims_, ErrorCode::kDimMismatch, "ssim index: query dims differ");
  std::vector<double> qmu(windows_), qvar(windows_);
  window_stats(query, qmu.data(), qvar.data());
  const double C1 = (0.01 * range_) * (0.01 * range_), C2 = (0.03 * range_) * (0.03 * range_);
  const double n = static_cast<double>(lay_.wh * lay_.ww);
  std::vector<double> out(count_);
  for (std::size_t j = 0; j < count_; ++j) {
    const Image& im = images_[j];
    const double* mu = &mu_[j * windows_];
    const double* var = &var_[j * windows_];
    double total = 0.0;
    std::size_t w = 0;
    for (std::size_t c = 0; c < lay_.channels; ++c)
      for (std::size_t y0 : lay_.ys)
        for (std::size_t x0 : lay_.xs) {
          double sab = 0.0;
          for (std::size_t y = y0; y < y0 + lay_.wh; ++y)
            for (std::size_t x = x0; x < x0 + lay_.ww; ++x)
              sab += static_cast<double>(query.at(c, y, x)) * im.at(c, y, x);
          const double cov = sab / n - qmu[w] * mu[w];
          total += local_ssim(qmu[w], mu[w], qvar[w], var[w], cov, C1, C2);
          ++w;
        }
    out[j] = total / static_cast<double>(windows_);
  }
  return out;
}

AttackReport similarity_search_attack(const Image& xtilde, const SsimIndex& db,
                                      std::span<const std::uint32_t> db_sources,
                                      const SignMask& truth_mask, double oracle_p, Rng& rng,
                                      const std::vector<std::uint32_t>& true_sources,
                                      const SimilarityOptions& opts) {
  require(opts.m <= db.size(), ErrorCode::kInvalidArgument,
          "similarity search: m exceeds the database size");
  require(db_sources.size() == db.size(), ErrorCode::kDimMismatch,
          "similarity search: source ids do not align with the database");
  AttackReport rep;
  rep.attack = "similarity";
  rep.params = {{"m", opts.m}, {"k", opts.k}, {"oracle_p", oracle_p}, {"database", db.size()}};
  const Image demasked = demask_with_oracle(xtilde, truth_mask, oracle_p, rng);
  const auto ranked = rank_scores(db.scores(demasked));

  std::size_t best = 0;  // 1-based rank of the best true source, 0 if absent
  for (std::size_t t = 0; t < ranked.size(); ++t) {
    const std::uint32_t src = db_sources[ranked[t].first];
    if (std::find(true_sources.begin(), true_sources.end(), src) != true_sources.end()) {
      best = t + 1;
      break;
    }
  }
  for (std::size_t t = 0; t < opts.m; ++t) {
    rep.top_scores.push_back(ranked[t]);
    rep.decisions.push_back(static_cast<std::int64_t>(ranked[t].first));
  }
  rep.metrics["hit"] = (best > 0 && best <= opts.m) ? 1.0 : 0.0;
  rep.metrics["best_true_rank"] = static_cast<double>(best);
  return rep;
}

AttackReport averaging_attack(std::span<const Encryption> history, const Dataset& originals,
                              const AveragingOptions& opts, RngStream stream) {
  require(!history.empty(), ErrorCode::kInsufficientData, "averaging: empty history");
  require(originals.size() > 0, ErrorCode::kInsufficientData, "averaging: no originals");
  require(std::isfinite(opts.oracle_p) && opts.oracle_p >= 0.0 && opts.oracle_p <= 0.5,
          ErrorCode::kValidation, "averaging: oracle p must lie in [0, 0.5]");
  for (const auto& e : history)
    require(e.sample.sample_id < originals.size(), ErrorCode::kInvalidArgument,
            "averaging: sample id outside the original set");

  AttackReport rep;
  rep.attack = "averaging";
  const bool strong = opts.mode == AveragingMode::kStrong;
  rep.params = {{"mode", strong ? "strong" : "weak"},
                {"m", opts.m},
                {"oracle_p", opts.oracle_p},
                {"history", history.size()},
                {"max_probes", opts.max_probes}};

  std::vector<Image> demasked;
  demasked.reserve(history.size());
  for (std::size_t i = 0; i < history.size(); ++i) {
    Rng rng(stream.child(i));
    demasked.push_back(
        demask_with_oracle(history[i].sample.xtilde, history[i].key.mask, opts.oracle_p, rng));
  }
  const double L = symmetric_range(std::span<const Image>(originals.images));

  double corr_sum = 0.0, ssim_sum = 0.0, prec_sum = 0.0;
  std::size_t probes = 0;
  Json per = Json::array();
  if (strong) {
    const std::size_t n = originals.size();
    const std::size_t targets = opts.max_probes ? std::min(opts.max_probes, n) : n;
    for (std::size_t t = 0; t < targets; ++t) {
      std::vector<const Image*> cluster;
      for (std::size_t i = 0; i < history.size(); ++i)
        if (history[i].sample.sample_id == t) cluster.push_back(&demasked[i]);
      if (cluster.empty()) continue;
      Image rec = average_reconstruct(std::span<const Image* const>(cluster));
      const double c = correlation(rec.pixels(), originals.images[t].pixels());
      const double s = ssim(rec, originals.images[t], L);
      corr_sum += c;
      ssim_sum += s;
      per.push_back({{"target", t}, {"cluster", cluster.size()}, {"correlation", c}, {"ssim", s}});
      if (!rep.reconstruction) rep.reconstruction = std::move(rec);
      ++probes;
    }
  } else {
    require(opts.m >= 1 && opts.m < history.size(), ErrorCode::kInvalidArgument,
            "averaging: weak mode needs 1 <= m < |history|");
    const std::size_t count =
        opts.max_probes ? std::min(opts.max_probes, history.size()) : history.size();
    SsimIndex index(std::span<const Image>(demasked), symmetric_range(demasked));
    for (std::size_t q = 0; q < count; ++q) {
      auto scores = index.scores(demasked[q]);
      scores[q] = -std::numeric_limits<double>::infinity();
      const auto ranked = rank_scores(scores);
      std::vector<const Image*> cluster{&demasked[q]};
      std::size_t same = 0;
      const std::uint32_t id = history[q].sample.sample_id;
      for (std::size_t t = 0; t < opts.m; ++t) {
        cluster.push_back(&demasked[ranked[t].first]);
        same += history[ranked[t].first].sample.sample_id == id;
      }
      Image rec = average_reconstruct(std::span<const Image* const>(cluster));
      const double c = correlation(rec.pixels(), originals.images[id].pixels());
      const double s = ssim(rec, originals.images[id], L);
      const double prec = static_cast<double>(same) / static_cast<double>(opts.m);
      corr_sum += c;
      ssim_sum += s;
      prec_sum += prec;
      per.push_back({{"probe", q}, {"target", id}, {"correlation", c}, {"ssim", s},
                     {"neighbour_precision", prec}});
      if (!rep.reconstruction) rep.reconstruction = std::move(rec);
      ++probes;
    }
    rep.metrics["neighbour_precision"] = prec_sum / static_cast<double>(probes);
  }
  require(probes > 0, ErrorCode::kInsufficientData, "averaging: no probe had any encryption");
  rep.metrics["probes"] = static_cast<double>(probes);
  rep.metrics["correlation"] = corr_sum / static_cast<double>(probes);
  rep.metrics["ssim"] = ssim_sum / static_cast<double>(probes);
  rep.details["per_probe"] = per;
  return rep;
}

}  // namespace ih
