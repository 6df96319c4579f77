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

#include "attacks/pair.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "core/error.hpp"

namespace ih {

double pair_share_score(const EncryptedSample& a, const EncryptedSample& b) {
  return inner_product(a.xtilde, b.xtilde);
}

double pair_midpoint_threshold(double nu, std::size_t k, std::size_t pairs, std::size_t d,
                               double delta) {
  require(k >= 1 && d >= 1 && pairs >= 1, ErrorCode::kInvalidArgument,
          "pair threshold: k, d and pair count must be positive");
  require(delta > 0.0 && delta < 1.0, ErrorCode::kInvalidArgument,
          "pair threshold: delta must lie in (0, 1)");
  const double member = nu / static_cast<double>(k);
  const double non = nu * std::sqrt(2.0 * std::log(2.0 * static_cast<double>(pairs) / delta)) /
                     std::sqrt(static_cast<double>(d));
  return std::sqrt(member * non);
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

bool share_private(const EncryptionKey& a, const EncryptionKey& b) {
  for (const auto& x : a.sources)
    if (x.tag == SourceTag::kPrivate)
      for (const auto& y : b.sources)
        if (y.tag == SourceTag::kPrivate && x.index == y.index) return true;
  return false;
}

}  // namespace

AttackReport pair_detection_attack(std::span<const EncryptedSample> history,
                                   const PairOptions& opts,
                                   const std::vector<EncryptionKey>* keys) {
  require(!history.empty(), ErrorCode::kInsufficientData, "pair detection: empty history");
  require(keys == nullptr || keys->size() == history.size(), ErrorCode::kDimMismatch,
          "pair detection: keys do not align with history");
  const std::size_t n = history.size();
  const std::size_t d = history.front().xtilde.size();
  const std::size_t P = n * (n - 1) / 2;

  AttackReport rep;
  rep.attack = "pair";
  rep.params = {{"k", opts.k}, {"delta", opts.delta}, {"history", n}};
  rep.decisions.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) rep.decisions[i] = static_cast<std::int64_t>(i);
  rep.metrics["pairs"] = static_cast<double>(P);
  if (P == 0) {
    rep.decisions.clear();
    rep.metrics["detected_pairs"] = 0;
    rep.metrics["clusters"] = 0;
    return rep;
  }

  double nu = 0.0;
  for (const auto& s : history) {
    require(s.xtilde.size() == d, ErrorCode::kDimMismatch, "pair detection: mixed dims");
    nu += squared_norm(s.xtilde.pixels());
  }
  nu /= static_cast<double>(n);
  const double thr = opts.threshold ? *opts.threshold
                                    : pair_midpoint_threshold(nu, opts.k, P, d, opts.delta);
  rep.params["threshold"] = thr;
  rep.params["threshold_source"] = opts.threshold ? "user" : "midpoint";
  rep.metrics["threshold"] = thr;

  std::vector<float> abs_scores(P);
  std::vector<char> truth;
  if (keys) truth.resize(P);
  UnionFind uf(n);
  std::size_t detected = 0, true_pos = 0, positives = 0;
  std::size_t p = 0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b, ++p) {
      const double s = std::abs(pair_share_score(history[a], history[b]));
      abs_scores[p] = static_cast<float>(s);
      const bool hit = s >= thr;
      const bool shared = keys && share_private((*keys)[a], (*keys)[b]);
      if (keys) truth[p] = shared;
      positives += shared;
      if (hit) {
        ++detected;
        true_pos += shared;
        uf.unite(a, b);
      }
    }
  }

  std::vector<std::size_t> cluster_size(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    rep.decisions[i] = static_cast<std::int64_t>(uf.find(i));
    cluster_size[uf.find(i)]++;
  }
  std::size_t clusters = 0, largest_root = 0;
  Json sizes = Json::array();
  for (std::size_t i = 0; i < n; ++i)
    if (cluster_size[i] >= 2) {
      ++clusters;
      sizes.push_back(cluster_size[i]);
      if (cluster_size[i] > cluster_size[largest_root]) largest_root = i;
    }
  rep.metrics["detected_pairs"] = static_cast<double>(detected);
  rep.metrics["clusters"] = static_cast<double>(clusters);
  rep.details["cluster_sizes"] = sizes;
  if (clusters > 0) {
    std::vector<const Image*> members;
    for (std::size_t i = 0; i < n; ++i)
      if (uf.find(i) == largest_root) members.push_back(&history[i].xtilde);
    rep.reconstruction = average_reconstruct(std::span<const Image* const>(members));
  }

  // Highest-scoring pairs, for the report and precision@K.
  std::vector<std::uint32_t> order(P);
  std::iota(order.begin(), order.end(), 0u);
  const std::size_t K = keys ? std::max<std::size_t>(positives, 1) : std::min<std::size_t>(P, 20);
  const std::size_t keep = std::min(P, std::max<std::size_t>(K, 20));
  auto cmp = [&](std::uint32_t x, std::uint32_t y) {
    return abs_scores[x] != abs_scores[y] ? abs_scores[x] > abs_scores[y] : x < y;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                    cmp);
  for (std::size_t t = 0; t < std::min<std::size_t>(keep, 20); ++t)
    rep.top_scores.emplace_back(order[t], abs_scores[order[t]]);

  if (keys) {
    std::size_t top_true = 0;
    for (std::size_t t = 0; t < std::min(K, P); ++t) top_true += truth[order[t]];
    rep.metrics["positives"] = static_cast<double>(positives);
    rep.metrics["base_rate"] = static_cast<double>(positives) / static_cast<double>(P);
    rep.metrics["precision"] =
        detected ? static_cast<double>(true_pos) / static_cast<double>(detected) : 0.0;
    rep.metrics["recall"] =
        positives ? static_cast<double>(true_pos) / static_cast<double>(positives) : 0.0;
    rep.metrics["precision_at_k"] =
        static_cast<double>(top_true) / static_cast<double>(std::min(K, P));
  }
  return rep;
}

Image average_reconstruct(std::span<const Image* const> cluster) {
  require(!cluster.empty(), ErrorCode::kInsufficientData, "average_reconstruct: empty cluster");
  const Image& first = *cluster.front();
  std::vector<double> acc(first.size(), 0.0);
  for (const Image* im : cluster) {
    require_same_dims(first, *im, "average_reconstruct");
    const auto px = im->pixels();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += px[i];
  }
  std::vector<float> out(acc.size());
  const double n = static_cast<double>(cluster.size());
  for (std::size_t i = 0; i < acc.size(); ++i) out[i] = static_cast<float>(acc[i] / n);
  return Image(first.dims(), std::move(out));
}

Image average_reconstruct(std::span<const Image> cluster) {
  std::vector<const Image*> ptrs;
  for (const Image& im : cluster) ptrs.push_back(&im);
  return average_reconstruct(std::span<const Image* const>(ptrs));
}

}  // namespace ih
