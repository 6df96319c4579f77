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

#include "attacks/scan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "core/error.hpp"

namespace ih {

double scan_midpoint_threshold(double xtilde_norm, double mean_candidate_norm, std::size_t N,
                               std::size_t d, std::size_t k, double delta) {
  require(N >= 1 && d >= 1 && k >= 1, ErrorCode::kInvalidArgument,
          "scan threshold: N, d and k must be positive");
  require(delta > 0.0 && delta < 1.0, ErrorCode::kInvalidArgument,
          "scan threshold: delta must lie in (0, 1)");
  const double scale = xtilde_norm * mean_candidate_norm;
  const double member = scale / std::sqrt(static_cast<double>(k));
  const double non = scale * std::sqrt(2.0 * std::log(2.0 * static_cast<double>(N) / delta)) /
                     std::sqrt(static_cast<double>(d));
  return std::sqrt(member * non);
}

namespace {

// Ranks are 1-based positions in the (score desc, id asc) order.
std::vector<std::size_t> rank_positions(const std::vector<std::pair<std::uint64_t, double>>& r) {
  std::vector<std::size_t> pos(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) pos[r[i].first] = i + 1;
  return pos;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

void check_members(const std::vector<std::size_t>* members, std::size_t N) {
  if (!members) return;
  require(!members->empty(), ErrorCode::kInvalidArgument, "ground truth has no members");
  for (std::size_t m : *members)
    require(m < N, ErrorCode::kInvalidArgument, "ground-truth member id out of range");
}

}  // namespace

AttackReport public_scan_attack(const Image& xtilde, std::span<const Image> candidates,
                                const ScanOptions& opts, const std::vector<std::size_t>* members) {
  require(!candidates.empty(), ErrorCode::kInsufficientData, "public scan: empty patch set");
  const std::size_t N = candidates.size();
  check_members(members, N);
  const std::size_t d = xtilde.size();

  std::vector<double> scores(N);
  double norm_sum = 0.0;
  for (std::size_t j = 0; j < N; ++j) {
    scores[j] = inner_product(xtilde, candidates[j]);
    norm_sum += std::sqrt(squared_norm(candidates[j].pixels()));
  }
  const double xnorm = std::sqrt(squared_norm(xtilde.pixels()));
  const double thr = opts.threshold ? *opts.threshold
                                    : scan_midpoint_threshold(xnorm, norm_sum / N, N, d, opts.k,
                                                              opts.delta);
  const auto ranked = rank_scores(scores);

  AttackReport rep;
  rep.attack = "public-scan";
  rep.params = {{"k", opts.k}, {"delta", opts.delta}, {"candidates", N}, {"threshold", thr},
                {"threshold_source", opts.threshold ? "user" : "midpoint"}};
  rep.metrics["threshold"] = thr;
  for (std::size_t t = 0; t < std::min(opts.top, N); ++t) rep.top_scores.push_back(ranked[t]);
  for (const auto& [id, s] : ranked) {
    if (!(s >= thr)) break;
    rep.decisions.push_back(static_cast<std::int64_t>(id));
  }
  rep.metrics["detected"] = static_cast<double>(rep.decisions.size());

  if (members) {
    const auto pos = rank_positions(ranked);
    std::vector<char> is_member(N, 0);
    for (std::size_t m : *members) is_member[m] = 1;
    double min_member = std::numeric_limits<double>::infinity();
    double max_non = -std::numeric_limits<double>::infinity();
    double min_abs_member = std::numeric_limits<double>::infinity();
    double max_abs_non = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      if (is_member[j]) {
        min_member = std::min(min_member, scores[j]);
        min_abs_member = std::min(min_abs_member, std::abs(scores[j]));
      } else {
        max_non = std::max(max_non, scores[j]);
        max_abs_non = std::max(max_abs_non, std::abs(scores[j]));
      }
    }
    std::size_t found = 0;
    for (auto id : rep.decisions) found += is_member[static_cast<std::size_t>(id)];
    double rank_sum = 0.0, worst = 0.0;
    Json ranks = Json::array();
    for (std::size_t m : *members) {
      rank_sum += static_cast<double>(pos[m]);
      worst = std::max(worst, static_cast<double>(pos[m]));
      ranks.push_back(pos[m]);
    }
    const double nm = static_cast<double>(members->size());
    rep.details["member_ranks"] = ranks;
    rep.metrics["recall"] = static_cast<double>(found) / nm;
    rep.metrics["precision"] =
        rep.decisions.empty() ? 0.0 : static_cast<double>(found) / rep.decisions.size();
    rep.metrics["rank_of_truth"] = rank_sum / nm;
    rep.metrics["worst_member_rank"] = worst;
    rep.metrics["separation"] = members->size() < N ? min_member - max_non : 0.0;
    rep.metrics["beta_gap"] =
        max_abs_non > 0.0 ? min_abs_member / max_abs_non : std::numeric_limits<double>::infinity();
    rep.metrics["all_members_top"] = worst <= nm ? 1.0 : 0.0;
  }
  return rep;
}

AttackReport public_scan_attack(const Image& xtilde, const PatchSet& pub, const ScanOptions& opts,
                                const std::vector<std::size_t>* members) {
  return public_scan_attack(xtilde, std::span<const Image>(pub.patches), opts, members);
}

std::vector<double> fit_member_coefficients(const Image& xtilde, std::span<const Image> members) {
  require(!members.empty(), ErrorCode::kInsufficientData, "residual: no members");
  const std::size_t d = xtilde.size(), m = members.size();
  Eigen::MatrixXd Z(d, m);
  for (std::size_t j = 0; j < m; ++j) {
    require_same_dims(xtilde, members[j], "recover_private_residual");
    for (std::size_t i = 0; i < d; ++i) Z(i, j) = members[j][i];
  }
  Eigen::VectorXd x(d);
  for (std::size_t i = 0; i < d; ++i) x(i) = xtilde[i];
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Z);
  qr.setThreshold(1e-10);
  if (qr.rank() < static_cast<Eigen::Index>(m))
    fail(ErrorCode::kDegenerate, "recover_private_residual: member matrix is rank-deficient");
  const Eigen::VectorXd lam = qr.solve(x);
  return std::vector<double>(lam.data(), lam.data() + m);
}

Image recover_private_residual(const Image& xtilde, std::span<const Image> members,
                               const std::optional<Coefficients>& lambda) {
  require(!members.empty(), ErrorCode::kInsufficientData, "residual: no members");
  std::vector<double> lam;
  if (lambda) {
    require(lambda->k() == members.size(), ErrorCode::kDimMismatch,
            "residual: lambda length differs from member count");
    lam = lambda->lambda;
  } else {
    lam = fit_member_coefficients(xtilde, members);
  }
  std::vector<double> acc(xtilde.pixels().begin(), xtilde.pixels().end());
  for (std::size_t j = 0; j < members.size(); ++j) {
    require_same_dims(xtilde, members[j], "recover_private_residual");
    const auto px = members[j].pixels();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] -= lam[j] * px[i];
  }
  std::vector<float> out(acc.begin(), acc.end());
  return Image(xtilde.dims(), std::move(out));
}

double braverman_statistic(const Image& xtilde, const Image& s) {
  require_same_dims(xtilde, s, "braverman_statistic");
  double cross = 0.0, xx = 0.0, ss = 0.0;
  const auto a = xtilde.pixels(), b = s.pixels();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double a2 = static_cast<double>(a[i]) * a[i];
    const double b2 = static_cast<double>(b[i]) * b[i];
    cross += a2 * b2;
    xx += a2;
    ss += b2;
  }
  return cross - xx * ss / static_cast<double>(a.size());
}

AttackReport braverman_attack(const Image& xtilde, std::span<const Image> candidates,
                              std::size_t top, const std::vector<std::size_t>* members) {
  require(!candidates.empty(), ErrorCode::kInsufficientData, "braverman: empty candidate set");
  const std::size_t N = candidates.size();
  check_members(members, N);
  std::vector<double> scores(N);
  for (std::size_t j = 0; j < N; ++j) scores[j] = braverman_statistic(xtilde, candidates[j]);
  const auto ranked = rank_scores(scores);

  AttackReport rep;
  rep.attack = "braverman";
  rep.params = {{"candidates", N}};
  for (std::size_t t = 0; t < std::min(top, N); ++t) rep.top_scores.push_back(ranked[t]);
  for (const auto& [id, s] : ranked) rep.decisions.push_back(static_cast<std::int64_t>(id));
  if (members) {
    const auto pos = rank_positions(ranked);
    std::vector<char> is_member(N, 0);
    for (std::size_t m : *members) is_member[m] = 1;
    std::vector<double> mr, nr;
    double worst = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      const double r = static_cast<double>(pos[j]) / static_cast<double>(N);
      (is_member[j] ? mr : nr).push_back(r);
      if (is_member[j]) worst = std::max(worst, static_cast<double>(pos[j]));
    }
    double mean = 0.0;
    for (double r : mr) mean += r;
    rep.metrics["member_median_rank"] = median(mr);
    rep.metrics["nonmember_median_rank"] = median(nr);
    rep.metrics["member_mean_rank"] = mean / static_cast<double>(mr.size());
    // Fraction of the candidate list an attacker must keep to retain every member.
    rep.metrics["search_fraction"] = worst / static_cast<double>(N);
  }
  return rep;
}

}  // namespace ih
