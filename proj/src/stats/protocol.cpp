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


#include "stats/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "core/error.hpp"
#include "core/sampling.hpp"
#include "stats/ks.hpp"

namespace ih {

std::vector<double> StatisticProfile::values() const {
  std::vector<double> v{mean, std, total_variation};
  v.insert(v.end(), probes.begin(), probes.end());
  return v;
}

double total_variation(const Image& x) {
  const Dims dims = x.dims();
  double tv = 0.0;
  for (std::size_t c = 0; c < dims.channels; ++c) {
    for (std::size_t y = 0; y < dims.height; ++y) {
      for (std::size_t i = 0; i < dims.width; ++i) {
        const double v = x.at(c, y, i);
        if (i + 1 < dims.width) tv += std::fabs(static_cast<double>(x.at(c, y, i + 1)) - v);
        if (y + 1 < dims.height) tv += std::fabs(static_cast<double>(x.at(c, y + 1, i)) - v);
      }
    }
  }
  return tv;
}

StatisticProfile statistic_profile(const Image& x, std::span<const std::size_t> probes) {
  const auto px = x.pixels();
  require(!px.empty(), ErrorCode::kInvalidArgument, "statistic_profile: empty image");
  StatisticProfile p;
  double sum = 0.0;
  for (float v : px) sum += v;
  p.mean = sum / static_cast<double>(px.size());
  double ss = 0.0;
  for (float v : px) ss += (v - p.mean) * (v - p.mean);
  p.std = std::sqrt(ss / static_cast<double>(px.size()));
  p.total_variation = total_variation(x);
  for (std::size_t idx : probes) {
    require(idx < px.size(), ErrorCode::kInvalidArgument,
            "statistic_profile: probe " + std::to_string(idx) + " out of range");
    p.probes.push_back(px[idx]);
  }
  return p;
}

double KsTable::min_pvalue() const {
  double m = 1.0;
  for (std::size_t r = 0; r < all.size(); ++r)
    for (std::size_t s = 0; s < all[r].size(); ++s) m = std::min({m, all[r][s], other[r][s]});
  return m;
}

double KsTable::max_all_other_gap() const {
  double g = 0.0;
  for (std::size_t r = 0; r < all.size(); ++r)
    for (std::size_t s = 0; s < all[r].size(); ++s)
      g = std::max(g, std::fabs(all[r][s] - other[r][s]));
  return g;
}

Json KsTable::to_json() const {
  Json rows = Json::array();
  for (std::size_t r = 0; r < picks.size(); ++r) {
    Json row = Json::object();
    row["image"] = picks[r];
    for (std::size_t s = 0; s < statistics.size(); ++s)
      row[statistics[s]] = {{"all", all[r][s]}, {"other", other[r][s]}};
    rows.push_back(std::move(row));
  }
  return {{"statistics", statistics},
          {"probe_locations", probe_locations},
          {"rows", rows},
          {"min_pvalue", min_pvalue()},
          {"max_all_other_gap", max_all_other_gap()}};
}

std::string KsTable::to_csv() const {
  std::string out = "image";
  for (const auto& s : statistics) out += "," + s + "_all," + s + "_other";
  out += "\n";
  char buf[64];
  for (std::size_t r = 0; r < picks.size(); ++r) {
    out += std::to_string(picks[r]);
    for (std::size_t s = 0; s < statistics.size(); ++s) {
      std::snprintf(buf, sizeof buf, ",%.6f,%.6f", all[r][s], other[r][s]);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

KsTable indistinguishability_protocol(const Dataset& priv, const KsProtocolOptions& opts,
                                      RngStream stream) {
  require(opts.picks >= 2, ErrorCode::kInvalidArgument, "ks protocol: need at least 2 picks");
  require(opts.picks <= priv.size(), ErrorCode::kInsufficientData,
          "ks protocol: " + std::to_string(opts.picks) + " picks but only " +
              std::to_string(priv.size()) + " images");
  require(opts.probe_encryptions >= 1 && opts.per_image >= opts.probe_encryptions,
          ErrorCode::kInsufficientData,
          "ks protocol: per_image must be >= probe_encryptions >= 1");
  const std::size_t d = priv.dims.size();
  require(opts.probe_locations <= d, ErrorCode::kInvalidArgument,
          "ks protocol: more probe locations than pixels");
  opts.params.validate();

  KsTable table;
  {
    Rng rng(stream.child(0));
    table.picks = sample_without_replacement(priv.size(), opts.picks, priv.size(), rng);
  }
  {
    Rng rng(stream.child(2));
    table.probe_locations = sample_without_replacement(d, opts.probe_locations, d, rng);
  }
  table.statistics = {"mean", "std", "total_variation"};
  for (std::size_t l = 0; l < opts.probe_locations; ++l)
    table.statistics.push_back("location_" + std::to_string(l + 1));
  const std::size_t n_stats = table.statistics.size();
  const std::size_t picks = table.picks.size();

  // stat[s][p][j]
  std::vector<std::vector<std::vector<double>>> stat(
      n_stats, std::vector<std::vector<double>>(picks, std::vector<double>(opts.per_image)));
  const RngStream enc = stream.child(1);
  for (std::size_t p = 0; p < picks; ++p) {
    const RngStream per_pick = enc.child(p);
    for (std::size_t j = 0; j < opts.per_image; ++j) {
      const Encryption e = encrypt_one(priv, table.picks[p], opts.params, opts.pub, per_pick.child(j));
      const auto v = statistic_profile(e.sample.xtilde, table.probe_locations).values();
      for (std::size_t s = 0; s < n_stats; ++s) stat[s][p][j] = v[s];
    }
  }

  table.all.assign(picks, std::vector<double>(n_stats));
  table.other.assign(picks, std::vector<double>(n_stats));
  for (std::size_t s = 0; s < n_stats; ++s) {
    std::vector<double> pool_all;
    for (const auto& row : stat[s]) pool_all.insert(pool_all.end(), row.begin(), row.end());
    std::sort(pool_all.begin(), pool_all.end());
    for (std::size_t p = 0; p < picks; ++p) {
      std::vector<double> pool_other;
      for (std::size_t q = 0; q < picks; ++q)
        if (q != p) pool_other.insert(pool_other.end(), stat[s][q].begin(), stat[s][q].end());
      std::sort(pool_other.begin(), pool_other.end());
      double sum_all = 0.0, sum_other = 0.0;
      for (std::size_t j = 0; j < opts.probe_encryptions; ++j) {
        const double obs[1] = {stat[s][p][j]};
        sum_all += ks_two_sample_sorted(obs, pool_all).pvalue;
        sum_other += ks_two_sample_sorted(obs, pool_other).pvalue;
      }
      table.all[p][s] = sum_all / static_cast<double>(opts.probe_encryptions);
      table.other[p][s] = sum_other / static_cast<double>(opts.probe_encryptions);
    }
  }
  return table;
}

}  // namespace ih
