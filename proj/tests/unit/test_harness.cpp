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
#include <algorithm>

#include "doctest.h"
#include "core/error.hpp"
#include "harness/experiments.hpp"
#include "harness/synthetic.hpp"

using namespace ih;

namespace {

double metric(const Json& r, const char* name) { return r.at("metrics").at(name).get<double>(); }

}  // namespace

TEST_CASE("gaussian dataset: normalized, labeled, deterministic") {
  const Dims dims{3, 8, 8};
  const Dataset a = gaussian_dataset(12, dims, 5, true, RngStream{3, 0});
  const Dataset b = gaussian_dataset(12, dims, 5, true, RngStream{3, 0});
  REQUIRE(a.size() == 12);
  CHECK(a.classes == 5);
  CHECK(a.normalized);
  CHECK(a.same_content(b));
  a.validate();
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::sqrt(squared_norm(a.images[i].pixels())) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(a.labels[i].weights[i % 5] == 1.0f);
    CHECK(a.labels[i].sum() == doctest::Approx(1.0));
  }
  const Dataset c = gaussian_dataset(12, dims, 5, true, RngStream{4, 0});
  CHECK_FALSE(a.same_content(c));
}

TEST_CASE("gaussian dataset without normalization has pixel variance 1/d") {
  const Dims dims{3, 16, 16};
  const Dataset ds = gaussian_dataset(40, dims, 0, false, RngStream{9, 1});
  CHECK_FALSE(ds.labeled());
  double sum = 0.0, sq = 0.0;
  std::size_t count = 0;
  for (const Image& x : ds.images)
    for (float v : x.pixels()) {
      sum += v;
      sq += double(v) * v;
      ++count;
    }
  const double var = sq / count - (sum / count) * (sum / count);
  CHECK(var * dims.size() == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("texture sources are unit-variance noise") {
  const Dataset ds = texture_sources(4, Dims{3, 20, 20}, RngStream{1, 2});
  REQUIRE(ds.size() == 4);
  CHECK_FALSE(ds.normalized);
  double sq = 0.0;
  for (float v : ds.images[0].pixels()) sq += double(v) * v;
  CHECK(sq / 1200.0 == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("separable split shares class structure") {
  const SeparableSplit s = separable_dataset(30, 20, Dims{1, 6, 6}, 3, 0.1, RngStream{5, 0});
  CHECK(s.train.size() == 30);
  CHECK(s.test.size() == 20);
  CHECK(s.train.classes == 3);
  s.train.validate();
  s.test.validate();
  // low noise: same-class images are close, cross-class ones are not
  auto cls = [](const LabelVector& y) {
    return std::max_element(y.weights.begin(), y.weights.end()) - y.weights.begin();
  };
  double same = 1.0, other = -1.0;
  for (std::size_t j = 0; j < s.test.size(); ++j) {
    const double ip = inner_product(s.train.images[0], s.test.images[j]);
    if (cls(s.test.labels[j]) == cls(s.train.labels[0]))
      same = std::min(same, ip);
    else
      other = std::max(other, ip);
  }
  CHECK(same > 0.9);
  CHECK(other < 0.9);
}

TEST_CASE("scan experiment: plain recall high, masked recall gone") {
  ScanExperiment cfg;
  cfg.dims = {3, 16, 16};
  cfg.n = 100;
  cfg.trials = 30;
  const Json plain = run_scan_experiment(cfg, RngStream{11, 0});
  CHECK(plain.at("experiment") == "public_scan");
  CHECK(metric(plain, "mean_recall") >= 0.9);
  CHECK(metric(plain, "ranks") == 30.0 * cfg.k);
  CHECK(run_scan_experiment(cfg, RngStream{11, 0}) == plain);

  cfg.view = ScanView::kMasked;
  const Json masked = run_scan_experiment(cfg, RngStream{11, 0});
  CHECK(metric(masked, "mean_recall") <= 0.1);
  CHECK(metric(masked, "mean_unit_rank") == doctest::Approx(0.5).epsilon(0.2));

  cfg.view = ScanView::kOracle;
  cfg.oracle_p = 0.0;
  const Json oracle = run_scan_experiment(cfg, RngStream{11, 0});
  CHECK(metric(oracle, "mean_recall") == metric(plain, "mean_recall"));
}

TEST_CASE("scan view names round trip") {
  for (ScanView v : {ScanView::kPlain, ScanView::kMasked, ScanView::kOracle})
    CHECK(parse_scan_view(to_string(v)) == v);
  CHECK_THROWS_AS(parse_scan_view("sideways"), Error);
}

TEST_CASE("pair experiment on unmasked mixup finds pairs") {
  PairExperiment cfg;
  cfg.dims = {3, 16, 16};
  cfg.n = 20;
  cfg.epochs = 20;
  const Json r = run_pair_experiment(cfg, RngStream{2, 0});
  CHECK(metric(r, "precision") >= 0.9);
  CHECK(metric(r, "recall") >= 0.5);
}

TEST_CASE("similarity experiment at small scale") {
  SimilarityExperiment cfg;
  cfg.sources = 300;
  cfg.source_dims = {3, 24, 24};
  cfg.crop = 16;
  cfg.private_n = 20;
  cfg.m = 20;
  cfg.samples = 5;
  const Json r = run_similarity_experiment(cfg, RngStream{8, 0});
  const double hit = metric(r, "hit_rate");
  CHECK(hit >= 0.0);
  CHECK(hit <= 1.0);
  CHECK(metric(r, "database") == 300.0);
}

TEST_CASE("ks experiment at small scale") {
  KsExperiment cfg;
  cfg.dims = {3, 16, 16};
  cfg.private_n = 10;
  cfg.public_sources = 200;
  cfg.source_dims = {3, 24, 24};
  cfg.picks = 3;
  cfg.per_image = 60;
  cfg.probe_encryptions = 10;
  std::string csv;
  const Json r = run_ks_experiment(cfg, RngStream{4, 0}, &csv);
  CHECK(metric(r, "min_pvalue") >= 0.0);
  CHECK(metric(r, "min_pvalue") <= 1.0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("grad-match experiment recovers the plain victim") {
  GradMatchExperiment cfg;
  cfg.dims = {1, 8, 8};
  cfg.classes = 4;
  cfg.private_n = 10;
  cfg.steps = 800;
  const Json r = run_gradmatch_experiment(cfg, RngStream{6, 0});
  CHECK(metric(r, "plain_correlation") >= 0.95);
  CHECK(metric(r, "fd_rel_error") <= 1e-4);
}

TEST_CASE("utility experiment reports every k") {
  UtilityExperiment cfg;
  cfg.n_train = 120;
  cfg.n_test = 80;
  cfg.ks = {1, 2};
  cfg.epochs = 10;
  cfg.E = 3;
  const Json r = run_utility_experiment(cfg, RngStream{7, 0});
  const Json& m = r.at("metrics");
  CHECK(m.contains("vanilla_accuracy"));
  CHECK(m.contains("accuracy_k1"));
  CHECK(m.contains("accuracy_k2"));
  CHECK(m.at("vanilla_accuracy").get<double>() >= 0.8);
}
