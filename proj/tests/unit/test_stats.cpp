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
#include <vector>

#include "doctest.h"
#include "core/error.hpp"
#include "helpers.hpp"
#include "stats/concentration.hpp"
#include "stats/ks.hpp"
#include "stats/protocol.hpp"

using namespace ih;
using ih::testing::gaussian_image;

namespace {

std::vector<double> normals(Rng& rng, std::size_t n, double shift = 0.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal() + shift;
  return v;
}

Dataset gaussian_dataset(std::size_t n, Dims dims, RngStream s) {
  Rng rng(s);
  Dataset ds;
  ds.dims = dims;
  ds.classes = 2;
  for (std::size_t i = 0; i < n; ++i) {
    ds.images.push_back(normalize_image(gaussian_image(dims, rng, 1.0)));
    LabelVector y;
    y.weights = {i % 2 == 0 ? 1.0f : 0.0f, i % 2 == 0 ? 0.0f : 1.0f};
    ds.labels.push_back(y);
  }
  ds.normalized = true;
  return ds;
}

}  // namespace

TEST_CASE("kolmogorov survival matches reference values") {
  CHECK(kolmogorov_survival(1.0) == doctest::Approx(0.26999967167735456).epsilon(1e-12));
  CHECK(kolmogorov_survival(0.5) == doctest::Approx(0.9639452436648751).epsilon(1e-12));
  CHECK(kolmogorov_survival(0.0) == 1.0);
  CHECK(kolmogorov_survival(0.01) == 1.0);
  CHECK(kolmogorov_survival(5.0) < 1e-20);
}

TEST_CASE("kolmogorov survival is monotone") {
  double prev = 1.0;
  for (double l = 0.0; l < 3.0; l += 0.01) {
    const double q = kolmogorov_survival(l);
    CHECK(q <= prev + 1e-15);
    CHECK(q >= 0.0);
    prev = q;
  }
}

TEST_CASE("ks_two_sample hand case") {
  const std::vector<double> a{0.1, 0.4, 0.7}, b{0.2, 0.3, 0.5, 0.9};
  const auto r = ks_two_sample(a, b);
  CHECK(r.statistic == doctest::Approx(1.0 / 3.0));
  CHECK(r.pvalue == doctest::Approx(0.9911635963913213).epsilon(1e-9));
}

TEST_CASE("ks_two_sample identical and disjoint samples") {
  Rng rng({7, 0});
  std::vector<double> a(500);
  for (double& x : a) x = rng.uniform();
  auto same = ks_two_sample(a, a);
  CHECK(same.statistic == 0.0);
  CHECK(same.pvalue == 1.0);
  std::vector<double> b = a;
  for (double& x : b) x += 10.0;
  auto far = ks_two_sample(a, b);
  CHECK(far.statistic == 1.0);
  CHECK(far.pvalue < 1e-50);
}

TEST_CASE("ks_two_sample handles ties and is symmetric") {
  const std::vector<double> a{1, 1, 2, 2, 3}, b{1, 2, 2, 2, 4, 4};
  const auto ab = ks_two_sample(a, b);
  const auto ba = ks_two_sample(b, a);
  CHECK(ab.statistic == ba.statistic);
  CHECK(ab.pvalue == ba.pvalue);
  // F_a(2) = 0.8, F_b(2) = 4/6
  CHECK(ab.statistic == doctest::Approx(1.0 / 3.0));
  Rng rng({3, 1});
  for (int rep = 0; rep < 20; ++rep) {
    const auto x = normals(rng, 37), y = normals(rng, 53, 0.3);
    CHECK(ks_two_sample(x, y).statistic == ks_two_sample(y, x).statistic);
    CHECK(ks_two_sample(x, y).pvalue == ks_two_sample(y, x).pvalue);
  }
}

TEST_CASE("ks_two_sample rejects empty input and accepts one observation") {
  const std::vector<double> a{1.0}, empty;
  CHECK_THROWS_AS(ks_two_sample(empty, a), Error);
  try {
    ks_two_sample(a, empty);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInsufficientData);
  }
  const std::vector<double> pool{0.0, 2.0};
  const auto r = ks_two_sample(a, pool);
  CHECK(r.statistic == doctest::Approx(0.5));
}

TEST_CASE("ks_two_sample is calibrated under the null") {
  int rejects = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    Rng rng({s, 11});
    const auto a = normals(rng, 400), b = normals(rng, 400);
    if (ks_two_sample(a, b).pvalue < 0.05) ++rejects;
  }
  const double frac = rejects / 200.0;
  CHECK(frac >= 0.02);
  CHECK(frac <= 0.09);
}

TEST_CASE("ks_uniform") {
  std::vector<double> grid;
  for (int i = 0; i < 100; ++i) grid.push_back((i + 0.5) / 100.0);
  CHECK(ks_uniform(grid).statistic == doctest::Approx(0.005));
  CHECK(ks_uniform(grid).pvalue == doctest::Approx(1.0));
  std::vector<double> low(100, 0.01);
  CHECK(ks_uniform(low).pvalue < 1e-10);
  const std::vector<double> bad{1.5};
  CHECK_THROWS_AS(ks_uniform(bad), Error);
}

TEST_CASE("statistic_profile hand cases") {
  const Image constant(Dims{3, 4, 4}, std::vector<float>(48, 0.7f));
  const auto pc = statistic_profile(constant, {});
  CHECK(pc.std == 0.0);
  CHECK(pc.total_variation == 0.0);

  const Image pair(Dims{1, 2, 1}, {0.0f, 1.0f});
  const auto pp = statistic_profile(pair, {});
  CHECK(pp.total_variation == 1.0);
  CHECK(pp.mean == 0.5);
  CHECK(pp.std == 0.5);

  std::vector<float> cb(16);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) cb[y * 4 + x] = (x + y) % 2 == 0 ? 1.0f : -1.0f;
  const Image board(Dims{1, 4, 4}, cb);
  const std::vector<std::size_t> probes{0, 1, 15};
  const auto pb = statistic_profile(board, probes);
  CHECK(pb.total_variation == 48.0);
  CHECK(pb.probes == std::vector<double>{1.0, -1.0, 1.0});
  CHECK(pb.values().size() == 6);

  const std::vector<std::size_t> out{16};
  CHECK_THROWS_AS(statistic_profile(board, out), Error);
}

TEST_CASE("total variation counts each channel separately") {
  std::vector<float> px(8, 0.0f);
  px[4 + 1] = 2.0f;  // channel 1, (0,1)
  const Image x(Dims{2, 2, 2}, px);
  // |2-0| horizontally and |2-0| vertically within channel 1 only
  CHECK(total_variation(x) == 4.0);
}

TEST_CASE("indistinguishability protocol argument checks") {
  const auto ds = gaussian_dataset(5, Dims{1, 8, 8}, {1, 0});
  KsProtocolOptions opts;
  opts.picks = 6;
  CHECK_THROWS_AS(indistinguishability_protocol(ds, opts, {1, 1}), Error);
  opts.picks = 3;
  opts.per_image = 10;
  opts.probe_encryptions = 20;
  try {
    indistinguishability_protocol(ds, opts, {1, 1});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInsufficientData);
  }
}

TEST_CASE("identical encryptions give p = 1 everywhere") {
  Dataset ds = gaussian_dataset(1, Dims{1, 8, 8}, {2, 0});
  for (int i = 0; i < 5; ++i) {
    ds.images.push_back(ds.images[0]);
    ds.labels.push_back(ds.labels[0]);
  }
  KsProtocolOptions opts;
  opts.picks = 4;
  opts.per_image = 20;
  opts.probe_encryptions = 5;
  opts.params.k = 1;
  opts.params.c1 = 1.0;
  opts.params.apply_mask = false;
  const auto t = indistinguishability_protocol(ds, opts, {5, 0});
  CHECK(t.min_pvalue() == 1.0);
  CHECK(t.max_all_other_gap() == 0.0);
}

TEST_CASE("indistinguishability protocol table shape and determinism") {
  const auto ds = gaussian_dataset(12, Dims{3, 8, 8}, {3, 0});
  KsProtocolOptions opts;
  opts.picks = 4;
  opts.per_image = 60;
  opts.probe_encryptions = 10;
  opts.params.k = 3;
  const auto a = indistinguishability_protocol(ds, opts, {9, 4});
  const auto b = indistinguishability_protocol(ds, opts, {9, 4});
  CHECK(a.to_json().dump() == b.to_json().dump());
  CHECK(a.to_csv() == b.to_csv());
  REQUIRE(a.all.size() == 4);
  REQUIRE(a.statistics.size() == 7);
  CHECK(a.statistics[2] == "total_variation");
  CHECK(a.probe_locations.size() == 4);
  for (const auto& row : a.all)
    for (double p : row) CHECK((p >= 0.0 && p <= 1.0));
  const auto csv = a.to_csv();
  CHECK(csv.rfind("image,mean_all,mean_other,std_all", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  const auto c = indistinguishability_protocol(ds, opts, {10, 4});
  CHECK(a.to_json().dump() != c.to_json().dump());
}

TEST_CASE("chi-square tail check") {
  ConcentrationCheckConfig cfg;
  cfg.k = 3072;
  cfg.trials = 20000;
  const auto r = check_chi_square_tail(cfg, {1, 0});
  CHECK(r.pass);
  CHECK(r.rows.size() == 4);
  CHECK(r.rows[0]["t"] == 0.0);
  CHECK(r.rows[0]["pass"] == true);

  ConcentrationCheckConfig one;
  one.k = 1;
  one.trials = 20000;
  const auto r1 = check_chi_square_tail(one, {2, 0}, {1.0});
  CHECK(r1.pass);
  CHECK(r1.rows[0]["upper_frequency"].get<double>() < std::exp(-1.0));
}

TEST_CASE("three standard error limit") {
  CHECK(three_se_limit(0.01, 10000) == doctest::Approx(0.01 + 3 * std::sqrt(0.01 * 0.99 / 1e4)));
  CHECK(three_se_limit(1.0, 100) == 1.0);
}

TEST_CASE("bernstein check") {
  ConcentrationCheckConfig cfg;
  cfg.d = 200;
  cfg.trials = 5000;
  const auto r = check_bernstein(cfg, {4, 0});
  CHECK(r.pass);
  CHECK(r.rows.size() == 3);
}

TEST_CASE("gaussian inner product check") {
  ConcentrationCheckConfig cfg;
  cfg.trials = 2000;
  const auto r = check_inner_product_concentration(cfg, {5, 0});
  CHECK(r.pass);
  const auto& row = r.rows[0];
  CHECK(row["quantile"].get<double>() < row["bound"].get<double>() * 1e-3);
  CHECK(row["implied_constant"].get<double>() < 1.0);

  const auto zero = check_inner_product_concentration(cfg, {5, 0}, 0.0);
  CHECK(zero.pass);
  CHECK(zero.rows[0]["quantile"] == 0.0);

  ConcentrationCheckConfig tiny;
  tiny.d = 4;
  tiny.trials = 2000;
  CHECK(check_inner_product_concentration(tiny, {6, 0}).pass);
}

TEST_CASE("fixed vector inner product check") {
  ConcentrationCheckConfig cfg;
  cfg.trials = 2000;
  CHECK(check_fixed_vector_concentration(cfg, {8, 0}).pass);
  CHECK(check_fixed_vector_concentration(cfg, {8, 0}, 0.0).pass);
}

TEST_CASE("config validation") {
  ConcentrationCheckConfig cfg;
  cfg.delta = 1.0;
  CHECK_THROWS_AS(check_bernstein(cfg, {}), Error);
  cfg.delta = 0.01;
  cfg.trials = 99;
  CHECK_THROWS_AS(check_bernstein(cfg, {}), Error);
  cfg.trials = 100;
  cfg.beta = 1.0;
  CHECK_THROWS_AS(check_theorem_gap(cfg, GapTheorem::kB2, {}), Error);
  CHECK(parse_gap_theorem("B1") == GapTheorem::kB1);
  CHECK_THROWS_AS(parse_gap_theorem("B3"), Error);
}

TEST_CASE("theorem gap checks at reduced scale") {
  ConcentrationCheckConfig cfg;
  cfg.n = 200;
  cfg.trials = 100;
  const auto b2 = check_theorem_gap(cfg, GapTheorem::kB2, {11, 0});
  CHECK(b2.pass);
  CHECK_FALSE(b2.precondition_violated);
  CHECK(b2.rows[0]["min_ratio"].get<double>() >= 2.0);
  CHECK(b2.rows[0]["implied_c1"].get<double>() > 0.0);
  const auto again = check_theorem_gap(cfg, GapTheorem::kB2, {11, 0});
  CHECK(b2.to_json().dump() == again.to_json().dump());

  cfg.k = 2;
  const auto b1 = check_theorem_gap(cfg, GapTheorem::kB1, {12, 0});
  CHECK(b1.pass);
}

TEST_CASE("theorem gap flags out-of-scope k") {
  ConcentrationCheckConfig cfg;
  cfg.n = 20000;
  cfg.k = 8000;
  cfg.trials = 100;
  REQUIRE(static_cast<double>(cfg.k) > gap_scope_bound(cfg));
  const auto r = check_theorem_gap(cfg, GapTheorem::kB2, {1, 0});
  CHECK(r.precondition_violated);
  CHECK(r.to_json()["pass"].is_null());
}

TEST_CASE("gap fails when beta is unreachable") {
  ConcentrationCheckConfig cfg;
  cfg.n = 100;
  cfg.trials = 100;
  cfg.beta = 1000.0;
  const auto r = check_theorem_gap(cfg, GapTheorem::kB2, {13, 0});
  CHECK_FALSE(r.pass);
  CHECK(r.rows[0]["frequency"] == 0.0);
}
