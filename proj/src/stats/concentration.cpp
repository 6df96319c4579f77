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


#include "stats/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/error.hpp"

namespace ih {

namespace {

// Value exceeded by a fraction q of the sample (order statistic, no
// interpolation).
double upper_quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = std::ceil((1.0 - q) * static_cast<double>(v.size()));
  const std::size_t idx = pos < 1.0 ? 0 : static_cast<std::size_t>(pos) - 1;
  return v[std::min(idx, v.size() - 1)];
}

void fill_normal(std::vector<double>& v, double scale, Rng& rng) {
  for (double& x : v) x = scale * rng.normal();
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double scale_or(std::optional<double> sigma, const ConcentrationCheckConfig& cfg) {
  const double s = sigma.value_or(std::sqrt(cfg.variance()));
  require(std::isfinite(s) && s >= 0.0, ErrorCode::kValidation, "sigma must be finite and >= 0");
  return s;
}

CheckReport start(const char* name, const ConcentrationCheckConfig& cfg, RngStream stream) {
  cfg.validate();
  CheckReport r;
  r.check = name;
  r.config = cfg.to_json();
  r.config["seed"] = stream.seed;
  r.config["stream"] = stream.stream;
  return r;
}

}  // namespace

void ConcentrationCheckConfig::validate() const {
  require(d >= 1, ErrorCode::kValidation, "d must be >= 1");
  require(delta > 0.0 && delta < 1.0, ErrorCode::kValidation, "delta must lie in (0,1)");
  require(trials >= 100, ErrorCode::kValidation, "trials must be >= 100");
  const double v = variance();
  require(std::isfinite(v) && v > 0.0, ErrorCode::kValidation, "sigma2 must be finite and > 0");
  require(std::isfinite(beta) && beta > 0.0, ErrorCode::kValidation, "beta must be > 0");
}

Json ConcentrationCheckConfig::to_json() const {
  return {{"d", d},     {"n", n},         {"k", k},       {"sigma2", variance()},
          {"delta", delta}, {"trials", trials}, {"beta", beta}};
}

Json CheckReport::to_json() const {
  Json j = {{"check", check}, {"config", config}, {"rows", rows}};
  j["pass"] = precondition_violated ? Json(nullptr) : Json(pass);
  j["precondition_violated"] = precondition_violated;
  return j;
}

double three_se_limit(double bound, std::size_t trials) noexcept {
  const double b = std::clamp(bound, 0.0, 1.0);
  return bound + 3.0 * std::sqrt(b * (1.0 - b) / static_cast<double>(trials));
}

CheckReport check_chi_square_tail(const ConcentrationCheckConfig& cfg, RngStream stream,
                                  const std::vector<double>& ts) {
  CheckReport r = start("chi_square_tail", cfg, stream);
  require(cfg.k >= 1, ErrorCode::kValidation, "k (degrees of freedom) must be >= 1");
  const double s2 = cfg.variance();
  const double s = std::sqrt(s2);
  const double kk = static_cast<double>(cfg.k);
  Rng rng(stream);
  std::vector<double> xs(cfg.trials);
  for (double& x : xs) {
    double sum = 0.0;
    for (std::size_t i = 0; i < cfg.k; ++i) {
      const double z = s * rng.normal();
      sum += z * z;
    }
    x = sum;
  }
  r.pass = true;
  for (double t : ts) {
    require(t >= 0.0, ErrorCode::kValidation, "t must be >= 0");
    const double up = (2.0 * std::sqrt(kk * t) + 2.0 * t) * s2;
    const double lo = 2.0 * std::sqrt(kk * t) * s2;
    std::size_t n_up = 0, n_lo = 0;
    for (double x : xs) {
      if (x - kk * s2 >= up) ++n_up;
      if (kk * s2 - x >= lo) ++n_lo;
    }
    const double T = static_cast<double>(cfg.trials);
    const double bound = std::exp(-t);
    const double limit = three_se_limit(bound, cfg.trials);
    const double f_up = static_cast<double>(n_up) / T;
    const double f_lo = static_cast<double>(n_lo) / T;
    const bool ok = f_up <= limit && f_lo <= limit;
    r.pass = r.pass && ok;
    r.rows.push_back({{"t", t},
                      {"bound", bound},
                      {"limit", limit},
                      {"upper_frequency", f_up},
                      {"lower_frequency", f_lo},
                      {"pass", ok}});
  }
  return r;
}

CheckReport check_bernstein(const ConcentrationCheckConfig& cfg, RngStream stream,
                            const std::vector<double>& levels) {
  CheckReport r = start("bernstein", cfg, stream);
  const double n = static_cast<double>(cfg.d);
  const double var = 1.0 / 3.0;  // U[-1,1], |X| <= 1
  Rng rng(stream);
  std::vector<double> sums(cfg.trials);
  for (double& s : sums) {
    double acc = 0.0;
    for (std::size_t i = 0; i < cfg.d; ++i) acc += 2.0 * rng.uniform() - 1.0;
    s = acc;
  }
  r.pass = true;
  for (double level : levels) {
    require(level > 0.0 && level < 1.0, ErrorCode::kValidation, "level must lie in (0,1)");
    // t^2/2 = L (n var + t/3)
    const double L = -std::log(level);
    const double t = L / 3.0 + std::sqrt(L * L / 9.0 + 2.0 * L * n * var);
    std::size_t hits = 0;
    for (double s : sums)
      if (s > t) ++hits;
    const double f = static_cast<double>(hits) / static_cast<double>(cfg.trials);
    const double limit = three_se_limit(level, cfg.trials);
    const bool ok = f <= limit;
    r.pass = r.pass && ok;
    r.rows.push_back(
        {{"level", level}, {"t", t}, {"limit", limit}, {"frequency", f}, {"pass", ok}});
  }
  return r;
}

CheckReport check_fixed_vector_concentration(const ConcentrationCheckConfig& cfg,
                                             RngStream stream, std::optional<double> sigma1,
                                             std::optional<double> sigma2) {
  CheckReport r = start("fixed_vector_inner_product", cfg, stream);
  const double s1 = scale_or(sigma1, cfg);
  const double s2 = scale_or(sigma2, cfg);
  std::vector<double> e(cfg.d), u(cfg.d);
  {
    Rng rng(stream.child(0));
    fill_normal(e, s2, rng);
  }
  double e2 = 0.0, einf = 0.0;
  for (double v : e) {
    e2 += v * v;
    einf = std::max(einf, std::fabs(v));
  }
  e2 = std::sqrt(e2);
  const double lg = std::log(static_cast<double>(cfg.d) / cfg.delta);
  const double bound = 2.0 * s1 * e2 * std::sqrt(lg) + s1 * einf * std::pow(lg, 1.5);
  Rng rng(stream.child(1));
  std::vector<double> vals(cfg.trials);
  std::size_t over = 0;
  for (double& v : vals) {
    fill_normal(u, s1, rng);
    v = std::fabs(dot(u, e));
    if (v > bound) ++over;
  }
  const double f = static_cast<double>(over) / static_cast<double>(cfg.trials);
  const double limit = three_se_limit(cfg.delta, cfg.trials);
  const double q = upper_quantile(vals, cfg.delta);
  r.pass = f <= limit && q <= bound;
  r.rows.push_back({{"sigma1", s1},
                    {"e_norm", e2},
                    {"e_max", einf},
                    {"bound", bound},
                    {"quantile", q},
                    {"frequency", f},
                    {"limit", limit},
                    {"pass", r.pass}});
  return r;
}

CheckReport check_inner_product_concentration(const ConcentrationCheckConfig& cfg,
                                              RngStream stream, std::optional<double> sigma1,
                                              std::optional<double> sigma2) {
  CheckReport r = start("gaussian_inner_product", cfg, stream);
  const double s1 = scale_or(sigma1, cfg);
  const double s2 = scale_or(sigma2, cfg);
  const double dd = static_cast<double>(cfg.d);
  const double lg = std::log(dd / cfg.delta);
  const double unit = s1 * s2 * std::sqrt(dd) * lg * lg;
  const double bound = 1e4 * unit;
  Rng rng(stream);
  std::vector<double> u(cfg.d), e(cfg.d), vals(cfg.trials);
  std::size_t over = 0;
  for (double& v : vals) {
    fill_normal(u, s1, rng);
    fill_normal(e, s2, rng);
    v = std::fabs(dot(u, e));
    if (v > bound) ++over;
  }
  const double f = static_cast<double>(over) / static_cast<double>(cfg.trials);
  const double limit = three_se_limit(cfg.delta, cfg.trials);
  const double q = upper_quantile(vals, cfg.delta);
  r.pass = f <= limit && q <= bound;
  r.rows.push_back({{"sigma1", s1},
                    {"sigma2", s2},
                    {"bound", bound},
                    {"quantile", q},
                    {"implied_constant", unit > 0.0 ? q / unit : 0.0},
                    {"frequency", f},
                    {"limit", limit},
                    {"pass", r.pass}});
  return r;
}

const char* to_string(GapTheorem which) noexcept {
  return which == GapTheorem::kB1 ? "B1" : "B2";
}

GapTheorem parse_gap_theorem(const std::string& name) {
  if (name == "B1" || name == "b1") return GapTheorem::kB1;
  if (name == "B2" || name == "b2") return GapTheorem::kB2;
  fail(ErrorCode::kInvalidArgument, "unknown theorem '" + name + "' (expected B1 or B2)");
}

double gap_scope_bound(const ConcentrationCheckConfig& cfg) {
  const double dd = static_cast<double>(cfg.d);
  const double lg = std::log(static_cast<double>(cfg.n) * dd / cfg.delta);
  return std::sqrt(dd) * lg * lg / (2.0 * cfg.beta);
}

CheckReport check_theorem_gap(const ConcentrationCheckConfig& cfg, GapTheorem which,
                              RngStream stream) {
  CheckReport r = start(which == GapTheorem::kB1 ? "theorem_gap_B1" : "theorem_gap_B2", cfg,
                        stream);
  require(cfg.beta > 1.0, ErrorCode::kValidation, "beta must be > 1");
  const double scope = gap_scope_bound(cfg);
  const double s = std::sqrt(cfg.variance());
  const std::size_t d = cfg.d;

  std::size_t n1 = 0, n2 = 0;
  if (which == GapTheorem::kB2) {
    require(cfg.k >= 1 && cfg.n > cfg.k, ErrorCode::kValidation, "need n > k >= 1");
    r.precondition_violated = static_cast<double>(cfg.k) > scope;
  } else {
    n1 = cfg.n / 3;
    n2 = cfg.n - 2 * n1;
    require(n1 >= 1 && n2 >= 2, ErrorCode::kValidation, "B1 needs n >= 4");
    r.precondition_violated = scope < 4.0;
  }
  Json summary = {{"scope_bound", scope}};
  if (r.precondition_violated) {
    summary["note"] = "precondition violated; no trials run";
    r.rows.push_back(summary);
    return r;
  }

  std::vector<double> ratios(cfg.trials);
  std::size_t holds = 0;
  std::vector<double> buf(d), acc(d);
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    Rng rng(stream.child(t));
    double member = std::numeric_limits<double>::infinity();
    double nonmember = 0.0;
    if (which == GapTheorem::kB2) {
      std::vector<std::vector<double>> xs(cfg.k, std::vector<double>(d));
      std::fill(acc.begin(), acc.end(), 0.0);
      for (auto& x : xs) {
        fill_normal(x, s, rng);
        for (std::size_t i = 0; i < d; ++i) acc[i] += x[i];
      }
      for (const auto& x : xs) member = std::min(member, std::fabs(dot(acc, x)));
      for (std::size_t j = cfg.k; j < cfg.n; ++j) {
        fill_normal(buf, s, rng);
        nonmember = std::max(nonmember, std::fabs(dot(acc, buf)));
      }
    } else {
      std::vector<double> x1(d), x3(d);
      fill_normal(x1, s, rng);
      fill_normal(x3, s, rng);
      for (std::size_t i = 0; i < d; ++i) acc[i] = x3[i] + x1[i];
      const double c = dot(acc, x3);
      // Two largest and two smallest <u, x2> give the extreme pair sums.
      double hi1 = -std::numeric_limits<double>::infinity(), hi2 = hi1;
      double lo1 = std::numeric_limits<double>::infinity(), lo2 = lo1;
      for (std::size_t j = 0; j < n2; ++j) {
        fill_normal(buf, s, rng);
        const double a = dot(acc, buf);
        member = std::min(member, std::fabs(c + a));
        if (a > hi1) {
          hi2 = hi1;
          hi1 = a;
        } else if (a > hi2) {
          hi2 = a;
        }
        if (a < lo1) {
          lo2 = lo1;
          lo1 = a;
        } else if (a < lo2) {
          lo2 = a;
        }
      }
      nonmember = std::max(std::fabs(hi1 + hi2), std::fabs(lo1 + lo2));
    }
    ratios[t] = nonmember > 0.0 ? member / nonmember : std::numeric_limits<double>::infinity();
    if (member >= cfg.beta * nonmember) ++holds;
  }

  const double freq = static_cast<double>(holds) / static_cast<double>(cfg.trials);
  const double required = 1.0 - cfg.delta - 0.03;
  r.pass = freq >= required;
  // Ratio exceeded in a 1 - delta fraction of trials, and the largest
  // universal constant c1 it is consistent with.
  const double rq = upper_quantile(ratios, 1.0 - cfg.delta);
  const double dd = static_cast<double>(d);
  const double lg = std::log(static_cast<double>(cfg.n) * dd / cfg.delta);
  const double kk = static_cast<double>(cfg.k);
  const double implied = which == GapTheorem::kB2
                             ? std::sqrt(dd) / (lg * lg * (rq * kk + kk - 1.0))
                             : std::sqrt(dd) / (lg * lg * (4.0 * rq + 3.0));
  std::vector<double> sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  summary["holds"] = holds;
  summary["frequency"] = freq;
  summary["required"] = required;
  summary["min_ratio"] = sorted.front();
  summary["median_ratio"] = sorted[sorted.size() / 2];
  summary["ratio_at_delta"] = rq;
  summary["implied_c1"] = implied;
  summary["pass"] = r.pass;
  r.rows.push_back(summary);
  return r;
}

}  // namespace ih
