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

#include "attacks/gradmatch.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "core/error.hpp"

namespace ih {

GradMatchInit gradient_matching_init(std::size_t d, std::size_t classes, RngStream stream) {
  Rng rng(stream);
  GradMatchInit init;
  init.x.resize(d);
  init.y.resize(classes);
  const double sx = 1.0 / std::sqrt(static_cast<double>(d));
  for (double& v : init.x) v = sx * rng.normal();
  for (double& v : init.y) v = rng.normal();
  return init;
}

GradMatchEval gradient_matching_objective(const LinearSoftmaxModel& model,
                                          const Gradient& observed, const std::vector<double>& x,
                                          const std::vector<double>& y) {
  const std::size_t C = model.classes, D = model.dim;
  const std::size_t d = x.size();
  require(feature_width(model.feature, d) == D, ErrorCode::kDimMismatch,
          "gradient matching: input width does not fit the model");
  require(y.size() == C && observed.b.size() == C && observed.W.size() == C * D,
          ErrorCode::kDimMismatch, "gradient matching: gradient shape does not fit the model");

  std::vector<double> phi(D);
  for (std::size_t i = 0; i < d; ++i) phi[i] = x[i];
  if (model.feature == FeatureMap::kRawAbs)
    for (std::size_t i = 0; i < d; ++i) phi[d + i] = std::abs(x[i]);

  const auto p = softmax(logits(model, phi));
  double s = 0.0;
  for (double v : y) s += v;
  std::vector<double> r(C);
  for (std::size_t c = 0; c < C; ++c) r[c] = s * p[c] - y[c];

  GradMatchEval ev;
  std::vector<double> dr(C, 0.0), dphi(D, 0.0);
  for (std::size_t c = 0; c < C; ++c) {
    const double* gw = observed.W.data() + c * D;
    double acc_r = 0.0;
    for (std::size_t i = 0; i < D; ++i) {
      const double e = r[c] * phi[i] - gw[i];
      ev.D += e * e;
      acc_r += e * phi[i];
      dphi[i] += 2.0 * e * r[c];
    }
    const double eb = r[c] - observed.b[c];
    ev.D += eb * eb;
    dr[c] = 2.0 * acc_r + 2.0 * eb;
  }
  // r = s p(z) - y with z = W phi + b: dr/dz = s (diag p - p p^T).
  double pdr = 0.0;
  for (std::size_t c = 0; c < C; ++c) pdr += p[c] * dr[c];
  for (std::size_t c = 0; c < C; ++c) {
    const double dz = s * p[c] * (dr[c] - pdr);
    const double* w = model.W.data() + c * D;
    for (std::size_t i = 0; i < D; ++i) dphi[i] += dz * w[i];
  }
  ev.dx.assign(dphi.begin(), dphi.begin() + static_cast<std::ptrdiff_t>(d));
  if (model.feature == FeatureMap::kRawAbs)
    for (std::size_t i = 0; i < d; ++i)
      ev.dx[i] += (x[i] > 0 ? 1.0 : (x[i] < 0 ? -1.0 : 0.0)) * dphi[d + i];
  ev.dy.resize(C);
  for (std::size_t c = 0; c < C; ++c) ev.dy[c] = pdr - dr[c];
  return ev;
}

namespace {

// Relative error of the analytic gradient against central differences on a
// seeded subset of x coordinates plus every y coordinate.
double finite_difference_error(const LinearSoftmaxModel& model, const Gradient& observed,
                               const std::vector<double>& x, const std::vector<double>& y,
                               const GradMatchEval& ev, std::size_t probes, RngStream stream) {
  Rng rng(stream);
  const double h = 1e-6;
  double num = 0.0, den = 0.0;
  auto probe = [&](std::vector<double> xx, std::vector<double> yy, bool on_x, std::size_t i,
                   double analytic) {
    auto& v = on_x ? xx : yy;
    const double base = v[i];
    v[i] = base + h;
    const double up = gradient_matching_objective(model, observed, xx, yy).D;
    v[i] = base - h;
    const double down = gradient_matching_objective(model, observed, xx, yy).D;
    const double fd = (up - down) / (2.0 * h);
    num += (fd - analytic) * (fd - analytic);
    den += analytic * analytic;
  };
  for (std::size_t t = 0; t < probes; ++t) {
    const std::size_t i = rng.below(x.size());
    probe(x, y, true, i, ev.dx[i]);
  }
  for (std::size_t c = 0; c < y.size(); ++c) probe(x, y, false, c, ev.dy[c]);
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace

AttackReport gradient_matching_attack(const Gradient& observed, const LinearSoftmaxModel& model,
                                      const Dims& dims, const GradMatchOptions& opts,
                                      RngStream stream, const Image* truth) {
  require(opts.lr > 0.0 && std::isfinite(opts.lr), ErrorCode::kValidation,
          "gradient matching: lr must be positive");
  require(opts.trajectory_stride >= 1, ErrorCode::kValidation,
          "gradient matching: trajectory stride must be >= 1");
  const std::size_t d = dims.size();
  GradMatchInit st = gradient_matching_init(d, model.classes, stream.child(0));

  AttackReport rep;
  rep.attack = "grad-match";
  rep.params = {{"steps", opts.steps}, {"lr", opts.lr}, {"tolerance", opts.tolerance},
                {"feature", to_string(model.feature)}};

  GradMatchEval ev = gradient_matching_objective(model, observed, st.x, st.y);
  rep.metrics["fd_rel_error"] =
      finite_difference_error(model, observed, st.x, st.y, ev, opts.fd_probes, stream.child(1));
  rep.metrics["initial_objective"] = ev.D;

  Json traj = Json::array();
  std::vector<double> recent;
  std::size_t step = 0;
  for (; step < opts.steps; ++step) {
    if (!std::isfinite(ev.D)) break;
    if (step % opts.trajectory_stride == 0) traj.push_back(ev.D);
    recent.push_back(ev.D);
    if (recent.size() > 8) recent.erase(recent.begin());
    if (ev.D <= opts.tolerance) break;
    for (std::size_t i = 0; i < d; ++i) st.x[i] -= opts.lr * ev.dx[i];
    for (std::size_t c = 0; c < st.y.size(); ++c) st.y[c] -= opts.lr * ev.dy[c];
    ev = gradient_matching_objective(model, observed, st.x, st.y);
  }
  if (!std::isfinite(ev.D)) {
    std::ostringstream os;
    os << "gradient matching diverged at step " << step << "; last objectives:";
    for (double v : recent) os << ' ' << v;
    fail(ErrorCode::kDiverged, os.str());
  }
  traj.push_back(ev.D);

  std::vector<float> px(d);
  for (std::size_t i = 0; i < d; ++i) px[i] = static_cast<float>(st.x[i]);
  rep.reconstruction = Image(dims, std::move(px));
  rep.metrics["final_objective"] = ev.D;
  rep.metrics["steps_run"] = static_cast<double>(step);
  rep.details["trajectory"] = traj;
  rep.details["trajectory_stride"] = opts.trajectory_stride;
  rep.details["recovered_label"] = st.y;
  if (truth) {
    require(truth->size() == d, ErrorCode::kDimMismatch, "gradient matching: truth dims differ");
    rep.metrics["correlation"] = correlation(rep.reconstruction->pixels(), truth->pixels());
  }
  return rep;
}

}  // namespace ih
