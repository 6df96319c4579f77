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

#include "utility/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <string>

#include "core/error.hpp"

namespace ih {

const char* to_string(FeatureMap f) noexcept {
  return f == FeatureMap::kRaw ? "raw" : "raw-abs";
}

FeatureMap parse_feature_map(std::string_view name) {
  if (name == "raw") return FeatureMap::kRaw;
  if (name == "raw-abs") return FeatureMap::kRawAbs;
  fail(ErrorCode::kInvalidArgument, "unknown feature map '" + std::string(name) + "'");
}

std::size_t feature_width(FeatureMap f, std::size_t d) noexcept {
  return f == FeatureMap::kRaw ? d : 2 * d;
}

std::vector<double> features(FeatureMap f, std::span<const float> x) {
  std::vector<double> phi(feature_width(f, x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) phi[i] = x[i];
  if (f == FeatureMap::kRawAbs)
    for (std::size_t i = 0; i < x.size(); ++i) phi[x.size() + i] = std::abs(x[i]);
  return phi;
}

LinearSoftmaxModel LinearSoftmaxModel::zeros(std::size_t classes, std::size_t dim,
                                             FeatureMap f) {
  require(classes >= 1 && dim >= 1, ErrorCode::kInvalidArgument,
          "model needs at least one class and one input");
  LinearSoftmaxModel m;
  m.classes = classes;
  m.dim = dim;
  m.feature = f;
  m.W.assign(classes * dim, 0.0);
  m.b.assign(classes, 0.0);
  return m;
}

bool LinearSoftmaxModel::all_finite() const noexcept {
  for (double v : W)
    if (!std::isfinite(v)) return false;
  for (double v : b)
    if (!std::isfinite(v)) return false;
  return true;
}

double Gradient::squared_norm() const noexcept {
  double s = 0.0;
  for (double v : W) s += v * v;
  for (double v : b) s += v * v;
  return s;
}

std::vector<double> softmax(std::span<const double> z) {
  std::vector<double> p(z.begin(), z.end());
  const double mx = *std::max_element(p.begin(), p.end());
  double s = 0.0;
  for (double& v : p) {
    v = std::exp(v - mx);
    s += v;
  }
  for (double& v : p) v /= s;
  return p;
}

std::vector<double> logits(const LinearSoftmaxModel& m, std::span<const double> phi) {
  require(phi.size() == m.dim, ErrorCode::kDimMismatch,
          "model expects " + std::to_string(m.dim) + " inputs, got " +
              std::to_string(phi.size()));
  std::vector<double> z(m.b);
  for (std::size_t c = 0; c < m.classes; ++c) {
    const double* w = m.W.data() + c * m.dim;
    double acc = 0.0;
    for (std::size_t i = 0; i < m.dim; ++i) acc += w[i] * phi[i];
    z[c] += acc;
  }
  return z;
}

std::vector<double> forward(const LinearSoftmaxModel& m, const Image& x) {
  require(x.all_finite(), ErrorCode::kValidation, "forward: non-finite input");
  const auto phi = features(m.feature, x.pixels());
  return softmax(logits(m, phi));
}

LossGrad loss_and_gradient(const LinearSoftmaxModel& m, const Image& x, const LabelVector& y) {
  require(x.all_finite(), ErrorCode::kValidation, "loss_and_gradient: non-finite input");
  require(y.weights.size() == m.classes, ErrorCode::kDimMismatch,
          "loss_and_gradient: label width != classes");
  const auto phi = features(m.feature, x.pixels());
  const auto z = logits(m, phi);
  const double mx = *std::max_element(z.begin(), z.end());
  double se = 0.0;
  for (double v : z) se += std::exp(v - mx);
  const double lse = mx + std::log(se);

  LossGrad out;
  double ysum = 0.0;
  for (std::size_t c = 0; c < m.classes; ++c) {
    const double yc = y.weights[c];
    require(std::isfinite(yc), ErrorCode::kValidation, "loss_and_gradient: non-finite label");
    ysum += yc;
    if (yc != 0.0) out.loss -= yc * (z[c] - lse);
  }
  out.grad.b.resize(m.classes);
  out.grad.W.resize(m.classes * m.dim);
  for (std::size_t c = 0; c < m.classes; ++c) {
    const double r = ysum * std::exp(z[c] - lse) - y.weights[c];
    out.grad.b[c] = r;
    double* g = out.grad.W.data() + c * m.dim;
    for (std::size_t i = 0; i < m.dim; ++i) g[i] = r * phi[i];
  }
  return out;
}

TrainResult train(LinearSoftmaxModel model, const EpochProvider& provider,
                  const TrainOptions& opts, RngStream stream) {
  require(opts.batch >= 1, ErrorCode::kValidation, "train: batch must be >= 1");
  require(opts.lr > 0.0 && std::isfinite(opts.lr), ErrorCode::kValidation,
          "train: lr must be positive");
  require(opts.momentum >= 0.0 && opts.momentum < 1.0, ErrorCode::kValidation,
          "train: momentum must lie in [0, 1)");
  require(opts.l2 >= 0.0, ErrorCode::kValidation, "train: l2 must be >= 0");
  TrainResult res;
  std::vector<double> vW(model.W.size(), 0.0), vb(model.b.size(), 0.0);
  std::vector<double> gW(model.W.size()), gb(model.b.size());

  for (std::uint32_t epoch = 0; epoch < opts.epochs; ++epoch) {
    std::vector<TrainSample> data = provider(epoch);
    require(!data.empty(), ErrorCode::kInsufficientData, "train: empty epoch");
    Rng rng(stream.child(epoch));
    for (std::size_t i = data.size(); i > 1; --i) std::swap(data[i - 1], data[rng.below(i)]);

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < data.size(); start += opts.batch) {
      const std::size_t end = std::min(data.size(), start + opts.batch);
      std::fill(gW.begin(), gW.end(), 0.0);
      std::fill(gb.begin(), gb.end(), 0.0);
      for (std::size_t s = start; s < end; ++s) {
        LossGrad lg = loss_and_gradient(model, *data[s].x, *data[s].y);
        loss_sum += lg.loss;
        for (std::size_t t = 0; t < gW.size(); ++t) gW[t] += lg.grad.W[t];
        for (std::size_t t = 0; t < gb.size(); ++t) gb[t] += lg.grad.b[t];
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      for (std::size_t t = 0; t < gW.size(); ++t) {
        vW[t] = opts.momentum * vW[t] + gW[t] * inv + opts.l2 * model.W[t];
        model.W[t] -= opts.lr * vW[t];
      }
      for (std::size_t t = 0; t < gb.size(); ++t) {
        vb[t] = opts.momentum * vb[t] + gb[t] * inv;
        model.b[t] -= opts.lr * vb[t];
      }
    }
    res.epoch_loss.push_back(loss_sum / static_cast<double>(data.size()));
    if (!model.all_finite())
      fail(ErrorCode::kDiverged, "train: non-finite weights in epoch " + std::to_string(epoch));
  }
  res.model = std::move(model);
  return res;
}

std::vector<double> predict_encrypted(const LinearSoftmaxModel& m, const Image& x,
                                      const Dataset& pool, const SchemeParams& params,
                                      const PatchSet* pub, std::size_t E, RngStream stream) {
  require(E >= 1, ErrorCode::kValidation, "predict_encrypted: E must be >= 1");
  std::vector<double> mean(m.classes, 0.0);
  for (std::size_t e = 0; e < E; ++e) {
    Encryption enc = encrypt_external(x, pool, params, pub, stream.child(e));
    const auto p = forward(m, enc.sample.xtilde);
    for (std::size_t c = 0; c < m.classes; ++c) mean[c] += p[c];
  }
  for (double& v : mean) v /= static_cast<double>(E);
  return mean;
}

std::size_t argmax(std::span<const double> v) noexcept {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

std::size_t argmax(std::span<const float> v) noexcept {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

double evaluate(const LinearSoftmaxModel& m, const Dataset& test, const EvalOptions& opts,
                RngStream stream) {
  require(test.labeled(), ErrorCode::kValidation, "evaluate: test set needs labels");
  require(test.size() > 0, ErrorCode::kInsufficientData, "evaluate: empty test set");
  require(test.classes == m.classes, ErrorCode::kDimMismatch,
          "evaluate: class count differs from model");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    std::vector<double> p;
    if (opts.mode == EvalMode::kPlain) {
      p = forward(m, test.images[i]);
    } else {
      require(opts.pool != nullptr, ErrorCode::kInvalidArgument,
              "evaluate: encrypted mode needs a mixing pool");
      p = predict_encrypted(m, test.images[i], *opts.pool, opts.params, opts.pub, opts.E,
                            stream.child(i));
    }
    correct += argmax(p) == argmax(std::span<const float>(test.labels[i].weights));
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

std::vector<std::uint8_t> encode_model(const LinearSoftmaxModel& m) {
  require(m.classes >= 1 && m.classes <= 0xFFFF && m.dim >= 1 && m.dim <= 0xFFFFFFFFu,
          ErrorCode::kValidation, "model shape out of range for IHMD");
  require(m.W.size() == m.classes * m.dim && m.b.size() == m.classes, ErrorCode::kValidation,
          "model arrays do not match its shape");
  require(m.all_finite(), ErrorCode::kValidation, "model has non-finite weights");
  std::vector<std::uint8_t> out{'I', 'H', 'M', 'D'};
  le::put_u16(out, static_cast<std::uint16_t>(m.classes));
  le::put_u32(out, static_cast<std::uint32_t>(m.dim));
  for (double v : m.W) le::put_f32(out, static_cast<float>(v));
  for (double v : m.b) le::put_f32(out, static_cast<float>(v));
  return out;
}

LinearSoftmaxModel decode_model(const std::vector<std::uint8_t>& bytes) {
  le::Reader r(bytes.data(), bytes.size());
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, "IHMD", 4) != 0) fail(ErrorCode::kFormat, "bad IHMD magic");
  LinearSoftmaxModel m;
  m.classes = r.u16();
  m.dim = r.u32();
  if (m.classes == 0 || m.dim == 0) fail(ErrorCode::kFormat, "IHMD shape must be positive");
  const std::size_t need = (m.classes * m.dim + m.classes) * 4;
  if (r.remaining() < need) fail(ErrorCode::kIo, "IHMD payload truncated");
  if (r.remaining() > need) fail(ErrorCode::kFormat, "trailing bytes after IHMD payload");
  m.W.resize(m.classes * m.dim);
  m.b.resize(m.classes);
  for (double& v : m.W) v = r.f32();
  for (double& v : m.b) v = r.f32();
  return m;
}

void bind_feature_map(LinearSoftmaxModel& m, std::size_t image_dim) {
  if (m.dim == image_dim) {
    m.feature = FeatureMap::kRaw;
  } else if (m.dim == 2 * image_dim) {
    m.feature = FeatureMap::kRawAbs;
  } else {
    fail(ErrorCode::kDimMismatch, "model width " + std::to_string(m.dim) +
                                      " does not fit images of size " +
                                      std::to_string(image_dim));
  }
}

void save_model(const LinearSoftmaxModel& m, const std::filesystem::path& path) {
  write_file(path, encode_model(m));
}

LinearSoftmaxModel load_model(const std::filesystem::path& path) {
  return decode_model(read_file(path));
}

}  // namespace ih
