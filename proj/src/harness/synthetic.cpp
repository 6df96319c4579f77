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


#include "harness/synthetic.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "core/error.hpp"

namespace ih {

namespace {

LabelVector one_hot(std::size_t c, std::uint16_t classes) {
  LabelVector y;
  y.weights.assign(classes, 0.0f);
  y.weights[c] = 1.0f;
  return y;
}

}  // namespace

Dataset gaussian_dataset(std::size_t n, Dims dims, std::uint16_t classes, bool normalize,
                         RngStream stream) {
  require(dims.size() > 1, ErrorCode::kInvalidArgument, "gaussian_dataset: need d > 1");
  Dataset ds;
  ds.name = "gaussian";
  ds.dims = dims;
  ds.classes = classes;
  ds.normalized = normalize;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dims.size()));
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(stream.child(i));
    std::vector<float> px(dims.size());
    for (float& v : px) v = static_cast<float>(scale * rng.normal());
    Image im(dims, std::move(px));
    ds.images.push_back(normalize ? normalize_image(im) : std::move(im));
    if (classes > 0) ds.labels.push_back(one_hot(i % classes, classes));
  }
  return ds;
}

Dataset texture_sources(std::size_t n, Dims dims, RngStream stream) {
  Dataset ds;
  ds.name = "texture";
  ds.dims = dims;
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(stream.child(i));
    std::vector<float> px(dims.size());
    for (float& v : px) v = static_cast<float>(rng.normal());
    ds.images.emplace_back(dims, std::move(px));
  }
  return ds;
}

SeparableSplit separable_dataset(std::size_t n_train, std::size_t n_test, Dims dims,
                                 std::uint16_t classes, double noise, RngStream stream) {
  require(classes >= 2, ErrorCode::kInvalidArgument, "separable_dataset: need >= 2 classes");
  const std::size_t d = dims.size();
  std::vector<std::vector<double>> mu(classes, std::vector<double>(d));
  {
    Rng rng(stream.child(0));
    for (auto& m : mu)
      for (double& v : m) v = rng.normal();
  }
  auto draw = [&](std::size_t n, RngStream s, const char* name) {
    Dataset ds;
    ds.name = name;
    ds.dims = dims;
    ds.classes = classes;
    ds.normalized = true;
    Rng rng(s);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = rng.below(classes);
      std::vector<float> px(d);
      for (std::size_t j = 0; j < d; ++j)
        px[j] = static_cast<float>(mu[c][j] + noise * rng.normal());
      ds.images.push_back(normalize_image(Image(dims, std::move(px))));
      ds.labels.push_back(one_hot(c, classes));
    }
    return ds;
  };
  return {draw(n_train, stream.child(1), "separable-train"),
          draw(n_test, stream.child(2), "separable-test")};
}

}  // namespace ih
