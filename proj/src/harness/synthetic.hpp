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


#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>

#include "core/dataset.hpp"
#include "core/image.hpp"
#include "core/rng.hpp"

namespace ih {

/// Pixels i.i.d. N(0, 1/d). With `normalize` each image is centred and scaled
/// to unit norm. Image i gets the one-hot label i % classes (classes == 0:
/// unlabeled).
Dataset gaussian_dataset(std::size_t n, Dims dims, std::uint16_t classes, bool normalize,
                         RngStream stream);

/// Unlabeled white-noise N(0, 1) images, used as public sources for cropping.
Dataset texture_sources(std::size_t n, Dims dims, RngStream stream);

/// Class means mu_c ~ N(0, 1) per pixel; a sample is mu_c + noise * N(0, 1),
/// then centred and normalized. Train and test share the means.
struct SeparableSplit {
  Dataset train;
  Dataset test;
};
SeparableSplit separable_dataset(std::size_t n_train, std::size_t n_test, Dims dims,
                                 std::uint16_t classes, double noise, RngStream stream);

}  // namespace ih
