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
#include <filesystem>
#include <string>
#include <vector>

#include "core/dataset.hpp"
#include "encrypt/encrypt.hpp"

namespace ih {

struct ChallengeMeta {
  SchemeParams params;
  std::uint32_t epochs = 0;
  std::size_t n = 0;
  std::size_t count = 0;
};

/// Packs encrypted samples as an IHDS dataset (xtilde as images, ytilde as
/// labels). Keys are not part of the output.
Dataset to_challenge_dataset(const std::vector<EncryptedSample>& samples,
                             std::uint16_t classes);

/// Number of rows in `published` that are bit-equal to any image in `originals`.
std::size_t count_plaintext_rows(const Dataset& published,
                                 const std::vector<const std::vector<Image>*>& originals);

/// Writes `<path>` (IHDS) and `<path>.meta.txt`. Throws kValidation if any row
/// matches an original image bit for bit.
void write_challenge(const Dataset& published, const ChallengeMeta& meta,
                     const std::vector<const std::vector<Image>*>& originals,
                     const std::filesystem::path& path);

std::string challenge_meta_text(const ChallengeMeta& meta);
std::filesystem::path challenge_meta_path(const std::filesystem::path& path);

}  // namespace ih
