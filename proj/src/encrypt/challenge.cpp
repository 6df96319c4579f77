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

#include "encrypt/challenge.hpp"

#include <cstring>
#include <sstream>
#include <unordered_map>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace ih {

namespace {

std::uint64_t hash_pixels(const Image& im) {
  std::uint64_t h = 0x9E3779B97F4A7C15ull ^ im.size();
  const auto px = im.pixels();
  for (float v : px) {
    std::uint32_t b;
    std::memcpy(&b, &v, 4);
    h = splitmix64(h ^ b);
  }
  return h;
}

}  // namespace

Dataset to_challenge_dataset(const std::vector<EncryptedSample>& samples,
                             std::uint16_t classes) {
  Dataset d;
  d.name = "challenge";
  require(!samples.empty(), ErrorCode::kInsufficientData, "challenge: no samples");
  d.dims = samples.front().xtilde.dims();
  d.classes = classes;
  for (const auto& s : samples) {
    d.images.push_back(s.xtilde);
    if (classes > 0) {
      require(s.ytilde.weights.size() == classes, ErrorCode::kDimMismatch,
              "challenge: label width mismatch");
      d.labels.push_back(s.ytilde);
    }
  }
  return d;
}

std::size_t count_plaintext_rows(const Dataset& published,
                                 const std::vector<const std::vector<Image>*>& originals) {
  std::unordered_multimap<std::uint64_t, const Image*> index;
  for (const auto* set : originals)
    for (const Image& im : *set) index.emplace(hash_pixels(im), &im);
  std::size_t hits = 0;
  for (const Image& row : published.images) {
    auto [lo, hi] = index.equal_range(hash_pixels(row));
    for (auto it = lo; it != hi; ++it)
      if (it->second->size() == row.size() &&
          std::memcmp(it->second->pixels().data(), row.pixels().data(),
                      row.size() * sizeof(float)) == 0) {
        ++hits;
        break;
      }
  }
  return hits;
}

std::string challenge_meta_text(const ChallengeMeta& m) {
  std::ostringstream os;
  os.precision(17);
  os << "scheme=" << to_string(m.params.scheme) << '\n'
     << "k=" << m.params.k << '\n'
     << "c1=" << m.params.c1 << '\n'
     << "c2=" << m.params.c2 << '\n'
     << "masked=" << (m.params.masked() ? 1 : 0) << '\n'
     << "T=" << m.epochs << '\n'
     << "n=" << m.n << '\n'
     << "count=" << m.count << '\n';
  return os.str();
}

std::filesystem::path challenge_meta_path(const std::filesystem::path& path) {
  std::filesystem::path p = path;
  p += ".meta.txt";
  return p;
}

void write_challenge(const Dataset& published, const ChallengeMeta& meta,
                     const std::vector<const std::vector<Image>*>& originals,
                     const std::filesystem::path& path) {
  const std::size_t leaks = count_plaintext_rows(published, originals);
  require(leaks == 0, ErrorCode::kValidation,
          "challenge output contains " + std::to_string(leaks) + " plaintext row(s)");
  save_dataset(published, path);
  write_text(challenge_meta_path(path), challenge_meta_text(meta));
}

}  // namespace ih
