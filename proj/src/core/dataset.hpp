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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "core/image.hpp"

namespace ih {

struct Dataset {
  std::string name;
  Dims dims{};
  std::vector<Image> images;
  std::vector<LabelVector> labels;  // empty when unlabeled
  std::uint16_t classes = 0;
  bool normalized = false;

  std::size_t size() const noexcept { return images.size(); }
  bool labeled() const noexcept { return classes > 0 && !labels.empty(); }

  /// Checks dims, label alignment, finiteness and (if flagged) normalization.
  /// Throws kValidation / kDimMismatch.
  void validate() const;

  /// Bitwise equality of payload and header fields; the name is ignored.
  bool same_content(const Dataset& other) const noexcept;
};

/// IHDS reader. Bad magic/version/label layout -> kFormat; short reads -> kIo.
Dataset load_dataset(const std::filesystem::path& path);
Dataset decode_dataset(const std::vector<std::uint8_t>& bytes, std::string name = {});

/// IHDS writer. Validates first (kValidation), unwritable path -> kIo.
void save_dataset(const Dataset& d, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_dataset(const Dataset& d);

// Little-endian primitives shared by the other binary formats.
namespace le {
void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v);
void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v);
void put_f32(std::vector<std::uint8_t>& out, float v);

class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t size) : p_(data), end_(data + size) {}
  std::size_t remaining() const noexcept { return static_cast<std::size_t>(end_ - p_); }
  std::uint16_t u16();
  std::uint32_t u32();
  float f32();
  void bytes(void* dst, std::size_t n);
  void f32s(float* dst, std::size_t n);

 private:
  const std::uint8_t* p_;
  const std::uint8_t* end_;
};
}  // namespace le

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace ih
