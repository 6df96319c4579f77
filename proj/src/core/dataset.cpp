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

#include "core/dataset.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "core/error.hpp"

namespace ih {

namespace {

constexpr char kMagic[4] = {'I', 'H', 'D', 'S'};
constexpr std::uint16_t kVersion = 1;
constexpr std::uint16_t kFlagLabels = 1u << 0;
constexpr std::uint16_t kFlagNormalized = 1u << 1;
constexpr std::size_t kHeaderBytes = 20;

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian hosts are not supported");

}  // namespace

namespace le {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

void put_f32(std::vector<std::uint8_t>& out, float v) {
  put_u32(out, std::bit_cast<std::uint32_t>(v));
}

std::uint16_t Reader::u16() {
  std::uint8_t b[2];
  bytes(b, 2);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

std::uint32_t Reader::u32() {
  std::uint8_t b[4];
  bytes(b, 4);
  return std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) | (std::uint32_t{b[2]} << 16) |
         (std::uint32_t{b[3]} << 24);
}

float Reader::f32() { return std::bit_cast<float>(u32()); }

void Reader::bytes(void* dst, std::size_t n) {
  if (remaining() < n) fail(ErrorCode::kIo, "unexpected end of data (truncated file)");
  std::memcpy(dst, p_, n);
  p_ += n;
}

void Reader::f32s(float* dst, std::size_t n) {
  if constexpr (std::endian::native == std::endian::little) {
    bytes(dst, n * sizeof(float));
  } else {
    for (std::size_t i = 0; i < n; ++i) dst[i] = f32();
  }
}

}  // namespace le

void Dataset::validate() const {
  require(dims.size() > 0 || images.empty(), ErrorCode::kValidation,
          "dataset dims must be positive");
  for (std::size_t i = 0; i < images.size(); ++i) {
    const Image& im = images[i];
    require(im.dims() == dims && im.size() == dims.size(), ErrorCode::kDimMismatch,
            "image " + std::to_string(i) + " does not match dataset dims");
    require(im.all_finite(), ErrorCode::kValidation,
            "image " + std::to_string(i) + " has a non-finite pixel");
    if (normalized) {
      double s = 0.0;
      for (float v : im.pixels()) s += v;
      const double n = std::sqrt(squared_norm(im.pixels()));
      require(std::abs(s) <= 1e-5 && std::abs(n - 1.0) <= 1e-5, ErrorCode::kValidation,
              "image " + std::to_string(i) + " flagged normalized but is not");
    }
  }
  if (!labels.empty()) {
    require(classes > 0, ErrorCode::kValidation, "labels present but classes == 0");
    require(labels.size() == images.size(), ErrorCode::kValidation,
            "label count does not match image count");
    for (std::size_t i = 0; i < labels.size(); ++i) {
      require(labels[i].weights.size() == classes, ErrorCode::kDimMismatch,
              "label " + std::to_string(i) + " has wrong class count");
      for (float w : labels[i].weights)
        require(std::isfinite(w) && w >= 0.0f && w <= 1.0f, ErrorCode::kValidation,
                "label " + std::to_string(i) + " entry outside [0,1]");
    }
  }
}

bool Dataset::same_content(const Dataset& o) const noexcept {
  if (!(dims == o.dims) || classes != o.classes || normalized != o.normalized ||
      images.size() != o.images.size() || labels.size() != o.labels.size())
    return false;
  for (std::size_t i = 0; i < images.size(); ++i)
    if (!(images[i] == o.images[i])) return false;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& a = labels[i].weights;
    const auto& b = o.labels[i].weights;
    if (a.size() != b.size() ||
        (!a.empty() && std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) != 0))
      return false;
  }
  return true;
}

std::vector<std::uint8_t> encode_dataset(const Dataset& d) {
  d.validate();
  require(d.images.size() <= 0xFFFFFFFFu, ErrorCode::kValidation, "too many images");
  const bool has_labels = !d.labels.empty();
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + d.images.size() * (d.dims.size() + d.classes) * 4);
  out.insert(out.end(), kMagic, kMagic + 4);
  le::put_u16(out, kVersion);
  std::uint16_t flags = 0;
  if (has_labels) flags |= kFlagLabels;
  if (d.normalized) flags |= kFlagNormalized;
  le::put_u16(out, flags);
  le::put_u32(out, static_cast<std::uint32_t>(d.images.size()));
  le::put_u16(out, d.dims.channels);
  le::put_u16(out, d.dims.height);
  le::put_u16(out, d.dims.width);
  le::put_u16(out, has_labels ? d.classes : 0);
  for (const Image& im : d.images)
    for (float v : im.pixels()) le::put_f32(out, v);
  for (const LabelVector& y : d.labels)
    for (float v : y.weights) le::put_f32(out, v);
  return out;
}

Dataset decode_dataset(const std::vector<std::uint8_t>& bytes, std::string name) {
  le::Reader r(bytes.data(), bytes.size());
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) fail(ErrorCode::kFormat, "bad IHDS magic");
  const std::uint16_t version = r.u16();
  if (version != kVersion)
    fail(ErrorCode::kFormat, "unsupported IHDS version " + std::to_string(version));
  const std::uint16_t flags = r.u16();
  const std::uint32_t count = r.u32();

  Dataset d;
  d.name = std::move(name);
  d.dims.channels = r.u16();
  d.dims.height = r.u16();
  d.dims.width = r.u16();
  d.classes = r.u16();
  d.normalized = (flags & kFlagNormalized) != 0;
  const bool has_labels = (flags & kFlagLabels) != 0;

  if ((flags & ~(kFlagLabels | kFlagNormalized)) != 0)
    fail(ErrorCode::kFormat, "unknown IHDS flag bits");
  if (has_labels != (d.classes > 0))
    fail(ErrorCode::kFormat, "label flag and class count disagree");
  const std::size_t dsize = d.dims.size();
  if (dsize == 0) fail(ErrorCode::kFormat, "IHDS dims must be positive");

  const std::size_t image_bytes = std::size_t{count} * dsize * 4;
  if (r.remaining() < image_bytes) fail(ErrorCode::kIo, "IHDS image payload truncated");
  d.images.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::vector<float> px(dsize);
    r.f32s(px.data(), dsize);
    d.images.emplace_back(d.dims, std::move(px));
  }

  const std::size_t rec = std::size_t{d.classes} * 4;
  const std::size_t rest = r.remaining();
  if (rec == 0) {
    if (rest != 0) fail(ErrorCode::kFormat, "trailing bytes after IHDS payload");
    return d;
  }
  const std::size_t expected = std::size_t{count} * rec;
  if (rest != expected) {
    if (rest % rec == 0)
      fail(ErrorCode::kFormat, "IHDS label block holds " + std::to_string(rest / rec) +
                                   " rows for " + std::to_string(count) + " images");
    if (rest < expected) fail(ErrorCode::kIo, "IHDS label payload truncated");
    fail(ErrorCode::kFormat, "trailing bytes after IHDS payload");
  }
  d.labels.resize(count);
  for (auto& y : d.labels) {
    y.weights.resize(d.classes);
    r.f32s(y.weights.data(), d.classes);
  }
  return d;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorCode::kIo, "read failed: " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIo, "write failed: " + path.string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::kIo, "write failed: " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
  return decode_dataset(read_file(path), path.stem().string());
}

void save_dataset(const Dataset& d, const std::filesystem::path& path) {
  write_file(path, encode_dataset(d));
}

}  // namespace ih
