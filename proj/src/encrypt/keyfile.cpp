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


#include "encrypt/keyfile.hpp"

#include <string>

#include "core/dataset.hpp"
#include "core/error.hpp"

namespace ih {

namespace {

const char* tag_name(SourceTag t) {
  switch (t) {
    case SourceTag::kPrivate: return "private";
    case SourceTag::kPublic: return "public";
    case SourceTag::kExternal: return "external";
  }
  return "?";
}

SourceTag parse_tag(const std::string& s) {
  if (s == "private") return SourceTag::kPrivate;
  if (s == "public") return SourceTag::kPublic;
  if (s == "external") return SourceTag::kExternal;
  fail(ErrorCode::kFormat, "keys: unknown source tag '" + s + "'");
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

}  // namespace

std::string pack_mask_hex(const SignMask& m) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve((m.size() + 7) / 8 * 2);
  for (std::size_t i = 0; i < m.size(); i += 8) {
    unsigned byte = 0;
    for (std::size_t b = 0; b < 8 && i + b < m.size(); ++b)
      if (m.signs[i + b] > 0) byte |= 1u << b;
    out.push_back(digits[byte >> 4]);
    out.push_back(digits[byte & 15]);
  }
  return out;
}

SignMask unpack_mask_hex(const std::string& hex, std::size_t d) {
  require(hex.size() == (d + 7) / 8 * 2, ErrorCode::kFormat, "keys: mask length mismatch");
  SignMask m;
  m.signs.resize(d);
  for (std::size_t i = 0; i < d; i += 8) {
    const int hi = hex_value(hex[i / 4]);
    const int lo = hex_value(hex[i / 4 + 1]);
    require(hi >= 0 && lo >= 0, ErrorCode::kFormat, "keys: bad hex digit in mask");
    const unsigned byte = static_cast<unsigned>(hi * 16 + lo);
    for (std::size_t b = 0; b < 8 && i + b < d; ++b)
      m.signs[i + b] = (byte >> b) & 1u ? 1 : -1;
  }
  return m;
}

nlohmann::ordered_json keys_to_json(const std::vector<KeyRecord>& keys) {
  using J = nlohmann::ordered_json;
  J arr = J::array();
  for (const auto& r : keys) {
    J src = J::array();
    for (const auto& s : r.key.sources) src.push_back({{"tag", tag_name(s.tag)}, {"index", s.index}});
    arr.push_back({{"epoch", r.epoch},
                   {"sample_id", r.sample_id},
                   {"sources", src},
                   {"lambda", r.key.lambda.lambda},
                   {"d", r.key.mask.size()},
                   {"mask", pack_mask_hex(r.key.mask)}});
  }
  return {{"format", "ihkeys"}, {"version", 1}, {"keys", arr}};
}

std::vector<KeyRecord> keys_from_json(const nlohmann::ordered_json& j) {
  try {
    require(j.value("format", "") == "ihkeys" && j.value("version", 0) == 1, ErrorCode::kFormat,
            "keys: not an ihkeys v1 document");
    std::vector<KeyRecord> out;
    for (const auto& e : j.at("keys")) {
      KeyRecord r;
      r.epoch = e.at("epoch").get<std::uint32_t>();
      r.sample_id = e.at("sample_id").get<std::uint32_t>();
      for (const auto& s : e.at("sources"))
        r.key.sources.push_back({parse_tag(s.at("tag").get<std::string>()),
                                 s.at("index").get<std::uint32_t>()});
      r.key.lambda.lambda = e.at("lambda").get<std::vector<double>>();
      r.key.mask = unpack_mask_hex(e.at("mask").get<std::string>(), e.at("d").get<std::size_t>());
      require(r.key.lambda.k() == r.key.sources.size(), ErrorCode::kFormat,
              "keys: lambda/sources length mismatch");
      out.push_back(std::move(r));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, std::string("keys: ") + e.what());
  }
}

void save_keys(const std::vector<KeyRecord>& keys, const std::filesystem::path& path) {
  write_text(path, keys_to_json(keys).dump() + "\n");
}

std::vector<KeyRecord> load_keys(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  const auto j = nlohmann::ordered_json::parse(bytes.begin(), bytes.end(), nullptr, false);
  require(!j.is_discarded(), ErrorCode::kFormat, "keys: invalid JSON in " + path.string());
  return keys_from_json(j);
}

}  // namespace ih
