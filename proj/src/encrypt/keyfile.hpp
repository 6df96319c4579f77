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
#include <vector>

#include "json.hpp"

#include "encrypt/encrypt.hpp"

namespace ih {

/// Ground-truth keys for experiments, stored next to an encrypted dataset.
/// Never written by the challenge command.
struct KeyRecord {
  EncryptionKey key;
  std::uint32_t epoch = 0;
  std::uint32_t sample_id = 0;
};

/// {"format": "ihkeys", "version": 1, "keys": [{sources, lambda, mask, epoch,
/// sample_id}]}; masks are packed bits (1 = +1), hex encoded.
nlohmann::ordered_json keys_to_json(const std::vector<KeyRecord>& keys);
std::vector<KeyRecord> keys_from_json(const nlohmann::ordered_json& j);  // kFormat

void save_keys(const std::vector<KeyRecord>& keys, const std::filesystem::path& path);
std::vector<KeyRecord> load_keys(const std::filesystem::path& path);

std::string pack_mask_hex(const SignMask& m);
SignMask unpack_mask_hex(const std::string& hex, std::size_t d);  // kFormat

}  // namespace ih
