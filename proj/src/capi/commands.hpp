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
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace ih {

using Json = nlohmann::ordered_json;

/// Typed view over a flat command configuration. Values may be JSON scalars
/// or strings (as they arrive from the command line). Every key read is
/// recorded with its effective value; keys never read are rejected.
class Config {
 public:
  explicit Config(Json input);

  std::string str(const std::string& key, const std::string& def);
  std::string path(const std::string& key);  // required
  std::optional<std::string> opt_path(const std::string& key);
  std::uint64_t u64(const std::string& key, std::uint64_t def);
  std::size_t size(const std::string& key, std::size_t def) { return u64(key, def); }
  double real(const std::string& key, double def);
  std::optional<double> opt_real(const std::string& key);
  bool flag(const std::string& key, bool def);

  /// Throws kInvalidArgument naming the first unknown key.
  void finish() const;
  const Json& resolved() const noexcept { return resolved_; }

 private:
  const Json* find(const std::string& key);

  Json input_;
  Json resolved_ = Json::object();
  std::set<std::string> used_;
};

/// Runs one command ("encrypt", "attack pair", ...) and returns its report:
/// {"tool", "command", "config" (resolved, incl. seed), "result"}.
Json run_command(const std::string& command, const Json& config);

/// Commands accepted by run_command.
std::vector<std::string> command_names();

}  // namespace ih
