// Copyright 2026 The Residual Copilot Authors
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

#ifndef SA_COMMON_CONFIG_H_
#define SA_COMMON_CONFIG_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sa {

// Flat key/value configuration.
//
// Text form is INI-like:
//
//   # comment
//   seed = 3
//   [env]
//   gravity = 1.0        -> key "env.gravity"
//
// Values are stored as strings and converted on access. Serialize() emits
// keys in sorted order under their sections so that the text, and hence
// Hash(), depend only on the resolved key set.
class Config {
 public:
  Config() = default;

  static Config Parse(std::string_view text);
  static Config Load(const std::string& path);

  void Set(const std::string& key, const std::string& value);
  void SetDefault(const std::string& key, const std::string& value);
  bool Has(const std::string& key) const;
  void Erase(const std::string& key);

  std::string GetString(const std::string& key) const;
  std::string GetString(const std::string& key, const std::string& fallback) const;
  double GetDouble(const std::string& key) const;
  double GetDouble(const std::string& key, double fallback) const;
  int64_t GetInt(const std::string& key) const;
  int64_t GetInt(const std::string& key, int64_t fallback) const;
  uint64_t GetU64(const std::string& key, uint64_t fallback) const;
  bool GetBool(const std::string& key, bool fallback) const;

  // Layers `other` on top of this config.
  void Merge(const Config& other);

  // Throws ConfigError naming the first key outside `allowed`. A key is
  // allowed when it is listed verbatim or its section prefix "sec." is.
  void RequireKnown(const std::set<std::string>& allowed) const;

  // Subset of keys starting with "prefix.", with the prefix stripped.
  Config Section(const std::string& prefix) const;

  std::string Serialize() const;
  // FNV-1a 64 over Serialize().
  uint64_t Hash() const;
  std::string HashHex() const;

  void Save(const std::string& path) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

uint64_t Fnv1a64(std::string_view bytes);
std::string ToHex(uint64_t v);

// Shortest round-trippable decimal for a double.
std::string FormatDouble(double v);

// Comma-separated positive layer widths, e.g. "64,64".
std::vector<int> ParseHiddenSizes(const std::string& text);
std::string FormatHiddenSizes(const std::vector<int>& hidden);

}  // namespace sa

#endif  // SA_COMMON_CONFIG_H_
