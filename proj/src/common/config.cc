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

#include "sa/common/config.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "sa/common/errors.h"

namespace sa {
namespace {

std::string Trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

std::string Unquote(const std::string& v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
    return v.substr(1, v.size() - 2);
  }
  return v;
}

}  // namespace

Config Config::Parse(std::string_view text) {
  Config cfg;
  std::string section;
  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string line = Trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line[0] == '#' || line[0] == ';') {
      if (nl == text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": unterminated section header");
      }
      section = Trim(std::string_view(line).substr(1, line.size() - 2));
    } else {
      const size_t eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": expected key = value");
      }
      std::string key = Trim(std::string_view(line).substr(0, eq));
      std::string value = Unquote(Trim(std::string_view(line).substr(eq + 1)));
      if (key.empty()) {
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": empty key");
      }
      if (!section.empty()) key = section + "." + key;
      cfg.entries_[key] = value;
    }
    if (nl == text.size()) break;
  }
  return cfg;
}

Config Config::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str());
}

void Config::Set(const std::string& key, const std::string& value) {
  entries_[key] = value;
}

void Config::SetDefault(const std::string& key, const std::string& value) {
  entries_.try_emplace(key, value);
}

bool Config::Has(const std::string& key) const {
  return entries_.count(key) > 0;
}

void Config::Erase(const std::string& key) { entries_.erase(key); }

std::string Config::GetString(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing config key: " + key);
  return it->second;
}

std::string Config::GetString(const std::string& key,
                              const std::string& fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double Config::GetDouble(const std::string& key) const {
  const std::string v = GetString(key);
  if (v == "-inf" || v == "-infinity") return -std::numeric_limits<double>::infinity();
  if (v == "inf" || v == "infinity") return std::numeric_limits<double>::infinity();
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("config key " + key + ": not a number: " + v);
  }
  return out;
}

double Config::GetDouble(const std::string& key, double fallback) const {
  return Has(key) ? GetDouble(key) : fallback;
}

int64_t Config::GetInt(const std::string& key) const {
  const std::string v = GetString(key);
  int64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    // Accept integral values written in floating form, e.g. 2e6.
    double d = 0.0;
    auto [p2, e2] = std::from_chars(v.data(), v.data() + v.size(), d);
    if (e2 != std::errc() || p2 != v.data() + v.size() ||
        d != static_cast<double>(static_cast<int64_t>(d))) {
      throw ConfigError("config key " + key + ": not an integer: " + v);
    }
    return static_cast<int64_t>(d);
  }
  return out;
}

int64_t Config::GetInt(const std::string& key, int64_t fallback) const {
  return Has(key) ? GetInt(key) : fallback;
}

uint64_t Config::GetU64(const std::string& key, uint64_t fallback) const {
  if (!Has(key)) return fallback;
  const std::string v = GetString(key);
  uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("config key " + key + ": not an unsigned integer: " + v);
  }
  return out;
}

bool Config::GetBool(const std::string& key, bool fallback) const {
  if (!Has(key)) return fallback;
  const std::string v = GetString(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key " + key + ": not a boolean: " + v);
}

void Config::Merge(const Config& other) {
  for (const auto& [k, v] : other.entries_) entries_[k] = v;
}

void Config::RequireKnown(const std::set<std::string>& allowed) const {
  for (const auto& [k, v] : entries_) {
    if (allowed.count(k)) continue;
    const size_t dot = k.find('.');
    if (dot != std::string::npos && allowed.count(k.substr(0, dot + 1))) continue;
    throw ConfigError("unknown config key: " + k);
  }
}

Config Config::Section(const std::string& prefix) const {
  Config out;
  const std::string p = prefix + ".";
  for (const auto& [k, v] : entries_) {
    if (k.rfind(p, 0) == 0) out.entries_[k.substr(p.size())] = v;
  }
  return out;
}

std::string Config::Serialize() const {
  std::ostringstream out;
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> by_section;
  for (const auto& [k, v] : entries_) {
    const size_t dot = k.find('.');
    if (dot == std::string::npos) {
      by_section[""].emplace_back(k, v);
    } else {
      by_section[k.substr(0, dot)].emplace_back(k.substr(dot + 1), v);
    }
  }
  for (const auto& [k, v] : by_section[""]) out << k << " = " << v << "\n";
  for (const auto& [section, kvs] : by_section) {
    if (section.empty()) continue;
    out << "[" << section << "]\n";
    for (const auto& [k, v] : kvs) out << k << " = " << v << "\n";
  }
  return out.str();
}

uint64_t Config::Hash() const { return Fnv1a64(Serialize()); }

std::string Config::HashHex() const { return ToHex(Hash()); }

void Config::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write config file: " + path);
  out << "# config_hash = " << HashHex() << "\n" << Serialize();
}

uint64_t Fnv1a64(std::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string ToHex(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<int> ParseHiddenSizes(const std::string& text) {
  std::vector<int> out;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) {
    try {
      const int v = std::stoi(item);
      if (v < 1) throw ConfigError("hidden sizes must be positive");
      out.push_back(v);
    } catch (const std::logic_error&) {
      throw ConfigError("bad hidden layer list: " + text);
    }
  }
  if (out.empty()) throw ConfigError("hidden layer list is empty");
  return out;
}

std::string FormatHiddenSizes(const std::vector<int>& hidden) {
  std::string out;
  for (size_t i = 0; i < hidden.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(hidden[i]);
  }
  return out;
}

}  // namespace sa
