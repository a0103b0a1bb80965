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

#include "sa/pilots/demo_log.h"

#include <map>

#include "json.hpp"
#include "sa/common/errors.h"

namespace sa::pilots {
namespace {

using nlohmann::json;

json VectorJson(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd VectorFrom(const json& j, const char* field) {
  if (!j.is_array()) {
    throw InputError(std::string("demo log field ") + field + " is not an array");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw InputError(std::string("demo log field ") + field + " is not numeric");
    }
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

void CheckAction(const Eigen::VectorXd& a, int dim, const char* field) {
  if (a.size() != dim) {
    throw InputError(std::string("demo log ") + field + " has wrong dim");
  }
  if (!a.allFinite() || a.cwiseAbs().maxCoeff() > 1.0) {
    throw InputError(std::string("demo log ") + field + " outside [-1, 1]");
  }
}

}  // namespace

int64_t DemoLog::num_episodes() const {
  int64_t n = 0;
  int64_t last = -1;
  bool any = false;
  for (const auto& r : records) {
    if (!any || r.episode != last) ++n;
    last = r.episode;
    any = true;
  }
  return n;
}

std::string DemoHeaderJson(const DemoHeader& header) {
  json j;
  j["schema"] = kDemoLogSchema;
  j["version"] = kDemoLogVersion;
  j["env"] = header.env;
  j["obs_dim"] = header.obs_dim;
  j["act_dim"] = header.act_dim;
  json meta = json::object();
  for (const auto& [k, v] : header.meta) meta[k] = v;
  j["meta"] = meta;
  return j.dump();
}

std::string DemoRecordJson(const DemoRecord& r) {
  json j;
  j["episode"] = r.episode;
  j["t"] = r.t;
  j["seed"] = r.seed;
  j["obs"] = VectorJson(r.obs);
  j["a_h"] = VectorJson(r.a_h);
  if (r.a_r.size() > 0) j["a_r"] = VectorJson(r.a_r);
  j["reward"] = r.reward;
  j["done"] = r.done;
  j["outcome"] = envs::OutcomeName(r.outcome);
  return j.dump();
}

DemoLog ParseDemoLog(std::istream& in) {
  DemoLog log;
  std::string line;
  if (!std::getline(in, line)) throw InputError("demo log is empty");
  json h;
  try {
    h = json::parse(line);
    if (h.value("schema", "") != kDemoLogSchema) {
      throw InputError("demo log has no schema header");
    }
    const int version = h.at("version").get<int>();
    if (version != kDemoLogVersion) {
      throw VersionError("unsupported demo log version " + std::to_string(version));
    }
    log.header.env = h.at("env").get<std::string>();
    log.header.obs_dim = h.at("obs_dim").get<int>();
    log.header.act_dim = h.at("act_dim").get<int>();
    if (h.contains("meta")) {
      for (const auto& [k, v] : h["meta"].items()) {
        log.header.meta.emplace_back(k, v.is_string() ? v.get<std::string>() : v.dump());
      }
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("bad demo log header: ") + e.what());
  }
  const envs::EnvId id = envs::ParseEnvId(log.header.env);
  if (log.header.obs_dim != envs::ObservationDim(id, true) ||
      log.header.act_dim != envs::ActionDim(id)) {
    throw InputError("demo log dims do not match env " + log.header.env);
  }

  std::map<int64_t, int> last_t;
  int64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    DemoRecord r;
    try {
      const json j = json::parse(line);
      r.episode = j.at("episode").get<int64_t>();
      r.t = j.at("t").get<int>();
      r.seed = j.value("seed", uint64_t{0});
      r.obs = VectorFrom(j.at("obs"), "obs");
      r.a_h = VectorFrom(j.at("a_h"), "a_h");
      if (j.contains("a_r")) r.a_r = VectorFrom(j["a_r"], "a_r");
      r.reward = j.at("reward").get<double>();
      r.done = j.at("done").get<bool>();
      r.outcome = envs::ParseOutcome(j.at("outcome").get<std::string>());
    } catch (const json::exception& e) {
      throw InputError("bad demo record on line " + std::to_string(line_no) +
                       ": " + e.what());
    }
    if (r.obs.size() != log.header.obs_dim) {
      throw InputError("demo record obs has wrong dim on line " +
                       std::to_string(line_no));
    }
    CheckAction(r.a_h, log.header.act_dim, "a_h");
    if (r.a_r.size() > 0 && r.a_r.size() != log.header.act_dim) {
      throw InputError("demo log a_r has wrong dim");
    }
    auto it = last_t.find(r.episode);
    if (it != last_t.end() && r.t <= it->second) {
      throw InputError("demo log t not increasing on line " + std::to_string(line_no));
    }
    last_t[r.episode] = r.t;
    log.records.push_back(std::move(r));
  }
  return log;
}

DemoLog ReadDemoLog(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open demo log: " + path);
  return ParseDemoLog(in);
}

DemoLogWriter::DemoLogWriter(const std::string& path, const DemoHeader& header)
    : out_(path, std::ios::trunc),
      path_(path),
      obs_dim_(header.obs_dim),
      act_dim_(header.act_dim) {
  if (!out_) throw LoadError("cannot write demo log: " + path);
  out_ << DemoHeaderJson(header) << "\n";
  out_.flush();
  if (!out_) throw LoadError("cannot write demo log: " + path);
}

void DemoLogWriter::Append(const DemoRecord& record) {
  if (record.obs.size() != obs_dim_ || record.a_h.size() != act_dim_) {
    throw ShapeError("demo record dims do not match the log header");
  }
  out_ << DemoRecordJson(record) << "\n";
  if (record.done) out_.flush();
  if (!out_) throw LoadError("demo log write failed: " + path_);
  ++records_;
}

void DemoLogWriter::Flush() {
  out_.flush();
  if (!out_) throw LoadError("demo log write failed: " + path_);
}

}  // namespace sa::pilots
