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

#ifndef SA_PILOTS_DEMO_LOG_H_
#define SA_PILOTS_DEMO_LOG_H_

#include <cstdint>
#include <fstream>
#include <istream>
#include <string>
#include <utility>
#include <vector>

#include "sa/envs/types.h"

namespace sa::pilots {

inline constexpr char kDemoLogSchema[] = "sa.demo_log";
inline constexpr int kDemoLogVersion = 1;

// First line of every demo log.
struct DemoHeader {
  std::string env;
  int obs_dim = 0;
  int act_dim = 0;
  // Free-form provenance (seed, config_hash, source, ...).
  std::vector<std::pair<std::string, std::string>> meta;
};

// One environment step. `obs` is the pilot observation the step acted on,
// `reward` the R_general the step earned, `seed` the episode's reset seed.
// `a_r` is empty when no copilot was attached.
struct DemoRecord {
  int64_t episode = 0;
  int t = 0;
  uint64_t seed = 0;
  envs::Observation obs;
  envs::Action a_h;
  envs::Action a_r;
  double reward = 0.0;
  bool done = false;
  envs::Outcome outcome = envs::Outcome::kNone;
};

struct DemoLog {
  DemoHeader header;
  std::vector<DemoRecord> records;

  int64_t num_episodes() const;
};

std::string DemoHeaderJson(const DemoHeader& header);
std::string DemoRecordJson(const DemoRecord& record);

// Parses and validates a whole log: schema and version, dims, actions in
// [-1, 1], t strictly increasing within an episode. Throws VersionError for
// an unknown version and InputError for anything else malformed.
DemoLog ParseDemoLog(std::istream& in);
// LoadError when the file cannot be opened.
DemoLog ReadDemoLog(const std::string& path);

// Line-buffered JSON Lines writer. Append throws LoadError once the sink
// fails; the log written so far stays valid.
class DemoLogWriter {
 public:
  DemoLogWriter(const std::string& path, const DemoHeader& header);

  void Append(const DemoRecord& record);
  void Flush();
  int64_t records() const { return records_; }

 private:
  std::ofstream out_;
  std::string path_;
  int obs_dim_;
  int act_dim_;
  int64_t records_ = 0;
};

}  // namespace sa::pilots

#endif  // SA_PILOTS_DEMO_LOG_H_
