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

#ifndef SA_EVAL_REPLAY_H_
#define SA_EVAL_REPLAY_H_

#include <cstdint>
#include <string>
#include <vector>

#include "sa/envs/types.h"
#include "sa/pilots/demo_log.h"

namespace sa::eval {

struct ReplayEpisode {
  int64_t episode = 0;
  uint64_t seed = 0;
  int steps = 0;
  envs::Outcome logged = envs::Outcome::kNone;
  envs::Outcome replayed = envs::Outcome::kNone;
  // First step whose observation, reward or termination differs; -1 if none.
  int first_mismatch = -1;
  std::string mismatch;
};

struct ReplayResult {
  std::vector<ReplayEpisode> episodes;
  bool ok() const;
};

// Re-runs every episode of `log` from its reset seed with the logged
// a_h + a_r and compares observations, rewards and outcomes bit for bit.
// An episode cut short in the log (no done record) is replayed up to its
// last record and reports outcome none on both sides.
ReplayResult ReplayDemoLog(const pilots::DemoLog& log,
                           const envs::EnvConfig& env_cfg);

}  // namespace sa::eval

#endif  // SA_EVAL_REPLAY_H_
