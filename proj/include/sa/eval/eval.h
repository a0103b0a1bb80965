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

#ifndef SA_EVAL_EVAL_H_
#define SA_EVAL_EVAL_H_

#include <cstdint>
#include <string>
#include <vector>

#include "sa/copilot/trainer.h"
#include "sa/envs/env.h"
#include "sa/pilots/demo_log.h"
#include "sa/pilots/pilot.h"

namespace sa::eval {

struct EpisodeRecord {
  int64_t index = 0;
  uint64_t seed = 0;
  envs::Outcome outcome = envs::Outcome::kNone;
  double return_general = 0.0;
  int steps = 0;
  // Mean of ||a_r|| over the episode's steps.
  double residual_norm = 0.0;
};

struct EvalReport {
  std::string env;
  std::string pilot;
  std::string copilot;
  uint64_t seed = 0;
  // Hash of the resolved run config; empty outside the CLI.
  std::string config_hash;
  int episodes = 0;
  double success_rate = 0.0;
  double crash_rate = 0.0;
  double oob_rate = 0.0;
  double timeout_rate = 0.0;
  double mean_return_general = 0.0;
  double mean_residual_norm = 0.0;
  std::vector<EpisodeRecord> records;
};

// Seed of episode `index` in a run seeded with `seed`.
uint64_t EpisodeSeed(uint64_t seed, int64_t index);

// Plays one episode. The pilot is cloned and reset from the episode seed, so
// the outcome depends on the seed alone. `copilot` null means no assistance
// (a_r = 0). When `step_log` is set every step is appended to it.
EpisodeRecord RunEpisode(envs::EnvId id, const envs::EnvConfig& env_cfg,
                         const pilots::Pilot& pilot,
                         const copilot::Copilot* copilot, uint64_t seed,
                         int64_t index = 0,
                         pilots::DemoLogWriter* step_log = nullptr);

// `episodes` episodes with seeds EpisodeSeed(seed, i). Copilot actions are
// the policy mean.
EvalReport RunEval(envs::EnvId id, const envs::EnvConfig& env_cfg,
                   const pilots::Pilot& pilot, const copilot::Copilot* copilot,
                   int episodes, uint64_t seed, const std::string& pilot_label,
                   const std::string& copilot_label,
                   pilots::DemoLogWriter* step_log = nullptr);

// Recomputes every summary field from report.records.
void Summarize(EvalReport& report);

std::string ReportJson(const EvalReport& report);
// One JSON object per episode record.
std::string EpisodeRecordsJsonl(const EvalReport& report);

}  // namespace sa::eval

#endif  // SA_EVAL_EVAL_H_
