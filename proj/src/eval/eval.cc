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

#include "sa/eval/eval.h"

#include "json.hpp"
#include "sa/common/errors.h"
#include "sa/copilot/residual.h"

namespace sa::eval {
namespace {

using nlohmann::json;

}  // namespace

uint64_t EpisodeSeed(uint64_t seed, int64_t index) {
  return DeriveSeed(seed, static_cast<uint64_t>(index));
}

EpisodeRecord RunEpisode(envs::EnvId id, const envs::EnvConfig& env_cfg,
                         const pilots::Pilot& pilot,
                         const copilot::Copilot* copilot, uint64_t seed,
                         int64_t index, pilots::DemoLogWriter* step_log) {
  if (copilot != nullptr && copilot->env() != id) {
    throw ConfigError("copilot was trained for another env");
  }
  envs::Env env(id, env_cfg);
  env.Reset(seed);
  std::unique_ptr<pilots::Pilot> p = pilot.Clone();
  p->Reset(pilots::PilotEpisodeSeed(seed));

  EpisodeRecord rec;
  rec.index = index;
  rec.seed = seed;
  double residual_sum = 0.0;
  envs::StepResult res;
  do {
    const envs::Observation pilot_obs = env.Observe(/*for_pilot=*/true);
    const envs::Action a_h = p->Act(pilot_obs);
    envs::Action a_r = envs::Action::Zero(a_h.size());
    if (copilot != nullptr) a_r = copilot->Residual(env.Observe(false), a_h);
    const int t = env.t();
    res = env.Step(copilot::CombineActions(a_h, a_r));
    rec.return_general += res.r_general;
    residual_sum += a_r.norm();
    rec.steps += 1;
    if (step_log != nullptr) {
      pilots::DemoRecord r;
      r.episode = index;
      r.t = t;
      r.seed = seed;
      r.obs = pilot_obs;
      r.a_h = a_h;
      if (copilot != nullptr) r.a_r = a_r;
      r.reward = res.r_general;
      r.done = res.done;
      r.outcome = res.outcome;
      step_log->Append(r);
    }
  } while (!res.done);
  rec.outcome = res.outcome;
  rec.residual_norm = residual_sum / rec.steps;
  return rec;
}

EvalReport RunEval(envs::EnvId id, const envs::EnvConfig& env_cfg,
                   const pilots::Pilot& pilot, const copilot::Copilot* copilot,
                   int episodes, uint64_t seed, const std::string& pilot_label,
                   const std::string& copilot_label,
                   pilots::DemoLogWriter* step_log) {
  if (episodes < 0) throw ConfigError("episodes must be >= 0");
  EvalReport report;
  report.env = envs::EnvIdName(id);
  report.pilot = pilot_label;
  report.copilot = copilot_label;
  report.seed = seed;
  report.records.reserve(episodes);
  for (int i = 0; i < episodes; ++i) {
    report.records.push_back(RunEpisode(id, env_cfg, pilot, copilot,
                                        EpisodeSeed(seed, i), i, step_log));
  }
  Summarize(report);
  return report;
}

void Summarize(EvalReport& report) {
  report.episodes = static_cast<int>(report.records.size());
  int counts[5] = {0, 0, 0, 0, 0};
  double ret = 0.0;
  double res = 0.0;
  for (const auto& r : report.records) {
    counts[static_cast<int>(r.outcome)]++;
    ret += r.return_general;
    res += r.residual_norm;
  }
  if (report.episodes == 0) {
    report.success_rate = report.crash_rate = report.oob_rate =
        report.timeout_rate = report.mean_return_general =
            report.mean_residual_norm = 0.0;
    return;
  }
  if (counts[static_cast<int>(envs::Outcome::kNone)] != 0) {
    throw InvalidStateError("evaluation record without an outcome");
  }
  const double n = report.episodes;
  report.success_rate = counts[static_cast<int>(envs::Outcome::kSuccess)] / n;
  report.crash_rate = counts[static_cast<int>(envs::Outcome::kCrash)] / n;
  report.oob_rate = counts[static_cast<int>(envs::Outcome::kOutOfBounds)] / n;
  report.timeout_rate = counts[static_cast<int>(envs::Outcome::kTimeout)] / n;
  report.mean_return_general = ret / n;
  report.mean_residual_norm = res / n;
}

std::string ReportJson(const EvalReport& r) {
  json j;
  j["env"] = r.env;
  j["pilot"] = r.pilot;
  j["copilot"] = r.copilot;
  j["seed"] = r.seed;
  j["config_hash"] = r.config_hash;
  j["episodes"] = r.episodes;
  j["success_rate"] = r.success_rate;
  j["crash_rate"] = r.crash_rate;
  j["oob_rate"] = r.oob_rate;
  j["timeout_rate"] = r.timeout_rate;
  j["mean_return_general"] = r.mean_return_general;
  j["mean_residual_norm"] = r.mean_residual_norm;
  return j.dump(2);
}

std::string EpisodeRecordsJsonl(const EvalReport& report) {
  std::string out;
  for (const auto& r : report.records) {
    json j;
    j["episode"] = r.index;
    j["seed"] = r.seed;
    j["outcome"] = envs::OutcomeName(r.outcome);
    j["return_general"] = r.return_general;
    j["steps"] = r.steps;
    j["residual_norm"] = r.residual_norm;
    out += j.dump();
    out += "\n";
  }
  return out;
}

}  // namespace sa::eval
