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

#include "sa/eval/replay.h"

#include <map>

#include "sa/copilot/residual.h"
#include "sa/envs/env.h"

namespace sa::eval {

bool ReplayResult::ok() const {
  for (const auto& e : episodes) {
    if (e.first_mismatch >= 0 || e.logged != e.replayed) return false;
  }
  return true;
}

ReplayResult ReplayDemoLog(const pilots::DemoLog& log, const envs::EnvConfig& env_cfg) {
  const envs::EnvId id = envs::ParseEnvId(log.header.env);
  // Records grouped by episode, in file order.
  std::map<int64_t, std::vector<const pilots::DemoRecord*>> by_episode;
  std::vector<int64_t> order;
  for (const auto& r : log.records) {
    auto& v = by_episode[r.episode];
    if (v.empty()) order.push_back(r.episode);
    v.push_back(&r);
  }

  ReplayResult result;
  for (int64_t ep : order) {
    const auto& recs = by_episode[ep];
    ReplayEpisode out;
    out.episode = ep;
    out.seed = recs.front()->seed;
    envs::Env env(id, env_cfg);
    env.Reset(out.seed);
    for (const pilots::DemoRecord* r : recs) {
      const auto note = [&](const std::string& what) {
        if (out.first_mismatch < 0) {
          out.first_mismatch = r->t;
          out.mismatch = what;
        }
      };
      if (r->seed != out.seed) note("seed changes within the episode");
      if (env.done()) {
        note("log continues after the replayed episode ended");
        break;
      }
      if (r->t != env.t()) note("step index differs");
      if (env.Observe(true) != r->obs) note("observation differs");
      const envs::Action a_r = r->a_r.size() > 0
                                   ? r->a_r
                                   : envs::Action::Zero(env.action_dim());
      const envs::StepResult res = env.Step(copilot::CombineActions(r->a_h, a_r));
      ++out.steps;
      if (res.r_general != r->reward) note("reward differs");
      if (res.done != r->done) note("termination differs");
      if (r->done) out.logged = r->outcome;
      if (res.done) out.replayed = res.outcome;
    }
    result.episodes.push_back(out);
  }
  return result;
}

}  // namespace sa::eval
