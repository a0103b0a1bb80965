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

#ifndef SA_COPILOT_TRAINER_H_
#define SA_COPILOT_TRAINER_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sa/common/config.h"
#include "sa/copilot/lagrange.h"
#include "sa/envs/env.h"
#include "sa/net/actor_critic.h"
#include "sa/net/adam.h"
#include "sa/net/checkpoint.h"
#include "sa/pilots/pilot.h"
#include "sa/ppo/rollout.h"
#include "sa/ppo/trainer.h"

namespace sa::copilot {

// Copilot input: the goal-agnostic observation followed by the pilot action.
Eigen::VectorXd CopilotInput(const envs::Observation& obs,
                             const envs::Action& a_h);
int CopilotInputDim(envs::EnvId id);

// The learned residual policy evaluated at its mean.
class Copilot {
 public:
  Copilot(net::ActorCritic policy, envs::EnvId id);

  envs::Action Residual(const envs::Observation& obs,
                        const envs::Action& a_h) const;
  const net::ActorCritic& policy() const { return policy_; }
  envs::EnvId env() const { return id_; }

 private:
  net::ActorCritic policy_;
  envs::EnvId id_;
};

struct CopilotConfig {
  ppo::TrainConfig train;
  net::ActorCritic::Options net;
  // Steps at the start during which a_r = 0 and only the value head learns.
  int64_t warmup_steps = 10'000;
  // Constraint threshold d. Unset: measured at the end of warm-up as the
  // mean discounted R_general return of the pilot alone plus
  // threshold_margin.
  std::optional<double> threshold;
  double threshold_margin = 5.0;

  CopilotConfig();
  // Keys: copilot.{warmup_steps,threshold,threshold_margin,init_log_std,
  // hidden} plus the ppo.* training keys.
  static CopilotConfig FromConfig(const Config& cfg);
  Config ToConfig() const;
};

// Rollout adapter: queries the pilot on every state, feeds obs ++ a_h to the
// copilot, executes CombineActions(a_h, a_r) and rewards R_general only.
class CopilotDriver : public ppo::RolloutDriver {
 public:
  CopilotDriver(const pilots::Pilot& pilot, int num_envs);

  void OnReset(int env_index, const envs::Env& env,
               uint64_t episode_seed) override;
  Eigen::VectorXd PolicyInput(int env_index, const envs::Env& env) override;
  envs::Action EnvAction(int env_index,
                         const Eigen::VectorXd& residual) override;
  double Reward(const envs::StepResult& res) const override {
    return res.r_general;
  }

  const envs::Action& last_pilot_action(int env_index) const {
    return a_h_[env_index];
  }

 private:
  std::vector<std::unique_ptr<pilots::Pilot>> pilots_;
  std::vector<envs::Action> a_h_;
};

struct CopilotTrainResult {
  net::ActorCritic policy;
  net::AdamState adam;
  LagrangeState lagrange;
  std::optional<double> j_hat;
  int64_t steps = 0;
};

struct CopilotHooks {
  // After every rollout, before the update.
  std::function<void(const ppo::RolloutBatch&, bool warmup)> on_rollout;
  // After every update; returning false stops training.
  std::function<bool(const ppo::MetricsRow&, const net::ActorCritic&,
                     const LagrangeState&, bool warmup)>
      on_update;
};

// Constrained residual PPO. Each rollout is followed by one PPO update of
// L_theta at the current lambda and, when at least one episode finished in
// the rollout, one dual ascent step on L_lambda with the new J_hat.
CopilotTrainResult TrainCopilot(envs::EnvId id, const envs::EnvConfig& env_cfg,
                                const pilots::Pilot& pilot,
                                const CopilotConfig& cfg,
                                ppo::MetricsLog* log = nullptr,
                                const CopilotHooks& hooks = {});

net::Checkpoint MakeCopilotCheckpoint(const CopilotTrainResult& result,
                                      envs::EnvId id,
                                      std::map<std::string, std::string> meta = {});
// Throws ConfigError on a non-copilot checkpoint or env mismatch.
Copilot CopilotFromCheckpoint(const net::Checkpoint& ckpt, envs::EnvId id);

}  // namespace sa::copilot

#endif  // SA_COPILOT_TRAINER_H_
