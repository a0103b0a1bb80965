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

#ifndef SA_PPO_ROLLOUT_H_
#define SA_PPO_ROLLOUT_H_

#include <cstdint>
#include <memory>
#include <vector>

#include "sa/common/rng.h"
#include "sa/envs/env.h"
#include "sa/net/actor_critic.h"
#include "sa/ppo/types.h"

namespace sa::ppo {

// Adapts an environment to the policy being trained: what the policy sees,
// how its action becomes an env action, and which reward it is trained on.
class RolloutDriver {
 public:
  virtual ~RolloutDriver() = default;

  // Called after env `env_index` was reset with `episode_seed`.
  virtual void OnReset(int env_index, const envs::Env& env,
                       uint64_t episode_seed) = 0;
  // Policy input for the env's current state. Called exactly once per state
  // that is acted on, plus once for a truncated final state.
  virtual Eigen::VectorXd PolicyInput(int env_index, const envs::Env& env) = 0;
  // Env action for the policy action chosen on the last PolicyInput.
  virtual envs::Action EnvAction(int env_index,
                                 const Eigen::VectorXd& policy_action) = 0;
  // Unscaled training reward.
  virtual double Reward(const envs::StepResult& res) const = 0;
};

// Pilot training: goal-aware pilot observation, action executed directly,
// reward R_general + R_g.
class PilotDriver : public RolloutDriver {
 public:
  void OnReset(int, const envs::Env&, uint64_t) override {}
  Eigen::VectorXd PolicyInput(int, const envs::Env& env) override {
    return env.Observe(/*for_pilot=*/true);
  }
  envs::Action EnvAction(int, const Eigen::VectorXd& a) override { return a; }
  double Reward(const envs::StepResult& res) const override {
    return res.r_general + res.r_goal;
  }
};

// Collects fixed-length rollouts from `num_envs` env instances stepped in a
// fixed order; segments are concatenated env by env. Episodes auto-reset on
// done with seeds derived from (seed, env index, episode index).
class RolloutCollector {
 public:
  RolloutCollector(envs::EnvId id, const envs::EnvConfig& cfg, int num_envs,
                   uint64_t seed, double gamma, double reward_scale,
                   RolloutDriver* driver);

  // Exactly T transitions. With `zero_action` the policy output is replaced
  // by an all-zero action (noise recorded as zero).
  RolloutBatch Collect(const net::ActorCritic& ac, int T, Rng& rng,
                       bool zero_action = false);

  int num_envs() const { return static_cast<int>(envs_.size()); }
  const envs::Env& env(int i) const { return envs_[i]; }
  int64_t total_steps() const { return total_steps_; }

 private:
  struct Running {
    EpisodeSummary summary;
    double discount = 1.0;
    uint64_t episode_index = 0;
  };

  void ResetEnv(int e);

  std::vector<envs::Env> envs_;
  std::vector<Running> running_;
  std::vector<Eigen::VectorXd> pending_input_;
  uint64_t seed_;
  double gamma_;
  double reward_scale_;
  RolloutDriver* driver_;
  int64_t total_steps_ = 0;
};

// Residual norm of a policy action, tracked per episode by drivers that care.
double ActionNorm(const Eigen::VectorXd& a);

}  // namespace sa::ppo

#endif  // SA_PPO_ROLLOUT_H_
