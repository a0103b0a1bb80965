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

#ifndef SA_PPO_TYPES_H_
#define SA_PPO_TYPES_H_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "sa/common/config.h"
#include "sa/envs/types.h"

namespace sa::ppo {

struct TrainConfig {
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_eps = 0.2;
  // Transitions per rollout, split evenly over num_envs instances.
  int rollout_length = 8192;
  int num_envs = 8;
  int epochs = 4;
  int minibatches = 4;
  double value_coef = 0.5;
  double entropy_coef = 0.0;
  double lr = 3e-4;         // alpha_theta
  double lr_lambda = 0.01;  // alpha_lambda
  double max_grad_norm = 0.5;
  // Rewards are multiplied by this before entering the value targets.
  double reward_scale = 0.05;
  int64_t total_timesteps = 1'000'000;
  // lr *= decay_factor every decay_every steps; 0 disables decay and a
  // negative value means total_timesteps / 5.
  int64_t decay_every = -1;
  double decay_factor = 0.31622776601683794;  // sqrt(0.1)
  uint64_t seed = 0;

  static TrainConfig FromConfig(const Config& section);
  Config ToConfig() const;
  void Validate() const;
  int64_t DecayInterval() const;
  // Length of the next rollout after `steps_done` steps; the last one is cut
  // short so training never runs past total_timesteps.
  int RolloutLengthAt(int64_t steps_done) const;
};

// Summary of one finished episode seen during collection.
struct EpisodeSummary {
  double return_general = 0.0;
  double return_goal = 0.0;
  // sum_t gamma^t r_general(t), unscaled.
  double discounted_general = 0.0;
  double residual_norm_sum = 0.0;
  int length = 0;
  envs::Outcome outcome = envs::Outcome::kNone;
};

// T transitions in time order, possibly from several env instances laid
// end to end. Columns of the matrices are steps.
struct RolloutBatch {
  Eigen::MatrixXd obs;      // policy input
  Eigen::MatrixXd actions;  // action sampled from the trained policy
  Eigen::MatrixXd noise;    // standard normal draw behind each action
  Eigen::VectorXd log_probs;
  Eigen::VectorXd values;
  Eigen::VectorXd rewards;  // already scaled
  // Value of the state that followed each step (before any reset).
  Eigen::VectorXd next_values;
  // terminal: true end of an episode, next value is not bootstrapped.
  // boundary: advantage recursion stops here (terminal, truncation, or end
  // of one env's segment).
  std::vector<uint8_t> terminal;
  std::vector<uint8_t> boundary;
  double bootstrap_value = 0.0;
  std::vector<EpisodeSummary> episodes;

  int size() const { return static_cast<int>(rewards.size()); }
  void Resize(int obs_dim, int act_dim, int steps);
  // Checks equal lengths and finite log-probs and rewards.
  void Validate() const;
};

struct Advantages {
  Eigen::VectorXd advantages;  // normalized when normalize() was applied
  Eigen::VectorXd returns;     // raw advantage + value
  double mean = 0.0;
  double std = 1.0;
};

struct UpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double mean_ratio = 1.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  double residual_penalty = 0.0;
  double total_loss = 0.0;
  int minibatch_steps = 0;
};

}  // namespace sa::ppo

#endif  // SA_PPO_TYPES_H_
