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

#include "sa/ppo/types.h"

#include <algorithm>
#include <string>

#include "sa/common/errors.h"

namespace sa::ppo {

TrainConfig TrainConfig::FromConfig(const Config& s) {
  TrainConfig c;
  c.gamma = s.GetDouble("gamma", c.gamma);
  c.gae_lambda = s.GetDouble("gae_lambda", c.gae_lambda);
  c.clip_eps = s.GetDouble("clip_eps", c.clip_eps);
  c.rollout_length = static_cast<int>(s.GetInt("rollout_length", c.rollout_length));
  c.num_envs = static_cast<int>(s.GetInt("num_envs", c.num_envs));
  c.epochs = static_cast<int>(s.GetInt("epochs", c.epochs));
  c.minibatches = static_cast<int>(s.GetInt("minibatches", c.minibatches));
  c.value_coef = s.GetDouble("value_coef", c.value_coef);
  c.entropy_coef = s.GetDouble("entropy_coef", c.entropy_coef);
  c.lr = s.GetDouble("lr", c.lr);
  c.lr_lambda = s.GetDouble("lr_lambda", c.lr_lambda);
  c.max_grad_norm = s.GetDouble("max_grad_norm", c.max_grad_norm);
  c.reward_scale = s.GetDouble("reward_scale", c.reward_scale);
  c.total_timesteps = s.GetInt("total_timesteps", c.total_timesteps);
  c.decay_every = s.GetInt("decay_every", c.decay_every);
  c.decay_factor = s.GetDouble("decay_factor", c.decay_factor);
  c.seed = s.GetU64("seed", c.seed);
  s.RequireKnown({"gamma", "gae_lambda", "clip_eps", "rollout_length",
                  "num_envs", "epochs", "minibatches", "value_coef",
                  "entropy_coef", "lr", "lr_lambda", "max_grad_norm",
                  "reward_scale", "total_timesteps", "decay_every",
                  "decay_factor", "seed"});
  c.Validate();
  return c;
}

Config TrainConfig::ToConfig() const {
  Config c;
  c.Set("gamma", FormatDouble(gamma));
  c.Set("gae_lambda", FormatDouble(gae_lambda));
  c.Set("clip_eps", FormatDouble(clip_eps));
  c.Set("rollout_length", std::to_string(rollout_length));
  c.Set("num_envs", std::to_string(num_envs));
  c.Set("epochs", std::to_string(epochs));
  c.Set("minibatches", std::to_string(minibatches));
  c.Set("value_coef", FormatDouble(value_coef));
  c.Set("entropy_coef", FormatDouble(entropy_coef));
  c.Set("lr", FormatDouble(lr));
  c.Set("lr_lambda", FormatDouble(lr_lambda));
  c.Set("max_grad_norm", FormatDouble(max_grad_norm));
  c.Set("reward_scale", FormatDouble(reward_scale));
  c.Set("total_timesteps", std::to_string(total_timesteps));
  c.Set("decay_every", std::to_string(decay_every));
  c.Set("decay_factor", FormatDouble(decay_factor));
  c.Set("seed", std::to_string(seed));
  return c;
}

void TrainConfig::Validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma must be in [0, 1)");
  if (!(clip_eps > 0.0)) throw ConfigError("clip_eps must be positive");
  if (rollout_length < 1) throw ConfigError("rollout_length must be >= 1");
  if (num_envs < 1 || num_envs > rollout_length) {
    throw ConfigError("num_envs must be in [1, rollout_length]");
  }
  if (epochs < 1 || minibatches < 1) {
    throw ConfigError("epochs and minibatches must be >= 1");
  }
  if (!(lr >= 0.0) || !(lr_lambda >= 0.0)) {
    throw ConfigError("learning rates must be >= 0");
  }
  if (!(reward_scale > 0.0)) throw ConfigError("reward_scale must be positive");
}

int TrainConfig::RolloutLengthAt(int64_t steps_done) const {
  return static_cast<int>(
      std::clamp<int64_t>(total_timesteps - steps_done, 1, rollout_length));
}

int64_t TrainConfig::DecayInterval() const {
  if (decay_every >= 0) return decay_every;
  return std::max<int64_t>(1, total_timesteps / 5);
}

void RolloutBatch::Resize(int obs_dim, int act_dim, int steps) {
  obs.resize(obs_dim, steps);
  actions.resize(act_dim, steps);
  noise.resize(act_dim, steps);
  log_probs.resize(steps);
  values.resize(steps);
  rewards.resize(steps);
  next_values.resize(steps);
  terminal.assign(steps, 0);
  boundary.assign(steps, 0);
}

void RolloutBatch::Validate() const {
  const Eigen::Index n = rewards.size();
  if (obs.cols() != n || actions.cols() != n || log_probs.size() != n ||
      values.size() != n || next_values.size() != n ||
      static_cast<Eigen::Index>(terminal.size()) != n ||
      static_cast<Eigen::Index>(boundary.size()) != n) {
    throw ShapeError("rollout batch arrays have unequal lengths");
  }
  if (!log_probs.allFinite()) throw TrainingFault("non-finite log-prob in batch");
  if (!rewards.allFinite()) throw TrainingFault("non-finite reward in batch");
}

}  // namespace sa::ppo
