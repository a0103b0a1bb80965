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

#include "sa/ppo/rollout.h"

#include "sa/common/errors.h"
#include "sa/net/gaussian.h"

namespace sa::ppo {

double ActionNorm(const Eigen::VectorXd& a) { return a.norm(); }

RolloutCollector::RolloutCollector(envs::EnvId id, const envs::EnvConfig& cfg,
                                   int num_envs, uint64_t seed, double gamma,
                                   double reward_scale, RolloutDriver* driver)
    : seed_(seed), gamma_(gamma), reward_scale_(reward_scale), driver_(driver) {
  if (num_envs < 1) throw ConfigError("collector needs at least one env");
  if (driver_ == nullptr) throw ConfigError("collector needs a driver");
  envs_.reserve(num_envs);
  for (int e = 0; e < num_envs; ++e) envs_.emplace_back(id, cfg);
  running_.resize(num_envs);
  pending_input_.resize(num_envs);
  for (int e = 0; e < num_envs; ++e) ResetEnv(e);
}

void RolloutCollector::ResetEnv(int e) {
  Running& run = running_[e];
  const uint64_t episode_seed =
      DeriveSeed(DeriveSeed(seed_, static_cast<uint64_t>(e)), run.episode_index);
  ++run.episode_index;
  envs_[e].Reset(episode_seed);
  run.summary = EpisodeSummary{};
  run.discount = 1.0;
  driver_->OnReset(e, envs_[e], episode_seed);
  pending_input_[e] = driver_->PolicyInput(e, envs_[e]);
}

RolloutBatch RolloutCollector::Collect(const net::ActorCritic& ac, int T,
                                       Rng& rng, bool zero_action) {
  if (T < 1) throw ConfigError("rollout length must be >= 1");
  const int n_envs = num_envs();
  const int act_dim = ac.act_dim();
  RolloutBatch batch;
  batch.Resize(ac.input_dim(), act_dim, T);
  int t = 0;
  for (int e = 0; e < n_envs; ++e) {
    const int seg = T / n_envs + (e < T % n_envs ? 1 : 0);
    for (int k = 0; k < seg; ++k, ++t) {
      const Eigen::VectorXd x = pending_input_[e];
      const auto out = ac.Forward(x);
      const net::GaussianPolicyOut pol{out.mean.col(0), out.log_std};
      Eigen::VectorXd xi;
      Eigen::VectorXd a;
      if (zero_action) {
        xi = Eigen::VectorXd::Zero(act_dim);
        a = Eigen::VectorXd::Zero(act_dim);
      } else {
        xi = net::StandardNormal(act_dim, rng);
        a = pol.mean + (pol.log_std.array().exp() * xi.array()).matrix();
      }
      batch.obs.col(t) = x;
      batch.actions.col(t) = a;
      batch.noise.col(t) = xi;
      batch.log_probs[t] = net::GaussianLogProb(pol, a);
      batch.values[t] = out.value(0);
      if (t > 0 && !batch.boundary[t - 1]) batch.next_values[t - 1] = out.value(0);

      const envs::Action env_action = driver_->EnvAction(e, a);
      const envs::StepResult res = envs_[e].Step(env_action);
      const double reward = driver_->Reward(res);
      batch.rewards[t] = reward * reward_scale_;
      ++total_steps_;

      Running& run = running_[e];
      run.summary.return_general += res.r_general;
      run.summary.return_goal += res.r_goal;
      run.summary.discounted_general += run.discount * res.r_general;
      run.summary.residual_norm_sum += ActionNorm(a);
      run.summary.length += 1;
      run.discount *= gamma_;

      if (res.done) {
        batch.boundary[t] = 1;
        batch.terminal[t] = res.truncated ? 0 : 1;
        batch.next_values[t] = 0.0;
        if (res.truncated) {
          batch.next_values[t] = ac.Value(driver_->PolicyInput(e, envs_[e]));
        }
        run.summary.outcome = res.outcome;
        batch.episodes.push_back(run.summary);
        ResetEnv(e);
      } else {
        pending_input_[e] = driver_->PolicyInput(e, envs_[e]);
        if (k + 1 == seg) {
          // Segment end: cut the recursion and bootstrap from V(next).
          batch.boundary[t] = 1;
          batch.next_values[t] = ac.Value(pending_input_[e]);
        }
      }
    }
  }
  batch.bootstrap_value = batch.next_values[T - 1];
  return batch;
}

}  // namespace sa::ppo
