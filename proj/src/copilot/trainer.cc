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

#include "sa/copilot/trainer.h"

#include <cmath>
#include <sstream>
#include <utility>

#include "sa/common/errors.h"
#include "sa/copilot/residual.h"
#include "sa/ppo/ppo.h"

namespace sa::copilot {
namespace {

double MeanColumnNorm(const Eigen::MatrixXd& m) { return ResidualPenalty(m); }

}  // namespace

Eigen::VectorXd CopilotInput(const envs::Observation& obs,
                             const envs::Action& a_h) {
  Eigen::VectorXd x(obs.size() + a_h.size());
  x << obs, a_h;
  return x;
}

int CopilotInputDim(envs::EnvId id) {
  return envs::ObservationDim(id, false) + envs::ActionDim(id);
}

Copilot::Copilot(net::ActorCritic policy, envs::EnvId id)
    : policy_(std::move(policy)), id_(id) {
  if (policy_.input_dim() != CopilotInputDim(id) ||
      policy_.act_dim() != envs::ActionDim(id)) {
    throw ConfigError("copilot network does not match env " + envs::EnvIdName(id));
  }
}

envs::Action Copilot::Residual(const envs::Observation& obs,
                               const envs::Action& a_h) const {
  return policy_.Policy(CopilotInput(obs, a_h)).mean;
}

CopilotConfig::CopilotConfig() {
  net.init_log_std = -1.0;
  train.total_timesteps = 5'000'000;
  train.seed = 1;
}

CopilotConfig CopilotConfig::FromConfig(const Config& cfg) {
  CopilotConfig c;
  const Config ppo_section = cfg.Section("ppo");
  Config train = c.train.ToConfig();
  train.Merge(ppo_section);
  c.train = ppo::TrainConfig::FromConfig(train);
  const Config s = cfg.Section("copilot");
  s.RequireKnown({"warmup_steps", "threshold", "threshold_margin",
                  "init_log_std", "hidden"});
  c.warmup_steps = s.GetInt("warmup_steps", c.warmup_steps);
  if (c.warmup_steps < 0) throw ConfigError("warmup_steps must be >= 0");
  const std::string d = s.GetString("threshold", "auto");
  if (d != "auto") c.threshold = s.GetDouble("threshold");
  if (c.threshold && (std::isnan(*c.threshold) || *c.threshold == INFINITY)) {
    throw ConfigError("threshold must be finite or -inf");
  }
  c.threshold_margin = s.GetDouble("threshold_margin", c.threshold_margin);
  c.net.init_log_std = s.GetDouble("init_log_std", c.net.init_log_std);
  if (s.Has("hidden")) c.net.hidden = ParseHiddenSizes(s.GetString("hidden"));
  return c;
}

Config CopilotConfig::ToConfig() const {
  Config out;
  const Config train_cfg = train.ToConfig();
  for (const auto& [k, v] : train_cfg.entries()) out.Set("ppo." + k, v);
  out.Set("copilot.warmup_steps", std::to_string(warmup_steps));
  out.Set("copilot.threshold", threshold ? FormatDouble(*threshold) : "auto");
  out.Set("copilot.threshold_margin", FormatDouble(threshold_margin));
  out.Set("copilot.init_log_std", FormatDouble(net.init_log_std));
  out.Set("copilot.hidden", FormatHiddenSizes(net.hidden));
  return out;
}

CopilotDriver::CopilotDriver(const pilots::Pilot& pilot, int num_envs) {
  for (int e = 0; e < num_envs; ++e) pilots_.push_back(pilot.Clone());
  a_h_.resize(num_envs);
}

void CopilotDriver::OnReset(int env_index, const envs::Env& env,
                            uint64_t episode_seed) {
  pilots_[env_index]->Reset(pilots::PilotEpisodeSeed(episode_seed));
}

Eigen::VectorXd CopilotDriver::PolicyInput(int env_index, const envs::Env& env) {
  a_h_[env_index] = pilots_[env_index]->Act(env.Observe(/*for_pilot=*/true));
  return CopilotInput(env.Observe(/*for_pilot=*/false), a_h_[env_index]);
}

envs::Action CopilotDriver::EnvAction(int env_index,
                                      const Eigen::VectorXd& residual) {
  return CombineActions(a_h_[env_index], residual);
}

CopilotTrainResult TrainCopilot(envs::EnvId id, const envs::EnvConfig& env_cfg,
                                const pilots::Pilot& pilot,
                                const CopilotConfig& cfg, ppo::MetricsLog* log,
                                const CopilotHooks& hooks) {
  const ppo::TrainConfig& tc = cfg.train;
  tc.Validate();
  if (pilot.action_dim() != envs::ActionDim(id)) {
    throw ConfigError("pilot action dim does not match env");
  }
  Rng rng(tc.seed);
  Rng init_rng = rng.Fork(1);
  Rng sample_rng = rng.Fork(2);
  Rng shuffle_rng = rng.Fork(3);

  CopilotTrainResult result;
  result.policy = net::ActorCritic(CopilotInputDim(id), envs::ActionDim(id),
                                   cfg.net, init_rng);
  result.adam = net::AdamState::ForSize(result.policy.params().size());
  result.lagrange = LagrangeState::Initial(cfg.threshold.value_or(0.0));
  bool threshold_set = cfg.threshold.has_value();
  double warmup_j_sum = 0.0;
  int warmup_episodes = 0;

  const Eigen::VectorXd value_mask =
      Eigen::VectorXd::Ones(result.policy.params().size()) -
      result.policy.PolicyHeadMask();

  CopilotDriver driver(pilot, tc.num_envs);
  ppo::RolloutCollector collector(id, env_cfg, tc.num_envs,
                                  DeriveSeed(tc.seed, 4), tc.gamma,
                                  tc.reward_scale, &driver);
  while (collector.total_steps() < tc.total_timesteps) {
    const bool warmup = collector.total_steps() < cfg.warmup_steps;
    if (!warmup && !threshold_set) {
      if (warmup_episodes == 0) {
        throw TrainingFault(
            "no episode finished during warm-up; set an explicit threshold or "
            "lengthen warm-up");
      }
      result.lagrange.threshold =
          warmup_j_sum / warmup_episodes + cfg.threshold_margin;
      threshold_set = true;
    }
    const double lr = ppo::LrSchedule(tc.lr, collector.total_steps(),
                                      tc.DecayInterval(), tc.decay_factor);
    const int n = tc.RolloutLengthAt(collector.total_steps());
    ppo::RolloutBatch batch =
        collector.Collect(result.policy, n, sample_rng, /*zero_action=*/warmup);
    batch.Validate();
    if (hooks.on_rollout) hooks.on_rollout(batch, warmup);

    ppo::Advantages adv = ppo::ComputeGae(batch, tc.gamma, tc.gae_lambda);
    ppo::NormalizeAdvantages(adv);
    ppo::UpdateStats stats;
    if (warmup) {
      stats = ppo::PpoUpdate(result.policy, result.adam, batch,
                             MakeValueOnlyLoss(adv, tc), tc, lr, shuffle_rng,
                             value_mask);
      for (const auto& ep : batch.episodes) {
        warmup_j_sum += ep.discounted_general;
        ++warmup_episodes;
      }
    } else {
      stats = ppo::PpoUpdate(
          result.policy, result.adam, batch,
          MakeCopilotLoss(batch, adv, tc, result.lagrange.lambda()), tc, lr,
          shuffle_rng);
      if (!batch.episodes.empty()) {
        double j = 0.0;
        for (const auto& ep : batch.episodes) j += ep.discounted_general;
        result.j_hat = j / static_cast<double>(batch.episodes.size());
        result.lagrange = DualAscent(result.lagrange, *result.j_hat, tc.lr_lambda);
      }
    }

    ppo::MetricsRow row;
    row.step = collector.total_steps();
    ppo::SummarizeEpisodes(batch, row);
    row.policy_loss = stats.policy_loss;
    row.value_loss = stats.value_loss;
    row.entropy = stats.entropy;
    row.clip_fraction = stats.clip_fraction;
    row.lambda = result.lagrange.lambda();
    row.j_hat = result.j_hat;
    row.residual_norm = MeanColumnNorm(batch.actions);
    if (log != nullptr) log->Append(row);
    if (hooks.on_update &&
        !hooks.on_update(row, result.policy, result.lagrange, warmup)) {
      break;
    }
  }
  if (!threshold_set && warmup_episodes > 0) {
    result.lagrange.threshold =
        warmup_j_sum / warmup_episodes + cfg.threshold_margin;
  }
  result.steps = collector.total_steps();
  return result;
}

net::Checkpoint MakeCopilotCheckpoint(const CopilotTrainResult& result,
                                      envs::EnvId id,
                                      std::map<std::string, std::string> meta) {
  net::Checkpoint ckpt;
  ckpt.kind = "copilot";
  ckpt.params = result.policy.params();
  ckpt.lagrange = net::LagrangeExtras{result.lagrange.raw,
                                      result.lagrange.threshold};
  ckpt.adam = result.adam;
  ckpt.meta = std::move(meta);
  ckpt.meta["env"] = envs::EnvIdName(id);
  ckpt.meta["obs_dim"] = std::to_string(CopilotInputDim(id));
  ckpt.meta["act_dim"] = std::to_string(envs::ActionDim(id));
  ckpt.meta["steps"] = std::to_string(result.steps);
  return ckpt;
}

Copilot CopilotFromCheckpoint(const net::Checkpoint& ckpt, envs::EnvId id) {
  if (ckpt.kind != "copilot") {
    throw ConfigError("checkpoint kind '" + ckpt.kind + "' is not a copilot");
  }
  auto it = ckpt.meta.find("env");
  if (it == ckpt.meta.end() || it->second != envs::EnvIdName(id)) {
    throw ConfigError("copilot checkpoint was not trained for env " +
                      envs::EnvIdName(id));
  }
  const int act_dim = envs::ActionDim(id);
  if (ckpt.params.output_dim() != act_dim + 1 || ckpt.params.extra() != act_dim) {
    throw ConfigError("copilot checkpoint has wrong head dims");
  }
  return Copilot(net::ActorCritic(ckpt.params, act_dim), id);
}

}  // namespace sa::copilot
