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

#include "sa/ppo/trainer.h"

#include <sstream>

#include "sa/common/config.h"
#include "sa/common/errors.h"
#include "sa/ppo/ppo.h"

namespace sa::ppo {

MetricsLog::MetricsLog(const std::string& path, const std::string& provenance)
    : out_(path, std::ios::trunc) {
  if (!out_) throw ConfigError("cannot write metrics log: " + path);
  if (!provenance.empty()) out_ << "# " << provenance << "\n";
  out_ << Header() << "\n";
  out_.flush();
}

std::string MetricsLog::Header() {
  return "step,episodes,mean_return_general,mean_return_goal,success_rate,"
         "crash_rate,policy_loss,value_loss,entropy,clip_fraction,lambda,"
         "J_hat,residual_norm";
}

std::string MetricsLog::Format(const MetricsRow& r) {
  auto opt = [](const std::optional<double>& v) {
    return v ? FormatDouble(*v) : std::string();
  };
  std::ostringstream s;
  s << r.step << "," << r.episodes << "," << FormatDouble(r.mean_return_general)
    << "," << FormatDouble(r.mean_return_goal) << ","
    << FormatDouble(r.success_rate) << "," << FormatDouble(r.crash_rate) << ","
    << FormatDouble(r.policy_loss) << "," << FormatDouble(r.value_loss) << ","
    << FormatDouble(r.entropy) << "," << FormatDouble(r.clip_fraction) << ","
    << opt(r.lambda) << "," << opt(r.j_hat) << "," << opt(r.residual_norm);
  return s.str();
}

void MetricsLog::Append(const MetricsRow& row) {
  rows_.push_back(row);
  if (out_.is_open()) {
    out_ << Format(row) << "\n";
    out_.flush();
  }
}

void SummarizeEpisodes(const RolloutBatch& batch, MetricsRow& row) {
  row.episodes = static_cast<int>(batch.episodes.size());
  row.mean_return_general = 0.0;
  row.mean_return_goal = 0.0;
  row.success_rate = 0.0;
  row.crash_rate = 0.0;
  if (batch.episodes.empty()) return;
  const double k = 1.0 / static_cast<double>(batch.episodes.size());
  for (const auto& ep : batch.episodes) {
    row.mean_return_general += ep.return_general * k;
    row.mean_return_goal += ep.return_goal * k;
    if (ep.outcome == envs::Outcome::kSuccess) row.success_rate += k;
    if (ep.outcome == envs::Outcome::kCrash) row.crash_rate += k;
  }
}

PolicyTrainResult TrainPolicy(
    envs::EnvId id, const envs::EnvConfig& env_cfg, const TrainConfig& cfg,
    const net::ActorCritic::Options& net_opts, RolloutDriver& driver,
    MetricsLog* log,
    const std::function<bool(const MetricsRow&, const net::ActorCritic&)>&
        on_update) {
  cfg.Validate();
  Rng rng(cfg.seed);
  Rng init_rng = rng.Fork(1);
  Rng sample_rng = rng.Fork(2);
  Rng shuffle_rng = rng.Fork(3);
  PolicyTrainResult result;
  result.policy = net::ActorCritic(envs::ObservationDim(id, true),
                                   envs::ActionDim(id), net_opts, init_rng);
  result.adam = net::AdamState::ForSize(result.policy.params().size());
  RolloutCollector collector(id, env_cfg, cfg.num_envs, DeriveSeed(cfg.seed, 4),
                             cfg.gamma, cfg.reward_scale, &driver);
  while (collector.total_steps() < cfg.total_timesteps) {
    const double lr =
        LrSchedule(cfg.lr, collector.total_steps(), cfg.DecayInterval(), cfg.decay_factor);
    const int n = cfg.RolloutLengthAt(collector.total_steps());
    RolloutBatch batch = collector.Collect(result.policy, n, sample_rng);
    batch.Validate();
    Advantages adv = ComputeGae(batch, cfg.gamma, cfg.gae_lambda);
    NormalizeAdvantages(adv);
    const UpdateStats stats =
        PpoUpdate(result.policy, result.adam, batch, MakePpoLoss(batch, adv, cfg),
                  cfg, lr, shuffle_rng);
    MetricsRow row;
    row.step = collector.total_steps();
    SummarizeEpisodes(batch, row);
    row.policy_loss = stats.policy_loss;
    row.value_loss = stats.value_loss;
    row.entropy = stats.entropy;
    row.clip_fraction = stats.clip_fraction;
    if (log != nullptr) log->Append(row);
    if (on_update && !on_update(row, result.policy)) break;
  }
  result.steps = collector.total_steps();
  return result;
}

}  // namespace sa::ppo
