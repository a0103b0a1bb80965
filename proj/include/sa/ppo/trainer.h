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

#ifndef SA_PPO_TRAINER_H_
#define SA_PPO_TRAINER_H_

#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sa/envs/types.h"
#include "sa/net/actor_critic.h"
#include "sa/net/adam.h"
#include "sa/ppo/rollout.h"
#include "sa/ppo/types.h"

namespace sa::ppo {

// One line of the training metrics CSV.
struct MetricsRow {
  int64_t step = 0;
  int episodes = 0;
  double mean_return_general = 0.0;
  double mean_return_goal = 0.0;
  double success_rate = 0.0;
  double crash_rate = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  std::optional<double> lambda;
  std::optional<double> j_hat;
  std::optional<double> residual_norm;
};

// CSV columns: step, episodes, mean_return_general, mean_return_goal,
// success_rate, crash_rate, policy_loss, value_loss, entropy, clip_fraction,
// lambda, J_hat, residual_norm. Columns that do not apply are left empty.
class MetricsLog {
 public:
  MetricsLog() = default;
  // A non-empty `provenance` is written first as a "# " comment line.
  explicit MetricsLog(const std::string& path, const std::string& provenance = "");

  void Append(const MetricsRow& row);
  const std::vector<MetricsRow>& rows() const { return rows_; }

  static std::string Header();
  static std::string Format(const MetricsRow& row);

 private:
  std::ofstream out_;
  std::vector<MetricsRow> rows_;
};

// Fills the episode-derived columns from the episodes finished in `batch`.
void SummarizeEpisodes(const RolloutBatch& batch, MetricsRow& row);

struct PolicyTrainResult {
  net::ActorCritic policy;
  net::AdamState adam;
  int64_t steps = 0;
};

// Plain PPO on `driver`'s reward, used for the expert pilots. `on_update`
// runs after each update with the row just logged; returning false stops
// training early.
PolicyTrainResult TrainPolicy(
    envs::EnvId id, const envs::EnvConfig& env_cfg, const TrainConfig& cfg,
    const net::ActorCritic::Options& net_opts, RolloutDriver& driver,
    MetricsLog* log,
    const std::function<bool(const MetricsRow&, const net::ActorCritic&)>&
        on_update = {});

}  // namespace sa::ppo

#endif  // SA_PPO_TRAINER_H_
