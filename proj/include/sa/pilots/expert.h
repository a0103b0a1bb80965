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

#ifndef SA_PILOTS_EXPERT_H_
#define SA_PILOTS_EXPERT_H_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sa/envs/types.h"
#include "sa/net/actor_critic.h"
#include "sa/net/checkpoint.h"
#include "sa/pilots/pilot.h"
#include "sa/ppo/trainer.h"

namespace sa::pilots {

// Training recipe for the goal-aware surrogate experts.
ppo::TrainConfig DefaultExpertTrainConfig();
net::ActorCritic::Options DefaultExpertNet();

// PPO on the pilot observation with reward R_general + R_g.
ppo::PolicyTrainResult TrainExpert(envs::EnvId id, const envs::EnvConfig& env_cfg,
                                   const ppo::TrainConfig& cfg,
                                   const net::ActorCritic::Options& net_opts,
                                   ppo::MetricsLog* log = nullptr);

// Checkpoint of kind "pilot" (an actor-critic) or "bc" (an imitation MLP)
// tagged with env and dims.
net::Checkpoint MakePilotCheckpoint(const net::ActorCritic& policy,
                                    envs::EnvId id,
                                    std::map<std::string, std::string> meta = {});
net::Checkpoint MakeBcCheckpoint(const net::MlpParams& params, envs::EnvId id,
                                 std::map<std::string, std::string> meta = {});

// Builds an ExpertPilot or ImitationPilot from a checkpoint. Throws
// ConfigError when the checkpoint was made for another env.
std::unique_ptr<Pilot> PilotFromCheckpoint(const net::Checkpoint& ckpt,
                                           envs::EnvId id);
std::unique_ptr<Pilot> LoadPilot(const std::string& path, envs::EnvId id);

enum class PilotKind { kExpert, kLaggy, kNoisy, kImitation, kMixture, kZero };

PilotKind ParsePilotKind(const std::string& name);
std::string PilotKindName(PilotKind kind);

struct PilotSpec {
  PilotKind kind = PilotKind::kExpert;
  // expert/laggy/noisy/imitation use the first entry as the base; mixture
  // uses every entry as a member. Ignored for kZero.
  std::vector<std::string> checkpoints;
  double repeat_p = 0.8;
  double noise_p = 0.5;
  double switch_p = 0.001;
  uint64_t seed = 0;
};

std::unique_ptr<Pilot> MakePilot(const PilotSpec& spec, envs::EnvId id);

}  // namespace sa::pilots

#endif  // SA_PILOTS_EXPERT_H_
