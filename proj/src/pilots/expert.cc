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

#include "sa/pilots/expert.h"

#include <utility>

#include "sa/common/errors.h"

namespace sa::pilots {
namespace {

void TagCheckpoint(net::Checkpoint& ckpt, envs::EnvId id) {
  ckpt.meta["env"] = envs::EnvIdName(id);
  ckpt.meta["obs_dim"] = std::to_string(envs::ObservationDim(id, true));
  ckpt.meta["act_dim"] = std::to_string(envs::ActionDim(id));
}

}  // namespace

ppo::TrainConfig DefaultExpertTrainConfig() {
  ppo::TrainConfig cfg;
  cfg.total_timesteps = 5'000'000;
  cfg.rollout_length = 8192;
  cfg.reward_scale = 0.05;
  cfg.seed = 1;
  return cfg;
}

net::ActorCritic::Options DefaultExpertNet() {
  net::ActorCritic::Options o;
  o.hidden = {64, 64};
  return o;
}

ppo::PolicyTrainResult TrainExpert(envs::EnvId id, const envs::EnvConfig& env_cfg,
                                   const ppo::TrainConfig& cfg,
                                   const net::ActorCritic::Options& net_opts,
                                   ppo::MetricsLog* log) {
  ppo::PilotDriver driver;
  return ppo::TrainPolicy(id, env_cfg, cfg, net_opts, driver, log);
}

net::Checkpoint MakePilotCheckpoint(const net::ActorCritic& policy,
                                    envs::EnvId id,
                                    std::map<std::string, std::string> meta) {
  net::Checkpoint ckpt;
  ckpt.kind = "pilot";
  ckpt.params = policy.params();
  ckpt.meta = std::move(meta);
  TagCheckpoint(ckpt, id);
  return ckpt;
}

net::Checkpoint MakeBcCheckpoint(const net::MlpParams& params, envs::EnvId id,
                                 std::map<std::string, std::string> meta) {
  net::Checkpoint ckpt;
  ckpt.kind = "bc";
  ckpt.params = params;
  ckpt.meta = std::move(meta);
  TagCheckpoint(ckpt, id);
  return ckpt;
}

std::unique_ptr<Pilot> PilotFromCheckpoint(const net::Checkpoint& ckpt,
                                           envs::EnvId id) {
  auto it = ckpt.meta.find("env");
  if (it == ckpt.meta.end() || it->second != envs::EnvIdName(id)) {
    throw ConfigError("checkpoint was not trained for env " + envs::EnvIdName(id));
  }
  const int act_dim = envs::ActionDim(id);
  if (ckpt.params.input_dim() != envs::ObservationDim(id, true)) {
    throw ConfigError("pilot checkpoint input dim does not match env");
  }
  if (ckpt.kind == "pilot") {
    if (ckpt.params.output_dim() != act_dim + 1 || ckpt.params.extra() != act_dim) {
      throw ConfigError("pilot checkpoint has wrong head dims");
    }
    return std::make_unique<ExpertPilot>(net::ActorCritic(ckpt.params, act_dim));
  }
  if (ckpt.kind == "bc") {
    if (ckpt.params.output_dim() != act_dim) {
      throw ConfigError("bc checkpoint has wrong output dim");
    }
    return std::make_unique<ImitationPilot>(ckpt.params);
  }
  throw ConfigError("checkpoint kind '" + ckpt.kind + "' is not a pilot");
}

std::unique_ptr<Pilot> LoadPilot(const std::string& path, envs::EnvId id) {
  net::Checkpoint ckpt;
  try {
    ckpt = net::LoadCheckpoint(path);
  } catch (const LoadError& e) {
    throw ConfigError(std::string("cannot load pilot: ") + e.what());
  }
  return PilotFromCheckpoint(ckpt, id);
}

PilotKind ParsePilotKind(const std::string& name) {
  if (name == "expert") return PilotKind::kExpert;
  if (name == "laggy") return PilotKind::kLaggy;
  if (name == "noisy") return PilotKind::kNoisy;
  if (name == "imitation") return PilotKind::kImitation;
  if (name == "mixture") return PilotKind::kMixture;
  if (name == "zero" || name == "none") return PilotKind::kZero;
  throw ConfigError("unknown pilot kind: " + name);
}

std::string PilotKindName(PilotKind kind) {
  switch (kind) {
    case PilotKind::kExpert:
      return "expert";
    case PilotKind::kLaggy:
      return "laggy";
    case PilotKind::kNoisy:
      return "noisy";
    case PilotKind::kImitation:
      return "imitation";
    case PilotKind::kMixture:
      return "mixture";
    case PilotKind::kZero:
      return "zero";
  }
  return "?";
}

std::unique_ptr<Pilot> MakePilot(const PilotSpec& spec, envs::EnvId id) {
  if (spec.kind == PilotKind::kZero) {
    return std::make_unique<ZeroPilot>(envs::ActionDim(id));
  }
  if (spec.checkpoints.empty()) {
    throw ConfigError("pilot '" + PilotKindName(spec.kind) + "' needs a checkpoint");
  }
  switch (spec.kind) {
    case PilotKind::kExpert:
    case PilotKind::kImitation:
      return LoadPilot(spec.checkpoints.front(), id);
    case PilotKind::kLaggy:
      return std::make_unique<LaggyPilot>(LoadPilot(spec.checkpoints.front(), id),
                                          spec.repeat_p, spec.seed);
    case PilotKind::kNoisy:
      return std::make_unique<NoisyPilot>(LoadPilot(spec.checkpoints.front(), id),
                                          spec.noise_p, spec.seed);
    case PilotKind::kMixture: {
      std::vector<std::unique_ptr<Pilot>> members;
      for (const auto& path : spec.checkpoints) members.push_back(LoadPilot(path, id));
      return std::make_unique<MixturePilot>(std::move(members), spec.switch_p,
                                            spec.seed);
    }
    case PilotKind::kZero:
      break;
  }
  throw ConfigError("unhandled pilot kind");
}

}  // namespace sa::pilots
