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

#ifndef SA_ENVS_ENV_H_
#define SA_ENVS_ENV_H_

#include <cstdint>
#include <variant>
#include <vector>

#include "sa/common/rng.h"
#include "sa/envs/drone.h"
#include "sa/envs/lander.h"
#include "sa/envs/types.h"

namespace sa::envs {

using EnvState = std::variant<LanderState, DroneState>;

// One seeded environment instance. Not shared between threads.
class Env {
 public:
  Env(EnvId id, EnvConfig cfg = {});

  // Resets from `seed`; the same seed gives a bit-identical state. Returns
  // the copilot view.
  Observation Reset(uint64_t seed);
  StepResult Step(const Action& a);

  Observation Observe(bool for_pilot) const;

  EnvId id() const { return id_; }
  const EnvConfig& config() const { return cfg_; }
  const EnvState& state() const { return state_; }
  int action_dim() const { return ActionDim(id_); }
  int observation_dim(bool for_pilot) const {
    return ObservationDim(id_, for_pilot);
  }
  int t() const;
  bool done() const { return done_; }

  // Flat dump of the full simulator state, for logs and replay checks.
  std::vector<double> StateVector() const;

 private:
  EnvId id_;
  EnvConfig cfg_;
  EnvState state_;
  Rng rng_;
  bool done_ = false;
};

Observation Observe(const EnvState& state, EnvId id, bool for_pilot,
                    const EnvConfig& cfg);

}  // namespace sa::envs

#endif  // SA_ENVS_ENV_H_
