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

#ifndef SA_ENVS_REWARDS_H_
#define SA_ENVS_REWARDS_H_

#include "sa/envs/types.h"

namespace sa::envs {

// Goal-agnostic reward. Reads nothing but motion, attitude, the action and
// the outcome, so it cannot depend on the goal:
//   -crash_penalty on crash or out-of-bounds
//   -fuel_cost * thrust usage
//   -speed_cost * |v| - tilt_cost * |tilt|
double RGeneral(const LanderState& next, const Action& a, Outcome outcome,
                const EnvConfig& cfg);
double RGeneral(const DroneState& next, const Action& a, Outcome outcome,
                const EnvConfig& cfg);

// Goal reward used only for training surrogate pilots: success bonus plus
// the potential difference Phi(next) - Phi(prev), Phi = -goal_potential *
// distance to goal.
double RGoal(const LanderState& prev, const LanderState& next, Outcome outcome,
             EnvId id, const EnvConfig& cfg);
double RGoal(const DroneState& prev, const DroneState& next, Outcome outcome,
             const EnvConfig& cfg);

// Distance-to-goal potential.
double GoalPotential(const LanderState& s, EnvId id, const EnvConfig& cfg);
double GoalPotential(const DroneState& s, const EnvConfig& cfg);

// Thrust usage charged by the fuel term.
double FuelUsage(const Action& a, EnvId id);

}  // namespace sa::envs

#endif  // SA_ENVS_REWARDS_H_
