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

#ifndef SA_ENVS_LANDER_H_
#define SA_ENVS_LANDER_H_

#include "sa/common/rng.h"
#include "sa/envs/types.h"

namespace sa::envs {

// Planar lander over flat ground at y = 0.
//
// State is the hull center. Main engine accelerates along the body-up vector
// (-sin theta, cos theta) with magnitude lander_main_accel * max(a0, 0);
// the lateral thrusters give angular acceleration a1 * lander_rot_accel.
// Each leg foot is a spring-damper contact with viscous friction capped by a
// Coulomb limit. Integration is semi-implicit Euler.
//
// Terminal rules, checked in order after integration:
//   crash       hull touches ground, or a leg touches with speed above
//               crash_speed or |theta| above crash_tilt
//   out of bnds |x| > world_half_width or y > world_height
//   success     reacher: within lander_target_radius of the goal;
//               lander: both feet on the pad, |theta| <= safe_tilt,
//               |vx|,|vy| <= safe_speed, idle for idle_duration
//   landed      lander idle on the ground anywhere else: the episode ends
//               with outcome kTimeout and truncated = false
//   timeout     t reaches timeout_steps (truncated = true)

// Draws exactly four uniforms: vx, vy, goal_x, goal_y.
LanderState LanderReset(EnvId id, const EnvConfig& cfg, Rng& rng);

// Advances `state` one step in place. Throws SimulationFault on non-finite
// input. The returned next_obs is the copilot view.
StepResult LanderStep(LanderState& state, const Action& a, const EnvConfig& cfg,
                      EnvId id);

// World position of the left (side = -1) or right (side = +1) foot.
Eigen::Vector2d LegPosition(const LanderState& s, int side, const EnvConfig& cfg);

Observation LanderObserve(const LanderState& s, EnvId id, bool for_pilot);

bool LanderOnPad(const LanderState& s, const EnvConfig& cfg);

}  // namespace sa::envs

#endif  // SA_ENVS_LANDER_H_
