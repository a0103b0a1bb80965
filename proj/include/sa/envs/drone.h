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

#ifndef SA_ENVS_DRONE_H_
#define SA_ENVS_DRONE_H_

#include "sa/common/rng.h"
#include "sa/envs/types.h"

namespace sa::envs {

// Mass-normalized quadrotor in a drone_box cube: x, y in [-box/2, box/2],
// z in [0, box]. Collective thrust (drone_gravity + drone_thrust_gain * a0)
// acts along body z; body angular acceleration is drone_torque_gain *
// (a1, a2, a3). Inertia is isotropic, so there is no gyroscopic term.
// Attitude is propagated on SO(3) with the exact exponential of the body
// rate and reported as roll/pitch/yaw (ZYX).
//
// Every step draws exactly six uniforms from `rng`, force xyz then torque
// xyz, even when the disturbance bounds are zero.

// Draws three uniforms for the velocity and three per goal attempt; goals
// closer than 2 * target radius to the spawn point are redrawn.
DroneState DroneReset(const EnvConfig& cfg, Rng& rng);

StepResult DroneStep(DroneState& state, const Action& a, const EnvConfig& cfg,
                     Rng& rng);

Observation DroneObserve(const DroneState& s, const EnvConfig& cfg);

Eigen::Matrix3d RotationFromRpy(const Eigen::Vector3d& rpy);
Eigen::Vector3d RpyFromRotation(const Eigen::Matrix3d& r);

}  // namespace sa::envs

#endif  // SA_ENVS_DRONE_H_
