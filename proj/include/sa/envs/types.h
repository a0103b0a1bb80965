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

#ifndef SA_ENVS_TYPES_H_
#define SA_ENVS_TYPES_H_

#include <array>
#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "sa/common/config.h"

namespace sa::envs {

using Observation = Eigen::VectorXd;
// Control vector with every component in [-1, 1] once clamped.
using Action = Eigen::VectorXd;

enum class EnvId { kLander, kLanderReacher, kDrone };

EnvId ParseEnvId(const std::string& name);
std::string EnvIdName(EnvId id);

enum class Outcome { kNone, kSuccess, kCrash, kOutOfBounds, kTimeout };

std::string OutcomeName(Outcome o);
Outcome ParseOutcome(const std::string& name);

int ActionDim(EnvId id);
int ObservationDim(EnvId id, bool for_pilot);

// Physical and reward constants. Every field can be overridden from a config
// file section [env] using the field name as key.
struct EnvConfig {
  double dt = 0.02;
  int timeout_steps = 1000;

  // Lander.
  double lander_gravity = 1.0;
  double lander_main_accel = 2.0;
  double lander_rot_accel = 4.0;
  double lander_inertia = 0.25;
  double leg_offset_x = 0.4;
  double leg_offset_y = -0.5;
  double hull_radius = 0.3;
  double contact_stiffness = 200.0;
  double contact_damping = 20.0;
  double contact_friction_damping = 20.0;
  double contact_friction_coeff = 1.0;
  double world_half_width = 10.0;
  double world_height = 15.0;
  double spawn_x = 0.0;
  double spawn_y = 10.0;
  double spawn_vx_range = 2.0;
  double spawn_vy_min = -2.0;
  double goal_x_range = 6.0;
  double reacher_goal_y_min = 3.0;
  double reacher_goal_y_max = 12.0;
  double pad_half_width = 1.0;
  double lander_target_radius = 1.0;
  double safe_speed = 0.3;
  double safe_tilt = 0.2;
  double crash_speed = 1.0;
  double crash_tilt = 0.6;
  double idle_speed = 0.05;
  double idle_duration = 0.5;

  // Drone.
  double drone_gravity = 9.81;
  double drone_thrust_gain = 2.0;
  double drone_torque_gain = 8.0;
  double drone_force_noise = 0.3;
  double drone_torque_noise = 0.5;
  double drone_target_radius = 0.5;
  double drone_box = 10.0;
  double drone_spawn_speed = 0.5;

  // Rewards.
  double crash_penalty = 100.0;
  double success_bonus = 100.0;
  double fuel_cost = 0.03;
  double speed_cost = 0.1;
  double tilt_cost = 0.1;
  double goal_potential = 20.0;
  double leg_contact_potential = 10.0;

  static EnvConfig FromConfig(const Config& section);
  Config ToConfig() const;
  void Validate() const;
};

struct LanderState {
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  double theta = 0.0;
  double omega = 0.0;
  bool leg_left = false;
  bool leg_right = false;
  double goal_x = 0.0;
  // Only used by the reacher variant; the landing pad sits on the ground.
  double goal_y = 0.0;
  double idle_time = 0.0;
  int t = 0;

  bool operator==(const LanderState&) const = default;
};

struct DroneState {
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  Eigen::Vector3d rpy = Eigen::Vector3d::Zero();
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  Eigen::Vector3d w = Eigen::Vector3d::Zero();
  Eigen::Vector3d goal = Eigen::Vector3d::Zero();
  int t = 0;

  bool operator==(const DroneState& o) const {
    return p == o.p && rpy == o.rpy && v == o.v && w == o.w && goal == o.goal &&
           t == o.t;
  }
};

struct StepResult {
  Observation next_obs;
  double r_general = 0.0;
  double r_goal = 0.0;
  bool done = false;
  Outcome outcome = Outcome::kNone;
  // Step-limit truncation; value bootstrapping continues through it.
  bool truncated = false;
};

// Clamps each component to [-1, 1].
Action ClampAction(const Action& a);

// Maps an angle to (-pi, pi].
double WrapAngle(double a);

}  // namespace sa::envs

#endif  // SA_ENVS_TYPES_H_
