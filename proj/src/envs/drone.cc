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

#include "sa/envs/drone.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Geometry>

#include "sa/common/errors.h"
#include "sa/envs/rewards.h"

namespace sa::envs {
namespace {

bool Finite(const DroneState& s) {
  return s.p.allFinite() && s.rpy.allFinite() && s.v.allFinite() &&
         s.w.allFinite() && s.goal.allFinite();
}

Eigen::Vector3d BoxCenter(const EnvConfig& cfg) {
  return {0.0, 0.0, 0.5 * cfg.drone_box};
}

}  // namespace

Eigen::Matrix3d RotationFromRpy(const Eigen::Vector3d& rpy) {
  return (Eigen::AngleAxisd(rpy.z(), Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(rpy.y(), Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(rpy.x(), Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

Eigen::Vector3d RpyFromRotation(const Eigen::Matrix3d& r) {
  const double roll = std::atan2(r(2, 1), r(2, 2));
  const double pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  const double yaw = std::atan2(r(1, 0), r(0, 0));
  return {WrapAngle(roll), WrapAngle(pitch), WrapAngle(yaw)};
}

DroneState DroneReset(const EnvConfig& cfg, Rng& rng) {
  DroneState s;
  s.p = BoxCenter(cfg);
  s.rpy.setZero();
  for (int i = 0; i < 3; ++i) {
    s.v[i] = rng.Uniform(-cfg.drone_spawn_speed, cfg.drone_spawn_speed);
  }
  s.w.setZero();
  const double half = 0.5 * cfg.drone_box;
  // Goals stay one unit inside the walls and above the floor.
  do {
    s.goal.x() = rng.Uniform(-half + 1.0, half - 1.0);
    s.goal.y() = rng.Uniform(-half + 1.0, half - 1.0);
    s.goal.z() = rng.Uniform(1.0, cfg.drone_box - 1.0);
  } while ((s.goal - s.p).norm() < 2.0 * cfg.drone_target_radius);
  s.t = 0;
  return s;
}

StepResult DroneStep(DroneState& s, const Action& a_in, const EnvConfig& cfg,
                     Rng& rng) {
  if (a_in.size() != 4) throw ShapeError("drone action must have dim 4");
  if (!a_in.allFinite()) throw SimulationFault("non-finite drone action");
  if (!Finite(s)) throw SimulationFault("non-finite drone state");
  const Action a = ClampAction(a_in);
  const DroneState prev = s;

  Eigen::Vector3d force_noise;
  Eigen::Vector3d torque_noise;
  for (int i = 0; i < 3; ++i) {
    force_noise[i] = rng.Uniform(-cfg.drone_force_noise, cfg.drone_force_noise);
  }
  for (int i = 0; i < 3; ++i) {
    torque_noise[i] =
        rng.Uniform(-cfg.drone_torque_noise, cfg.drone_torque_noise);
  }

  const Eigen::Matrix3d rot = RotationFromRpy(s.rpy);
  const double thrust = cfg.drone_gravity + cfg.drone_thrust_gain * a[0];
  Eigen::Vector3d acc = rot * Eigen::Vector3d(0.0, 0.0, thrust);
  acc.z() -= cfg.drone_gravity;
  acc += force_noise;
  const Eigen::Vector3d alpha =
      cfg.drone_torque_gain * a.segment<3>(1) + torque_noise;

  s.v += acc * cfg.dt;
  s.p += s.v * cfg.dt;
  s.w += alpha * cfg.dt;
  const Eigen::Vector3d step = s.w * cfg.dt;
  const double angle = step.norm();
  Eigen::Matrix3d next_rot = rot;
  if (angle > 0.0) {
    next_rot = rot * Eigen::AngleAxisd(angle, step / angle).toRotationMatrix();
  }
  s.rpy = RpyFromRotation(next_rot);
  s.t += 1;

  StepResult res;
  const double half = 0.5 * cfg.drone_box;
  if (s.p.z() <= 0.0) {
    res.outcome = Outcome::kCrash;
  } else if (std::abs(s.p.x()) > half || std::abs(s.p.y()) > half ||
             s.p.z() > cfg.drone_box) {
    res.outcome = Outcome::kOutOfBounds;
  } else if ((s.p - s.goal).norm() <= cfg.drone_target_radius) {
    res.outcome = Outcome::kSuccess;
  } else if (s.t >= cfg.timeout_steps) {
    res.outcome = Outcome::kTimeout;
    res.truncated = true;
  }
  res.done = res.outcome != Outcome::kNone;
  res.r_general = RGeneral(s, a, res.outcome, cfg);
  res.r_goal = RGoal(prev, s, res.outcome, cfg);
  res.next_obs = DroneObserve(s, cfg);
  return res;
}

Observation DroneObserve(const DroneState& s, const EnvConfig& cfg) {
  const Eigen::Vector3d c = BoxCenter(cfg);
  const double scale = 0.5 * cfg.drone_box;
  Observation o(15);
  o.segment<3>(0) = (s.p - c) / scale;
  o.segment<3>(3) = s.rpy;
  o.segment<3>(6) = s.v / 2.0;
  o.segment<3>(9) = s.w / 2.0;
  o.segment<3>(12) = (s.goal - c) / scale;
  return o;
}

}  // namespace sa::envs
