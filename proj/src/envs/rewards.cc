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

#include "sa/envs/rewards.h"

#include <algorithm>
#include <cmath>

namespace sa::envs {
namespace {

double TerminalPenalty(Outcome outcome, const EnvConfig& cfg) {
  return (outcome == Outcome::kCrash || outcome == Outcome::kOutOfBounds)
             ? -cfg.crash_penalty
             : 0.0;
}

double SuccessBonus(Outcome outcome, const EnvConfig& cfg) {
  return outcome == Outcome::kSuccess ? cfg.success_bonus : 0.0;
}

}  // namespace

double FuelUsage(const Action& a, EnvId id) {
  if (id == EnvId::kDrone) return std::abs(std::clamp(a[0], -1.0, 1.0));
  return std::max(std::clamp(a[0], -1.0, 1.0), 0.0) +
         std::abs(std::clamp(a[1], -1.0, 1.0));
}

double RGeneral(const LanderState& next, const Action& a, Outcome outcome,
                const EnvConfig& cfg) {
  const double speed = std::hypot(next.vx, next.vy);
  return TerminalPenalty(outcome, cfg) -
         cfg.fuel_cost * FuelUsage(a, EnvId::kLander) -
         cfg.speed_cost * speed - cfg.tilt_cost * std::abs(next.theta);
}

double RGeneral(const DroneState& next, const Action& a, Outcome outcome,
                const EnvConfig& cfg) {
  const double tilt = std::hypot(next.rpy.x(), next.rpy.y());
  return TerminalPenalty(outcome, cfg) -
         cfg.fuel_cost * FuelUsage(a, EnvId::kDrone) -
         cfg.speed_cost * next.v.norm() - cfg.tilt_cost * tilt;
}

double GoalPotential(const LanderState& s, EnvId id, const EnvConfig& cfg) {
  // The pad target is the hull height of a lander resting upright.
  if (id == EnvId::kLanderReacher) {
    return -cfg.goal_potential * std::hypot(s.x - s.goal_x, s.y - s.goal_y);
  }
  const double legs = (s.leg_left ? 1.0 : 0.0) + (s.leg_right ? 1.0 : 0.0);
  return -cfg.goal_potential * std::hypot(s.x - s.goal_x, s.y + cfg.leg_offset_y) +
         cfg.leg_contact_potential * legs;
}

double GoalPotential(const DroneState& s, const EnvConfig& cfg) {
  return -cfg.goal_potential * (s.p - s.goal).norm();
}

double RGoal(const LanderState& prev, const LanderState& next, Outcome outcome,
             EnvId id, const EnvConfig& cfg) {
  return SuccessBonus(outcome, cfg) + GoalPotential(next, id, cfg) -
         GoalPotential(prev, id, cfg);
}

double RGoal(const DroneState& prev, const DroneState& next, Outcome outcome,
             const EnvConfig& cfg) {
  return SuccessBonus(outcome, cfg) + GoalPotential(next, cfg) -
         GoalPotential(prev, cfg);
}

}  // namespace sa::envs
