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

#include "sa/envs/types.h"

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "sa/common/errors.h"

namespace sa::envs {
namespace {

struct DoubleField {
  const char* name;
  double EnvConfig::*member;
};

const std::vector<DoubleField>& DoubleFields() {
  static const std::vector<DoubleField> fields = {
      {"dt", &EnvConfig::dt},
      {"lander_gravity", &EnvConfig::lander_gravity},
      {"lander_main_accel", &EnvConfig::lander_main_accel},
      {"lander_rot_accel", &EnvConfig::lander_rot_accel},
      {"lander_inertia", &EnvConfig::lander_inertia},
      {"leg_offset_x", &EnvConfig::leg_offset_x},
      {"leg_offset_y", &EnvConfig::leg_offset_y},
      {"hull_radius", &EnvConfig::hull_radius},
      {"contact_stiffness", &EnvConfig::contact_stiffness},
      {"contact_damping", &EnvConfig::contact_damping},
      {"contact_friction_damping", &EnvConfig::contact_friction_damping},
      {"contact_friction_coeff", &EnvConfig::contact_friction_coeff},
      {"world_half_width", &EnvConfig::world_half_width},
      {"world_height", &EnvConfig::world_height},
      {"spawn_x", &EnvConfig::spawn_x},
      {"spawn_y", &EnvConfig::spawn_y},
      {"spawn_vx_range", &EnvConfig::spawn_vx_range},
      {"spawn_vy_min", &EnvConfig::spawn_vy_min},
      {"goal_x_range", &EnvConfig::goal_x_range},
      {"reacher_goal_y_min", &EnvConfig::reacher_goal_y_min},
      {"reacher_goal_y_max", &EnvConfig::reacher_goal_y_max},
      {"pad_half_width", &EnvConfig::pad_half_width},
      {"lander_target_radius", &EnvConfig::lander_target_radius},
      {"safe_speed", &EnvConfig::safe_speed},
      {"safe_tilt", &EnvConfig::safe_tilt},
      {"crash_speed", &EnvConfig::crash_speed},
      {"crash_tilt", &EnvConfig::crash_tilt},
      {"idle_speed", &EnvConfig::idle_speed},
      {"idle_duration", &EnvConfig::idle_duration},
      {"drone_gravity", &EnvConfig::drone_gravity},
      {"drone_thrust_gain", &EnvConfig::drone_thrust_gain},
      {"drone_torque_gain", &EnvConfig::drone_torque_gain},
      {"drone_force_noise", &EnvConfig::drone_force_noise},
      {"drone_torque_noise", &EnvConfig::drone_torque_noise},
      {"drone_target_radius", &EnvConfig::drone_target_radius},
      {"drone_box", &EnvConfig::drone_box},
      {"drone_spawn_speed", &EnvConfig::drone_spawn_speed},
      {"crash_penalty", &EnvConfig::crash_penalty},
      {"success_bonus", &EnvConfig::success_bonus},
      {"fuel_cost", &EnvConfig::fuel_cost},
      {"speed_cost", &EnvConfig::speed_cost},
      {"tilt_cost", &EnvConfig::tilt_cost},
      {"goal_potential", &EnvConfig::goal_potential},
      {"leg_contact_potential", &EnvConfig::leg_contact_potential},
  };
  return fields;
}

}  // namespace

EnvId ParseEnvId(const std::string& name) {
  if (name == "lander") return EnvId::kLander;
  if (name == "lander_reacher") return EnvId::kLanderReacher;
  if (name == "drone") return EnvId::kDrone;
  throw ConfigError("unknown env id: " + name);
}

std::string EnvIdName(EnvId id) {
  switch (id) {
    case EnvId::kLander:
      return "lander";
    case EnvId::kLanderReacher:
      return "lander_reacher";
    case EnvId::kDrone:
      return "drone";
  }
  return "?";
}

std::string OutcomeName(Outcome o) {
  switch (o) {
    case Outcome::kNone:
      return "none";
    case Outcome::kSuccess:
      return "success";
    case Outcome::kCrash:
      return "crash";
    case Outcome::kOutOfBounds:
      return "out_of_bounds";
    case Outcome::kTimeout:
      return "timeout";
  }
  return "?";
}

Outcome ParseOutcome(const std::string& name) {
  if (name == "none") return Outcome::kNone;
  if (name == "success") return Outcome::kSuccess;
  if (name == "crash") return Outcome::kCrash;
  if (name == "out_of_bounds") return Outcome::kOutOfBounds;
  if (name == "timeout") return Outcome::kTimeout;
  throw InputError("unknown outcome: " + name);
}

int ActionDim(EnvId id) { return id == EnvId::kDrone ? 4 : 2; }

int ObservationDim(EnvId id, bool for_pilot) {
  switch (id) {
    case EnvId::kLander:
      return for_pilot ? 9 : 8;
    case EnvId::kLanderReacher:
      return for_pilot ? 10 : 8;
    case EnvId::kDrone:
      return 15;
  }
  return 0;
}

EnvConfig EnvConfig::FromConfig(const Config& section) {
  EnvConfig cfg;
  std::set<std::string> known = {"timeout_steps"};
  for (const auto& f : DoubleFields()) {
    known.insert(f.name);
    cfg.*(f.member) = section.GetDouble(f.name, cfg.*(f.member));
  }
  cfg.timeout_steps =
      static_cast<int>(section.GetInt("timeout_steps", cfg.timeout_steps));
  section.RequireKnown(known);
  cfg.Validate();
  return cfg;
}

Config EnvConfig::ToConfig() const {
  Config out;
  for (const auto& f : DoubleFields()) {
    out.Set(f.name, FormatDouble(this->*(f.member)));
  }
  out.Set("timeout_steps", std::to_string(timeout_steps));
  return out;
}

void EnvConfig::Validate() const {
  if (!(dt > 0.0)) throw ConfigError("env dt must be positive");
  if (timeout_steps <= 0) throw ConfigError("env timeout_steps must be positive");
  for (const auto& f : DoubleFields()) {
    if (!std::isfinite(this->*(f.member))) {
      throw ConfigError(std::string("env ") + f.name + " must be finite");
    }
  }
  if (!(lander_inertia > 0.0)) throw ConfigError("env lander_inertia must be positive");
}

Action ClampAction(const Action& a) { return a.cwiseMax(-1.0).cwiseMin(1.0); }

double WrapAngle(double a) {
  constexpr double kPi = std::numbers::pi;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  if (a > -kPi && a <= kPi) return a;
  double r = std::fmod(a + kPi, kTwoPi);
  if (r <= 0.0) r += kTwoPi;
  return r - kPi;
}

}  // namespace sa::envs
