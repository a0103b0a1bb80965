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

#include "sa/envs/lander.h"

#include <algorithm>
#include <cmath>

#include "sa/common/errors.h"
#include "sa/envs/rewards.h"

namespace sa::envs {
namespace {

bool Finite(const LanderState& s) {
  return std::isfinite(s.x) && std::isfinite(s.y) && std::isfinite(s.vx) &&
         std::isfinite(s.vy) && std::isfinite(s.theta) &&
         std::isfinite(s.omega) && std::isfinite(s.goal_x) &&
         std::isfinite(s.goal_y) && std::isfinite(s.idle_time);
}

Eigen::Vector2d BodyToWorld(double theta, double bx, double by) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c * bx - s * by, s * bx + c * by};
}

}  // namespace

LanderState LanderReset(EnvId id, const EnvConfig& cfg, Rng& rng) {
  LanderState s;
  s.x = cfg.spawn_x;
  s.y = cfg.spawn_y;
  s.vx = rng.Uniform(-cfg.spawn_vx_range, cfg.spawn_vx_range);
  s.vy = rng.Uniform(cfg.spawn_vy_min, 0.0);
  s.theta = 0.0;
  s.omega = 0.0;
  s.goal_x = rng.Uniform(-cfg.goal_x_range, cfg.goal_x_range);
  const double gy = rng.Uniform(cfg.reacher_goal_y_min, cfg.reacher_goal_y_max);
  s.goal_y = id == EnvId::kLanderReacher ? gy : 0.0;
  s.t = 0;
  const double foot_y = s.y + cfg.leg_offset_y;
  s.leg_left = foot_y <= 0.0;
  s.leg_right = foot_y <= 0.0;
  return s;
}

Eigen::Vector2d LegPosition(const LanderState& s, int side,
                            const EnvConfig& cfg) {
  const Eigen::Vector2d r =
      BodyToWorld(s.theta, side * cfg.leg_offset_x, cfg.leg_offset_y);
  return {s.x + r.x(), s.y + r.y()};
}

bool LanderOnPad(const LanderState& s, const EnvConfig& cfg) {
  const double lo = s.goal_x - cfg.pad_half_width;
  const double hi = s.goal_x + cfg.pad_half_width;
  const double xl = LegPosition(s, -1, cfg).x();
  const double xr = LegPosition(s, +1, cfg).x();
  return s.leg_left && s.leg_right && xl >= lo && xl <= hi && xr >= lo &&
         xr <= hi;
}

StepResult LanderStep(LanderState& s, const Action& a_in, const EnvConfig& cfg,
                      EnvId id) {
  if (a_in.size() != 2) throw ShapeError("lander action must have dim 2");
  if (!a_in.allFinite()) throw SimulationFault("non-finite lander action");
  if (!Finite(s)) throw SimulationFault("non-finite lander state");
  const Action a = ClampAction(a_in);
  const LanderState prev = s;

  const double main = std::max(a[0], 0.0) * cfg.lander_main_accel;
  const double sn = std::sin(s.theta);
  const double cs = std::cos(s.theta);
  double ax = -sn * main;
  double ay = cs * main - cfg.lander_gravity;
  double alpha = a[1] * cfg.lander_rot_accel;

  // Foot contacts, evaluated on the pre-step state.
  for (int side : {-1, +1}) {
    const Eigen::Vector2d r =
        BodyToWorld(s.theta, side * cfg.leg_offset_x, cfg.leg_offset_y);
    const double foot_y = s.y + r.y();
    const double pen = -foot_y;
    if (pen <= 0.0) continue;
    const double foot_vx = s.vx - s.omega * r.y();
    const double foot_vy = s.vy + s.omega * r.x();
    const double fn =
        std::max(0.0, cfg.contact_stiffness * pen - cfg.contact_damping * foot_vy);
    const double limit = cfg.contact_friction_coeff * fn;
    const double ft =
        std::clamp(-cfg.contact_friction_damping * foot_vx, -limit, limit);
    ax += ft;
    ay += fn;
    alpha += (r.x() * fn - r.y() * ft) / cfg.lander_inertia;
  }

  s.vx += ax * cfg.dt;
  s.vy += ay * cfg.dt;
  s.omega += alpha * cfg.dt;
  s.x += s.vx * cfg.dt;
  s.y += s.vy * cfg.dt;
  s.theta = WrapAngle(s.theta + s.omega * cfg.dt);
  s.t += 1;
  s.leg_left = LegPosition(s, -1, cfg).y() <= 0.0;
  s.leg_right = LegPosition(s, +1, cfg).y() <= 0.0;

  StepResult res;
  const double speed = std::hypot(s.vx, s.vy);
  const bool any_leg = s.leg_left || s.leg_right;
  const bool both_legs = s.leg_left && s.leg_right;
  const bool hull_contact = s.y - cfg.hull_radius <= 0.0;

  if (both_legs && speed < cfg.idle_speed) {
    s.idle_time += cfg.dt;
  } else {
    s.idle_time = 0.0;
  }
  const bool idle = s.idle_time >= cfg.idle_duration - 1e-9;

  if (hull_contact || (any_leg && (speed > cfg.crash_speed ||
                                   std::abs(s.theta) > cfg.crash_tilt))) {
    res.outcome = Outcome::kCrash;
  } else if (std::abs(s.x) > cfg.world_half_width || s.y > cfg.world_height) {
    res.outcome = Outcome::kOutOfBounds;
  } else if (id == EnvId::kLanderReacher &&
             std::hypot(s.x - s.goal_x, s.y - s.goal_y) <=
                 cfg.lander_target_radius) {
    res.outcome = Outcome::kSuccess;
  } else if (idle) {
    const bool safe = std::abs(s.theta) <= cfg.safe_tilt &&
                      std::abs(s.vx) <= cfg.safe_speed &&
                      std::abs(s.vy) <= cfg.safe_speed;
    res.outcome = id == EnvId::kLander && safe && LanderOnPad(s, cfg)
                      ? Outcome::kSuccess
                      : Outcome::kTimeout;
  } else if (s.t >= cfg.timeout_steps) {
    res.outcome = Outcome::kTimeout;
    res.truncated = true;
  }
  res.done = res.outcome != Outcome::kNone;
  res.r_general = RGeneral(s, a, res.outcome, cfg);
  res.r_goal = RGoal(prev, s, res.outcome, id, cfg);
  res.next_obs = LanderObserve(s, id, false);
  return res;
}

Observation LanderObserve(const LanderState& s, EnvId id, bool for_pilot) {
  Observation o(ObservationDim(id, for_pilot));
  o[0] = s.x / 10.0;
  o[1] = s.y / 10.0;
  o[2] = s.vx / 2.0;
  o[3] = s.vy / 2.0;
  o[4] = s.theta;
  o[5] = s.omega;
  o[6] = s.leg_left ? 1.0 : 0.0;
  o[7] = s.leg_right ? 1.0 : 0.0;
  if (for_pilot) {
    o[8] = (s.goal_x - s.x) / 10.0;
    if (id == EnvId::kLanderReacher) o[9] = (s.goal_y - s.y) / 10.0;
  }
  return o;
}

}  // namespace sa::envs
