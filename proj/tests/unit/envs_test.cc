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

#include <gtest/gtest.h>

#include <cmath>

#include "sa/common/errors.h"
#include "sa/common/rng.h"
#include "sa/envs/env.h"
#include "sa/envs/rewards.h"

namespace sa::envs {
namespace {

constexpr EnvId kAllEnvs[] = {EnvId::kLander, EnvId::kLanderReacher, EnvId::kDrone};

Action RandomAction(int dim, Rng& rng) {
  Action a(dim);
  for (int i = 0; i < dim; ++i) a[i] = rng.Uniform(-1.2, 1.2);
  return a;
}

TEST(EnvTypesTest, NamesRoundTrip) {
  for (EnvId id : kAllEnvs) EXPECT_EQ(ParseEnvId(EnvIdName(id)), id);
  EXPECT_THROW(ParseEnvId("moon"), ConfigError);
  for (Outcome o : {Outcome::kNone, Outcome::kSuccess, Outcome::kCrash,
                    Outcome::kOutOfBounds, Outcome::kTimeout}) {
    EXPECT_EQ(ParseOutcome(OutcomeName(o)), o);
  }
}

TEST(EnvTypesTest, ObservationDims) {
  EXPECT_EQ(Env(EnvId::kLander).Reset(1).size(), 8);
  EXPECT_EQ(Env(EnvId::kLander).Observe(true).size(), 9);
  EXPECT_EQ(Env(EnvId::kLanderReacher).Observe(true).size(), 10);
  EXPECT_EQ(Env(EnvId::kDrone).Observe(false).size(), 15);
  EXPECT_EQ(Env(EnvId::kDrone).Observe(true).size(), 15);
  EXPECT_EQ(Env(EnvId::kLander).action_dim(), 2);
  EXPECT_EQ(Env(EnvId::kDrone).action_dim(), 4);
}

TEST(EnvTypesTest, ClampAction) {
  Action a(3);
  a << -3.0, 0.25, 7.0;
  const Action c = ClampAction(a);
  EXPECT_EQ(c[0], -1.0);
  EXPECT_EQ(c[1], 0.25);
  EXPECT_EQ(c[2], 1.0);
}

TEST(EnvTypesTest, WrapAngleRange) {
  for (double a = -20.0; a < 20.0; a += 0.37) {
    const double w = WrapAngle(a);
    EXPECT_GT(w, -M_PI - 1e-12);
    EXPECT_LE(w, M_PI + 1e-12);
    EXPECT_NEAR(std::remainder(a - w, 2 * M_PI), 0.0, 1e-9);
  }
}

TEST(EnvConfigTest, RoundTripAndUnknownKeys) {
  EnvConfig c;
  c.lander_gravity = 1.5;
  c.timeout_steps = 77;
  const EnvConfig back = EnvConfig::FromConfig(c.ToConfig());
  EXPECT_EQ(back.lander_gravity, 1.5);
  EXPECT_EQ(back.timeout_steps, 77);
  Config bad;
  bad.Set("gravityy", "1");
  EXPECT_THROW(EnvConfig::FromConfig(bad), ConfigError);
  EnvConfig neg;
  neg.dt = -1.0;
  EXPECT_THROW(neg.Validate(), ConfigError);
}

// Semi-implicit Euler with constant acceleration has the closed form
// v_n = v_0 + n a dt and p_n = p_0 + n dt v_0 + a dt^2 n (n + 1) / 2.
TEST(LanderPhysicsTest, FreeFallMatchesDiscreteClosedForm) {
  const EnvConfig cfg;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    Env env(EnvId::kLander, cfg);
    env.Reset(seed);
    const LanderState s0 = std::get<LanderState>(env.state());
    const double g = cfg.lander_gravity;
    const double dt = cfg.dt;
    for (int n = 1; n <= 50; ++n) {
      const StepResult r = env.Step(Action::Zero(2));
      ASSERT_FALSE(r.done);
      const LanderState& s = std::get<LanderState>(env.state());
      const double vy = s0.vy - n * g * dt;
      const double y = s0.y + n * dt * s0.vy - g * dt * dt * n * (n + 1) / 2.0;
      const double x = s0.x + n * dt * s0.vx;
      EXPECT_NEAR(s.vy, vy, 1e-9);
      EXPECT_NEAR(s.y, y, 1e-9);
      EXPECT_NEAR(s.x, x, 1e-9);
      EXPECT_NEAR(s.vx, s0.vx, 1e-9);
      EXPECT_EQ(s.theta, 0.0);
      EXPECT_EQ(s.omega, 0.0);
    }
  }
}

TEST(LanderPhysicsTest, HoverThrustHoldsVerticalVelocity) {
  const EnvConfig cfg;
  LanderState s;
  s.x = 1.0;
  s.y = 8.0;
  s.vx = 0.3;
  s.vy = -0.2;
  Action a(2);
  a << cfg.lander_gravity / cfg.lander_main_accel, 0.0;
  for (int n = 1; n <= 50; ++n) {
    LanderStep(s, a, cfg, EnvId::kLander);
    EXPECT_NEAR(s.vy, -0.2, 1e-9);
    EXPECT_NEAR(s.y, 8.0 - 0.2 * n * cfg.dt, 1e-9);
    EXPECT_NEAR(s.x, 1.0 + 0.3 * n * cfg.dt, 1e-9);
  }
}

TEST(LanderPhysicsTest, ConstantTorqueSpinUp) {
  const EnvConfig cfg;
  LanderState s;
  s.y = 8.0;
  Action a(2);
  a << 0.0, 0.5;
  const double alpha = 0.5 * cfg.lander_rot_accel;
  for (int n = 1; n <= 20; ++n) {
    LanderStep(s, a, cfg, EnvId::kLander);
    EXPECT_NEAR(s.omega, n * alpha * cfg.dt, 1e-12);
    EXPECT_NEAR(s.theta, alpha * cfg.dt * cfg.dt * n * (n + 1) / 2.0, 1e-12);
  }
}

TEST(LanderPhysicsTest, NonFiniteInputFaults) {
  LanderState s;
  s.y = 5.0;
  Action a(2);
  a << std::nan(""), 0.0;
  EXPECT_THROW(LanderStep(s, a, EnvConfig{}, EnvId::kLander), SimulationFault);
  Env env(EnvId::kLander);
  EXPECT_THROW(env.Step(Action::Zero(3)), ShapeError);
}

TEST(LanderOutcomeTest, FastTouchdownCrashes) {
  const EnvConfig cfg;
  LanderState s;
  s.y = 0.52;
  s.vy = -3.0;
  const StepResult r = LanderStep(s, Action::Zero(2), cfg, EnvId::kLander);
  EXPECT_TRUE(r.done);
  EXPECT_EQ(r.outcome, Outcome::kCrash);
  EXPECT_LE(r.r_general, -cfg.crash_penalty);
}

TEST(LanderOutcomeTest, LeavingTheWorldIsOutOfBounds) {
  const EnvConfig cfg;
  LanderState s;
  s.x = cfg.world_half_width - 0.01;
  s.y = 5.0;
  s.vx = 5.0;
  const StepResult r = LanderStep(s, Action::Zero(2), cfg, EnvId::kLander);
  EXPECT_EQ(r.outcome, Outcome::kOutOfBounds);
}

// Rest the lander upright on the pad and let the contact settle.
TEST(LanderOutcomeTest, RestingOnPadSucceeds) {
  const EnvConfig cfg;
  LanderState s;
  s.goal_x = 2.0;
  s.x = 2.0;
  s.y = -cfg.leg_offset_y - 0.001;
  Outcome last = Outcome::kNone;
  double reward_sum = 0.0;
  for (int i = 0; i < 200 && last == Outcome::kNone; ++i) {
    const StepResult r = LanderStep(s, Action::Zero(2), cfg, EnvId::kLander);
    last = r.outcome;
    reward_sum += r.r_goal;
  }
  EXPECT_EQ(last, Outcome::kSuccess);
  EXPECT_GE(reward_sum, cfg.success_bonus - 1.0);
}

TEST(LanderOutcomeTest, RestingOffPadEndsAsUntruncatedTimeout) {
  const EnvConfig cfg;
  LanderState s;
  s.goal_x = 5.0;
  s.x = -2.0;
  s.y = -cfg.leg_offset_y - 0.001;
  StepResult r;
  for (int i = 0; i < 200 && !r.done; ++i) r = LanderStep(s, Action::Zero(2), cfg, EnvId::kLander);
  EXPECT_EQ(r.outcome, Outcome::kTimeout);
  EXPECT_FALSE(r.truncated);
}

TEST(LanderOutcomeTest, ReacherSucceedsInsideTargetRadius) {
  const EnvConfig cfg;
  LanderState s;
  s.x = 1.0;
  s.y = 6.0;
  s.goal_x = 1.0;
  s.goal_y = 6.5;
  const StepResult r = LanderStep(s, Action::Zero(2), cfg, EnvId::kLanderReacher);
  EXPECT_EQ(r.outcome, Outcome::kSuccess);
}

TEST(LanderOutcomeTest, TimeoutIsTruncated) {
  EnvConfig cfg;
  cfg.timeout_steps = 5;
  LanderState s;
  s.y = 8.0;
  Action hover(2);
  hover << cfg.lander_gravity / cfg.lander_main_accel, 0.0;
  StepResult r;
  for (int i = 0; i < 5; ++i) r = LanderStep(s, hover, cfg, EnvId::kLander);
  EXPECT_EQ(r.outcome, Outcome::kTimeout);
  EXPECT_TRUE(r.truncated);
}

TEST(RewardTest, GeneralRewardIgnoresTheGoal) {
  const EnvConfig cfg;
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    LanderState a;
    a.x = rng.Uniform(-5, 5);
    a.y = rng.Uniform(1, 10);
    a.vx = rng.Uniform(-2, 2);
    a.vy = rng.Uniform(-2, 2);
    a.theta = rng.Uniform(-1, 1);
    LanderState b = a;
    b.goal_x = rng.Uniform(-6, 6);
    b.goal_y = rng.Uniform(3, 12);
    const Action act = RandomAction(2, rng);
    EXPECT_EQ(RGeneral(a, act, Outcome::kNone, cfg), RGeneral(b, act, Outcome::kNone, cfg));
    DroneState da;
    da.p = Eigen::Vector3d(rng.Uniform(-4, 4), rng.Uniform(-4, 4), rng.Uniform(1, 9));
    da.v = Eigen::Vector3d::Random();
    da.rpy = Eigen::Vector3d(0.1, -0.2, 0.3);
    DroneState db = da;
    db.goal = Eigen::Vector3d(1, 2, 3);
    const Action d4 = RandomAction(4, rng);
    EXPECT_EQ(RGeneral(da, d4, Outcome::kNone, cfg), RGeneral(db, d4, Outcome::kNone, cfg));
  }
}

TEST(RewardTest, GeneralRewardTerms) {
  const EnvConfig cfg;
  LanderState s;
  s.vx = 3.0;
  s.vy = 4.0;
  s.theta = -0.5;
  Action a(2);
  a << 0.5, -0.25;
  // fuel = max(a0, 0) + |a1|
  const double expected = -cfg.fuel_cost * 0.75 - cfg.speed_cost * 5.0 - cfg.tilt_cost * 0.5;
  EXPECT_NEAR(RGeneral(s, a, Outcome::kNone, cfg), expected, 1e-15);
  EXPECT_NEAR(RGeneral(s, a, Outcome::kCrash, cfg), expected - cfg.crash_penalty, 1e-12);
  EXPECT_NEAR(RGeneral(s, a, Outcome::kOutOfBounds, cfg), expected - cfg.crash_penalty, 1e-12);
  EXPECT_NEAR(RGeneral(s, a, Outcome::kSuccess, cfg), expected, 1e-15);
  a << -1.0, 0.0;
  EXPECT_EQ(FuelUsage(a, EnvId::kLander), 0.0);
}

TEST(RewardTest, ShapingIsAPotentialDifference) {
  const EnvConfig cfg;
  LanderState goal;
  goal.goal_x = 1.0;
  goal.x = 1.0;
  goal.y = -cfg.leg_offset_y;
  // At the goal with no motion the shaping term vanishes.
  EXPECT_EQ(RGoal(goal, goal, Outcome::kNone, EnvId::kLander, cfg), 0.0);
  // Equidistant states have equal potential.
  LanderState l = goal;
  LanderState r = goal;
  l.x = 1.0 - 2.0;
  r.x = 1.0 + 2.0;
  EXPECT_EQ(GoalPotential(l, EnvId::kLander, cfg), GoalPotential(r, EnvId::kLander, cfg));
  // Telescoping: the sum over a path equals Phi(end) - Phi(start).
  LanderState a = l;
  LanderState b = l;
  b.x = 0.5;
  LanderState c = b;
  c.y = 3.0;
  const double path = RGoal(a, b, Outcome::kNone, EnvId::kLander, cfg) +
                      RGoal(b, c, Outcome::kNone, EnvId::kLander, cfg);
  EXPECT_NEAR(path, GoalPotential(c, EnvId::kLander, cfg) - GoalPotential(a, EnvId::kLander, cfg),
              1e-12);
  EXPECT_NEAR(RGoal(goal, goal, Outcome::kSuccess, EnvId::kLander, cfg), cfg.success_bonus, 0.0);
}

TEST(DronePhysicsTest, HoverWithoutNoiseKeepsVelocity) {
  EnvConfig cfg;
  cfg.drone_force_noise = 0.0;
  cfg.drone_torque_noise = 0.0;
  DroneState s;
  s.p = Eigen::Vector3d(0.0, 0.0, 5.0);
  s.v = Eigen::Vector3d(0.1, -0.2, 0.05);
  s.goal = Eigen::Vector3d(3.0, 3.0, 8.0);
  Rng rng(1);
  for (int n = 1; n <= 50; ++n) {
    DroneStep(s, Action::Zero(4), cfg, rng);
    EXPECT_NEAR((s.v - Eigen::Vector3d(0.1, -0.2, 0.05)).norm(), 0.0, 1e-9);
    EXPECT_NEAR((s.p - Eigen::Vector3d(0.1 * n * cfg.dt, -0.2 * n * cfg.dt,
                                       5.0 + 0.05 * n * cfg.dt))
                    .norm(),
                0.0, 1e-9);
  }
  // Six uniforms per step, drawn even with zero noise bounds.
  EXPECT_EQ(rng.counter(), 50u * 6u);
}

TEST(DronePhysicsTest, FreeFallWithZeroThrust) {
  EnvConfig cfg;
  cfg.drone_force_noise = 0.0;
  cfg.drone_torque_noise = 0.0;
  cfg.drone_gravity = cfg.drone_thrust_gain;  // a0 = -1 cancels the thrust
  DroneState s;
  s.p = Eigen::Vector3d(0.0, 0.0, 9.0);
  s.goal = Eigen::Vector3d(3.0, 3.0, 2.0);
  Action a = Action::Zero(4);
  a[0] = -1.0;
  Rng rng(2);
  const double g = cfg.drone_gravity;
  for (int n = 1; n <= 50; ++n) {
    DroneStep(s, a, cfg, rng);
    EXPECT_NEAR(s.v.z(), -n * g * cfg.dt, 1e-9);
    EXPECT_NEAR(s.p.z(), 9.0 - g * cfg.dt * cfg.dt * n * (n + 1) / 2.0, 1e-9);
  }
}

TEST(DronePhysicsTest, PureYawRateIntegratesExactly) {
  EnvConfig cfg;
  cfg.drone_force_noise = 0.0;
  cfg.drone_torque_noise = 0.0;
  DroneState s;
  s.p = Eigen::Vector3d(0.0, 0.0, 5.0);
  s.w = Eigen::Vector3d(0.0, 0.0, 0.7);
  s.goal = Eigen::Vector3d(3.0, 3.0, 8.0);
  Rng rng(3);
  for (int n = 1; n <= 50; ++n) {
    DroneStep(s, Action::Zero(4), cfg, rng);
    EXPECT_NEAR(s.rpy.z(), WrapAngle(0.7 * n * cfg.dt), 1e-9);
    EXPECT_NEAR(s.rpy.x(), 0.0, 1e-12);
    EXPECT_NEAR(s.rpy.y(), 0.0, 1e-12);
  }
}

TEST(DronePhysicsTest, RpyRoundTrip) {
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const Eigen::Vector3d rpy(rng.Uniform(-3, 3), rng.Uniform(-1.5, 1.5), rng.Uniform(-3, 3));
    EXPECT_NEAR((RpyFromRotation(RotationFromRpy(rpy)) - rpy).norm(), 0.0, 1e-9);
  }
}

TEST(DroneOutcomeTest, FloorCrashAndGoalSuccess) {
  EnvConfig cfg;
  cfg.drone_force_noise = 0.0;
  cfg.drone_torque_noise = 0.0;
  Rng rng(5);
  DroneState s;
  s.p = Eigen::Vector3d(0.0, 0.0, 0.001);
  s.v = Eigen::Vector3d(0.0, 0.0, -1.0);
  s.goal = Eigen::Vector3d(3.0, 3.0, 5.0);
  EXPECT_EQ(DroneStep(s, Action::Zero(4), cfg, rng).outcome, Outcome::kCrash);
  DroneState t;
  t.p = Eigen::Vector3d(1.0, 1.0, 5.0);
  t.goal = Eigen::Vector3d(1.0, 1.0, 5.2);
  EXPECT_EQ(DroneStep(t, Action::Zero(4), cfg, rng).outcome, Outcome::kSuccess);
}

TEST(DroneResetTest, GoalAwayFromSpawn) {
  Env env(EnvId::kDrone);
  for (uint64_t seed = 0; seed < 500; ++seed) {
    env.Reset(seed);
    const auto& s = std::get<DroneState>(env.state());
    EXPECT_GE((s.goal - s.p).norm(), 2.0 * env.config().drone_target_radius);
  }
}

// 100 seeded episodes per env, each played twice with the same seeded random
// actions: trajectories, rewards and outcomes must match bit for bit.
TEST(DeterminismTest, HundredEpisodesPerEnvReplayBitIdentically) {
  for (EnvId id : kAllEnvs) {
    int counts[5] = {0, 0, 0, 0, 0};
    for (uint64_t ep = 0; ep < 100; ++ep) {
      std::vector<std::vector<double>> trace[2];
      std::vector<double> rewards[2];
      Outcome outcome[2];
      for (int run = 0; run < 2; ++run) {
        Env env(id);
        env.Reset(DeriveSeed(123, ep));
        Rng act_rng(DeriveSeed(456, ep));
        StepResult r;
        do {
          r = env.Step(RandomAction(env.action_dim(), act_rng) * 0.8);
          trace[run].push_back(env.StateVector());
          rewards[run].push_back(r.r_general);
          rewards[run].push_back(r.r_goal);
        } while (!r.done);
        outcome[run] = r.outcome;
      }
      ASSERT_EQ(trace[0], trace[1]) << EnvIdName(id) << " episode " << ep;
      ASSERT_EQ(rewards[0], rewards[1]);
      ASSERT_EQ(outcome[0], outcome[1]);
      ASSERT_NE(outcome[0], Outcome::kNone);
      ++counts[static_cast<int>(outcome[0])];
    }
    // Outcome partition: every finished episode has exactly one outcome.
    EXPECT_EQ(counts[1] + counts[2] + counts[3] + counts[4], 100);
  }
}

TEST(DeterminismTest, SameSeedSameResetObservation) {
  for (EnvId id : kAllEnvs) {
    Env a(id);
    Env b(id);
    EXPECT_EQ(a.Reset(7), b.Reset(7));
    EXPECT_EQ(a.Observe(true), b.Observe(true));
    EXPECT_NE(a.Reset(8), b.Reset(7));
  }
}

TEST(ObservationTest, PilotViewAddsRelativeGoal) {
  Env env(EnvId::kLander);
  env.Reset(3);
  const auto& s = std::get<LanderState>(env.state());
  const Observation p = env.Observe(true);
  const Observation c = env.Observe(false);
  EXPECT_EQ(p.head(8), c);
  EXPECT_DOUBLE_EQ(p[8], (s.goal_x - s.x) / 10.0);
}

}  // namespace
}  // namespace sa::envs
