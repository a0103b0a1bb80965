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

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "sa/common/errors.h"
#include "sa/common/rng.h"
#include "sa/envs/env.h"
#include "sa/eval/eval.h"
#include "sa/eval/grid.h"
#include "sa/eval/replay.h"
#include "sa/eval/stats.h"
#include "sa/pilots/demo_log.h"
#include "sa/pilots/pilot.h"

namespace sa::eval {
namespace {

TEST(StatsTest, IncompleteBetaAgainstBoost) {
  Rng rng(1);
  for (int i = 0; i < 500; ++i) {
    const double a = rng.Uniform(0.1, 50.0);
    const double b = rng.Uniform(0.1, 50.0);
    const double x = rng.Uniform();
    EXPECT_NEAR(RegularizedIncompleteBeta(a, b, x), boost::math::ibeta(a, b, x), 1e-10)
        << a << " " << b << " " << x;
  }
  EXPECT_EQ(RegularizedIncompleteBeta(2.0, 3.0, 0.0), 0.0);
  EXPECT_EQ(RegularizedIncompleteBeta(2.0, 3.0, 1.0), 1.0);
  // I_x(1, 1) = x and I_x(a, 1) = x^a.
  EXPECT_NEAR(RegularizedIncompleteBeta(1.0, 1.0, 0.37), 0.37, 1e-14);
  EXPECT_NEAR(RegularizedIncompleteBeta(3.0, 1.0, 0.5), 0.125, 1e-14);
}

TEST(StatsTest, StudentTCdfClosedForms) {
  for (double t = -20.0; t <= 20.0; t += 0.5) {
    // One dof is Cauchy; two dof has an algebraic closed form.
    EXPECT_NEAR(StudentTCdf(t, 1.0), 0.5 + std::atan(t) / std::numbers::pi, 1e-12);
    EXPECT_NEAR(StudentTCdf(t, 2.0), 0.5 + t / (2.0 * std::sqrt(2.0 + t * t)), 1e-12);
  }
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const double dof = rng.Uniform(0.5, 300.0);
    const double t = rng.Uniform(-8.0, 8.0);
    const boost::math::students_t dist(dof);
    EXPECT_NEAR(StudentTCdf(t, dof), boost::math::cdf(dist, t), 1e-10);
  }
}

// Welch statistics computed by hand from the sample moments.
struct HandWelch {
  double t;
  double dof;
};
HandWelch Hand(const std::vector<double>& a, const std::vector<double>& b) {
  auto moments = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= v.size();
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::pair{m, s / (v.size() - 1)};
  };
  const auto [ma, va] = moments(a);
  const auto [mb, vb] = moments(b);
  const double qa = va / a.size();
  const double qb = vb / b.size();
  return {(ma - mb) / std::sqrt(qa + qb),
          (qa + qb) * (qa + qb) /
              (qa * qa / (a.size() - 1.0) + qb * qb / (b.size() - 1.0))};
}

TEST(WelchTest, SmallHandExample) {
  const std::vector<double> a = {1, 2, 3, 4, 5};
  const std::vector<double> b = {2, 4, 6, 8, 10, 12};
  // mean 3 var 2.5; mean 7 var 14.
  const double qa = 2.5 / 5.0;
  const double qb = 14.0 / 6.0;
  const double t = -4.0 / std::sqrt(qa + qb);
  const double dof = (qa + qb) * (qa + qb) / (qa * qa / 4.0 + qb * qb / 5.0);
  const WelchResult r = WelchTTest(a, b);
  EXPECT_NEAR(r.t, t, 1e-12);
  EXPECT_NEAR(r.dof, dof, 1e-12);
  const double p = 2.0 * boost::math::cdf(boost::math::students_t(dof), -std::abs(t));
  EXPECT_NEAR(r.p, p, 1e-9);
}

TEST(WelchTest, RandomSamplesAgainstHandOracle) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> a(2 + rng.Below(60));
    std::vector<double> b(2 + rng.Below(60));
    const double sa = rng.Uniform(0.1, 5.0);
    const double sb = rng.Uniform(0.1, 5.0);
    const double shift = rng.Uniform(-2.0, 2.0);
    for (double& x : a) x = sa * rng.Normal();
    for (double& x : b) x = shift + sb * rng.Normal();
    const HandWelch h = Hand(a, b);
    const WelchResult r = WelchTTest(a, b);
    EXPECT_NEAR(r.t, h.t, 1e-9 * (1.0 + std::abs(h.t)));
    EXPECT_NEAR(r.dof, h.dof, 1e-9 * h.dof);
    const double p = 2.0 * boost::math::cdf(boost::math::students_t(h.dof), -std::abs(h.t));
    EXPECT_NEAR(r.p, p, 1e-9);
    EXPECT_GE(r.p, 0.0);
    EXPECT_LE(r.p, 1.0);
  }
}

TEST(WelchTest, RejectsDegenerateSamples) {
  const std::vector<double> one = {1.0};
  const std::vector<double> two = {1.0, 2.0};
  const std::vector<double> flat = {3.0, 3.0, 3.0};
  EXPECT_THROW(WelchTTest(one, two), InputError);
  EXPECT_THROW(WelchTTest(flat, flat), InputError);
  EXPECT_NO_THROW(WelchTTest(flat, two));
}

EpisodeRecord Rec(envs::Outcome o, double ret, double res = 0.0) {
  EpisodeRecord r;
  r.outcome = o;
  r.return_general = ret;
  r.residual_norm = res;
  r.steps = 10;
  return r;
}

TEST(SummarizeTest, RatesAndMeans) {
  EvalReport rep;
  rep.records = {Rec(envs::Outcome::kSuccess, 1.0, 0.2), Rec(envs::Outcome::kCrash, -3.0),
                 Rec(envs::Outcome::kSuccess, 2.0, 0.4), Rec(envs::Outcome::kTimeout, 0.0),
                 Rec(envs::Outcome::kOutOfBounds, -5.0)};
  Summarize(rep);
  EXPECT_EQ(rep.episodes, 5);
  EXPECT_DOUBLE_EQ(rep.success_rate, 0.4);
  EXPECT_DOUBLE_EQ(rep.crash_rate, 0.2);
  EXPECT_DOUBLE_EQ(rep.oob_rate, 0.2);
  EXPECT_DOUBLE_EQ(rep.timeout_rate, 0.2);
  EXPECT_DOUBLE_EQ(rep.mean_return_general, -1.0);
  EXPECT_NEAR(rep.mean_residual_norm, 0.12, 1e-15);
}

// The episode return equals an independent replay stepping the same env
// with the zero action.
TEST(RunEvalTest, ZeroPilotMatchesDirectRollout) {
  pilots::ZeroPilot pilot(2);
  const EvalReport rep =
      RunEval(envs::EnvId::kLander, envs::EnvConfig{}, pilot, nullptr, 5, 42, "zero", "none");
  ASSERT_EQ(rep.records.size(), 5u);
  for (int i = 0; i < 5; ++i) {
    const EpisodeRecord& r = rep.records[i];
    EXPECT_EQ(r.seed, EpisodeSeed(42, i));
    envs::Env env(envs::EnvId::kLander);
    env.Reset(r.seed);
    double ret = 0.0;
    int steps = 0;
    envs::StepResult s;
    do {
      s = env.Step(envs::Action::Zero(2));
      ret += s.r_general;
      ++steps;
    } while (!s.done);
    EXPECT_EQ(r.steps, steps);
    EXPECT_EQ(r.outcome, s.outcome);
    EXPECT_NEAR(r.return_general, ret, 1e-9);
    EXPECT_EQ(r.residual_norm, 0.0);
  }
}

TEST(RunEvalTest, DeterministicAndSeedSensitive) {
  auto run = [](uint64_t seed) {
    pilots::NoisyPilot pilot(std::make_unique<pilots::ZeroPilot>(2), 0.5);
    return ReportJson(RunEval(envs::EnvId::kLander, envs::EnvConfig{}, pilot, nullptr, 8,
                              seed, "noisy", "none"));
  };
  EXPECT_EQ(run(3), run(3));
  EXPECT_NE(run(3), run(4));
  EXPECT_NE(EpisodeSeed(3, 0), EpisodeSeed(3, 1));
}

TEST(ReplayTest, RecordedEvalReplaysBitForBit) {
  const auto path = std::filesystem::temp_directory_path() / "sa_eval_replay.jsonl";
  pilots::DemoHeader h;
  h.env = "lander";
  h.obs_dim = envs::ObservationDim(envs::EnvId::kLander, true);
  h.act_dim = 2;
  {
    pilots::DemoLogWriter w(path.string(), h);
    pilots::NoisyPilot pilot(std::make_unique<pilots::ZeroPilot>(2), 0.7);
    RunEval(envs::EnvId::kLander, envs::EnvConfig{}, pilot, nullptr, 3, 9, "noisy", "none", &w);
  }
  pilots::DemoLog log = pilots::ReadDemoLog(path.string());
  EXPECT_EQ(log.num_episodes(), 3);
  const ReplayResult ok = ReplayDemoLog(log, envs::EnvConfig{});
  ASSERT_EQ(ok.episodes.size(), 3u);
  EXPECT_TRUE(ok.ok());
  for (const auto& ep : ok.episodes) {
    EXPECT_EQ(ep.logged, ep.replayed);
    EXPECT_NE(ep.logged, envs::Outcome::kNone);
  }

  // A one-ulp change to a logged reward is caught at that step.
  pilots::DemoLog bad = log;
  bad.records[5].reward = std::nextafter(bad.records[5].reward, 1e300);
  const ReplayResult r = ReplayDemoLog(bad, envs::EnvConfig{});
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(r.episodes[0].first_mismatch, 5);

  // So is a changed action.
  pilots::DemoLog moved = log;
  moved.records[2].a_h[0] = moved.records[2].a_h[0] > 0 ? -0.5 : 0.5;
  EXPECT_FALSE(ReplayDemoLog(moved, envs::EnvConfig{}).ok());
  std::filesystem::remove(path);
}

EvalReport Report(const std::string& env, const std::string& cop, const std::string& pil,
                  double s) {
  EvalReport r;
  r.env = env;
  r.copilot = cop;
  r.pilot = pil;
  r.success_rate = s;
  r.crash_rate = 1.0 - s;
  r.mean_return_general = -10.0 * s - 0.125;
  return r;
}

TEST(GridTest, AggregateCsvRoundTripAndText) {
  const std::vector<EvalReport> reps = {
      Report("lander", "none", "noisy", 0.165), Report("lander", "none", "laggy", 0.925),
      Report("lander", "cop1", "noisy", 0.6), Report("lander", "cop1", "laggy", 1.0 / 3.0)};
  const Grid g = Aggregate(reps);
  EXPECT_EQ(g.copilots, (std::vector<std::string>{"none", "cop1"}));
  EXPECT_EQ(g.pilots, (std::vector<std::string>{"noisy", "laggy"}));
  EXPECT_EQ(g.at("cop1", "laggy").success_rate, 1.0 / 3.0);
  const std::string csv = GridCsv(g);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "env,copilot,noisy.success_rate,noisy.crash_rate,noisy.return_general,"
            "laggy.success_rate,laggy.crash_rate,laggy.return_general");
  EXPECT_EQ(ParseGridCsv(csv), g);
  const std::string text = GridText(g);
  EXPECT_NE(text.find("cop1"), std::string::npos);
  EXPECT_NE(text.find("laggy"), std::string::npos);

  EXPECT_THROW(Aggregate({Report("lander", "a", "b", 0.1), Report("drone", "a", "c", 0.1)}),
               InputError);
  EXPECT_THROW(Aggregate({Report("lander", "a", "b", 0.1), Report("lander", "a", "b", 0.2)}),
               InputError);
  EXPECT_THROW(g.at("cop2", "noisy"), InputError);
  EXPECT_ANY_THROW(ParseGridCsv("env,copilot,x.success_rate\nlander,none\n"));
}

TEST(ReportJsonTest, CarriesConfigHashAndEpisodeLines) {
  pilots::ZeroPilot pilot(2);
  EvalReport rep =
      RunEval(envs::EnvId::kLander, envs::EnvConfig{}, pilot, nullptr, 2, 1, "zero", "none");
  rep.config_hash = "abc123";
  const std::string j = ReportJson(rep);
  EXPECT_NE(j.find("\"config_hash\""), std::string::npos);
  EXPECT_NE(j.find("abc123"), std::string::npos);
  const std::string lines = EpisodeRecordsJsonl(rep);
  EXPECT_EQ(std::count(lines.begin(), lines.end(), '\n'), 2);
}

}  // namespace
}  // namespace sa::eval
