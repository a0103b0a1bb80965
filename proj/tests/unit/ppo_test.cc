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
#include <numeric>

#include "sa/common/errors.h"
#include "sa/common/rng.h"
#include "sa/net/gaussian.h"
#include "sa/ppo/ppo.h"
#include "sa/ppo/rollout.h"
#include "sa/ppo/trainer.h"

namespace sa::ppo {
namespace {

RolloutBatch RandomBatch(int n, Rng& rng, int obs_dim = 3, int act_dim = 2) {
  RolloutBatch b;
  b.Resize(obs_dim, act_dim, n);
  for (int t = 0; t < n; ++t) {
    for (int i = 0; i < obs_dim; ++i) b.obs(i, t) = rng.Normal();
    for (int i = 0; i < act_dim; ++i) {
      b.noise(i, t) = rng.Normal();
      b.actions(i, t) = rng.Normal();
    }
    b.log_probs[t] = -rng.Uniform(0.5, 3.0);
    b.values[t] = rng.Normal();
    b.next_values[t] = rng.Normal();
    b.rewards[t] = rng.Normal();
    b.terminal[t] = rng.Bernoulli(0.1);
    b.boundary[t] = b.terminal[t] || rng.Bernoulli(0.05);
  }
  b.boundary[n - 1] = 1;
  return b;
}

// A_t = sum_{l >= 0} (gamma lambda)^l delta_{t+l}, summed forward until the
// first boundary at or after t.
std::vector<double> BruteForceGae(const RolloutBatch& b, double gamma, double lam) {
  const int n = b.size();
  std::vector<double> out(n);
  for (int t = 0; t < n; ++t) {
    double a = 0.0;
    double w = 1.0;
    for (int k = t; k < n; ++k) {
      const double delta =
          b.rewards[k] + (b.terminal[k] ? 0.0 : gamma * b.next_values[k]) - b.values[k];
      a += w * delta;
      if (b.boundary[k]) break;
      w *= gamma * lam;
    }
    out[t] = a;
  }
  return out;
}

TEST(GaeTest, MatchesBruteForceOnHundredRandomBatches) {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.Below(200));
    const RolloutBatch b = RandomBatch(n, rng);
    const double gamma = rng.Uniform(0.8, 1.0);
    const double lam = rng.Uniform(0.0, 1.0);
    const Advantages adv = ComputeGae(b, gamma, lam);
    const auto ref = BruteForceGae(b, gamma, lam);
    for (int t = 0; t < n; ++t) {
      ASSERT_NEAR(adv.advantages[t], ref[t], 1e-12) << "trial " << trial << " t " << t;
      ASSERT_NEAR(adv.returns[t], ref[t] + b.values[t], 1e-12);
    }
  }
}

TEST(GaeTest, LambdaOneIsDiscountedReturnMinusValue) {
  Rng rng(32);
  RolloutBatch b = RandomBatch(20, rng);
  std::fill(b.terminal.begin(), b.terminal.end(), 0);
  std::fill(b.boundary.begin(), b.boundary.end(), 0);
  b.terminal[19] = 1;
  b.boundary[19] = 1;
  // Consistent values: next_values[t] = values[t + 1].
  for (int t = 0; t + 1 < 20; ++t) b.next_values[t] = b.values[t + 1];
  const double gamma = 0.9;
  const Advantages adv = ComputeGae(b, gamma, 1.0);
  for (int t = 0; t < 20; ++t) {
    double g = 0.0;
    for (int k = 19; k >= t; --k) g = b.rewards[k] + gamma * g;
    EXPECT_NEAR(adv.returns[t], g, 1e-12);
  }
}

TEST(GaeTest, NormalizeGivesZeroMeanUnitStd) {
  Rng rng(33);
  Advantages adv = ComputeGae(RandomBatch(500, rng), 0.99, 0.95);
  const Eigen::VectorXd raw = adv.advantages;
  NormalizeAdvantages(adv);
  EXPECT_NEAR(adv.advantages.mean(), 0.0, 1e-12);
  const double var = (adv.advantages.array() - adv.advantages.mean()).square().mean();
  EXPECT_NEAR(var, 1.0, 1e-12);
  EXPECT_NEAR(adv.mean, raw.mean(), 1e-12);
}

net::ActorCritic SmallNet(Rng& rng, int in = 3, int act = 2) {
  net::ActorCritic::Options o;
  o.hidden = {5, 4};
  o.policy_gain = 1.0;
  return net::ActorCritic(in, act, o, rng);
}

// Sets log_probs to those of `ac` itself plus a small offset so ratios sit
// inside the clip range, away from the kinks.
void RelabelNearPolicy(RolloutBatch& b, const net::ActorCritic& ac, Rng& rng) {
  for (int t = 0; t < b.size(); ++t) {
    const auto pol = ac.Policy(b.obs.col(t));
    b.actions.col(t) = pol.mean + (pol.log_std.array().exp() * b.noise.col(t).array()).matrix();
    b.log_probs[t] = net::GaussianLogProb(pol, b.actions.col(t)) + rng.Uniform(-0.05, 0.05);
  }
}

TEST(PpoLossTest, GradientMatchesFiniteDifferences) {
  Rng rng(34);
  for (int trial = 0; trial < 20; ++trial) {
    net::ActorCritic ac = SmallNet(rng);
    RolloutBatch b = RandomBatch(16, rng);
    RelabelNearPolicy(b, ac, rng);
    Advantages adv = ComputeGae(b, 0.99, 0.95);
    NormalizeAdvantages(adv);
    TrainConfig cfg;
    cfg.entropy_coef = 0.01;
    std::vector<int> idx(16);
    std::iota(idx.begin(), idx.end(), 0);
    const LossAndGrad lg = PpoSurrogateLoss(ac, b, adv, idx, cfg);
    Eigen::VectorXd fd(lg.grad.size());
    for (Eigen::Index i = 0; i < fd.size(); ++i) {
      net::ActorCritic q = ac;
      q.mutable_params().mutable_flat()[i] += 1e-6;
      const double up = PpoSurrogateLoss(q, b, adv, idx, cfg).loss;
      q.mutable_params().mutable_flat()[i] -= 2e-6;
      fd[i] = (up - PpoSurrogateLoss(q, b, adv, idx, cfg).loss) / 2e-6;
    }
    EXPECT_LT((lg.grad - fd).norm() / (lg.grad.norm() + fd.norm()), 1e-4);
  }
}

TEST(PpoLossTest, OnPolicyLossIsMinusMeanAdvantage) {
  Rng rng(35);
  net::ActorCritic ac = SmallNet(rng);
  RolloutBatch b = RandomBatch(10, rng);
  for (int t = 0; t < 10; ++t) {
    const auto pol = ac.Policy(b.obs.col(t));
    b.log_probs[t] = net::GaussianLogProb(pol, b.actions.col(t));
  }
  const Advantages adv = ComputeGae(b, 0.99, 0.95);
  std::vector<int> idx(10);
  std::iota(idx.begin(), idx.end(), 0);
  const SurrogateTerms terms = PpoTerms(ForwardOn(ac, b, idx), b, adv, idx, 0.2);
  EXPECT_NEAR(terms.policy_loss, -adv.advantages.mean(), 1e-12);
  EXPECT_NEAR(terms.mean_ratio, 1.0, 1e-12);
  EXPECT_EQ(terms.clip_fraction, 0.0);
  EXPECT_NEAR(terms.approx_kl, 0.0, 1e-12);
}

TEST(PpoLossTest, ClippedItemsCarryNoPolicyGradient) {
  Rng rng(36);
  net::ActorCritic ac = SmallNet(rng);
  RolloutBatch b = RandomBatch(1, rng);
  const auto pol = ac.Policy(b.obs.col(0));
  // Ratio e^1 > 1.2 with a positive advantage: the clipped branch is active.
  b.log_probs[0] = net::GaussianLogProb(pol, b.actions.col(0)) - 1.0;
  Advantages adv;
  adv.advantages = Eigen::VectorXd::Constant(1, 2.0);
  adv.returns = Eigen::VectorXd::Constant(1, 0.0);
  const std::vector<int> idx = {0};
  const SurrogateTerms terms = PpoTerms(ForwardOn(ac, b, idx), b, adv, idx, 0.2);
  EXPECT_NEAR(terms.policy_loss, -1.2 * 2.0, 1e-12);
  EXPECT_EQ(terms.policy.d_mean.norm(), 0.0);
  EXPECT_EQ(terms.policy.d_log_std.norm(), 0.0);
  EXPECT_EQ(terms.clip_fraction, 1.0);
}

TEST(ScheduleTest, StepDecay) {
  EXPECT_DOUBLE_EQ(LrSchedule(1.0, 0, 100, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(LrSchedule(1.0, 99, 100, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(LrSchedule(1.0, 100, 100, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(LrSchedule(1.0, 250, 100, 0.5), 0.25);
  EXPECT_DOUBLE_EQ(LrSchedule(1.0, 10'000, 0, 0.5), 1.0);
  TrainConfig c;
  c.total_timesteps = 5'000'000;
  EXPECT_EQ(c.DecayInterval(), 1'000'000);
  c.decay_every = 0;
  EXPECT_EQ(c.DecayInterval(), 0);
  c.decay_every = 123;
  EXPECT_EQ(c.DecayInterval(), 123);
  EXPECT_NEAR(TrainConfig{}.decay_factor * TrainConfig{}.decay_factor, 0.1, 1e-15);
}

TEST(TrainConfigTest, RoundTripAndValidation) {
  TrainConfig c;
  c.lr = 1e-4;
  c.rollout_length = 64;
  c.num_envs = 4;
  const TrainConfig back = TrainConfig::FromConfig(c.ToConfig());
  EXPECT_EQ(back.lr, 1e-4);
  EXPECT_EQ(back.rollout_length, 64);
  Config bad;
  bad.Set("learning_rate", "1");
  EXPECT_THROW(TrainConfig::FromConfig(bad), ConfigError);
  TrainConfig too_many;
  too_many.rollout_length = 2;
  too_many.num_envs = 3;
  EXPECT_THROW(too_many.Validate(), ConfigError);
  TrainConfig gamma_one;
  gamma_one.gamma = 1.0;
  EXPECT_THROW(gamma_one.Validate(), ConfigError);
}

TEST(RolloutTest, CollectsExactlyTStepsDeterministically) {
  Rng init(37);
  net::ActorCritic ac = SmallNet(init, 9, 2);
  RolloutBatch first;
  for (int run = 0; run < 2; ++run) {
    PilotDriver driver;
    RolloutCollector collector(envs::EnvId::kLander, envs::EnvConfig{}, 4, 99, 0.99, 0.1,
                               &driver);
    Rng rng(5);
    RolloutBatch b = collector.Collect(ac, 400, rng);
    EXPECT_EQ(b.size(), 400);
    EXPECT_NO_THROW(b.Validate());
    // Each env's segment ends on a boundary.
    for (int e = 1; e <= 4; ++e) EXPECT_TRUE(b.boundary[e * 100 - 1]);
    for (int t = 0; t < 400; ++t) {
      if (b.terminal[t]) {
        EXPECT_TRUE(b.boundary[t]);
      }
    }
    if (run == 0) {
      first = b;
    } else {
      EXPECT_EQ(b.obs, first.obs);
      EXPECT_EQ(b.actions, first.actions);
      EXPECT_EQ(b.rewards, first.rewards);
      EXPECT_EQ(b.log_probs, first.log_probs);
    }
  }
}

TEST(RolloutTest, StoredNoiseReproducesActions) {
  Rng init(38);
  net::ActorCritic ac = SmallNet(init, 9, 2);
  PilotDriver driver;
  RolloutCollector collector(envs::EnvId::kLander, envs::EnvConfig{}, 1, 1, 0.99, 1.0, &driver);
  Rng rng(6);
  const RolloutBatch b = collector.Collect(ac, 50, rng);
  for (int t = 0; t < 50; ++t) {
    const auto pol = ac.Policy(b.obs.col(t));
    const Eigen::VectorXd a =
        pol.mean + (pol.log_std.array().exp() * b.noise.col(t).array()).matrix();
    EXPECT_NEAR((a - b.actions.col(t)).norm(), 0.0, 1e-12);
    EXPECT_NEAR(b.log_probs[t], net::GaussianLogProb(pol, b.actions.col(t)), 1e-10);
  }
}

TEST(RolloutTest, ZeroActionModeRecordsZeros) {
  Rng init(39);
  net::ActorCritic ac = SmallNet(init, 9, 2);
  PilotDriver driver;
  RolloutCollector collector(envs::EnvId::kLander, envs::EnvConfig{}, 2, 1, 0.99, 1.0, &driver);
  Rng rng(7);
  const RolloutBatch b = collector.Collect(ac, 200, rng, /*zero_action=*/true);
  EXPECT_EQ(b.actions.norm(), 0.0);
  EXPECT_EQ(b.noise.norm(), 0.0);
}

// Episode summaries agree with an independent replay of the same env seed
// and actions.
TEST(RolloutTest, EpisodeSummaryMatchesReplay) {
  Rng init(40);
  net::ActorCritic ac = SmallNet(init, 9, 2);
  PilotDriver driver;
  const double gamma = 0.97;
  RolloutCollector collector(envs::EnvId::kLander, envs::EnvConfig{}, 1, 11, gamma, 1.0, &driver);
  Rng rng(8);
  const RolloutBatch b = collector.Collect(ac, 3000, rng);
  ASSERT_FALSE(b.episodes.empty());
  // Rebuild the first episode's returns from the batch rewards (scale 1).
  double ret = 0.0;
  int len = 0;
  for (int t = 0; t < b.size(); ++t) {
    ++len;
    if (b.terminal[t] || (b.boundary[t] && t + 1 < b.size())) break;
  }
  const EpisodeSummary& ep = b.episodes.front();
  EXPECT_EQ(ep.length, len);
  for (int t = 0; t < len; ++t) ret += b.rewards[t];
  EXPECT_NEAR(ep.return_general + ep.return_goal, ret, 1e-9);
}

TEST(TrainPolicyTest, TinyRunIsDeterministic) {
  TrainConfig cfg;
  cfg.rollout_length = 256;
  cfg.num_envs = 2;
  cfg.total_timesteps = 1024;
  cfg.seed = 3;
  net::ActorCritic::Options net;
  net.hidden = {8};
  Eigen::VectorXd first;
  for (int run = 0; run < 2; ++run) {
    PilotDriver driver;
    MetricsLog log;
    const auto result = TrainPolicy(envs::EnvId::kLander, envs::EnvConfig{}, cfg, net, driver,
                                    &log);
    EXPECT_EQ(result.steps, 1024);
    EXPECT_EQ(log.rows().size(), 4u);
    if (run == 0) {
      first = result.policy.params().flat();
    } else {
      EXPECT_EQ(result.policy.params().flat(), first);
    }
  }
}

TEST(TrainPolicyTest, NeverRunsPastTheBudget) {
  TrainConfig cfg;
  cfg.rollout_length = 256;
  cfg.num_envs = 2;
  cfg.total_timesteps = 1000;
  EXPECT_EQ(cfg.RolloutLengthAt(0), 256);
  EXPECT_EQ(cfg.RolloutLengthAt(768), 232);
  net::ActorCritic::Options net;
  net.hidden = {8};
  PilotDriver driver;
  MetricsLog log;
  const auto result =
      TrainPolicy(envs::EnvId::kLander, envs::EnvConfig{}, cfg, net, driver, &log);
  EXPECT_EQ(result.steps, 1000);
  ASSERT_EQ(log.rows().size(), 4u);
  EXPECT_EQ(log.rows().back().step, 1000);
}

TEST(MetricsLogTest, FormatLeavesInapplicableColumnsEmpty) {
  MetricsRow row;
  row.step = 10;
  const std::string line = MetricsLog::Format(row);
  EXPECT_EQ(std::count(line.begin(), line.end(), ','), 12);
  EXPECT_EQ(line.substr(line.size() - 3), ",,,");
  row.lambda = 2.0;
  row.j_hat = -3.0;
  row.residual_norm = 0.5;
  EXPECT_NE(MetricsLog::Format(row).substr(MetricsLog::Format(row).size() - 3), ",,,");
}

}  // namespace
}  // namespace sa::ppo
