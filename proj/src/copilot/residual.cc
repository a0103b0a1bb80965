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

#include "sa/copilot/residual.h"

#include "sa/common/errors.h"

namespace sa::copilot {

envs::Action CombineActions(const envs::Action& a_h, const envs::Action& a_r) {
  if (a_h.size() != a_r.size()) {
    throw ShapeError("pilot and residual actions differ in dim");
  }
  return envs::ClampAction(a_h + a_r);
}

double ResidualPenalty(const Eigen::MatrixXd& a_r) {
  if (a_r.cols() == 0) return 0.0;
  return a_r.colwise().norm().sum() / static_cast<double>(a_r.cols());
}

PenaltyTerms ResidualPenaltyTerms(const net::ActorCritic::Output& out,
                                  const ppo::RolloutBatch& batch,
                                  std::span<const int> idx) {
  const int n = static_cast<int>(idx.size());
  const int act_dim = static_cast<int>(out.mean.rows());
  PenaltyTerms terms;
  terms.grads.Resize(act_dim, n);
  if (n == 0) return terms;
  const Eigen::ArrayXd sigma = out.log_std.array().exp();
  const double inv_n = 1.0 / n;
  for (int j = 0; j < n; ++j) {
    const Eigen::ArrayXd scaled = sigma * batch.noise.col(idx[j]).array();
    const Eigen::VectorXd a_r = out.mean.col(j) + scaled.matrix();
    const double norm = a_r.norm();
    terms.penalty += norm * inv_n;
    // The norm is not differentiable at 0; take the zero subgradient there.
    if (norm == 0.0) continue;
    const Eigen::VectorXd unit = a_r / norm;
    terms.grads.d_mean.col(j) = unit * inv_n;
    terms.grads.d_log_std += (unit.array() * scaled * inv_n).matrix();
  }
  return terms;
}

ppo::MinibatchLoss MakeCopilotLoss(const ppo::RolloutBatch& batch,
                                   const ppo::Advantages& adv,
                                   const ppo::TrainConfig& cfg, double lambda) {
  const MixingWeights w = MixingWeightsFor(lambda);
  return [&batch, &adv, cfg, w](const net::ActorCritic::Output& out,
                                std::span<const int> idx, ppo::HeadGrads& grads,
                                ppo::UpdateStats& stats) {
    const ppo::SurrogateTerms t = ppo::PpoTerms(out, batch, adv, idx, cfg.clip_eps);
    const PenaltyTerms p = ResidualPenaltyTerms(out, batch, idx);
    grads.d_mean = w.penalty * p.grads.d_mean + w.ppo * t.policy.d_mean;
    grads.d_log_std = w.penalty * p.grads.d_log_std + w.ppo * t.policy.d_log_std;
    grads.d_log_std.array() -= w.ppo * cfg.entropy_coef;
    grads.d_value = cfg.value_coef * t.value.d_value;
    stats.policy_loss += t.policy_loss;
    stats.value_loss += t.value_loss;
    stats.entropy += t.entropy;
    stats.mean_ratio += t.mean_ratio;
    stats.clip_fraction += t.clip_fraction;
    stats.approx_kl += t.approx_kl;
    stats.residual_penalty += p.penalty;
    return w.penalty * p.penalty +
           w.ppo * (t.policy_loss - cfg.entropy_coef * t.entropy) +
           cfg.value_coef * t.value_loss;
  };
}

ppo::MinibatchLoss MakeValueOnlyLoss(const ppo::Advantages& adv,
                                     const ppo::TrainConfig& cfg) {
  return [&adv, cfg](const net::ActorCritic::Output& out,
                     std::span<const int> idx, ppo::HeadGrads& grads,
                     ppo::UpdateStats& stats) {
    const int n = static_cast<int>(idx.size());
    double loss = 0.0;
    for (int j = 0; j < n; ++j) {
      const double err = out.value[j] - adv.returns[idx[j]];
      loss += err * err / n;
      grads.d_value[j] = cfg.value_coef * 2.0 * err / n;
    }
    stats.value_loss += loss;
    return cfg.value_coef * loss;
  };
}

ppo::LossAndGrad LTheta(const net::ActorCritic& ac,
                        const ppo::RolloutBatch& batch,
                        const ppo::Advantages& adv, std::span<const int> idx,
                        const ppo::TrainConfig& cfg, double lambda) {
  net::MlpCache cache;
  const auto out = ppo::ForwardOn(ac, batch, idx, &cache);
  ppo::HeadGrads grads;
  grads.Resize(ac.act_dim(), static_cast<int>(idx.size()));
  ppo::UpdateStats stats;
  ppo::LossAndGrad r;
  r.loss = MakeCopilotLoss(batch, adv, cfg, lambda)(out, idx, grads, stats);
  r.grad = ac.Backward(cache, grads.d_mean, grads.d_log_std, grads.d_value);
  r.terms.policy_loss = stats.policy_loss;
  r.terms.value_loss = stats.value_loss;
  r.terms.entropy = stats.entropy;
  r.terms.clip_fraction = stats.clip_fraction;
  return r;
}

}  // namespace sa::copilot
