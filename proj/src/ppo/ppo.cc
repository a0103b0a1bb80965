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

#include "sa/ppo/ppo.h"

#include <algorithm>
#include <cmath>

#include "sa/common/errors.h"
#include "sa/net/gaussian.h"

namespace sa::ppo {

Advantages ComputeGae(const RolloutBatch& batch, double gamma,
                      double gae_lambda) {
  const int n = batch.size();
  Advantages adv;
  adv.advantages = Eigen::VectorXd::Zero(n);
  double next_adv = 0.0;
  for (int t = n - 1; t >= 0; --t) {
    const double not_terminal = batch.terminal[t] ? 0.0 : 1.0;
    const double carry = batch.boundary[t] ? 0.0 : 1.0;
    const double delta = batch.rewards[t] +
                         gamma * batch.next_values[t] * not_terminal -
                         batch.values[t];
    next_adv = delta + gamma * gae_lambda * carry * next_adv;
    adv.advantages[t] = next_adv;
  }
  adv.returns = adv.advantages + batch.values;
  adv.mean = 0.0;
  adv.std = 1.0;
  return adv;
}

void NormalizeAdvantages(Advantages& adv) {
  const Eigen::Index n = adv.advantages.size();
  if (n == 0) return;
  const double mean = adv.advantages.mean();
  double var = (adv.advantages.array() - mean).square().sum() / static_cast<double>(n);
  const double std = std::sqrt(var);
  adv.mean = mean;
  adv.std = std;
  // A constant batch carries no preference; centring alone is enough.
  const double scale = std > 1e-12 ? 1.0 / std : 1.0;
  adv.advantages = ((adv.advantages.array() - mean) * scale).matrix();
}

void HeadGrads::Resize(int act_dim, int n) {
  d_mean = Eigen::MatrixXd::Zero(act_dim, n);
  d_log_std = Eigen::VectorXd::Zero(act_dim);
  d_value = Eigen::RowVectorXd::Zero(n);
}

SurrogateTerms PpoTerms(const net::ActorCritic::Output& out,
                        const RolloutBatch& batch, const Advantages& adv,
                        std::span<const int> idx, double clip_eps) {
  const int n = static_cast<int>(idx.size());
  const int act_dim = static_cast<int>(out.mean.rows());
  SurrogateTerms terms;
  terms.policy.Resize(act_dim, n);
  terms.value.Resize(act_dim, n);
  if (n == 0) return terms;
  const Eigen::ArrayXd inv_std = (-out.log_std.array()).exp();
  const double inv_n = 1.0 / n;
  int clipped = 0;
  for (int j = 0; j < n; ++j) {
    const int t = idx[j];
    const Eigen::ArrayXd z =
        (batch.actions.col(t).array() - out.mean.col(j).array()) * inv_std;
    const double logp = net::GaussianLogProb({out.mean.col(j), out.log_std},
                                             batch.actions.col(t));
    const double log_ratio = logp - batch.log_probs[t];
    const double ratio = std::exp(log_ratio);
    if (!std::isfinite(ratio)) throw TrainingFault("non-finite PPO ratio");
    const double a = adv.advantages[t];
    const double clipped_ratio = std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps);
    const double unclipped_obj = ratio * a;
    const double clipped_obj = clipped_ratio * a;
    terms.policy_loss -= std::min(unclipped_obj, clipped_obj) * inv_n;
    const bool clip_active = (a > 0.0 && ratio > 1.0 + clip_eps) ||
                             (a < 0.0 && ratio < 1.0 - clip_eps);
    if (ratio < 1.0 - clip_eps || ratio > 1.0 + clip_eps) ++clipped;
    terms.mean_ratio += ratio * inv_n;
    terms.approx_kl += ((ratio - 1.0) - log_ratio) * inv_n;
    // d(-obj/n)/d logp
    const double g = clip_active ? 0.0 : -unclipped_obj * inv_n;
    terms.policy.d_mean.col(j) = (g * z * inv_std).matrix();
    terms.policy.d_log_std += (g * (z.square() - 1.0)).matrix();

    const double err = out.value[j] - adv.returns[t];
    terms.value_loss += err * err * inv_n;
    terms.value.d_value[j] = 2.0 * err * inv_n;
  }
  terms.clip_fraction = static_cast<double>(clipped) * inv_n;
  terms.entropy = net::GaussianEntropy(out.log_std);
  return terms;
}

net::ActorCritic::Output ForwardOn(const net::ActorCritic& ac,
                                   const RolloutBatch& batch,
                                   std::span<const int> idx,
                                   net::MlpCache* cache) {
  Eigen::MatrixXd x(batch.obs.rows(), static_cast<Eigen::Index>(idx.size()));
  for (size_t j = 0; j < idx.size(); ++j) x.col(j) = batch.obs.col(idx[j]);
  return ac.Forward(x, cache);
}

MinibatchLoss MakePpoLoss(const RolloutBatch& batch, const Advantages& adv,
                          const TrainConfig& cfg) {
  return [&batch, &adv, cfg](const net::ActorCritic::Output& out,
                             std::span<const int> idx, HeadGrads& grads,
                             UpdateStats& stats) {
    SurrogateTerms t = PpoTerms(out, batch, adv, idx, cfg.clip_eps);
    grads.d_mean = t.policy.d_mean;
    grads.d_log_std = t.policy.d_log_std;
    grads.d_log_std.array() -= cfg.entropy_coef;
    grads.d_value = cfg.value_coef * t.value.d_value;
    stats.policy_loss += t.policy_loss;
    stats.value_loss += t.value_loss;
    stats.entropy += t.entropy;
    stats.mean_ratio += t.mean_ratio;
    stats.clip_fraction += t.clip_fraction;
    stats.approx_kl += t.approx_kl;
    return t.policy_loss + cfg.value_coef * t.value_loss -
           cfg.entropy_coef * t.entropy;
  };
}

LossAndGrad PpoSurrogateLoss(const net::ActorCritic& ac,
                             const RolloutBatch& batch, const Advantages& adv,
                             std::span<const int> idx, const TrainConfig& cfg) {
  net::MlpCache cache;
  const auto out = ForwardOn(ac, batch, idx, &cache);
  LossAndGrad r;
  r.terms = PpoTerms(out, batch, adv, idx, cfg.clip_eps);
  r.loss = r.terms.policy_loss + cfg.value_coef * r.terms.value_loss -
           cfg.entropy_coef * r.terms.entropy;
  Eigen::VectorXd d_log_std = r.terms.policy.d_log_std;
  d_log_std.array() -= cfg.entropy_coef;
  r.grad = ac.Backward(cache, r.terms.policy.d_mean, d_log_std,
                       cfg.value_coef * r.terms.value.d_value);
  return r;
}

UpdateStats PpoUpdate(net::ActorCritic& ac, net::AdamState& adam,
                      const RolloutBatch& batch, const MinibatchLoss& loss,
                      const TrainConfig& cfg, double lr, Rng& rng,
                      const Eigen::VectorXd& grad_mask) {
  UpdateStats stats;
  const int n = batch.size();
  if (n == 0) return stats;
  const int mbs = std::max(1, std::min(cfg.minibatches, n));
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const std::vector<int> perm = Permutation(n, rng);
    for (int m = 0; m < mbs; ++m) {
      const int lo = static_cast<int>(static_cast<int64_t>(n) * m / mbs);
      const int hi = static_cast<int>(static_cast<int64_t>(n) * (m + 1) / mbs);
      std::span<const int> idx(perm.data() + lo, hi - lo);
      if (idx.empty()) continue;
      net::MlpCache cache;
      const auto out = ForwardOn(ac, batch, idx, &cache);
      HeadGrads grads;
      grads.Resize(ac.act_dim(), static_cast<int>(idx.size()));
      stats.total_loss += loss(out, idx, grads, stats);
      Eigen::VectorXd g =
          ac.Backward(cache, grads.d_mean, grads.d_log_std, grads.d_value);
      if (grad_mask.size() == g.size()) g.array() *= grad_mask.array();
      net::ClipGradNorm(g, cfg.max_grad_norm);
      net::AdamStep(ac.mutable_params(), g, adam, lr);
      ++stats.minibatch_steps;
    }
  }
  if (stats.minibatch_steps > 0) {
    const double k = 1.0 / stats.minibatch_steps;
    stats.policy_loss *= k;
    stats.value_loss *= k;
    stats.entropy *= k;
    stats.mean_ratio *= k;
    stats.clip_fraction *= k;
    stats.approx_kl *= k;
    stats.residual_penalty *= k;
    stats.total_loss *= k;
  }
  return stats;
}

double LrSchedule(double base_lr, int64_t steps_done, int64_t decay_every,
                  double factor) {
  if (decay_every <= 0 || steps_done < decay_every) return base_lr;
  return base_lr * std::pow(factor, static_cast<double>(steps_done / decay_every));
}

}  // namespace sa::ppo
