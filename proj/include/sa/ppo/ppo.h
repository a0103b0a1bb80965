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

#ifndef SA_PPO_PPO_H_
#define SA_PPO_PPO_H_

#include <functional>
#include <span>
#include <vector>

#include "sa/common/rng.h"
#include "sa/net/actor_critic.h"
#include "sa/net/adam.h"
#include "sa/ppo/types.h"

namespace sa::ppo {

// GAE(lambda):
//   delta_t = r_t + gamma V(s_{t+1}) (1 - terminal_t) - V(s_t)
//   A_t     = delta_t + gamma lambda (1 - boundary_t) A_{t+1}
//   R_t     = A_t + V(s_t)
// Advantages are returned unnormalized.
Advantages ComputeGae(const RolloutBatch& batch, double gamma, double gae_lambda);

// Standardizes advantages to zero mean and unit std over the batch.
void NormalizeAdvantages(Advantages& adv);

// Gradients of a scalar loss with respect to the actor-critic heads.
struct HeadGrads {
  Eigen::MatrixXd d_mean;
  Eigen::VectorXd d_log_std;
  Eigen::RowVectorXd d_value;

  void Resize(int act_dim, int n);
};

struct SurrogateTerms {
  double policy_loss = 0.0;  // -mean(min(rho A, clip(rho) A))
  double value_loss = 0.0;   // mean((V - R)^2)
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double mean_ratio = 0.0;
  double approx_kl = 0.0;
  HeadGrads policy;  // gradient of policy_loss
  HeadGrads value;   // gradient of value_loss
};

// Evaluates the PPO terms on the items `idx` given the heads' outputs on
// those items (columns of `out` follow `idx`). Throws TrainingFault on a
// non-finite ratio.
SurrogateTerms PpoTerms(const net::ActorCritic::Output& out,
                        const RolloutBatch& batch, const Advantages& adv,
                        std::span<const int> idx, double clip_eps);

// Forward pass on the batch items `idx`, in that order.
net::ActorCritic::Output ForwardOn(const net::ActorCritic& ac,
                                   const RolloutBatch& batch,
                                   std::span<const int> idx,
                                   net::MlpCache* cache = nullptr);

struct LossAndGrad {
  double loss = 0.0;
  Eigen::VectorXd grad;
  SurrogateTerms terms;
};

// L = policy_loss + value_coef * value_loss - entropy_coef * entropy, with
// its gradient in flat-parameter layout.
LossAndGrad PpoSurrogateLoss(const net::ActorCritic& ac,
                             const RolloutBatch& batch, const Advantages& adv,
                             std::span<const int> idx, const TrainConfig& cfg);

// Loss hook for PpoUpdate: given head outputs on a minibatch, fills the head
// gradients and returns the loss and its terms.
using MinibatchLoss = std::function<double(
    const net::ActorCritic::Output& out, std::span<const int> idx,
    HeadGrads& grads, UpdateStats& stats)>;

// Standard PPO loss as a MinibatchLoss.
MinibatchLoss MakePpoLoss(const RolloutBatch& batch, const Advantages& adv,
                          const TrainConfig& cfg);

// epochs x minibatches Adam steps on `loss`. Gradients are multiplied by
// `grad_mask` when non-empty, then clipped to cfg.max_grad_norm. Returned
// stats are averages over minibatch steps.
UpdateStats PpoUpdate(net::ActorCritic& ac, net::AdamState& adam,
                      const RolloutBatch& batch, const MinibatchLoss& loss,
                      const TrainConfig& cfg, double lr, Rng& rng,
                      const Eigen::VectorXd& grad_mask = {});

// lr = base_lr * factor^floor(steps_done / decay_every); decay_every <= 0
// means no decay.
double LrSchedule(double base_lr, int64_t steps_done, int64_t decay_every,
                  double factor);

}  // namespace sa::ppo

#endif  // SA_PPO_PPO_H_
