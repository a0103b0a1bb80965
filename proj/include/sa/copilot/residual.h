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

#ifndef SA_COPILOT_RESIDUAL_H_
#define SA_COPILOT_RESIDUAL_H_

#include <span>

#include <Eigen/Core>

#include "sa/copilot/lagrange.h"
#include "sa/envs/types.h"
#include "sa/net/actor_critic.h"
#include "sa/ppo/ppo.h"
#include "sa/ppo/types.h"

namespace sa::copilot {

// a = clamp(a_h + a_r) componentwise. Throws ShapeError on a dim mismatch.
envs::Action CombineActions(const envs::Action& a_h, const envs::Action& a_r);

// Mean over columns of the unsquared L2 norm.
double ResidualPenalty(const Eigen::MatrixXd& a_r);

// Residual penalty of the current policy on stored draws: a_r = mean +
// exp(log_std) * noise, so the penalty is differentiable in the heads.
struct PenaltyTerms {
  double penalty = 0.0;
  ppo::HeadGrads grads;
};
PenaltyTerms ResidualPenaltyTerms(const net::ActorCritic::Output& out,
                                  const ppo::RolloutBatch& batch,
                                  std::span<const int> idx);

// L_theta = w_pen * penalty + w_ppo * (policy_loss - entropy_coef * entropy)
//           + value_coef * value_loss,
// with (w_pen, w_ppo) = MixingWeightsFor(lambda) and lambda held constant.
ppo::MinibatchLoss MakeCopilotLoss(const ppo::RolloutBatch& batch,
                                   const ppo::Advantages& adv,
                                   const ppo::TrainConfig& cfg, double lambda);

// Value regression only; used while the copilot is warming up.
ppo::MinibatchLoss MakeValueOnlyLoss(const ppo::Advantages& adv,
                                     const ppo::TrainConfig& cfg);

// L_theta and its flat-parameter gradient on the items `idx`.
ppo::LossAndGrad LTheta(const net::ActorCritic& ac,
                        const ppo::RolloutBatch& batch,
                        const ppo::Advantages& adv, std::span<const int> idx,
                        const ppo::TrainConfig& cfg, double lambda);

}  // namespace sa::copilot

#endif  // SA_COPILOT_RESIDUAL_H_
