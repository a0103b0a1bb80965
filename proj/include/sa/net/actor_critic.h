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

#ifndef SA_NET_ACTOR_CRITIC_H_
#define SA_NET_ACTOR_CRITIC_H_

#include <vector>

#include <Eigen/Core>

#include "sa/common/rng.h"
#include "sa/net/gaussian.h"
#include "sa/net/mlp.h"

namespace sa::net {

// Shared tanh trunk with two linear heads: the first act_dim output rows are
// the Gaussian policy mean, the last row is the value estimate. The
// state-independent log_std lives in the MLP's extra block and is clamped to
// [kLogStdMin, kLogStdMax] when read.
class ActorCritic {
 public:
  struct Options {
    std::vector<int> hidden = {128, 128, 128};
    double hidden_gain = 1.4142135623730951;
    double policy_gain = 0.01;
    double value_gain = 1.0;
    double init_log_std = -0.5;
  };

  ActorCritic() = default;
  ActorCritic(int input_dim, int act_dim, const Options& opts, Rng& rng);
  // Wraps existing parameters, e.g. from a checkpoint.
  ActorCritic(MlpParams params, int act_dim);

  struct Output {
    Eigen::MatrixXd mean;      // act_dim x batch
    Eigen::VectorXd log_std;   // act_dim, clamped
    Eigen::RowVectorXd value;  // 1 x batch
  };

  Output Forward(const Eigen::MatrixXd& x, MlpCache* cache = nullptr) const;
  GaussianPolicyOut Policy(const Eigen::VectorXd& x) const;
  double Value(const Eigen::VectorXd& x) const;

  // Gradient of sum(d_mean .* mean) + d_log_std . log_std + sum(d_value .*
  // value). The log_std gradient is zeroed where the clamp is active.
  Eigen::VectorXd Backward(const MlpCache& cache, const Eigen::MatrixXd& d_mean,
                           const Eigen::VectorXd& d_log_std,
                           const Eigen::RowVectorXd& d_value) const;

  // 1 for every parameter of the policy head (mean rows of the last layer
  // and log_std), 0 elsewhere.
  Eigen::VectorXd PolicyHeadMask() const;

  int input_dim() const { return params_.input_dim(); }
  int act_dim() const { return act_dim_; }
  const MlpParams& params() const { return params_; }
  MlpParams& mutable_params() { return params_; }

 private:
  MlpParams params_;
  int act_dim_ = 0;
};

}  // namespace sa::net

#endif  // SA_NET_ACTOR_CRITIC_H_
