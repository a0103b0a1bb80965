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

#include "sa/net/actor_critic.h"

#include <utility>

#include "sa/common/errors.h"

namespace sa::net {
namespace {

std::vector<int> Dims(int input_dim, const std::vector<int>& hidden, int out) {
  std::vector<int> dims = {input_dim};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  return dims;
}

}  // namespace

ActorCritic::ActorCritic(int input_dim, int act_dim, const Options& opts,
                         Rng& rng)
    : params_(Dims(input_dim, opts.hidden, act_dim + 1), act_dim),
      act_dim_(act_dim) {
  std::vector<double> gains(act_dim, opts.policy_gain);
  gains.push_back(opts.value_gain);
  InitOrthogonal(params_, rng, opts.hidden_gain, gains);
  params_.mutable_flat().tail(act_dim).setConstant(opts.init_log_std);
}

ActorCritic::ActorCritic(MlpParams params, int act_dim)
    : params_(std::move(params)), act_dim_(act_dim) {
  if (params_.output_dim() != act_dim + 1 || params_.extra() != act_dim) {
    throw ShapeError("actor-critic parameters do not match the action dim");
  }
}

ActorCritic::Output ActorCritic::Forward(const Eigen::MatrixXd& x,
                                         MlpCache* cache) const {
  const Eigen::MatrixXd out = net::Forward(params_, x, cache);
  Output o;
  o.mean = out.topRows(act_dim_);
  o.value = out.row(act_dim_);
  o.log_std = params_.extra_params().cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  return o;
}

GaussianPolicyOut ActorCritic::Policy(const Eigen::VectorXd& x) const {
  Output o = Forward(x);
  return {o.mean.col(0), o.log_std};
}

double ActorCritic::Value(const Eigen::VectorXd& x) const {
  return Forward(x).value(0);
}

Eigen::VectorXd ActorCritic::Backward(const MlpCache& cache,
                                      const Eigen::MatrixXd& d_mean,
                                      const Eigen::VectorXd& d_log_std,
                                      const Eigen::RowVectorXd& d_value) const {
  Eigen::MatrixXd d_out(act_dim_ + 1, d_mean.cols());
  d_out.topRows(act_dim_) = d_mean;
  d_out.row(act_dim_) = d_value;
  Eigen::VectorXd grad = net::Backward(params_, cache, d_out);
  const auto raw = params_.extra_params();
  for (int i = 0; i < act_dim_; ++i) {
    const bool inside = raw[i] > kLogStdMin && raw[i] < kLogStdMax;
    grad[params_.extra_offset() + i] = inside ? d_log_std[i] : 0.0;
  }
  return grad;
}

Eigen::VectorXd ActorCritic::PolicyHeadMask() const {
  Eigen::VectorXd mask = Eigen::VectorXd::Zero(params_.size());
  const int last = params_.num_layers() - 1;
  const int rows = params_.layer_dims()[last + 1];
  const int cols = params_.layer_dims()[last];
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < act_dim_; ++r) {
      mask[params_.weight_offset(last) + static_cast<Eigen::Index>(c) * rows + r] = 1.0;
    }
  }
  mask.segment(params_.bias_offset(last), act_dim_).setOnes();
  mask.tail(act_dim_).setOnes();
  return mask;
}

}  // namespace sa::net
