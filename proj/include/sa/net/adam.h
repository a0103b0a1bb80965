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

#ifndef SA_NET_ADAM_H_
#define SA_NET_ADAM_H_

#include <cstdint>

#include <Eigen/Core>

#include "sa/net/mlp.h"

namespace sa::net {

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState ForSize(Eigen::Index n);
};

// Bias-corrected Adam:
//   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2
//   p <- p - lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
// Throws TrainingFault (leaving params and state untouched) when any
// gradient component is non-finite.
void AdamStep(Eigen::VectorXd& params, const Eigen::VectorXd& grad,
              AdamState& state, double lr);
void AdamStep(MlpParams& params, const Eigen::VectorXd& grad, AdamState& state,
              double lr);

// Rescales `grad` in place so its L2 norm is at most max_norm; returns the
// norm before clipping.
double ClipGradNorm(Eigen::VectorXd& grad, double max_norm);

}  // namespace sa::net

#endif  // SA_NET_ADAM_H_
