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

#include "sa/net/adam.h"

#include <cmath>

#include "sa/common/errors.h"

namespace sa::net {

AdamState AdamState::ForSize(Eigen::Index n) {
  AdamState s;
  s.m = Eigen::VectorXd::Zero(n);
  s.v = Eigen::VectorXd::Zero(n);
  return s;
}

void AdamStep(Eigen::VectorXd& params, const Eigen::VectorXd& grad,
              AdamState& state, double lr) {
  if (grad.size() != params.size()) throw ShapeError("adam: grad size mismatch");
  if (state.m.size() == 0) state = AdamState::ForSize(params.size());
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw ShapeError("adam: state size mismatch");
  }
  if (!grad.allFinite()) throw TrainingFault("adam: non-finite gradient");
  state.step += 1;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grad;
  state.v = state.beta2 * state.v + (1.0 - state.beta2) * grad.cwiseAbs2();
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  params.array() -= lr * (state.m.array() / c1) /
                    ((state.v.array() / c2).sqrt() + state.eps);
}

void AdamStep(MlpParams& params, const Eigen::VectorXd& grad, AdamState& state,
              double lr) {
  if (!grad.allFinite()) throw TrainingFault("adam: non-finite gradient");
  AdamStep(params.mutable_flat(), grad, state, lr);
}

double ClipGradNorm(Eigen::VectorXd& grad, double max_norm) {
  const double norm = grad.norm();
  if (max_norm > 0.0 && norm > max_norm) grad *= max_norm / norm;
  return norm;
}

}  // namespace sa::net
