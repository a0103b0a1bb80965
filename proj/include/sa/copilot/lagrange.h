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

#ifndef SA_COPILOT_LAGRANGE_H_
#define SA_COPILOT_LAGRANGE_H_

namespace sa::copilot {

// log(1 + e^x) without overflow.
double Softplus(double x);
// Inverse of Softplus on (0, inf).
double SoftplusInverse(double y);
double Sigmoid(double x);

inline constexpr double kLambdaRawMin = -20.0;
inline constexpr double kLambdaRawMax = 20.0;

// Return constraint J(pi_r) >= threshold enforced through the multiplier
// lambda = softplus(raw). A threshold of -inf disables the constraint.
struct LagrangeState {
  double raw = 0.0;
  double threshold = 0.0;

  double lambda() const { return Softplus(raw); }
  // raw = softplus^-1(1), i.e. equal mixing of both loss terms.
  static LagrangeState Initial(double threshold);
};

// 1/(1+lambda) on the residual penalty, lambda/(1+lambda) on the PPO loss.
struct MixingWeights {
  double penalty = 1.0;
  double ppo = 0.0;
};
MixingWeights MixingWeightsFor(double lambda);

struct DualLoss {
  double loss = 0.0;      // softplus(raw) * (threshold - j_hat)
  double grad_raw = 0.0;  // sigmoid(raw) * (threshold - j_hat)
};
DualLoss LLambda(const LagrangeState& lag, double j_hat);

// One ascent step raw += lr * grad_raw, with raw kept in
// [kLambdaRawMin, kLambdaRawMax].
LagrangeState DualAscent(const LagrangeState& lag, double j_hat, double lr);

}  // namespace sa::copilot

#endif  // SA_COPILOT_LAGRANGE_H_
