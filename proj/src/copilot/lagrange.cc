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

#include "sa/copilot/lagrange.h"

#include <algorithm>
#include <cmath>

#include "sa/common/errors.h"

namespace sa::copilot {

double Softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double SoftplusInverse(double y) {
  if (!(y > 0.0)) throw ConfigError("softplus inverse needs a positive argument");
  // log(e^y - 1) = y + log(1 - e^-y)
  return y + std::log(-std::expm1(-y));
}

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

LagrangeState LagrangeState::Initial(double threshold) {
  return {SoftplusInverse(1.0), threshold};
}

MixingWeights MixingWeightsFor(double lambda) {
  const double denom = 1.0 + lambda;
  return {1.0 / denom, lambda / denom};
}

DualLoss LLambda(const LagrangeState& lag, double j_hat) {
  const double gap = lag.threshold - j_hat;
  return {lag.lambda() * gap, Sigmoid(lag.raw) * gap};
}

LagrangeState DualAscent(const LagrangeState& lag, double j_hat, double lr) {
  LagrangeState next = lag;
  if (lr == 0.0) return next;
  const double step = lr * LLambda(lag, j_hat).grad_raw;
  if (std::isnan(step)) throw TrainingFault("dual update produced NaN");
  next.raw = std::clamp(lag.raw + step, kLambdaRawMin, kLambdaRawMax);
  return next;
}

}  // namespace sa::copilot
