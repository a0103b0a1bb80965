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

#include "sa/net/gaussian.h"

#include <cmath>
#include <numbers>

#include "sa/common/errors.h"

namespace sa::net {
namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * log(2 pi)

}  // namespace

double GaussianLogProb(const GaussianPolicyOut& out, const Eigen::VectorXd& a) {
  if (a.size() != out.mean.size() || out.log_std.size() != out.mean.size()) {
    throw ShapeError("gaussian log-prob dimension mismatch");
  }
  double lp = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double z = (a[i] - out.mean[i]) * std::exp(-out.log_std[i]);
    lp += -0.5 * z * z - out.log_std[i] - kHalfLog2Pi;
  }
  return lp;
}

Eigen::VectorXd StandardNormal(int dim, Rng& rng) {
  Eigen::VectorXd xi(dim);
  for (int i = 0; i < dim; ++i) xi[i] = rng.Normal();
  return xi;
}

Eigen::VectorXd GaussianSample(const GaussianPolicyOut& out, Rng& rng) {
  const Eigen::VectorXd xi = StandardNormal(static_cast<int>(out.mean.size()), rng);
  return out.mean + (out.log_std.array().exp() * xi.array()).matrix();
}

double GaussianEntropy(const Eigen::VectorXd& log_std) {
  return (log_std.array() + 0.5 + kHalfLog2Pi).sum();
}

}  // namespace sa::net
