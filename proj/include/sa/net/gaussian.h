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

#ifndef SA_NET_GAUSSIAN_H_
#define SA_NET_GAUSSIAN_H_

#include <Eigen/Core>

#include "sa/common/rng.h"

namespace sa::net {

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

// Diagonal Gaussian over actions.
struct GaussianPolicyOut {
  Eigen::VectorXd mean;
  Eigen::VectorXd log_std;
};

// sum_i -0.5 ((a_i - mu_i) / sigma_i)^2 - log sigma_i - 0.5 log(2 pi)
double GaussianLogProb(const GaussianPolicyOut& out, const Eigen::VectorXd& a);

// mu + sigma * xi with xi ~ N(0, I); consumes two draws per dimension.
Eigen::VectorXd GaussianSample(const GaussianPolicyOut& out, Rng& rng);

// Standard normal noise vector used by GaussianSample.
Eigen::VectorXd StandardNormal(int dim, Rng& rng);

double GaussianEntropy(const Eigen::VectorXd& log_std);

}  // namespace sa::net

#endif  // SA_NET_GAUSSIAN_H_
