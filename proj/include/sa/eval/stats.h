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

#ifndef SA_EVAL_STATS_H_
#define SA_EVAL_STATS_H_

#include <span>

namespace sa::eval {

// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double RegularizedIncompleteBeta(double a, double b, double x);

// P(T <= t) for Student's t with `dof` > 0 degrees of freedom (real-valued
// dof allowed).
double StudentTCdf(double t, double dof);

struct WelchResult {
  double t = 0.0;
  double dof = 0.0;
  double p = 1.0;  // two-sided
};

// Welch's unequal-variance t-test of mean(a) against mean(b). Throws
// InputError when a sample has fewer than two items or both sample
// variances are zero.
WelchResult WelchTTest(std::span<const double> a, std::span<const double> b);

}  // namespace sa::eval

#endif  // SA_EVAL_STATS_H_
