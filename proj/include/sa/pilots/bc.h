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

#ifndef SA_PILOTS_BC_H_
#define SA_PILOTS_BC_H_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "sa/net/mlp.h"
#include "sa/pilots/demo_log.h"

namespace sa::pilots {

struct BcOptions {
  std::vector<int> hidden = {128, 128, 128};
  double lr = 1e-3;
  int batch_size = 256;
  int max_epochs = 200;
  // Epochs without a validation improvement before stopping.
  int patience = 10;
  double val_fraction = 0.1;
  uint64_t seed = 0;
};

struct BcResult {
  // Parameters from the epoch with the lowest validation loss.
  net::MlpParams params;
  double train_loss = 0.0;
  // Equals train_loss when the split left no validation items.
  double val_loss = 0.0;
  int epochs = 0;
  int best_epoch = 0;
  int train_size = 0;
  int val_size = 0;
  std::vector<double> train_curve;
  std::vector<double> val_curve;
};

// Mean squared error of net(x) against y over all columns and components.
double BcLoss(const net::MlpParams& params, const Eigen::MatrixXd& x,
              const Eigen::MatrixXd& y);

// Regresses y (act_dim x n) on x (obs_dim x n) with Adam. Columns are split
// train/validation by a seeded permutation. Throws InputError when n = 0.
BcResult BcTrain(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                 const BcOptions& opts);

// Pilot observations against the demonstrated a_h.
BcResult BcTrain(const DemoLog& log, const BcOptions& opts);

}  // namespace sa::pilots

#endif  // SA_PILOTS_BC_H_
