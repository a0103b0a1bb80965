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

#include "sa/pilots/bc.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sa/common/errors.h"
#include "sa/common/rng.h"
#include "sa/net/adam.h"

namespace sa::pilots {
namespace {

Eigen::MatrixXd Columns(const Eigen::MatrixXd& m, const std::vector<int>& idx,
                        size_t begin, size_t end) {
  Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(end - begin));
  for (size_t i = begin; i < end; ++i) {
    out.col(static_cast<Eigen::Index>(i - begin)) = m.col(idx[i]);
  }
  return out;
}

}  // namespace

double BcLoss(const net::MlpParams& params, const Eigen::MatrixXd& x,
              const Eigen::MatrixXd& y) {
  if (x.cols() == 0) return 0.0;
  const Eigen::MatrixXd diff = net::Forward(params, x) - y;
  return diff.squaredNorm() / static_cast<double>(diff.size());
}

BcResult BcTrain(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                 const BcOptions& opts) {
  const int n = static_cast<int>(x.cols());
  if (n == 0) throw InputError("behavioral cloning needs at least one transition");
  if (y.cols() != n) throw ShapeError("bc inputs and targets differ in length");
  if (opts.batch_size < 1 || opts.max_epochs < 1 || opts.patience < 1 ||
      !(opts.lr > 0.0) || !(opts.val_fraction >= 0.0 && opts.val_fraction < 1.0)) {
    throw ConfigError("invalid behavioral cloning options");
  }

  Rng rng(opts.seed);
  Rng init_rng = rng.Fork(1);
  Rng split_rng = rng.Fork(2);
  Rng shuffle_rng = rng.Fork(3);

  std::vector<int> dims = {static_cast<int>(x.rows())};
  dims.insert(dims.end(), opts.hidden.begin(), opts.hidden.end());
  dims.push_back(static_cast<int>(y.rows()));
  net::MlpParams params(dims);
  net::InitOrthogonal(params, init_rng, std::sqrt(2.0),
                      std::vector<double>(y.rows(), 1.0));

  const std::vector<int> order = Permutation(n, split_rng);
  const int n_val = static_cast<int>(std::floor(opts.val_fraction * n));
  const int n_train = n - n_val;
  const std::vector<int> train_idx(order.begin(), order.begin() + n_train);
  const std::vector<int> val_idx(order.begin() + n_train, order.end());
  const Eigen::MatrixXd x_train = Columns(x, train_idx, 0, train_idx.size());
  const Eigen::MatrixXd y_train = Columns(y, train_idx, 0, train_idx.size());
  const Eigen::MatrixXd x_val = Columns(x, val_idx, 0, val_idx.size());
  const Eigen::MatrixXd y_val = Columns(y, val_idx, 0, val_idx.size());

  BcResult result;
  result.train_size = n_train;
  result.val_size = n_val;
  net::AdamState adam = net::AdamState::ForSize(params.size());
  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;
  result.params = params;

  for (int epoch = 1; epoch <= opts.max_epochs; ++epoch) {
    const std::vector<int> perm = Permutation(n_train, shuffle_rng);
    for (int start = 0; start < n_train; start += opts.batch_size) {
      const int end = std::min(n_train, start + opts.batch_size);
      const Eigen::MatrixXd xb = Columns(x_train, perm, start, end);
      const Eigen::MatrixXd yb = Columns(y_train, perm, start, end);
      net::MlpCache cache;
      const Eigen::MatrixXd out = net::Forward(params, xb, &cache);
      const Eigen::MatrixXd d_out =
          (out - yb) * (2.0 / static_cast<double>(out.size()));
      net::AdamStep(params, net::Backward(params, cache, d_out), adam, opts.lr);
    }
    const double train_loss = BcLoss(params, x_train, y_train);
    const double val_loss = n_val > 0 ? BcLoss(params, x_val, y_val) : train_loss;
    if (!std::isfinite(train_loss)) {
      throw TrainingFault("behavioral cloning diverged at epoch " +
                          std::to_string(epoch));
    }
    result.train_curve.push_back(train_loss);
    result.val_curve.push_back(val_loss);
    result.epochs = epoch;
    if (val_loss < best) {
      best = val_loss;
      since_best = 0;
      result.params = params;
      result.best_epoch = epoch;
      result.train_loss = train_loss;
      result.val_loss = val_loss;
    } else if (++since_best >= opts.patience) {
      break;
    }
  }
  return result;
}

BcResult BcTrain(const DemoLog& log, const BcOptions& opts) {
  const int n = static_cast<int>(log.records.size());
  if (n == 0) throw InputError("demo log has no transitions");
  Eigen::MatrixXd x(log.header.obs_dim, n);
  Eigen::MatrixXd y(log.header.act_dim, n);
  for (int i = 0; i < n; ++i) {
    x.col(i) = log.records[i].obs;
    y.col(i) = log.records[i].a_h;
  }
  return BcTrain(x, y, opts);
}

}  // namespace sa::pilots
