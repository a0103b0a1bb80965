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

#include "sa/net/mlp.h"

#include <atomic>
#include <string>
#include <utility>

#include <Eigen/QR>

#include "sa/common/errors.h"

namespace sa::net {
namespace {

uint64_t NextVersion() {
  static std::atomic<uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

// Orthogonal rows x cols matrix from the QR of a Gaussian matrix.
Eigen::MatrixXd RandomOrthogonal(int rows, int cols, Rng& rng) {
  const int n = std::max(rows, cols);
  const int m = std::min(rows, cols);
  Eigen::MatrixXd g(n, m);
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = rng.Normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, m);
  // Sign fix so the distribution is uniform over the orthogonal group.
  const Eigen::MatrixXd r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
  for (int j = 0; j < m; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  if (rows >= cols) return q;
  return q.transpose();
}

}  // namespace

MlpParams::MlpParams(std::vector<int> layer_dims, int extra)
    : dims_(std::move(layer_dims)), extra_(extra) {
  if (dims_.size() < 2) throw ShapeError("an MLP needs at least two layer dims");
  for (int d : dims_) {
    if (d <= 0) throw ShapeError("layer dims must be positive");
  }
  if (extra_ < 0) throw ShapeError("extra parameter count must be >= 0");
  Eigen::Index off = 0;
  for (size_t l = 0; l + 1 < dims_.size(); ++l) {
    offsets_.push_back(off);
    off += static_cast<Eigen::Index>(dims_[l + 1]) * (dims_[l] + 1);
  }
  flat_ = Eigen::VectorXd::Zero(off + extra_);
  version_ = NextVersion();
}

Eigen::VectorXd& MlpParams::mutable_flat() {
  version_ = NextVersion();
  return flat_;
}

Eigen::Map<const Eigen::MatrixXd> MlpParams::weight(int layer) const {
  return {flat_.data() + offsets_[layer], dims_[layer + 1], dims_[layer]};
}

Eigen::Map<const Eigen::VectorXd> MlpParams::bias(int layer) const {
  return {flat_.data() + bias_offset(layer), dims_[layer + 1]};
}

Eigen::Map<Eigen::MatrixXd> MlpParams::mutable_weight(int layer) {
  version_ = NextVersion();
  return {flat_.data() + offsets_[layer], dims_[layer + 1], dims_[layer]};
}

Eigen::Map<Eigen::VectorXd> MlpParams::mutable_bias(int layer) {
  version_ = NextVersion();
  return {flat_.data() + bias_offset(layer), dims_[layer + 1]};
}

Eigen::MatrixXd Forward(const MlpParams& params, const Eigen::MatrixXd& x,
                        MlpCache* cache) {
  if (x.rows() != params.input_dim()) {
    throw ShapeError("MLP input has " + std::to_string(x.rows()) +
                     " rows, expected " + std::to_string(params.input_dim()));
  }
  if (cache != nullptr) {
    cache->version = params.version();
    cache->layer_dims = params.layer_dims();
    cache->layer_inputs.clear();
    cache->layer_inputs.reserve(params.num_layers());
  }
  Eigen::MatrixXd h = x;
  for (int l = 0; l < params.num_layers(); ++l) {
    Eigen::MatrixXd z = params.weight(l) * h;
    z.colwise() += params.bias(l);
    if (cache != nullptr) cache->layer_inputs.push_back(std::move(h));
    if (l + 1 < params.num_layers()) {
      h = z.array().tanh().matrix();
    } else {
      h = std::move(z);
    }
  }
  return h;
}

Eigen::VectorXd Backward(const MlpParams& params, const MlpCache& cache,
                         const Eigen::MatrixXd& d_out) {
  if (cache.version != params.version() ||
      cache.layer_dims != params.layer_dims() ||
      static_cast<int>(cache.layer_inputs.size()) != params.num_layers()) {
    throw InvalidStateError("MLP cache is stale or from another network");
  }
  const Eigen::Index batch = cache.layer_inputs.front().cols();
  if (d_out.rows() != params.output_dim() || d_out.cols() != batch) {
    throw ShapeError("MLP output gradient has the wrong shape");
  }
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(params.size());
  Eigen::MatrixXd delta = d_out;
  for (int l = params.num_layers() - 1; l >= 0; --l) {
    const Eigen::MatrixXd& in = cache.layer_inputs[l];
    const int rows = params.layer_dims()[l + 1];
    const int cols = params.layer_dims()[l];
    Eigen::Map<Eigen::MatrixXd>(grad.data() + params.weight_offset(l), rows,
                                cols)
        .noalias() = delta * in.transpose();
    grad.segment(params.bias_offset(l), rows) = delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = params.weight(l).transpose() * delta;
      // `in` is tanh(z) of the previous layer: d tanh = 1 - tanh^2.
      delta = back.array() * (1.0 - in.array().square());
    }
  }
  return grad;
}

void InitOrthogonal(MlpParams& params, Rng& rng, double hidden_gain,
                    const std::vector<double>& output_row_gains) {
  const int last = params.num_layers() - 1;
  if (static_cast<int>(output_row_gains.size()) != params.output_dim()) {
    throw ShapeError("one output gain per output row is required");
  }
  for (int l = 0; l <= last; ++l) {
    const int rows = params.layer_dims()[l + 1];
    const int cols = params.layer_dims()[l];
    Eigen::MatrixXd w = RandomOrthogonal(rows, cols, rng);
    if (l < last) {
      w *= hidden_gain;
    } else {
      for (int i = 0; i < rows; ++i) w.row(i) *= output_row_gains[i];
    }
    params.mutable_weight(l) = w;
    params.mutable_bias(l).setZero();
  }
}

}  // namespace sa::net
