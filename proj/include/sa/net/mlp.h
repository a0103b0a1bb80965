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

#ifndef SA_NET_MLP_H_
#define SA_NET_MLP_H_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "sa/common/rng.h"

namespace sa::net {

// Parameters of a dense tanh network stored in one flat vector.
//
// Layout: for each layer l, W_l (dims[l+1] x dims[l], column major) then
// b_l (dims[l+1]); after the last layer come `extra` free parameters (the
// state-independent log standard deviation of a policy, for example).
//
// Every mutation through mutable_flat() stamps a new version so caches from
// an earlier forward pass are detected as stale.
class MlpParams {
 public:
  MlpParams() = default;
  MlpParams(std::vector<int> layer_dims, int extra = 0);

  const std::vector<int>& layer_dims() const { return dims_; }
  int num_layers() const { return static_cast<int>(dims_.size()) - 1; }
  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }
  int extra() const { return extra_; }
  Eigen::Index size() const { return flat_.size(); }
  // Offset of the extra block inside flat().
  Eigen::Index extra_offset() const { return flat_.size() - extra_; }

  const Eigen::VectorXd& flat() const { return flat_; }
  Eigen::VectorXd& mutable_flat();
  uint64_t version() const { return version_; }

  Eigen::Map<const Eigen::MatrixXd> weight(int layer) const;
  Eigen::Map<const Eigen::VectorXd> bias(int layer) const;
  Eigen::Map<Eigen::MatrixXd> mutable_weight(int layer);
  Eigen::Map<Eigen::VectorXd> mutable_bias(int layer);
  Eigen::Index weight_offset(int layer) const { return offsets_[layer]; }
  Eigen::Index bias_offset(int layer) const {
    return offsets_[layer] + static_cast<Eigen::Index>(dims_[layer + 1]) * dims_[layer];
  }
  auto extra_params() const { return flat_.tail(extra_); }

 private:
  std::vector<int> dims_;
  int extra_ = 0;
  std::vector<Eigen::Index> offsets_;
  Eigen::VectorXd flat_;
  uint64_t version_ = 0;
};

// Activations recorded by Forward for the matching Backward.
struct MlpCache {
  uint64_t version = 0;
  std::vector<int> layer_dims;
  // layer_inputs[l] is the input of layer l (columns are batch items).
  std::vector<Eigen::MatrixXd> layer_inputs;
};

// Batched forward pass; columns of `x` are inputs. Hidden layers use tanh,
// the output layer is linear. Throws ShapeError on dimension mismatch.
Eigen::MatrixXd Forward(const MlpParams& params, const Eigen::MatrixXd& x,
                        MlpCache* cache = nullptr);

// Gradient of sum_ij d_out(i, j) * out(i, j) with respect to every flat
// parameter; the extra block is left at zero. Throws InvalidStateError when
// `cache` was produced for a different parameter version.
Eigen::VectorXd Backward(const MlpParams& params, const MlpCache& cache,
                         const Eigen::MatrixXd& d_out);

// Orthogonal initialization: hidden layers get gain `hidden_gain`, output
// row i gets gain output_row_gains[i]; biases are zero, extras untouched.
void InitOrthogonal(MlpParams& params, Rng& rng, double hidden_gain,
                    const std::vector<double>& output_row_gains);

}  // namespace sa::net

#endif  // SA_NET_MLP_H_
