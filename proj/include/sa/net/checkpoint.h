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

#ifndef SA_NET_CHECKPOINT_H_
#define SA_NET_CHECKPOINT_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "sa/net/adam.h"
#include "sa/net/mlp.h"

namespace sa::net {

inline constexpr uint32_t kCheckpointVersion = 1;

// Lagrange multiplier state stored with copilot checkpoints.
struct LagrangeExtras {
  double lambda_raw = 0.0;
  double threshold = 0.0;
};

// On-disk network plus metadata. See docs/checkpoint_format.md for the byte
// layout. Kind "copilot" must carry `lagrange`; "pilot" and "bc" must not.
struct Checkpoint {
  std::string kind;
  std::string activation = "tanh";
  MlpParams params;
  std::optional<LagrangeExtras> lagrange;
  std::optional<AdamState> adam;
  // Free-form provenance: env, seed, config_hash, obs_dim, act_dim, ...
  std::map<std::string, std::string> meta;
};

// Throws ConfigError on a kind/extras mismatch and LoadError when the file
// cannot be written.
void SaveCheckpoint(const std::string& path, const Checkpoint& ckpt);

// Throws VersionError for an unknown format version and LoadError for a
// missing, truncated or corrupt file.
Checkpoint LoadCheckpoint(const std::string& path);

std::string SerializeCheckpoint(const Checkpoint& ckpt);
Checkpoint ParseCheckpoint(const std::string& bytes);

}  // namespace sa::net

#endif  // SA_NET_CHECKPOINT_H_
