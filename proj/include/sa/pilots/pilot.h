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

#ifndef SA_PILOTS_PILOT_H_
#define SA_PILOTS_PILOT_H_

#include <cstdint>
#include <memory>
#include <vector>

#include "sa/common/rng.h"
#include "sa/envs/types.h"
#include "sa/net/actor_critic.h"
#include "sa/net/mlp.h"

namespace sa::pilots {

// Seed handed to a pilot's Reset for an episode whose env was reset with
// `episode_seed`. Training and evaluation share it.
uint64_t PilotEpisodeSeed(uint64_t episode_seed);

// A surrogate human. Acts on the goal-aware pilot observation and always
// returns an action inside [-1, 1]^dim. One instance per env instance.
class Pilot {
 public:
  virtual ~Pilot() = default;

  // Start of an episode. Reseeds any internal randomness from `seed` and
  // drops per-episode memory.
  virtual void Reset(uint64_t seed) = 0;
  virtual envs::Action Act(const envs::Observation& pilot_obs) = 0;
  virtual int action_dim() const = 0;
  virtual std::unique_ptr<Pilot> Clone() const = 0;
};

// Deterministic mean action of a PPO-trained actor-critic.
class ExpertPilot : public Pilot {
 public:
  explicit ExpertPilot(net::ActorCritic policy);

  void Reset(uint64_t) override {}
  envs::Action Act(const envs::Observation& pilot_obs) override;
  int action_dim() const override { return policy_.act_dim(); }
  std::unique_ptr<Pilot> Clone() const override;

 private:
  net::ActorCritic policy_;
};

// Behavior-cloned network; its linear output is clamped to the action box.
class ImitationPilot : public Pilot {
 public:
  explicit ImitationPilot(net::MlpParams params);

  void Reset(uint64_t) override {}
  envs::Action Act(const envs::Observation& pilot_obs) override;
  int action_dim() const override { return params_.output_dim(); }
  std::unique_ptr<Pilot> Clone() const override;

 private:
  net::MlpParams params_;
};

// Emits the all-zero action.
class ZeroPilot : public Pilot {
 public:
  explicit ZeroPilot(int action_dim) : dim_(action_dim) {}

  void Reset(uint64_t) override {}
  envs::Action Act(const envs::Observation&) override {
    return envs::Action::Zero(dim_);
  }
  int action_dim() const override { return dim_; }
  std::unique_ptr<Pilot> Clone() const override {
    return std::make_unique<ZeroPilot>(dim_);
  }

 private:
  int dim_;
};

// Repeats its previously emitted action with probability repeat_p, else
// emits the base action. The first step of an episode always queries base.
class LaggyPilot : public Pilot {
 public:
  LaggyPilot(std::unique_ptr<Pilot> base, double repeat_p, uint64_t seed = 0);

  void Reset(uint64_t seed) override;
  envs::Action Act(const envs::Observation& pilot_obs) override;
  int action_dim() const override { return base_->action_dim(); }
  std::unique_ptr<Pilot> Clone() const override;

  int64_t steps() const { return steps_; }
  int64_t repeats() const { return repeats_; }

 private:
  std::unique_ptr<Pilot> base_;
  double repeat_p_;
  Rng rng_;
  envs::Action prev_;
  bool has_prev_ = false;
  int64_t steps_ = 0;
  int64_t repeats_ = 0;
};

// Emits U[-1, 1]^dim with probability noise_p, else the base action.
class NoisyPilot : public Pilot {
 public:
  NoisyPilot(std::unique_ptr<Pilot> base, double noise_p, uint64_t seed = 0);

  void Reset(uint64_t seed) override;
  envs::Action Act(const envs::Observation& pilot_obs) override;
  int action_dim() const override { return base_->action_dim(); }
  std::unique_ptr<Pilot> Clone() const override;

  int64_t steps() const { return steps_; }
  int64_t noisy_steps() const { return noisy_; }

 private:
  std::unique_ptr<Pilot> base_;
  double noise_p_;
  Rng rng_;
  int64_t steps_ = 0;
  int64_t noisy_ = 0;
};

// Acts as one current member; before every step the member is redrawn
// uniformly (with replacement) with probability switch_p. The current member
// survives episode resets.
class MixturePilot : public Pilot {
 public:
  MixturePilot(std::vector<std::unique_ptr<Pilot>> members, double switch_p,
               uint64_t seed = 0);

  void Reset(uint64_t seed) override;
  envs::Action Act(const envs::Observation& pilot_obs) override;
  int action_dim() const override { return members_.front()->action_dim(); }
  std::unique_ptr<Pilot> Clone() const override;

  int current() const { return current_; }
  int64_t switches() const { return switches_; }

 private:
  std::vector<std::unique_ptr<Pilot>> members_;
  double switch_p_;
  Rng rng_;
  int current_ = 0;
  int64_t switches_ = 0;
};

}  // namespace sa::pilots

#endif  // SA_PILOTS_PILOT_H_
