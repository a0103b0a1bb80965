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

#include "sa/pilots/pilot.h"

#include <utility>

#include "sa/common/errors.h"

namespace sa::pilots {
namespace {

void CheckProbability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ConfigError(std::string(what) + " must lie in [0, 1]");
  }
}

// Wrappers draw from their own stream and hand the episode seed to the base
// untouched, so a zero-probability wrapper reproduces the base exactly.
constexpr uint64_t kLaggySalt = 0x6c616767;
constexpr uint64_t kNoisySalt = 0x6e6f6973;

void CheckBase(const std::unique_ptr<Pilot>& base) {
  if (!base) throw ConfigError("handicap wrapper needs a base pilot");
}

}  // namespace

uint64_t PilotEpisodeSeed(uint64_t episode_seed) {
  return DeriveSeed(episode_seed, 0x70696c6f74);
}

ExpertPilot::ExpertPilot(net::ActorCritic policy) : policy_(std::move(policy)) {}

envs::Action ExpertPilot::Act(const envs::Observation& pilot_obs) {
  return envs::ClampAction(policy_.Policy(pilot_obs).mean);
}

std::unique_ptr<Pilot> ExpertPilot::Clone() const {
  return std::make_unique<ExpertPilot>(policy_);
}

ImitationPilot::ImitationPilot(net::MlpParams params)
    : params_(std::move(params)) {
  if (params_.extra() != 0) throw ConfigError("imitation net has no extras");
}

envs::Action ImitationPilot::Act(const envs::Observation& pilot_obs) {
  return envs::ClampAction(net::Forward(params_, pilot_obs).col(0));
}

std::unique_ptr<Pilot> ImitationPilot::Clone() const {
  return std::make_unique<ImitationPilot>(params_);
}

LaggyPilot::LaggyPilot(std::unique_ptr<Pilot> base, double repeat_p,
                       uint64_t seed)
    : base_(std::move(base)),
      repeat_p_(repeat_p),
      rng_(DeriveSeed(seed, kLaggySalt)) {
  CheckBase(base_);
  CheckProbability(repeat_p_, "repeat_p");
}

void LaggyPilot::Reset(uint64_t seed) {
  rng_ = Rng(DeriveSeed(seed, kLaggySalt));
  has_prev_ = false;
  base_->Reset(seed);
}

envs::Action LaggyPilot::Act(const envs::Observation& pilot_obs) {
  ++steps_;
  const bool repeat = rng_.Bernoulli(repeat_p_);
  if (has_prev_ && repeat) {
    ++repeats_;
    return prev_;
  }
  prev_ = base_->Act(pilot_obs);
  has_prev_ = true;
  return prev_;
}

std::unique_ptr<Pilot> LaggyPilot::Clone() const {
  auto p = std::make_unique<LaggyPilot>(base_->Clone(), repeat_p_);
  p->rng_ = rng_;
  p->prev_ = prev_;
  p->has_prev_ = has_prev_;
  return p;
}

NoisyPilot::NoisyPilot(std::unique_ptr<Pilot> base, double noise_p,
                       uint64_t seed)
    : base_(std::move(base)),
      noise_p_(noise_p),
      rng_(DeriveSeed(seed, kNoisySalt)) {
  CheckBase(base_);
  CheckProbability(noise_p_, "noise_p");
}

void NoisyPilot::Reset(uint64_t seed) {
  rng_ = Rng(DeriveSeed(seed, kNoisySalt));
  base_->Reset(seed);
}

envs::Action NoisyPilot::Act(const envs::Observation& pilot_obs) {
  ++steps_;
  // The base is queried every step so its own state advances uniformly.
  const envs::Action base = base_->Act(pilot_obs);
  if (rng_.Bernoulli(noise_p_)) {
    ++noisy_;
    envs::Action a(base.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = rng_.Uniform(-1.0, 1.0);
    return a;
  }
  return base;
}

std::unique_ptr<Pilot> NoisyPilot::Clone() const {
  auto p = std::make_unique<NoisyPilot>(base_->Clone(), noise_p_);
  p->rng_ = rng_;
  return p;
}

MixturePilot::MixturePilot(std::vector<std::unique_ptr<Pilot>> members,
                           double switch_p, uint64_t seed)
    : members_(std::move(members)), switch_p_(switch_p), rng_(seed) {
  if (members_.empty()) throw InputError("mixture needs at least one member");
  for (const auto& m : members_) {
    if (!m) throw InputError("mixture member is null");
    if (m->action_dim() != members_.front()->action_dim()) {
      throw ShapeError("mixture members disagree on action dim");
    }
  }
  CheckProbability(switch_p_, "switch_p");
  current_ = static_cast<int>(rng_.Below(members_.size()));
}

void MixturePilot::Reset(uint64_t seed) {
  rng_ = Rng(seed);
  current_ = static_cast<int>(rng_.Below(members_.size()));
  for (size_t i = 0; i < members_.size(); ++i) {
    members_[i]->Reset(DeriveSeed(seed, i + 1));
  }
}

envs::Action MixturePilot::Act(const envs::Observation& pilot_obs) {
  if (rng_.Bernoulli(switch_p_)) {
    ++switches_;
    current_ = static_cast<int>(rng_.Below(members_.size()));
  }
  return members_[current_]->Act(pilot_obs);
}

std::unique_ptr<Pilot> MixturePilot::Clone() const {
  std::vector<std::unique_ptr<Pilot>> members;
  for (const auto& m : members_) members.push_back(m->Clone());
  auto p = std::make_unique<MixturePilot>(std::move(members), switch_p_);
  p->rng_ = rng_;
  p->current_ = current_;
  return p;
}

}  // namespace sa::pilots
