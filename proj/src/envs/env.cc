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

#include "sa/envs/env.h"

#include <utility>

#include "sa/common/errors.h"

namespace sa::envs {

Env::Env(EnvId id, EnvConfig cfg) : id_(id), cfg_(std::move(cfg)) {
  cfg_.Validate();
  Reset(0);
}

Observation Env::Reset(uint64_t seed) {
  rng_ = Rng(seed);
  done_ = false;
  if (id_ == EnvId::kDrone) {
    state_ = DroneReset(cfg_, rng_);
  } else {
    state_ = LanderReset(id_, cfg_, rng_);
  }
  return Observe(false);
}

StepResult Env::Step(const Action& a) {
  if (a.size() != action_dim()) {
    throw ShapeError("action dim " + std::to_string(a.size()) + " != " +
                     std::to_string(action_dim()));
  }
  StepResult res;
  if (auto* lander = std::get_if<LanderState>(&state_)) {
    res = LanderStep(*lander, a, cfg_, id_);
  } else {
    res = DroneStep(std::get<DroneState>(state_), a, cfg_, rng_);
  }
  done_ = res.done;
  return res;
}

Observation Env::Observe(bool for_pilot) const {
  return envs::Observe(state_, id_, for_pilot, cfg_);
}

int Env::t() const {
  return std::visit([](const auto& s) { return s.t; }, state_);
}

std::vector<double> Env::StateVector() const {
  if (const auto* l = std::get_if<LanderState>(&state_)) {
    return {l->x,       l->y,
            l->vx,      l->vy,
            l->theta,   l->omega,
            l->leg_left ? 1.0 : 0.0, l->leg_right ? 1.0 : 0.0,
            l->goal_x,  l->goal_y,
            l->idle_time, static_cast<double>(l->t)};
  }
  const auto& d = std::get<DroneState>(state_);
  std::vector<double> out;
  for (const auto* v : {&d.p, &d.rpy, &d.v, &d.w, &d.goal}) {
    out.insert(out.end(), v->data(), v->data() + 3);
  }
  out.push_back(static_cast<double>(d.t));
  return out;
}

Observation Observe(const EnvState& state, EnvId id, bool for_pilot,
                    const EnvConfig& cfg) {
  if (const auto* l = std::get_if<LanderState>(&state)) {
    return LanderObserve(*l, id, for_pilot);
  }
  return DroneObserve(std::get<DroneState>(state), cfg);
}

}  // namespace sa::envs
