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

#include "sa/server/session.h"

#include <cmath>
#include <utility>

#include "json.hpp"
#include "sa/common/errors.h"
#include "sa/copilot/residual.h"

namespace sa::server {
namespace {

using nlohmann::json;

json VectorJson(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json Vector3Json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

std::string ErrorMessage(const std::string& detail) {
  json j;
  j["type"] = "error";
  j["detail"] = detail;
  return j.dump();
}

json Render(const envs::Env& env, const envs::Action& a) {
  json r;
  if (const auto* s = std::get_if<envs::LanderState>(&env.state())) {
    r["kind"] = "lander";
    r["x"] = s->x;
    r["y"] = s->y;
    r["theta"] = s->theta;
    r["leg_left"] = s->leg_left;
    r["leg_right"] = s->leg_right;
    r["goal"] = json::array({s->goal_x, s->goal_y});
    r["pad_half_width"] = env.config().pad_half_width;
    r["thrust"] = std::max(0.0, a[0]);
    r["torque"] = a[1];
  } else {
    const auto& d = std::get<envs::DroneState>(env.state());
    r["kind"] = "drone";
    r["p"] = Vector3Json(d.p);
    r["rpy"] = Vector3Json(d.rpy);
    r["goal"] = Vector3Json(d.goal);
    r["target_radius"] = env.config().drone_target_radius;
    r["thrust"] = a[0];
  }
  return r;
}

}  // namespace

std::string CopilotSlotName(CopilotSlot slot) {
  switch (slot) {
    case CopilotSlot::kNone:
      return "none";
    case CopilotSlot::kLearned:
      return "learned";
    case CopilotSlot::kPlacebo:
      return "placebo";
  }
  return "?";
}

Session::Session(std::string id, uint64_t index,
                 std::shared_ptr<const SessionResources> resources)
    : id_(std::move(id)), index_(index), resources_(std::move(resources)) {
  if (!resources_) throw ConfigError("session needs resources");
  Rng rng(DeriveSeed(resources_->blind_seed, index_));
  label_a_learned_ = rng.Bernoulli(0.5);
}

CopilotSlot Session::SlotForLabel(const std::string& label) const {
  if (label == "A") return label_a_learned_ ? CopilotSlot::kLearned : CopilotSlot::kPlacebo;
  if (label == "B") return label_a_learned_ ? CopilotSlot::kPlacebo : CopilotSlot::kLearned;
  if (label == "none") return CopilotSlot::kNone;
  throw InputError("copilot_label must be A, B or none");
}

std::vector<std::string> Session::HandleMessage(const std::string& text) {
  json msg;
  try {
    msg = json::parse(text);
  } catch (const json::exception&) {
    return {ErrorMessage("message is not valid JSON")};
  }
  if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
    return {ErrorMessage("message needs a string field 'type'")};
  }
  const std::string type = msg["type"].get<std::string>();
  try {
    if (type == "start") {
      if (!msg.contains("env") || !msg["env"].is_string()) {
        return {ErrorMessage("start needs a string field 'env'")};
      }
      const std::string label = msg.value("copilot_label", std::string("none"));
      const uint64_t seed = msg.value("seed", uint64_t{0});
      const bool record = msg.value("record", false);
      return Start(msg["env"].get<std::string>(), label, seed, record);
    }
    if (type == "input") {
      if (!env_) return {ErrorMessage("input before start")};
      if (!msg.contains("a") || !msg["a"].is_array()) {
        return {ErrorMessage("input needs an array field 'a'")};
      }
      const json& a = msg["a"];
      if (static_cast<int>(a.size()) != env_->action_dim()) {
        return {ErrorMessage("input has wrong action dim")};
      }
      envs::Action v(env_->action_dim());
      for (size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_number()) return {ErrorMessage("input action is not numeric")};
        v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
      }
      if (!v.allFinite()) return {ErrorMessage("input action is not finite")};
      latest_input_ = envs::ClampAction(v);
      has_input_ = true;
      ticks_since_input_ = 0;
      return {};
    }
    if (type == "stop") {
      if (!running_) return {ErrorMessage("no episode is running")};
      return Stop();
    }
  } catch (const json::exception& e) {
    return {ErrorMessage(std::string("malformed message: ") + e.what())};
  } catch (const Error& e) {
    return {ErrorMessage(e.what())};
  }
  return {ErrorMessage("unknown message type '" + type + "'")};
}

std::vector<std::string> Session::Start(const std::string& env_name,
                                        const std::string& label, uint64_t seed,
                                        bool record) {
  if (running_) return {ErrorMessage("an episode is already running; send stop first")};
  const envs::EnvId id = envs::ParseEnvId(env_name);
  const CopilotSlot slot = SlotForLabel(label);
  std::shared_ptr<const copilot::Copilot> learned;
  if (slot == CopilotSlot::kLearned) {
    auto it = resources_->copilots.find(id);
    if (it == resources_->copilots.end()) {
      return {ErrorMessage("no copilot is loaded for env " + env_name)};
    }
    learned = it->second;
  }

  env_.emplace(id, resources_->env_cfg);
  env_->Reset(seed);
  copilot_ = learned;
  slot_ = slot;
  label_ = label;
  seed_ = seed;
  running_ = true;
  ++episodes_;
  return_general_ = 0.0;
  latest_input_ = envs::Action::Zero(env_->action_dim());
  has_input_ = false;
  ticks_since_input_ = 0;
  blinding_.push_back({id_, label, slot});

  recorder_.reset();
  record_error_.clear();
  std::string record_path;
  if (record) {
    record_path = resources_->record_dir + "/" + id_ + "-ep" +
                  std::to_string(episodes_) + ".jsonl";
    pilots::DemoHeader header;
    header.env = env_name;
    header.obs_dim = env_->observation_dim(true);
    header.act_dim = env_->action_dim();
    header.meta = {{"session", id_}, {"seed", std::to_string(seed)},
                   {"copilot_label", label}, {"source", "session"},
                   {"config_hash", resources_->config_hash}};
    try {
      recorder_ = std::make_unique<pilots::DemoLogWriter>(record_path, header);
    } catch (const Error& e) {
      record_error_ = e.what();
      record_path.clear();
    }
  }

  json ack;
  ack["type"] = "start_ack";
  ack["protocol_version"] = kProtocolVersion;
  ack["session"] = id_;
  ack["env"] = env_name;
  ack["copilot_label"] = label;
  ack["seed"] = seed;
  ack["obs_dim"] = env_->observation_dim(true);
  ack["act_dim"] = env_->action_dim();
  ack["dt"] = env_->config().dt;
  ack["recording"] = recorder_ != nullptr;
  std::vector<std::string> out = {ack.dump()};
  if (!record_error_.empty()) out.push_back(ErrorMessage("recording disabled: " + record_error_));
  const envs::Action zero = envs::Action::Zero(env_->action_dim());
  out.push_back(StateFrame(zero, zero, 0.0));
  return out;
}

std::vector<std::string> Session::Stop() {
  running_ = false;
  CloseRecording();
  return {EpisodeEnd(envs::Outcome::kTimeout, /*aborted=*/true)};
}

std::vector<std::string> Session::Tick() {
  if (!running_) return {};
  const int dim = env_->action_dim();
  const bool fresh = has_input_ && static_cast<double>(ticks_since_input_) * dt() <=
                                       resources_->stale_after_s + 1e-12;
  const envs::Action a_h = fresh ? latest_input_ : envs::Action::Zero(dim);
  ++ticks_since_input_;
  envs::Action a_r = envs::Action::Zero(dim);
  if (copilot_) a_r = copilot_->Residual(env_->Observe(false), a_h);

  const envs::Observation pilot_obs = env_->Observe(true);
  const int t = env_->t();
  envs::StepResult res;
  try {
    res = env_->Step(copilot::CombineActions(a_h, a_r));
  } catch (const SimulationFault& e) {
    running_ = false;
    CloseRecording();
    json end;
    end["type"] = "episode_end";
    end["outcome"] = "error";
    end["return_general"] = return_general_;
    end["steps"] = t;
    end["aborted"] = true;
    end["episode"] = episodes_;
    return {ErrorMessage(std::string("simulation fault: ") + e.what()), end.dump()};
  }
  return_general_ += res.r_general;

  std::vector<std::string> out;
  if (recorder_) {
    pilots::DemoRecord r;
    r.episode = episodes_;
    r.t = t;
    r.seed = seed_;
    r.obs = pilot_obs;
    r.a_h = a_h;
    r.a_r = a_r;
    r.reward = res.r_general;
    r.done = res.done;
    r.outcome = res.outcome;
    try {
      recorder_->Append(r);
    } catch (const Error& e) {
      recorder_.reset();
      out.push_back(ErrorMessage(std::string("recording stopped: ") + e.what()));
    }
  }
  out.push_back(StateFrame(a_h, a_r, res.r_general));
  if (res.done) {
    running_ = false;
    CloseRecording();
    out.push_back(EpisodeEnd(res.outcome, /*aborted=*/false));
  }
  return out;
}

std::string Session::StateFrame(const envs::Action& a_h, const envs::Action& a_r,
                                double reward) const {
  json f;
  f["type"] = "state";
  f["t"] = env_->t();
  f["obs"] = VectorJson(env_->Observe(true));
  f["render"] = Render(*env_, copilot::CombineActions(a_h, a_r));
  f["a_h"] = VectorJson(a_h);
  f["a_r"] = VectorJson(a_r);
  f["reward"] = reward;
  return f.dump();
}

std::string Session::EpisodeEnd(envs::Outcome outcome, bool aborted) const {
  json j;
  j["type"] = "episode_end";
  j["outcome"] = envs::OutcomeName(outcome);
  j["return_general"] = return_general_;
  j["steps"] = env_->t();
  j["aborted"] = aborted;
  j["episode"] = episodes_;
  return j.dump();
}

void Session::CloseRecording() {
  if (!recorder_) return;
  try {
    recorder_->Flush();
  } catch (const Error&) {
  }
  recorder_.reset();
}

}  // namespace sa::server
