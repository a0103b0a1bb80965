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

#ifndef SA_SERVER_SESSION_H_
#define SA_SERVER_SESSION_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sa/copilot/trainer.h"
#include "sa/envs/env.h"
#include "sa/pilots/demo_log.h"

namespace sa::server {

inline constexpr int kProtocolVersion = 1;

enum class CopilotSlot { kNone, kLearned, kPlacebo };
std::string CopilotSlotName(CopilotSlot slot);

// Read-only data shared by every session.
struct SessionResources {
  envs::EnvConfig env_cfg;
  std::map<envs::EnvId, std::shared_ptr<const copilot::Copilot>> copilots;
  // Demo logs are written here when a client asks for recording.
  std::string record_dir = ".";
  // Seeds the per-session blinding permutation.
  uint64_t blind_seed = 0;
  // Client input older than this is replaced by the zero action.
  double stale_after_s = 0.25;
  // Provenance written into recorded demo logs.
  std::string config_hash;
};

// Server-side record of which blinded label maps to which copilot.
struct BlindingEntry {
  std::string session;
  std::string label;
  CopilotSlot slot;
};

// One human-in-the-loop session: protocol handling, the fixed-tick
// simulation step and optional recording. Not thread-safe; the transport
// serializes calls.
class Session {
 public:
  Session(std::string id, uint64_t index,
          std::shared_ptr<const SessionResources> resources);

  // Parses one client message and returns the messages to send back.
  // Malformed input yields a single error reply and leaves the session
  // untouched.
  std::vector<std::string> HandleMessage(const std::string& text);

  // Advances the simulation by one step when an episode is running and
  // returns the resulting state frame, followed by episode_end when the
  // episode finished.
  std::vector<std::string> Tick();

  bool running() const { return running_; }
  double dt() const { return resources_->env_cfg.dt; }
  const std::string& id() const { return id_; }
  int64_t episodes() const { return episodes_; }

  // Label to slot mapping of this session, for server-side logs only.
  CopilotSlot SlotForLabel(const std::string& label) const;
  // Blinding decisions taken so far.
  const std::vector<BlindingEntry>& blinding_log() const { return blinding_; }

 private:
  std::vector<std::string> Start(const std::string& env, const std::string& label,
                                 uint64_t seed, bool record);
  std::vector<std::string> Stop();
  std::string StateFrame(const envs::Action& a_h, const envs::Action& a_r,
                         double reward) const;
  std::string EpisodeEnd(envs::Outcome outcome, bool aborted) const;
  void CloseRecording();

  std::string id_;
  uint64_t index_;
  std::shared_ptr<const SessionResources> resources_;
  std::vector<BlindingEntry> blinding_;
  bool label_a_learned_;

  std::optional<envs::Env> env_;
  std::shared_ptr<const copilot::Copilot> copilot_;
  CopilotSlot slot_ = CopilotSlot::kNone;
  std::string label_;
  bool running_ = false;
  uint64_t seed_ = 0;
  int64_t episodes_ = 0;
  double return_general_ = 0.0;

  envs::Action latest_input_;
  bool has_input_ = false;
  int64_t ticks_since_input_ = 0;

  std::unique_ptr<pilots::DemoLogWriter> recorder_;
  std::string record_error_;
};

}  // namespace sa::server

#endif  // SA_SERVER_SESSION_H_
