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

#include <gtest/gtest.h>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

#include "json.hpp"
#include "sa/common/errors.h"
#include "sa/common/rng.h"
#include "sa/copilot/trainer.h"
#include "sa/eval/replay.h"
#include "sa/pilots/demo_log.h"
#include "sa/server/server.h"
#include "sa/server/session.h"

namespace sa::server {
namespace {

using json = nlohmann::json;

std::shared_ptr<const copilot::Copilot> RandomCopilot(uint64_t seed) {
  Rng rng(seed);
  net::ActorCritic::Options o;
  o.hidden = {16};
  o.policy_gain = 1.0;
  o.init_log_std = -1.0;
  net::ActorCritic ac(copilot::CopilotInputDim(envs::EnvId::kLander), 2, o, rng);
  return std::make_shared<const copilot::Copilot>(std::move(ac), envs::EnvId::kLander);
}

std::shared_ptr<SessionResources> Resources(uint64_t blind_seed = 1) {
  auto r = std::make_shared<SessionResources>();
  r->copilots[envs::EnvId::kLander] = RandomCopilot(5);
  r->blind_seed = blind_seed;
  r->record_dir = std::filesystem::temp_directory_path().string();
  r->config_hash = "feedbeef";
  return r;
}

json One(const std::vector<std::string>& msgs, size_t i = 0) {
  EXPECT_GT(msgs.size(), i);
  return json::parse(msgs.at(i));
}

std::string StartMsg(const std::string& label, uint64_t seed, bool record = false,
                     const std::string& env = "lander") {
  return json{{"type", "start"}, {"env", env}, {"copilot_label", label}, {"seed", seed},
              {"record", record}}
      .dump();
}

std::string InputMsg(double a0, double a1) {
  return json{{"type", "input"}, {"a", {a0, a1}}}.dump();
}

// Label whose slot is `slot` in this session.
std::string LabelFor(const Session& s, CopilotSlot slot) {
  return s.SlotForLabel("A") == slot ? "A" : "B";
}

TEST(SessionTest, MalformedMessagesYieldOneErrorAndNoStateChange) {
  Session s("s0", 0, Resources());
  for (const std::string bad :
       {"not json", "[]", "{\"kind\":\"start\"}", "{\"type\":\"dance\"}",
        "{\"type\":\"input\",\"a\":[0,0]}", "{\"type\":\"stop\"}", "{\"type\":\"start\"}",
        "{\"type\":\"start\",\"env\":\"submarine\"}"}) {
    const auto out = s.HandleMessage(bad);
    ASSERT_EQ(out.size(), 1u) << bad;
    EXPECT_EQ(One(out)["type"], "error") << bad;
    EXPECT_FALSE(s.running());
  }
  EXPECT_EQ(One(s.HandleMessage(StartMsg("C", 1)))["type"], "error");
  EXPECT_EQ(s.episodes(), 0);
  EXPECT_TRUE(s.blinding_log().empty());
}

TEST(SessionTest, StartAckThenInitialFrame) {
  Session s("s3", 3, Resources());
  const auto out = s.HandleMessage(StartMsg("none", 17));
  ASSERT_EQ(out.size(), 2u);
  const json ack = One(out, 0);
  EXPECT_EQ(ack["type"], "start_ack");
  EXPECT_EQ(ack["protocol_version"], kProtocolVersion);
  EXPECT_EQ(ack["session"], "s3");
  EXPECT_EQ(ack["env"], "lander");
  EXPECT_EQ(ack["copilot_label"], "none");
  EXPECT_EQ(ack["seed"], 17);
  EXPECT_EQ(ack["obs_dim"], envs::ObservationDim(envs::EnvId::kLander, true));
  EXPECT_EQ(ack["act_dim"], 2);
  EXPECT_EQ(ack["dt"], 0.02);
  EXPECT_EQ(ack["recording"], false);
  const json frame = One(out, 1);
  EXPECT_EQ(frame["type"], "state");
  EXPECT_EQ(frame["t"], 0);
  EXPECT_EQ(frame["render"]["kind"], "lander");
  EXPECT_TRUE(s.running());

  // A second start while running is refused; input is silent.
  EXPECT_EQ(One(s.HandleMessage(StartMsg("none", 1)))["type"], "error");
  EXPECT_TRUE(s.HandleMessage(InputMsg(0.1, 0.2)).empty());
  for (const std::string bad : {"{\"type\":\"input\",\"a\":[0]}",
                                "{\"type\":\"input\",\"a\":[0,\"x\"]}",
                                "{\"type\":\"input\",\"a\":[0,1e999]}"}) {
    EXPECT_EQ(One(s.HandleMessage(bad))["type"], "error") << bad;
  }
  const json end = One(s.HandleMessage("{\"type\":\"stop\"}"));
  EXPECT_EQ(end["type"], "episode_end");
  EXPECT_EQ(end["aborted"], true);
  EXPECT_EQ(end["outcome"], "timeout");
  EXPECT_FALSE(s.running());
  EXPECT_TRUE(s.Tick().empty());
}

TEST(SessionTest, LearnedSlotRequiresCopilotForEnv) {
  Session s("s0", 0, Resources());
  const std::string learned = LabelFor(s, CopilotSlot::kLearned);
  EXPECT_EQ(One(s.HandleMessage(StartMsg(learned, 1, false, "drone")))["type"], "error");
  EXPECT_EQ(One(s.HandleMessage(StartMsg(learned, 1)))["type"], "start_ack");
}

// Runs `ticks` steps feeding the same input every tick and returns frames.
std::vector<json> Drive(Session& s, int ticks, double a0, double a1) {
  std::vector<json> frames;
  for (int i = 0; i < ticks && s.running(); ++i) {
    s.HandleMessage(InputMsg(a0, a1));
    for (const auto& m : s.Tick()) frames.push_back(json::parse(m));
  }
  return frames;
}

TEST(SessionTest, PlaceboIsBitIdenticalToNoCopilot) {
  Session placebo("s0", 0, Resources());
  Session none("s1", 1, Resources());
  placebo.HandleMessage(StartMsg(LabelFor(placebo, CopilotSlot::kPlacebo), 8));
  none.HandleMessage(StartMsg("none", 8));
  const auto a = Drive(placebo, 80, 0.45, -0.1);
  const auto b = Drive(none, 80, 0.45, -0.1);
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i]["type"] != "state") continue;
    EXPECT_EQ(a[i]["a_r"], json({0.0, 0.0}));
    EXPECT_EQ(a[i]["obs"], b[i]["obs"]);
    EXPECT_EQ(a[i]["reward"], b[i]["reward"]);
  }

  Session learned("s2", 2, Resources());
  learned.HandleMessage(StartMsg(LabelFor(learned, CopilotSlot::kLearned), 8));
  const auto c = Drive(learned, 5, 0.45, -0.1);
  double norm = 0.0;
  for (const auto& f : c) {
    norm += std::abs(f["a_r"][0].get<double>()) + std::abs(f["a_r"][1].get<double>());
  }
  EXPECT_GT(norm, 0.0);
}

TEST(SessionTest, StaleInputBecomesZero) {
  Session s("s0", 0, Resources());
  s.HandleMessage(StartMsg("none", 2));
  s.HandleMessage(InputMsg(0.6, 0.3));
  // 0.25 s at dt 0.02: ticks 0..12 are fresh, 13 onward are stale.
  for (int i = 0; i < 20; ++i) {
    const auto out = s.Tick();
    ASSERT_FALSE(out.empty());
    const json f = json::parse(out.front());
    if (i <= 12) {
      EXPECT_EQ(f["a_h"], json({0.6, 0.3})) << i;
    } else {
      EXPECT_EQ(f["a_h"], json({0.0, 0.0})) << i;
    }
  }
  // Fresh input resumes immediately; out-of-range input is clamped.
  s.HandleMessage(InputMsg(3.0, -0.2));
  EXPECT_EQ(json::parse(s.Tick().front())["a_h"], json({1.0, -0.2}));
}

TEST(SessionTest, BlindingIsBalancedDeterministicAndComplementary) {
  auto res = Resources(77);
  int a_learned = 0;
  for (uint64_t i = 0; i < 400; ++i) {
    Session s("s" + std::to_string(i), i, res);
    Session again("x", i, res);
    EXPECT_EQ(s.SlotForLabel("A"), again.SlotForLabel("A"));
    EXPECT_NE(s.SlotForLabel("A"), s.SlotForLabel("B"));
    EXPECT_NE(s.SlotForLabel("A"), CopilotSlot::kNone);
    if (s.SlotForLabel("A") == CopilotSlot::kLearned) ++a_learned;
  }
  // Binomial(400, 1/2): sd 10.
  EXPECT_NEAR(a_learned, 200, 50);

  Session s("s9", 9, res);
  s.HandleMessage(StartMsg("A", 1));
  s.HandleMessage("{\"type\":\"stop\"}");
  s.HandleMessage(StartMsg("none", 1));
  ASSERT_EQ(s.blinding_log().size(), 2u);
  EXPECT_EQ(s.blinding_log()[0].label, "A");
  EXPECT_EQ(s.blinding_log()[0].slot, s.SlotForLabel("A"));
  EXPECT_EQ(s.blinding_log()[1].slot, CopilotSlot::kNone);
}

TEST(SessionTest, RecordingWritesReplayableLog) {
  auto res = Resources();
  res->env_cfg.timeout_steps = 100;
  const auto dir = std::filesystem::temp_directory_path() / "sa_session_rec";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  res->record_dir = dir.string();
  Session s("s4", 4, res);
  const std::string label = LabelFor(s, CopilotSlot::kLearned);
  const auto start = s.HandleMessage(StartMsg(label, 21, true));
  EXPECT_EQ(One(start)["recording"], true);
  // Roughly hover so the episode runs into the step limit.
  const auto frames = Drive(s, 200, 0.5, 0.0);
  ASSERT_EQ(frames.back()["type"], "episode_end");
  EXPECT_EQ(frames.back()["aborted"], false);

  const pilots::DemoLog log = pilots::ReadDemoLog((dir / "s4-ep1.jsonl").string());
  ASSERT_EQ(log.records.size(), static_cast<size_t>(frames.back()["steps"].get<int>()));
  for (size_t i = 0; i + 1 < log.records.size(); ++i) EXPECT_FALSE(log.records[i].done);
  EXPECT_TRUE(log.records.back().done);
  bool saw_hash = false;
  for (const auto& [k, v] : log.header.meta) {
    if (k == "config_hash") saw_hash = v == "feedbeef";
  }
  EXPECT_TRUE(saw_hash);
  EXPECT_EQ(frames.back()["outcome"], "timeout");
  EXPECT_EQ(log.records.size(), 100u);
  EXPECT_TRUE(eval::ReplayDemoLog(log, res->env_cfg).ok());
  std::filesystem::remove_all(dir);
}

TEST(SessionTest, UnwritableRecordDirStillRuns) {
  auto res = Resources();
  res->record_dir = "/nonexistent/dir";
  Session s("s0", 0, res);
  const auto out = s.HandleMessage(StartMsg("none", 1, true));
  EXPECT_EQ(One(out)["type"], "start_ack");
  EXPECT_EQ(One(out)["recording"], false);
  EXPECT_TRUE(s.running());
  EXPECT_FALSE(s.Tick().empty());
}

// Minimal synchronous WebSocket client, standing in for the browser UI.
class Client {
 public:
  explicit Client(uint16_t port) : ws_(ioc_) {
    boost::asio::ip::tcp::resolver resolver(ioc_);
    boost::asio::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.handshake("127.0.0.1", "/");
  }
  void Send(const std::string& s) { ws_.write(boost::asio::buffer(s)); }
  json Read() {
    boost::beast::flat_buffer buf;
    ws_.read(buf);
    return json::parse(boost::beast::buffers_to_string(buf.data()));
  }
  json ReadUntil(const std::string& type) {
    for (int i = 0; i < 5000; ++i) {
      json j = Read();
      if (j["type"] == type) return j;
    }
    return {};
  }
  void Close() { ws_.close(boost::beast::websocket::close_code::normal); }

 private:
  boost::asio::io_context ioc_;
  boost::beast::websocket::stream<boost::asio::ip::tcp::socket> ws_;
};

TEST(ServerTest, HeadlessClientsPlayConcurrently) {
  const auto blind = std::filesystem::temp_directory_path() / "sa_server_blinding.jsonl";
  std::filesystem::remove(blind);
  ServerOptions opts;
  opts.port = 0;
  opts.blinding_log_path = blind.string();
  opts.log_timing = false;
  Server server(opts, Resources());
  server.Start();
  ASSERT_NE(server.port(), 0);
  {
    Client a(server.port());
    Client b(server.port());
    a.Send(StartMsg("A", 3));
    b.Send(StartMsg("none", 3));
    const json ack_a = a.ReadUntil("start_ack");
    const json ack_b = b.ReadUntil("start_ack");
    EXPECT_NE(ack_a["session"], ack_b["session"]);
    a.Send(InputMsg(0.5, 0.0));
    // Frames arrive at the tick rate with increasing t.
    int last_t = -1;
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < 10; ++i) {
      const json f = a.ReadUntil("state");
      EXPECT_GT(f["t"].get<int>(), last_t);
      last_t = f["t"].get<int>();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_GT(elapsed, 0.1);
    a.Send("{\"type\":\"bogus\"}");
    EXPECT_EQ(a.ReadUntil("error")["type"], "error");
    a.Send("{\"type\":\"stop\"}");
    const json end = a.ReadUntil("episode_end");
    EXPECT_EQ(end["aborted"], true);
    b.Send("{\"type\":\"stop\"}");
    EXPECT_EQ(b.ReadUntil("episode_end")["aborted"], true);
    a.Close();
    b.Close();
  }
  const auto log = server.blinding_log();
  EXPECT_EQ(log.size(), 2u);
  server.Stop();
  server.Wait();
  std::ifstream in(blind);
  int lines = 0;
  std::string line;
  while (std::getline(in, line)) {
    const json j = json::parse(line);
    EXPECT_TRUE(j.contains("session") && j.contains("label") && j.contains("slot"));
    ++lines;
  }
  EXPECT_EQ(lines, 2);
  std::filesystem::remove(blind);
}

TEST(ServerTest, BindFailureIsAConfigError) {
  ServerOptions opts;
  opts.port = 0;
  opts.log_timing = false;
  Server first(opts, Resources());
  first.Start();
  ServerOptions clash = opts;
  clash.port = first.port();
  Server second(clash, Resources());
  EXPECT_THROW(second.Start(), ConfigError);
  first.Stop();
  first.Wait();
}

}  // namespace
}  // namespace sa::server
