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

#include "cli.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "sa/common/config.h"
#include "sa/common/errors.h"
#include "sa/common/rng.h"
#include "sa/copilot/trainer.h"
#include "sa/eval/eval.h"
#include "sa/eval/grid.h"
#include "sa/eval/replay.h"
#include "sa/net/checkpoint.h"
#include "sa/pilots/bc.h"
#include "sa/pilots/demo_log.h"
#include "sa/pilots/expert.h"
#include "sa/server/server.h"

namespace sa::cli {
namespace fs = std::filesystem;
namespace {

// Raised while resolving configuration; maps to the usage exit code.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Flags given on the command line, layered over the config file.
struct Invocation {
  std::string config_path;
  std::vector<std::string> sets;
  Config flags;
};

void Flag(CLI::App* app, const std::string& name, const std::string& key,
          Invocation* inv, const std::string& help) {
  app->add_option_function<std::string>(
      name, [inv, key](const std::string& v) { inv->flags.Set(key, v); }, help);
}

void CommonFlags(CLI::App* app, Invocation* inv) {
  app->add_option("--config", inv->config_path, "Config file (key = value, [sections])");
  app->add_option("--set", inv->sets, "Override any config key: key=value");
  Flag(app, "--seed", "seed", inv, "Master seed");
  Flag(app, "--out", "out", inv, "Output directory");
}

Config Prefixed(const std::string& prefix, const Config& section) {
  Config out;
  for (const auto& [k, v] : section.entries()) out.Set(prefix + "." + k, v);
  return out;
}

// defaults <- file <- --set <- named flags, then unknown keys are rejected.
Config Resolve(const Config& defaults, const Invocation& inv,
               const std::set<std::string>& allowed) {
  Config cfg = defaults;
  if (!inv.config_path.empty()) {
    try {
      cfg.Merge(Config::Load(inv.config_path));
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  for (const auto& kv : inv.sets) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--set needs key=value, got " + kv);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    cfg.Set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
  }
  cfg.Merge(inv.flags);
  try {
    cfg.RequireKnown(allowed);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Files in `dir` with extension `ext`, sorted by name.
std::vector<std::string> FilesIn(const std::string& dir, const std::string& ext) {
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ext) {
      out.push_back(entry.path().string());
    }
  }
  if (ec) throw UsageError("cannot list directory " + dir + ": " + ec.message());
  std::sort(out.begin(), out.end());
  return out;
}

struct Run {
  Config cfg;
  std::string hash;
  uint64_t seed = 0;
  std::string out_dir;
  envs::EnvConfig env_cfg;

  std::string Provenance() const {
    return "seed=" + std::to_string(seed) + " config_hash=" + hash;
  }
  std::map<std::string, std::string> Meta(const std::string& command) const {
    return {{"seed", std::to_string(seed)}, {"config_hash", hash}, {"command", command}};
  }
  std::string Path(const std::string& name) const { return (fs::path(out_dir) / name).string(); }
};

// Validates the shared keys, creates the output directory and writes the
// resolved config there.
Run Prepare(const std::string& command, Config cfg) {
  Run run;
  try {
    run.seed = cfg.GetU64("seed", 0);
    run.env_cfg = envs::EnvConfig::FromConfig(cfg.Section("env"));
    run.env_cfg.Validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  run.out_dir = cfg.GetString("out", "runs/" + command);
  // The output location does not change results, so it stays out of the hash.
  cfg.Erase("out");
  run.cfg = std::move(cfg);
  run.hash = run.cfg.HashHex();
  std::error_code ec;
  fs::create_directories(run.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + run.out_dir);
  run.cfg.Save(run.Path(command + ".config.ini"));
  return run;
}

Config EnvDefaults() { return Prefixed("env", envs::EnvConfig().ToConfig()); }

envs::EnvId EnvFrom(const Config& cfg) {
  try {
    return envs::ParseEnvId(cfg.GetString("env"));
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
}

// --- pilots shared by train-copilot and eval ---

Config PilotDefaults() {
  const pilots::PilotSpec spec;
  Config c;
  c.Set("pilot_checkpoints", "");
  c.Set("pilot_mixture", "");
  c.Set("pilot.repeat_p", FormatDouble(spec.repeat_p));
  c.Set("pilot.noise_p", FormatDouble(spec.noise_p));
  c.Set("pilot.switch_p", FormatDouble(spec.switch_p));
  return c;
}

void PilotFlags(CLI::App* app, Invocation* inv) {
  Flag(app, "--pilot-checkpoint,--pilot-checkpoints", "pilot_checkpoints", inv,
       "Pilot checkpoint(s), comma separated");
  Flag(app, "--pilot-mixture", "pilot_mixture", inv,
       "Directory whose *.ckpt pilot checkpoints form a mixture pilot");
}

pilots::PilotSpec PilotSpecFrom(const Run& run, const std::string& kind) {
  pilots::PilotSpec spec;
  try {
    spec.kind = pilots::ParsePilotKind(kind);
    spec.repeat_p = run.cfg.GetDouble("pilot.repeat_p");
    spec.noise_p = run.cfg.GetDouble("pilot.noise_p");
    spec.switch_p = run.cfg.GetDouble("pilot.switch_p");
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  spec.seed = DeriveSeed(run.seed, 0x70696c6f74ULL);
  spec.checkpoints = SplitList(run.cfg.GetString("pilot_checkpoints"));
  const std::string dir = run.cfg.GetString("pilot_mixture");
  if (!dir.empty()) {
    for (auto& f : FilesIn(dir, ".ckpt")) spec.checkpoints.push_back(f);
    if (spec.checkpoints.empty()) throw UsageError("no *.ckpt files in " + dir);
  }
  return spec;
}

std::string PilotLabel(const std::string& kind) { return kind; }

// --- train-pilot ---

int TrainPilot(const Config& resolved, std::ostream& out) {
  Run run = Prepare("train-pilot", resolved);
  const envs::EnvId id = EnvFrom(run.cfg);
  ppo::TrainConfig train;
  net::ActorCritic::Options net = pilots::DefaultExpertNet();
  try {
    Config ppo_cfg = run.cfg.Section("ppo");
    ppo_cfg.Set("seed", std::to_string(run.seed));
    train = ppo::TrainConfig::FromConfig(ppo_cfg);
    net.hidden = ParseHiddenSizes(run.cfg.GetString("net.hidden"));
    net.init_log_std = run.cfg.GetDouble("net.init_log_std");
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  ppo::MetricsLog log(run.Path("metrics.csv"), run.Provenance());
  const auto result = pilots::TrainExpert(id, run.env_cfg, train, net, &log);
  const std::string path = run.Path("pilot.ckpt");
  net::SaveCheckpoint(path, pilots::MakePilotCheckpoint(result.policy, id, run.Meta("train-pilot")));
  out << "trained " << result.steps << " steps; checkpoint " << path << "\n";
  return kExitOk;
}

Config TrainPilotDefaults() {
  Config c = EnvDefaults();
  c.Set("env", "lander");
  c.Set("seed", "1");
  c.Merge(Prefixed("ppo", pilots::DefaultExpertTrainConfig().ToConfig()));
  c.Erase("ppo.seed");
  const auto net = pilots::DefaultExpertNet();
  c.Set("net.hidden", FormatHiddenSizes(net.hidden));
  c.Set("net.init_log_std", FormatDouble(net.init_log_std));
  return c;
}

// --- bc-train ---

Config BcDefaults() {
  const pilots::BcOptions o;
  Config c = EnvDefaults();
  c.Set("env", "lander");
  c.Set("seed", "1");
  c.Set("demos", "");
  c.Set("bc.hidden", FormatHiddenSizes(o.hidden));
  c.Set("bc.lr", FormatDouble(o.lr));
  c.Set("bc.batch_size", std::to_string(o.batch_size));
  c.Set("bc.max_epochs", std::to_string(o.max_epochs));
  c.Set("bc.patience", std::to_string(o.patience));
  c.Set("bc.val_fraction", FormatDouble(o.val_fraction));
  return c;
}

bool HasDemoHeader(const std::string& path) {
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  return first.find(std::string("\"schema\":\"") + pilots::kDemoLogSchema + "\"") !=
         std::string::npos;
}

int BcTrainCommand(const Config& resolved, std::ostream& out) {
  Run run = Prepare("bc-train", resolved);
  const envs::EnvId id = EnvFrom(run.cfg);
  pilots::BcOptions opts;
  try {
    opts.hidden = ParseHiddenSizes(run.cfg.GetString("bc.hidden"));
    opts.lr = run.cfg.GetDouble("bc.lr");
    opts.batch_size = static_cast<int>(run.cfg.GetInt("bc.batch_size"));
    opts.max_epochs = static_cast<int>(run.cfg.GetInt("bc.max_epochs"));
    opts.patience = static_cast<int>(run.cfg.GetInt("bc.patience"));
    opts.val_fraction = run.cfg.GetDouble("bc.val_fraction");
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  opts.seed = run.seed;

  std::vector<std::string> files;
  for (const auto& item : SplitList(run.cfg.GetString("demos"))) {
    if (fs::is_directory(item)) {
      // Eval output dirs mix demo logs with other JSON lines; keep only logs.
      for (auto& f : FilesIn(item, ".jsonl")) {
        if (HasDemoHeader(f)) files.push_back(f);
      }
    } else {
      files.push_back(item);
    }
  }
  if (files.empty()) throw UsageError("bc-train needs --demos");
  pilots::DemoLog all;
  for (const auto& f : files) {
    pilots::DemoLog log = pilots::ReadDemoLog(f);
    if (log.header.env != envs::EnvIdName(id)) {
      throw InputError("demo log " + f + " is for env " + log.header.env);
    }
    if (all.records.empty()) all.header = log.header;
    for (auto& r : log.records) all.records.push_back(std::move(r));
  }
  const pilots::BcResult result = pilots::BcTrain(all, opts);
  std::ofstream curve(run.Path("bc_curve.csv"));
  curve << "# " << run.Provenance() << "\nepoch,train_loss,val_loss\n";
  for (size_t e = 0; e < result.train_curve.size(); ++e) {
    curve << e + 1 << "," << FormatDouble(result.train_curve[e]) << ","
          << FormatDouble(result.val_curve[e]) << "\n";
  }
  if (!curve) throw LoadError("cannot write " + run.Path("bc_curve.csv"));
  const std::string path = run.Path("bc.ckpt");
  auto meta = run.Meta("bc-train");
  meta["demo_records"] = std::to_string(all.records.size());
  net::SaveCheckpoint(path, pilots::MakeBcCheckpoint(result.params, id, meta));
  out << "bc: " << result.train_size << " train / " << result.val_size << " val samples, "
      << result.epochs << " epochs, best val loss " << FormatDouble(result.val_loss)
      << "; checkpoint " << path << "\n";
  return kExitOk;
}

// --- train-copilot ---

Config CopilotDefaults() {
  Config c = EnvDefaults();
  c.Set("env", "lander");
  c.Set("seed", "1");
  c.Set("pilot", "noisy");
  c.Merge(PilotDefaults());
  c.Merge(copilot::CopilotConfig().ToConfig());
  c.Erase("ppo.seed");
  return c;
}

int TrainCopilotCommand(const Config& resolved, std::ostream& out) {
  Run run = Prepare("train-copilot", resolved);
  const envs::EnvId id = EnvFrom(run.cfg);
  copilot::CopilotConfig cc;
  try {
    Config c = run.cfg;
    c.Set("ppo.seed", std::to_string(run.seed));
    cc = copilot::CopilotConfig::FromConfig(c);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  const pilots::PilotSpec spec = PilotSpecFrom(run, run.cfg.GetString("pilot"));
  const auto pilot = pilots::MakePilot(spec, id);
  ppo::MetricsLog log(run.Path("metrics.csv"), run.Provenance());
  const auto result = copilot::TrainCopilot(id, run.env_cfg, *pilot, cc, &log);
  auto meta = run.Meta("train-copilot");
  meta["pilot"] = run.cfg.GetString("pilot");
  const std::string path = run.Path("copilot.ckpt");
  net::SaveCheckpoint(path, copilot::MakeCopilotCheckpoint(result, id, meta));
  out << "trained " << result.steps << " steps; lambda "
      << FormatDouble(result.lagrange.lambda()) << ", threshold "
      << FormatDouble(result.lagrange.threshold) << "; checkpoint " << path << "\n";
  return kExitOk;
}

// --- eval ---

Config EvalDefaults() {
  Config c = EnvDefaults();
  c.Set("env", "lander");
  c.Set("seed", "1");
  c.Set("episodes", "100");
  c.Set("pilot", "expert");
  c.Set("copilot", "none");
  c.Set("record", "false");
  c.Merge(PilotDefaults());
  return c;
}

std::string CopilotLabel(const std::string& item) {
  if (item == "none") return "none";
  return fs::path(item).stem().string();
}

int EvalCommand(const Config& resolved, std::ostream& out) {
  Run run = Prepare("eval", resolved);
  const envs::EnvId id = EnvFrom(run.cfg);
  int episodes = 0;
  bool record = false;
  try {
    episodes = static_cast<int>(run.cfg.GetInt("episodes"));
    record = run.cfg.GetBool("record", false);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  if (episodes < 1) throw UsageError("episodes must be positive");
  const auto pilot_kinds = SplitList(run.cfg.GetString("pilot"));
  const auto copilot_items = SplitList(run.cfg.GetString("copilot"));
  if (pilot_kinds.empty() || copilot_items.empty()) {
    throw UsageError("eval needs at least one pilot and one copilot (or none)");
  }

  std::vector<std::pair<std::string, std::unique_ptr<pilots::Pilot>>> pilots_list;
  for (const auto& kind : pilot_kinds) {
    pilots_list.emplace_back(PilotLabel(kind), pilots::MakePilot(PilotSpecFrom(run, kind), id));
  }
  std::vector<std::pair<std::string, std::optional<copilot::Copilot>>> copilots;
  for (const auto& item : copilot_items) {
    std::string label = CopilotLabel(item);
    for (const auto& [l, c] : copilots) {
      if (l == label) label += "_" + std::to_string(copilots.size());
    }
    if (item == "none") {
      copilots.emplace_back(label, std::nullopt);
    } else {
      copilots.emplace_back(label, copilot::CopilotFromCheckpoint(net::LoadCheckpoint(item), id));
    }
  }

  std::vector<eval::EvalReport> reports;
  for (const auto& [clabel, cp] : copilots) {
    for (const auto& [plabel, pilot] : pilots_list) {
      const std::string stem = clabel + "_" + plabel;
      std::unique_ptr<pilots::DemoLogWriter> steps;
      if (record) {
        pilots::DemoHeader header;
        header.env = envs::EnvIdName(id);
        header.obs_dim = envs::ObservationDim(id, true);
        header.act_dim = envs::ActionDim(id);
        header.meta = {{"seed", std::to_string(run.seed)},
                       {"config_hash", run.hash},
                       {"pilot", plabel},
                       {"copilot", clabel},
                       {"source", "eval"}};
        steps = std::make_unique<pilots::DemoLogWriter>(run.Path("steps_" + stem + ".jsonl"),
                                                        header);
      }
      eval::EvalReport report =
          eval::RunEval(id, run.env_cfg, *pilot, cp ? &*cp : nullptr, episodes, run.seed,
                        plabel, clabel, steps.get());
      report.config_hash = run.hash;
      if (steps) steps->Flush();
      std::ofstream(run.Path("report_" + stem + ".json")) << eval::ReportJson(report) << "\n";
      std::ofstream(run.Path("episodes_" + stem + ".jsonl")) << eval::EpisodeRecordsJsonl(report);
      reports.push_back(std::move(report));
    }
  }
  const eval::Grid grid = eval::Aggregate(reports);
  std::ofstream(run.Path("grid.csv")) << "# " << run.Provenance() << "\n" << eval::GridCsv(grid);
  const std::string text = eval::GridText(grid);
  std::ofstream(run.Path("grid.txt")) << "# " << run.Provenance() << "\n" << text;
  out << text;
  return kExitOk;
}

// --- serve ---

std::atomic<bool> g_stop{false};
void OnSignal(int) { g_stop = true; }

Config ServeDefaults() {
  const server::ServerOptions o;
  const server::SessionResources r;
  Config c = EnvDefaults();
  c.Set("seed", "1");
  c.Set("address", o.address);
  c.Set("port", std::to_string(o.port));
  c.Set("threads", std::to_string(o.threads));
  c.Set("copilots", "");
  c.Set("record_dir", "");
  c.Set("stale_after", FormatDouble(r.stale_after_s));
  return c;
}

int ServeCommand(const Config& resolved, std::ostream& out) {
  Run run = Prepare("serve", resolved);
  auto res = std::make_shared<server::SessionResources>();
  res->env_cfg = run.env_cfg;
  res->blind_seed = run.seed;
  res->config_hash = run.hash;
  server::ServerOptions opts;
  try {
    res->stale_after_s = run.cfg.GetDouble("stale_after");
    opts.address = run.cfg.GetString("address");
    const int64_t port = run.cfg.GetInt("port");
    if (port < 0 || port > 65535) throw ConfigError("port out of range");
    opts.port = static_cast<uint16_t>(port);
    opts.threads = static_cast<int>(run.cfg.GetInt("threads"));
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  res->record_dir = run.cfg.GetString("record_dir");
  if (res->record_dir.empty()) res->record_dir = run.Path("recordings");
  fs::create_directories(res->record_dir);
  for (const auto& path : SplitList(run.cfg.GetString("copilots"))) {
    const net::Checkpoint ckpt = net::LoadCheckpoint(path);
    auto it = ckpt.meta.find("env");
    if (it == ckpt.meta.end()) throw ConfigError("copilot checkpoint lacks env: " + path);
    const envs::EnvId id = envs::ParseEnvId(it->second);
    res->copilots[id] =
        std::make_shared<const copilot::Copilot>(copilot::CopilotFromCheckpoint(ckpt, id));
  }
  opts.blinding_log_path = run.Path("blinding.jsonl");

  server::Server srv(opts, res);
  srv.Start();
  out << "listening on ws://" << opts.address << ":" << srv.port() << std::endl;
  g_stop = false;
  std::signal(SIGINT, OnSignal);
  std::signal(SIGTERM, OnSignal);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  srv.Stop();
  srv.Wait();
  out << "stopped" << std::endl;
  return kExitOk;
}

// --- replay ---

Config ReplayDefaults() {
  Config c = EnvDefaults();
  c.Set("seed", "0");
  c.Set("log", "");
  return c;
}

int ReplayCommand(const Config& resolved, std::ostream& out) {
  Run run = Prepare("replay", resolved);
  const std::string path = run.cfg.GetString("log");
  if (path.empty()) throw UsageError("replay needs --log");
  const pilots::DemoLog log = pilots::ReadDemoLog(path);
  const eval::ReplayResult result = eval::ReplayDemoLog(log, run.env_cfg);
  std::ofstream report(run.Path("replay.txt"));
  report << "# " << run.Provenance() << " log=" << path << "\n";
  int bad = 0;
  for (const auto& e : result.episodes) {
    std::ostringstream line;
    line << "episode " << e.episode << " seed " << e.seed << " steps " << e.steps
         << " logged " << envs::OutcomeName(e.logged) << " replayed "
         << envs::OutcomeName(e.replayed);
    const bool ok = e.first_mismatch < 0 && e.logged == e.replayed;
    if (ok) {
      line << " ok";
    } else {
      ++bad;
      line << " MISMATCH";
      if (e.first_mismatch >= 0) line << " at t=" << e.first_mismatch << ": " << e.mismatch;
    }
    out << line.str() << "\n";
    report << line.str() << "\n";
  }
  out << result.episodes.size() - bad << "/" << result.episodes.size()
      << " episodes replay identically\n";
  return bad == 0 ? kExitOk : kExitFault;
}

std::set<std::string> Allowed(std::initializer_list<const char*> keys) {
  std::set<std::string> s = {"env.", "seed", "out"};
  for (const char* k : keys) s.insert(k);
  return s;
}

}  // namespace

int Main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Residual shared-autonomy copilot: training, evaluation and serving", "sa");
  app.require_subcommand(1);
  Invocation inv;

  auto* train_pilot = app.add_subcommand("train-pilot", "Train a goal-aware expert pilot with PPO");
  auto* train_copilot = app.add_subcommand("train-copilot", "Train a residual copilot");
  auto* bc_train = app.add_subcommand("bc-train", "Fit an imitation pilot to demo logs");
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate pilot/copilot pairs");
  auto* serve = app.add_subcommand("serve", "Run the WebSocket session server");
  auto* replay = app.add_subcommand("replay", "Replay a demo log through the envs");
  for (auto* sub : {train_pilot, train_copilot, bc_train, eval_cmd, serve, replay}) {
    CommonFlags(sub, &inv);
  }
  for (auto* sub : {train_pilot, train_copilot, bc_train, eval_cmd}) {
    Flag(sub, "--env", "env", &inv, "lander, lander_reacher or drone");
  }
  Flag(train_pilot, "--timesteps", "ppo.total_timesteps", &inv, "Environment steps");
  Flag(train_copilot, "--timesteps", "ppo.total_timesteps", &inv, "Environment steps");
  Flag(train_copilot, "--pilot", "pilot", &inv, "Surrogate pilot kind");
  Flag(train_copilot, "--d-threshold,--threshold", "copilot.threshold", &inv,
       "Constraint threshold d: auto, a number or -inf");
  PilotFlags(train_copilot, &inv);
  Flag(bc_train, "--demos", "demos", &inv, "Demo log files or directories, comma separated");
  Flag(eval_cmd, "--pilot", "pilot", &inv, "Pilot kind(s), comma separated");
  Flag(eval_cmd, "--copilot", "copilot", &inv, "none or copilot checkpoint(s), comma separated");
  Flag(eval_cmd, "--episodes", "episodes", &inv, "Episodes per pilot/copilot pair");
  Flag(eval_cmd, "--record", "record", &inv, "Write per-step demo logs (true/false)");
  PilotFlags(eval_cmd, &inv);
  Flag(serve, "--address", "address", &inv, "Listen address");
  Flag(serve, "--port", "port", &inv, "Listen port (0 picks one)");
  Flag(serve, "--threads", "threads", &inv, "I/O threads");
  Flag(serve, "--copilots", "copilots", &inv, "Copilot checkpoints, comma separated");
  Flag(serve, "--record-dir", "record_dir", &inv, "Directory for recorded demo logs");
  Flag(replay, "--log", "log", &inv, "Demo log to replay");

  std::vector<std::string> rev(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rev.begin(), rev.end());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const std::set<std::string> pilot_keys = {"pilot", "pilot_checkpoints", "pilot_mixture",
                                            "pilot."};
  try {
    try {
      if (train_pilot->parsed()) {
        return TrainPilot(Resolve(TrainPilotDefaults(), inv,
                                  Allowed({"env", "ppo.", "net.hidden", "net.init_log_std"})),
                          out);
      }
      if (train_copilot->parsed()) {
        std::set<std::string> allowed = Allowed({"env", "ppo.", "copilot."});
        allowed.insert(pilot_keys.begin(), pilot_keys.end());
        return TrainCopilotCommand(Resolve(CopilotDefaults(), inv, allowed), out);
      }
      if (bc_train->parsed()) {
        return BcTrainCommand(Resolve(BcDefaults(), inv, Allowed({"env", "demos", "bc."})), out);
      }
      if (eval_cmd->parsed()) {
        std::set<std::string> allowed = Allowed({"env", "episodes", "copilot", "record"});
        allowed.insert(pilot_keys.begin(), pilot_keys.end());
        return EvalCommand(Resolve(EvalDefaults(), inv, allowed), out);
      }
      if (serve->parsed()) {
        return ServeCommand(
            Resolve(ServeDefaults(), inv,
                    Allowed({"address", "port", "threads", "copilots", "record_dir",
                             "stale_after"})),
            out);
      }
      if (replay->parsed()) {
        return ReplayCommand(Resolve(ReplayDefaults(), inv, Allowed({"log"})), out);
      }
    } catch (const UsageError& e) {
      err << "error: " << e.what() << "\n\n" << app.help();
      return kExitUsage;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFault;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace sa::cli
