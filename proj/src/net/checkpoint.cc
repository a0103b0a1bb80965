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

#include "sa/net/checkpoint.h"

#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "sa/common/config.h"
#include "sa/common/errors.h"

namespace sa::net {
namespace {

constexpr char kMagic[4] = {'S', 'A', 'C', 'K'};
constexpr uint32_t kFlagLagrange = 1u;
constexpr uint32_t kFlagAdam = 2u;

class Writer {
 public:
  template <typename T>
  void Pod(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void Str(const std::string& s) {
    Pod<uint32_t>(static_cast<uint32_t>(s.size()));
    out_.append(s);
  }
  void Doubles(const Eigen::VectorXd& v) {
    Pod<uint64_t>(static_cast<uint64_t>(v.size()));
    out_.append(reinterpret_cast<const char*>(v.data()),
                static_cast<size_t>(v.size()) * sizeof(double));
  }
  void Raw(const char* p, size_t n) { out_.append(p, n); }
  std::string& bytes() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& bytes) : in_(bytes) {}

  template <typename T>
  T Pod() {
    Need(sizeof(T));
    T v;
    std::memcpy(&v, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string Str() {
    const uint32_t n = Pod<uint32_t>();
    Need(n);
    std::string s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  Eigen::VectorXd Doubles() {
    const uint64_t n = Pod<uint64_t>();
    if (n > (in_.size() - pos_) / sizeof(double)) {
      throw LoadError("checkpoint truncated");
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    std::memcpy(v.data(), in_.data() + pos_, n * sizeof(double));
    pos_ += n * sizeof(double);
    return v;
  }
  size_t pos() const { return pos_; }

 private:
  void Need(size_t n) const {
    if (in_.size() - pos_ < n) throw LoadError("checkpoint truncated");
  }
  const std::string& in_;
  size_t pos_ = 0;
};

void CheckKind(const Checkpoint& ckpt) {
  if (ckpt.kind != "pilot" && ckpt.kind != "copilot" && ckpt.kind != "bc") {
    throw ConfigError("unknown checkpoint kind: " + ckpt.kind);
  }
  if ((ckpt.kind == "copilot") != ckpt.lagrange.has_value()) {
    throw ConfigError("copilot checkpoints carry the Lagrange state; others must not");
  }
}

}  // namespace

std::string SerializeCheckpoint(const Checkpoint& ckpt) {
  CheckKind(ckpt);
  Writer w;
  w.Raw(kMagic, sizeof(kMagic));
  w.Pod<uint32_t>(kCheckpointVersion);
  w.Str(ckpt.kind);
  w.Pod<uint32_t>(static_cast<uint32_t>(ckpt.params.layer_dims().size()));
  for (int d : ckpt.params.layer_dims()) w.Pod<uint32_t>(static_cast<uint32_t>(d));
  w.Str(ckpt.activation);
  w.Pod<uint32_t>(static_cast<uint32_t>(ckpt.params.extra()));
  w.Doubles(ckpt.params.flat());
  uint32_t flags = 0;
  if (ckpt.lagrange) flags |= kFlagLagrange;
  if (ckpt.adam) flags |= kFlagAdam;
  w.Pod<uint32_t>(flags);
  if (ckpt.lagrange) {
    w.Pod<double>(ckpt.lagrange->lambda_raw);
    w.Pod<double>(ckpt.lagrange->threshold);
  }
  if (ckpt.adam) {
    w.Pod<int64_t>(ckpt.adam->step);
    w.Pod<double>(ckpt.adam->beta1);
    w.Pod<double>(ckpt.adam->beta2);
    w.Pod<double>(ckpt.adam->eps);
    w.Doubles(ckpt.adam->m);
    w.Doubles(ckpt.adam->v);
  }
  w.Pod<uint32_t>(static_cast<uint32_t>(ckpt.meta.size()));
  for (const auto& [k, v] : ckpt.meta) {
    w.Str(k);
    w.Str(v);
  }
  const uint64_t checksum = Fnv1a64(w.bytes());
  w.Pod<uint64_t>(checksum);
  return std::move(w.bytes());
}

Checkpoint ParseCheckpoint(const std::string& bytes) {
  if (bytes.size() < sizeof(kMagic) + sizeof(uint32_t) + sizeof(uint64_t) ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw LoadError("not a checkpoint file");
  }
  Reader r(bytes);
  for (size_t i = 0; i < sizeof(kMagic); ++i) r.Pod<char>();
  const uint32_t version = r.Pod<uint32_t>();
  if (version != kCheckpointVersion) {
    throw VersionError("unsupported checkpoint format version " +
                       std::to_string(version));
  }
  const std::string body = bytes.substr(0, bytes.size() - sizeof(uint64_t));
  uint64_t stored = 0;
  std::memcpy(&stored, bytes.data() + body.size(), sizeof(uint64_t));
  if (Fnv1a64(body) != stored) throw LoadError("checkpoint checksum mismatch");

  Checkpoint ckpt;
  ckpt.kind = r.Str();
  const uint32_t n_dims = r.Pod<uint32_t>();
  if (n_dims < 2 || n_dims > 64) throw LoadError("checkpoint: bad layer count");
  std::vector<int> dims(n_dims);
  for (auto& d : dims) d = static_cast<int>(r.Pod<uint32_t>());
  ckpt.activation = r.Str();
  if (ckpt.activation != "tanh") {
    throw LoadError("checkpoint: unsupported activation " + ckpt.activation);
  }
  const auto extra = static_cast<int>(r.Pod<uint32_t>());
  try {
    ckpt.params = MlpParams(dims, extra);
  } catch (const ShapeError& e) {
    throw LoadError(std::string("checkpoint: ") + e.what());
  }
  Eigen::VectorXd flat = r.Doubles();
  if (flat.size() != ckpt.params.size()) {
    throw LoadError("checkpoint: parameter count does not match layer dims");
  }
  ckpt.params.mutable_flat() = flat;
  const uint32_t flags = r.Pod<uint32_t>();
  if (flags & kFlagLagrange) {
    LagrangeExtras lag;
    lag.lambda_raw = r.Pod<double>();
    lag.threshold = r.Pod<double>();
    ckpt.lagrange = lag;
  }
  if (flags & kFlagAdam) {
    AdamState adam;
    adam.step = r.Pod<int64_t>();
    adam.beta1 = r.Pod<double>();
    adam.beta2 = r.Pod<double>();
    adam.eps = r.Pod<double>();
    adam.m = r.Doubles();
    adam.v = r.Doubles();
    ckpt.adam = adam;
  }
  const uint32_t n_meta = r.Pod<uint32_t>();
  for (uint32_t i = 0; i < n_meta; ++i) {
    std::string k = r.Str();
    ckpt.meta[k] = r.Str();
  }
  if (r.pos() != body.size()) throw LoadError("checkpoint: trailing bytes");
  try {
    CheckKind(ckpt);
  } catch (const ConfigError& e) {
    throw LoadError(std::string("checkpoint: ") + e.what());
  }
  return ckpt;
}

void SaveCheckpoint(const std::string& path, const Checkpoint& ckpt) {
  const std::string bytes = SerializeCheckpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LoadError("cannot write checkpoint: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw LoadError("short write on checkpoint: " + path);
}

Checkpoint LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open checkpoint: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseCheckpoint(ss.str());
}

}  // namespace sa::net
