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

#include <cmath>
#include <filesystem>
#include <set>

#include "sa/common/config.h"
#include "sa/common/errors.h"
#include "sa/common/rng.h"

namespace sa {
namespace {

TEST(ConfigTest, ParsesSectionsCommentsAndQuotes) {
  const Config c = Config::Parse(
      "# top\nseed = 3\nname = \"a b\"\n[ppo]\nlr = 0.001 \n; other\n[env]\ndt=0.02\n");
  EXPECT_EQ(c.GetInt("seed"), 3);
  EXPECT_EQ(c.GetString("name"), "a b");
  EXPECT_DOUBLE_EQ(c.GetDouble("ppo.lr"), 0.001);
  EXPECT_DOUBLE_EQ(c.GetDouble("env.dt"), 0.02);
  EXPECT_EQ(c.entries().size(), 4u);
}

TEST(ConfigTest, RejectsMalformedLines) {
  EXPECT_THROW(Config::Parse("novalue\n"), ConfigError);
  EXPECT_THROW(Config::Parse("[open\n"), ConfigError);
  EXPECT_THROW(Config::Parse(" = 3\n"), ConfigError);
}

TEST(ConfigTest, SerializeRoundTripsAndHashIgnoresInsertionOrder) {
  Config a;
  a.Set("env", "lander");
  a.Set("env.dt", "0.02");
  a.Set("seed", "1");
  a.Set("ppo.lr", "0.0003");
  Config b;
  b.Set("ppo.lr", "0.0003");
  b.Set("seed", "1");
  b.Set("env.dt", "0.02");
  b.Set("env", "lander");
  EXPECT_EQ(a.Serialize(), b.Serialize());
  EXPECT_EQ(a.Hash(), b.Hash());
  const Config back = Config::Parse(a.Serialize());
  EXPECT_EQ(back.entries(), a.entries());
  b.Set("seed", "2");
  EXPECT_NE(a.Hash(), b.Hash());
}

TEST(ConfigTest, SaveWritesHashComment) {
  Config a;
  a.Set("x", "1");
  const auto path = std::filesystem::temp_directory_path() / "sa_config_test.ini";
  a.Save(path.string());
  const Config back = Config::Load(path.string());
  EXPECT_EQ(back.entries(), a.entries());
  std::filesystem::remove(path);
  EXPECT_THROW(Config::Load("/nonexistent/dir/x.ini"), ConfigError);
}

TEST(ConfigTest, TypedAccessorsValidate) {
  Config c;
  c.Set("i", "12x");
  c.Set("d", "abc");
  c.Set("b", "yes");
  c.Set("ninf", "-inf");
  EXPECT_THROW(c.GetInt("i"), ConfigError);
  EXPECT_THROW(c.GetDouble("d"), ConfigError);
  EXPECT_THROW(c.GetString("missing"), ConfigError);
  EXPECT_EQ(c.GetInt("missing", 7), 7);
  EXPECT_TRUE(std::isinf(c.GetDouble("ninf")));
  EXPECT_LT(c.GetDouble("ninf"), 0.0);
}

TEST(ConfigTest, RequireKnownAcceptsListedKeysAndSections) {
  Config c;
  c.Set("seed", "1");
  c.Set("ppo.lr", "1");
  EXPECT_NO_THROW(c.RequireKnown({"seed", "ppo."}));
  EXPECT_THROW(c.RequireKnown({"seed"}), ConfigError);
  c.Set("typo", "1");
  EXPECT_THROW(c.RequireKnown({"seed", "ppo."}), ConfigError);
}

TEST(ConfigTest, SectionAndMerge) {
  Config base;
  base.Set("ppo.lr", "1");
  base.Set("ppo.gamma", "0.9");
  Config top;
  top.Set("ppo.lr", "2");
  base.Merge(top);
  const Config s = base.Section("ppo");
  EXPECT_EQ(s.GetString("lr"), "2");
  EXPECT_EQ(s.GetString("gamma"), "0.9");
}

TEST(ConfigTest, FormatDoubleRoundTrips) {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::ldexp(rng.Uniform(-1.0, 1.0), static_cast<int>(rng.Below(80)) - 40);
    EXPECT_EQ(std::stod(FormatDouble(v)), v);
  }
}

TEST(ConfigTest, HiddenSizes) {
  EXPECT_EQ(ParseHiddenSizes("64,64"), (std::vector<int>{64, 64}));
  EXPECT_EQ(FormatHiddenSizes({128, 32}), "128,32");
  EXPECT_THROW(ParseHiddenSizes(""), ConfigError);
  EXPECT_THROW(ParseHiddenSizes("4,0"), ConfigError);
  EXPECT_THROW(ParseHiddenSizes("a"), ConfigError);
}

TEST(Fnv1aTest, KnownVectors) {
  // Reference values of 64-bit FNV-1a.
  EXPECT_EQ(Fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(Fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(Fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(RngTest, SameSeedSameStream) {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.NextU64(), b.NextU64());
  Rng c(43);
  EXPECT_NE(Rng(42).NextU64(), c.NextU64());
}

TEST(RngTest, UniformMomentsAndRange) {
  Rng rng(1);
  const int n = 200000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sq += u * u;
  }
  // Mean 1/2 and variance 1/12; tolerances are about 5 standard errors.
  EXPECT_NEAR(sum / n, 0.5, 5 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(sq / n - (sum / n) * (sum / n), 1.0 / 12.0, 2e-3);
}

TEST(RngTest, NormalMoments) {
  Rng rng(2);
  const int n = 200000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.Normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(RngTest, BelowStaysInRangeAndCoversIt) {
  Rng rng(3);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const uint64_t k = rng.Below(7);
    ASSERT_LT(k, 7u);
    ++counts[k];
  }
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

TEST(RngTest, ForksAreDistinctAndReproducible) {
  const Rng base(9);
  std::set<uint64_t> firsts;
  for (uint64_t s = 0; s < 100; ++s) {
    Rng f = base.Fork(s);
    firsts.insert(f.NextU64());
    Rng g = base.Fork(s);
    Rng f2 = base.Fork(s);
    EXPECT_EQ(g.NextU64(), f2.NextU64());
  }
  EXPECT_EQ(firsts.size(), 100u);
}

TEST(RngTest, PermutationIsAPermutation) {
  Rng rng(4);
  const auto p = Permutation(50, rng);
  std::set<int> s(p.begin(), p.end());
  EXPECT_EQ(s.size(), 50u);
  EXPECT_EQ(*s.begin(), 0);
  EXPECT_EQ(*s.rbegin(), 49);
}

}  // namespace
}  // namespace sa
