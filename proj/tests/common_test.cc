/* Copyright 2026 The Fairhead Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <atomic>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "fairhead/common/binary_io.h"
#include "fairhead/common/error.h"
#include "fairhead/common/kv_config.h"
#include "fairhead/common/parallel.h"
#include "fairhead/common/random.h"

namespace fairhead {
namespace {

TEST(ErrorTest, MessageCarriesCodeName) {
  const Error e(ErrorCode::kBadMagic, "header");
  EXPECT_EQ(e.code(), ErrorCode::kBadMagic);
  EXPECT_STREQ(e.what(), "BadMagic: header");
}

TEST(ErrorTest, ContextIsPrependedOnce) {
  try {
    RethrowWithContext(Error(ErrorCode::kSingleClass, "no positives"), "condition 'edema'");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingleClass);
    EXPECT_STREQ(e.what(), "SingleClass: condition 'edema': no positives");
  }
}

TEST(RngTest, SameSeedSameStream) {
  Rng a(7), b(7), c(8);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const uint64_t va = a.NextU64();
    EXPECT_EQ(va, b.NextU64());
    differs = differs || va != c.NextU64();
  }
  EXPECT_TRUE(differs);
}

TEST(RngTest, UniformIntInRangeAndCoversAll) {
  Rng rng(3);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const uint64_t v = rng.UniformInt(7);
    ASSERT_LT(v, 7u);
    ++hits[v];
  }
  for (int h : hits) EXPECT_GT(h, 800);
}

TEST(RngTest, UniformMomentsAndNormalMoments) {
  Rng rng(11);
  double su = 0, sn = 0, sn2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double z = rng.Normal();
    sn += z;
    sn2 += z * z;
  }
  EXPECT_NEAR(su / n, 0.5, 0.005);
  EXPECT_NEAR(sn / n, 0.0, 0.01);
  EXPECT_NEAR(sn2 / n, 1.0, 0.02);
}

TEST(RngTest, DerivedStreamsDiffer) {
  EXPECT_NE(Rng::Derive(42, 1), Rng::Derive(42, 2));
  EXPECT_NE(Rng::Derive(42, 1), Rng::Derive(43, 1));
  EXPECT_EQ(Rng::Derive(42, 1), Rng::Derive(42, 1));
}

TEST(ParallelTest, VisitsEveryIndexOnce) {
  for (int threads : {1, 2, 5}) {
    std::vector<std::atomic<int>> seen(1000);
    ParallelFor(seen.size(), threads, [&](size_t i) { seen[i]++; });
    for (auto& s : seen) EXPECT_EQ(s.load(), 1);
  }
}

TEST(ParallelTest, PropagatesExceptions) {
  EXPECT_THROW(ParallelFor(100, 4,
                           [](size_t i) {
                             if (i == 57) throw Error(ErrorCode::kIoError, "x");
                           }),
               Error);
}

TEST(BinaryIoTest, RoundTrip) {
  std::stringstream ss;
  BinaryWriter w(ss);
  w.WriteMagic("FAIRTST1");
  w.WriteU32(7);
  w.WriteU64(1ULL << 40);
  w.WriteI32(-3);
  w.WriteF32(1.5f);
  w.WriteF64(-2.25);
  w.WriteString("edema");
  w.WriteF64Array({1.0, 2.0});
  BinaryReader r(ss);
  r.ExpectMagic("FAIRTST1");
  EXPECT_EQ(r.ReadU32(), 7u);
  EXPECT_EQ(r.ReadU64(), 1ULL << 40);
  EXPECT_EQ(r.ReadI32(), -3);
  EXPECT_EQ(r.ReadF32(), 1.5f);
  EXPECT_EQ(r.ReadF64(), -2.25);
  EXPECT_EQ(r.ReadString(), "edema");
  EXPECT_EQ(r.ReadF64Array(), (std::vector<double>{1.0, 2.0}));
  try {
    r.ReadU32();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTruncatedFile);
  }
}

TEST(BinaryIoTest, BadMagic) {
  std::stringstream ss("FAIREMB9xxxx");
  BinaryReader r(ss);
  try {
    r.ExpectMagic("FAIREMB1");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBadMagic);
  }
}

TEST(KvConfigTest, ParseTrimsAndSkipsComments) {
  const KvConfig c = KvConfig::ParseString("# comment\n a = 1 \n\nb=x y\n");
  EXPECT_EQ(c.GetInt("a", 0), 1);
  EXPECT_EQ(c.GetString("b", ""), "x y");
  EXPECT_EQ(c.GetDouble("missing", 2.5), 2.5);
  EXPECT_TRUE(c.GetBool("missing", true));
}

TEST(KvConfigTest, RoundTripAndMerge) {
  KvConfig a;
  a.Set("z", "1");
  a.Set("a", "2");
  KvConfig b = KvConfig::ParseString(a.ToString());
  EXPECT_EQ(b.ToString(), "a=2\nz=1\n");
  KvConfig o;
  o.Set("a", "3");
  b.Merge(o);
  EXPECT_EQ(b.GetInt("a", 0), 3);
}

TEST(KvConfigTest, Errors) {
  EXPECT_THROW(KvConfig::ParseString("novalue\n"), Error);
  EXPECT_THROW(KvConfig::ParseString("=1\n"), Error);
  const KvConfig c = KvConfig::ParseString("n = abc\nb = maybe\n");
  EXPECT_THROW(c.GetInt("n", 0), Error);
  EXPECT_THROW(c.GetBool("b", false), Error);
}

TEST(KvConfigTest, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5}) {
    EXPECT_EQ(ParseDouble(FormatDouble(v), "v"), v);
  }
}

}  // namespace
}  // namespace fairhead
