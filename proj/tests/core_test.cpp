// Copyright 2026 The pdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "pdp/core.hpp"
#include "pdp/rng.hpp"
#include "pdp/synth.hpp"

namespace pdp {
namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  std::string path = ::testing::TempDir() + name;
  std::ofstream out(path);
  out << content;
  return path;
}

TEST(Hamming, SpecExamples) {
  EXPECT_EQ(hamming_distance(Record::from_string("0000"), Record::from_string("0000")), 0);
  EXPECT_EQ(hamming_distance(Record::from_string("0000"), Record::from_string("0101")), 2);
  EXPECT_EQ(hamming_distance(Record::from_string("1111"), Record::from_string("0000")), 4);
}

TEST(Hamming, SchemaMismatchThrows) {
  EXPECT_THROW(hamming_distance(Record::from_string("01"), Record::from_string("011")),
               SchemaError);
}

TEST(Hamming, MetricAxiomsExhaustiveD4) {
  const int d = 4;
  std::vector<Record> recs;
  for (std::uint64_t v = 0; v < (1u << d); ++v) recs.push_back(Record::from_index(v, d));
  for (const auto& a : recs)
    for (const auto& b : recs) {
      EXPECT_EQ(hamming_distance(a, b), hamming_distance(b, a));
      for (const auto& c : recs)
        EXPECT_LE(hamming_distance(a, c),
                  hamming_distance(a, b) + hamming_distance(b, c));
    }
}

TEST(Hamming, MetricAxiomsRandomD8) {
  RngStream rng(7);
  for (int i = 0; i < 2000; ++i) {
    auto draw = [&]() {
      std::vector<std::uint8_t> bits(8);
      for (auto& b : bits) b = rng.next_unit() < 0.5;
      return Record(std::move(bits));
    };
    const Record a = draw(), b = draw(), c = draw();
    EXPECT_EQ(hamming_distance(a, b), hamming_distance(b, a));
    EXPECT_LE(hamming_distance(a, c),
              hamming_distance(a, b) + hamming_distance(b, c));
  }
}

TEST(LoadDataset, DirectParse) {
  const auto path = write_temp("direct.csv", "attr_1,attr_2\n1,0\n0,0\n");
  const Dataset ds = load_dataset(path);
  ASSERT_EQ(ds.d(), 2);
  ASSERT_EQ(ds.n(), 2u);
  EXPECT_EQ(ds.rows[0].to_string(), "10");
  EXPECT_EQ(ds.rows[1].to_string(), "00");
  std::remove(path.c_str());
}

TEST(LoadDataset, EmptyBody) {
  const auto path = write_temp("empty.csv", "attr_1,attr_2\n");
  const Dataset ds = load_dataset(path);
  EXPECT_EQ(ds.d(), 2);
  EXPECT_EQ(ds.n(), 0u);
  std::remove(path.c_str());
}

TEST(LoadDataset, MalformedCell) {
  const auto path = write_temp("bad.csv", "attr_1,attr_2\n1,2\n");
  EXPECT_THROW(load_dataset(path), CsvError);
  std::remove(path.c_str());
}

TEST(LoadDataset, RaggedRow) {
  const auto path = write_temp("ragged.csv", "attr_1,attr_2\n1,0\n1\n");
  EXPECT_THROW(load_dataset(path), CsvError);
  std::remove(path.c_str());
}

TEST(LoadDataset, EmptyHeader) {
  const auto path = write_temp("nohdr.csv", "");
  EXPECT_THROW(load_dataset(path), CsvError);
  std::remove(path.c_str());
}

TEST(LoadLabeled, MapsZeroOneToSigns) {
  const auto path = write_temp("lab.csv", "attr_1,attr_2,label\n1,0,1\n0,0,0\n");
  const LabeledDataset s = load_labeled_dataset(path);
  ASSERT_EQ(s.n(), 2u);
  EXPECT_EQ(s.rows[0].x[0], 1);
  EXPECT_EQ(s.rows[0].x[1], -1);
  EXPECT_EQ(s.rows[0].y, 1);
  EXPECT_EQ(s.rows[1].y, -1);
  std::remove(path.c_str());
}

TEST(Csv, RoundTripBitForBit) {
  RngStream rng(11);
  const Dataset ds = synth::bernoulli_dataset(9, 200, 0.4, rng);
  const auto path = ::testing::TempDir() + "roundtrip.csv";
  save_dataset(ds, path);
  const Dataset back = load_dataset(path);
  ASSERT_EQ(back.n(), ds.n());
  ASSERT_EQ(back.schema.names, ds.schema.names);
  for (std::size_t i = 0; i < ds.n(); ++i) EXPECT_EQ(back.rows[i], ds.rows[i]);
  std::remove(path.c_str());

  LabeledDataset ls;
  ls.schema = AttributeSchema::with_default_names(5);
  RngStream lrng(12);
  for (int i = 0; i < 64; ++i) {
    LabeledExample ex;
    for (int j = 0; j < 5; ++j)
      ex.x.push_back(lrng.next_unit() < 0.5 ? 1 : -1);
    ex.y = lrng.next_unit() < 0.5 ? 1 : -1;
    ls.rows.push_back(std::move(ex));
  }
  const auto lpath = ::testing::TempDir() + "roundtrip_labeled.csv";
  save_labeled_dataset(ls, lpath);
  const LabeledDataset lback = load_labeled_dataset(lpath);
  ASSERT_EQ(lback.n(), ls.n());
  for (std::size_t i = 0; i < ls.n(); ++i) {
    EXPECT_EQ(lback.rows[i].x, ls.rows[i].x);
    EXPECT_EQ(lback.rows[i].y, ls.rows[i].y);
  }
  std::remove(lpath.c_str());
}

TEST(Schema, Validation) {
  EXPECT_THROW(AttributeSchema::with_default_names(0), SchemaError);
  AttributeSchema s;
  s.d = 2;
  s.names = {"a", "a"};
  EXPECT_THROW(s.validate(), SchemaError);
  EXPECT_THROW(Record({0, 2}), SchemaError);
}

TEST(Rng, SubstreamZeroTwiceIdentical) {
  RngStream s(42);
  RngStream a = s.substream(0);
  RngStream b = s.substream(0);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, DistinctIndicesDiffer) {
  RngStream s(42);
  RngStream a = s.substream(0);
  RngStream b = s.substream(1);
  int same = 0;
  for (int i = 0; i < 64; ++i) same += a.next_u64() == b.next_u64();
  EXPECT_EQ(same, 0);
}

TEST(Rng, PathComposition) {
  RngStream s(9001);
  RngStream via_chain = s.substream(1).substream(2);
  RngStream again = s.substream(1).substream(2);
  for (int i = 0; i < 64; ++i) EXPECT_EQ(via_chain.next_u64(), again.next_u64());
}

TEST(Rng, DerivationDoesNotDisturbParent) {
  RngStream a(5), b(5);
  (void)a.substream(3);
  for (int i = 0; i < 16; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, UnitRangesAndMoments) {
  RngStream s(123);
  double sum = 0, sumsq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.next_unit();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sumsq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
  EXPECT_NEAR(sumsq / n, 1.0 / 3, 0.005);
  RngStream t(124);
  for (int i = 0; i < 1000; ++i) {
    const double u = t.next_open_unit();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

}  // namespace
}  // namespace pdp
