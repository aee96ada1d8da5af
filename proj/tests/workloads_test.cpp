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

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "pdp/core.hpp"
#include "pdp/oracle.hpp"
#include "pdp/rng.hpp"
#include "pdp/workloads.hpp"

namespace pdp {
namespace {

Record R(const std::string& s) { return Record::from_string(s); }

Query make_query(std::vector<int> attrs, QueryKind kind) {
  Query q;
  q.attrs = std::move(attrs);
  q.kind = kind;
  return q;
}

TEST(EvalQuery, SpecExamples) {
  EXPECT_DOUBLE_EQ(eval_query(make_query({0, 2}, QueryKind::kParity), R("1010")), 0.0);
  EXPECT_DOUBLE_EQ(eval_query(make_query({0, 1}, QueryKind::kConjunction), R("1101")), 1.0);
  EXPECT_DOUBLE_EQ(eval_query(make_query({0, 1}, QueryKind::kConjunction), R("1011")), 0.0);
}

TEST(EvalQuery, TableLookupMsbFirst) {
  Query q = make_query({0, 2}, QueryKind::kTable);
  q.table = {0.0, 0.25, 0.5, 0.75};  // indexed by (bit attr0, bit attr2)
  EXPECT_DOUBLE_EQ(eval_query(q, R("000")), 0.0);
  EXPECT_DOUBLE_EQ(eval_query(q, R("001")), 0.25);
  EXPECT_DOUBLE_EQ(eval_query(q, R("100")), 0.5);
  EXPECT_DOUBLE_EQ(eval_query(q, R("101")), 0.75);
}

TEST(EvalWorkload, SpecExamples) {
  Workload w;
  w.d = 2;
  w.queries = {make_query({0}, QueryKind::kConjunction),
               make_query({1}, QueryKind::kConjunction),
               make_query({0, 1}, QueryKind::kConjunction)};
  Dataset ds;
  ds.schema = AttributeSchema::with_default_names(2);
  ds.rows = {R("11"), R("10")};
  const auto ans = eval_workload(w, ds);
  EXPECT_DOUBLE_EQ(ans[0], 1.0);
  EXPECT_DOUBLE_EQ(ans[1], 0.5);
  EXPECT_DOUBLE_EQ(ans[2], 0.5);

  Dataset one;
  one.schema = ds.schema;
  one.rows = {R("10")};
  const auto single = eval_workload(w, one);
  EXPECT_DOUBLE_EQ(single[0], 1.0);
  EXPECT_DOUBLE_EQ(single[1], 0.0);
  EXPECT_DOUBLE_EQ(single[2], 0.0);

  Workload par = kway_marginal_workload(2, 1, QueryKind::kParity);
  Dataset sym;
  sym.schema = ds.schema;
  sym.rows = {R("00"), R("11")};
  const auto p = eval_workload(par, sym);
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_DOUBLE_EQ(p[1], 0.5);
}

TEST(EvalWorkload, EmptyDatasetRejected) {
  Workload w = kway_marginal_workload(3, 1, QueryKind::kConjunction);
  Dataset ds;
  ds.schema = AttributeSchema::with_default_names(3);
  EXPECT_THROW(eval_workload(w, ds), std::invalid_argument);
}

TEST(EvalWorkload, RowPermutationInvariant) {
  RngStream rng(5);
  Workload w = kway_marginal_workload(5, 2, QueryKind::kConjunction);
  Dataset ds;
  ds.schema = AttributeSchema::with_default_names(5);
  for (int i = 0; i < 40; ++i) {
    std::vector<std::uint8_t> bits(5);
    for (auto& b : bits) b = rng.next_unit() < 0.5;
    ds.rows.emplace_back(std::move(bits));
  }
  const auto before = eval_workload(w, ds);
  Dataset shuffled = ds;
  std::reverse(shuffled.rows.begin(), shuffled.rows.end());
  std::swap(shuffled.rows[3], shuffled.rows[17]);
  const auto after = eval_workload(w, shuffled);
  for (std::size_t j = 0; j < before.size(); ++j)
    EXPECT_DOUBLE_EQ(before[j], after[j]);
}

TEST(KwayWorkload, CountsAndOrder) {
  EXPECT_EQ(kway_marginal_workload(4, 2, QueryKind::kParity).m(), 6u);
  EXPECT_EQ(kway_marginal_workload(3, 3, QueryKind::kConjunction).m(), 1u);
  EXPECT_EQ(kway_marginal_workload(5, 1, QueryKind::kParity).m(), 5u);
  const auto w = kway_marginal_workload(4, 2, QueryKind::kParity);
  EXPECT_EQ(w.queries[0].attrs, (std::vector<int>{0, 1}));
  EXPECT_EQ(w.queries[1].attrs, (std::vector<int>{0, 2}));
  EXPECT_EQ(w.queries.back().attrs, (std::vector<int>{2, 3}));
  EXPECT_THROW(kway_marginal_workload(4, 5, QueryKind::kParity), std::invalid_argument);
  EXPECT_THROW(kway_marginal_workload(4, 0, QueryKind::kParity), std::invalid_argument);
}

TEST(Diameters, ClosedFormTwoWayParities) {
  const auto dia = diameters(kway_marginal_workload(4, 2, QueryKind::kParity));
  EXPECT_NEAR(dia.delta, std::sqrt(6.0), 1e-12);
  EXPECT_NEAR(dia.delta0, std::sqrt(3.0), 1e-12);
}

TEST(Diameters, ConstantTableQueryIsZero) {
  Workload w;
  w.d = 3;
  Query q = make_query({0}, QueryKind::kTable);
  q.table = {0.5, 0.5};
  w.queries = {q};
  const auto dia = diameters(w);
  EXPECT_DOUBLE_EQ(dia.delta, 0.0);
  EXPECT_DOUBLE_EQ(dia.delta0, 0.0);
}

// Closed form vs exhaustive record-pair maximization. The closed form is
// attained by conjunctions for every k and by parities for odd k; for even-k
// parities no record pair flips every parity simultaneously (a flip set of
// weight w changes w(d-w) <= floor(d^2/4) < C(d,2) of the 2-way parities),
// so sqrt(m) is a strict upper bound there. The partial diameter is attained
// in every case.
TEST(Diameters, BruteForceAgreementWhereAttained) {
  RngStream rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + static_cast<int>(rng.next_unit() * 8);  // 2..9
    const int k = 1 + static_cast<int>(rng.next_unit() * d);
    const bool parity = rng.next_unit() < 0.5;
    const auto w = kway_marginal_workload(
        d, std::min(k, d), parity ? QueryKind::kParity : QueryKind::kConjunction);
    const auto closed = diameters(w);
    const auto brute = oracle::brute_diameters(w);
    EXPECT_NEAR(brute.delta0, closed.delta0, 1e-12) << "d=" << d << " k=" << k;
    if (!parity || std::min(k, d) % 2 == 1) {
      EXPECT_NEAR(brute.delta, closed.delta, 1e-12) << "d=" << d << " k=" << k;
    } else {
      EXPECT_LE(brute.delta, closed.delta + 1e-12);
    }
  }
}

TEST(Diameters, TwoWayParityBruteForceValue) {
  // Frozen from the exhaustive oracle: max #differing 2-way parities on d=4
  // is w(d-w) = 4, giving true diameter 2, below the sqrt(m) upper bound.
  const auto brute = oracle::brute_diameters(kway_marginal_workload(4, 2, QueryKind::kParity));
  EXPECT_NEAR(brute.delta, 2.0, 1e-12);
  EXPECT_NEAR(brute.delta0, std::sqrt(3.0), 1e-12);
}

TEST(Diameters, PartialNeverExceedsFull) {
  RngStream rng(78);
  for (int trial = 0; trial < 20; ++trial) {
    Workload w;
    w.d = 5;
    const int m = 1 + static_cast<int>(rng.next_unit() * 6);
    for (int j = 0; j < m; ++j) {
      std::vector<int> attrs;
      for (int a = 0; a < w.d; ++a)
        if (rng.next_unit() < 0.4) attrs.push_back(a);
      if (attrs.empty()) attrs.push_back(0);
      Query q = make_query(attrs, QueryKind::kTable);
      q.table.resize(std::size_t{1} << attrs.size());
      for (auto& v : q.table) v = rng.next_unit();
      w.queries.push_back(std::move(q));
    }
    const auto dia = diameters(w);
    EXPECT_LE(dia.delta0, dia.delta + 1e-12);
  }
}

TEST(Diameters, MarginalRatioExact) {
  for (int d = 2; d <= 12; ++d)
    for (int k = 1; k <= d; ++k) {
      const auto dia = closed_form_marginal_diameters(d, k);
      EXPECT_NEAR(dia.delta / dia.delta0, std::sqrt(static_cast<double>(d) / k),
                  1e-12);
    }
}

TEST(Diameters, BruteForceCapped) {
  Workload w;
  w.d = 17;
  w.queries = {make_query({0}, QueryKind::kConjunction)};
  EXPECT_THROW(diameters(w), std::invalid_argument);
}

TEST(WorkloadJson, RoundTrip) {
  const auto w = kway_marginal_workload(6, 2, QueryKind::kParity);
  const auto back = Workload::from_json(w.to_json());
  EXPECT_EQ(back.m(), w.m());
  ASSERT_TRUE(back.marginal.has_value());
  EXPECT_EQ(back.marginal->k, 2);

  Workload expl;
  expl.d = 3;
  Query q = make_query({0, 2}, QueryKind::kTable);
  q.table = {0.1, 0.2, 0.3, 0.4};
  expl.queries = {q, make_query({1}, QueryKind::kParity)};
  const auto back2 = Workload::from_json(expl.to_json());
  EXPECT_EQ(back2.queries[0].attrs, (std::vector<int>{0, 2}));
  EXPECT_EQ(back2.queries[0].table, q.table);
  EXPECT_EQ(back2.queries[1].kind, QueryKind::kParity);
}

TEST(Workload, Validation) {
  Workload w;
  w.d = 3;
  w.queries = {make_query({0, 0}, QueryKind::kParity)};
  EXPECT_THROW(w.validate(), std::invalid_argument);
  w.queries = {make_query({3}, QueryKind::kParity)};
  EXPECT_THROW(w.validate(), std::invalid_argument);
  Query bad_table = make_query({0}, QueryKind::kTable);
  bad_table.table = {0.5};
  w.queries = {bad_table};
  EXPECT_THROW(w.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace pdp
