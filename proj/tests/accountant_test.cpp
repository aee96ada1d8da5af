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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "pdp/accountant.hpp"
#include "pdp/metric.hpp"
#include "pdp/rng.hpp"

namespace pdp {
namespace {

Record R(const std::string& s) { return Record::from_string(s); }

TEST(MetricEval, UniformSpecExample) {
  const auto m = PrivacyMetric::uniform_per_attribute(0.5, 4);
  EXPECT_DOUBLE_EQ(metric_eval(m, R("0000"), R("0101")).value(), 1.0);
}

TEST(MetricEval, GraphTwoEdgePath) {
  RecordGraph g;
  g.add_edge(R("00"), R("01"), 0.5);
  g.add_edge(R("01"), R("11"), 0.7);
  const auto m = PrivacyMetric::record_graph(g);
  EXPECT_NEAR(metric_eval(m, R("00"), R("11")).value(), 1.2, 1e-12);
}

TEST(MetricEval, WeightedSingleDiffer) {
  const auto m = PrivacyMetric::weighted_per_attribute({1, 2, 3});
  EXPECT_DOUBLE_EQ(metric_eval(m, R("011"), R("010")).value(), 3.0);
}

TEST(MetricEval, GraphMissingVertexThrows) {
  RecordGraph g;
  g.add_edge(R("00"), R("01"), 1.0);
  const auto m = PrivacyMetric::record_graph(g);
  EXPECT_THROW(metric_eval(m, R("00"), R("11")), std::invalid_argument);
}

TEST(MetricSup, UniformWeightedDisconnected) {
  EXPECT_DOUBLE_EQ(metric_sup(PrivacyMetric::uniform_per_attribute(0.5, 4)).value(), 2.0);
  EXPECT_DOUBLE_EQ(metric_sup(PrivacyMetric::weighted_per_attribute({1, 2, 3})).value(), 6.0);
  RecordGraph g;
  g.add_edge(R("00"), R("01"), 1.0);
  g.add_edge(R("10"), R("11"), 1.0);
  EXPECT_TRUE(metric_sup(PrivacyMetric::record_graph(g)).is_infinite());
}

TEST(MetricEval, TriangleInequalityOnRandomGraphs) {
  RngStream rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    RecordGraph g;
    const int nv = 12;
    std::vector<Record> vs;
    for (int v = 0; v < nv; ++v) vs.push_back(Record::from_index(v, 4));
    for (const auto& v : vs) g.add_vertex(v);
    for (int e = 0; e < 24; ++e) {
      const auto a = static_cast<std::size_t>(rng.next_unit() * nv);
      const auto b = static_cast<std::size_t>(rng.next_unit() * nv);
      if (a == b) continue;
      g.add_edge(vs[a], vs[b], rng.next_unit() * 2);
    }
    const auto m = PrivacyMetric::record_graph(g);
    for (const auto& a : vs)
      for (const auto& b : vs) {
        const auto ab = metric_eval(m, a, b);
        const auto ba = metric_eval(m, b, a);
        EXPECT_EQ(ab.is_infinite(), ba.is_infinite());
        if (!ab.is_infinite()) EXPECT_NEAR(ab.value(), ba.value(), 1e-12);
        for (const auto& c : vs) {
          const auto ac = metric_eval(m, a, c);
          const auto cb = metric_eval(m, c, b);
          if (!ac.is_infinite() && !cb.is_infinite() && !ab.is_infinite())
            EXPECT_LE(ab.value(), ac.value() + cb.value() + 1e-9);
        }
      }
  }
}

TEST(Compose, PureAdds) {
  const Budget b = compose_sequential({Budget::pure(0.3), Budget::pure(0.4)});
  EXPECT_DOUBLE_EQ(b.eps(), 0.7);
  EXPECT_DOUBLE_EQ(compose_sequential({Budget::pure(0.5)}).eps(), 0.5);
}

TEST(Compose, CdpRootSumSquares) {
  const Budget b = compose_sequential({Budget::cdp(0.3), Budget::cdp(0.4)});
  EXPECT_DOUBLE_EQ(b.eps(), 0.5);
}

TEST(Compose, MixedFamiliesRejected) {
  EXPECT_THROW(compose_sequential({Budget::pure(0.3), Budget::cdp(0.4)}),
               std::invalid_argument);
  EXPECT_THROW(
      compose_sequential({Budget::pure(0.3),
                          Budget::partial_pure(PrivacyMetric::uniform_per_attribute(0.1, 3))}),
      std::invalid_argument);
}

TEST(Compose, AssociativeAndOrderInvariant) {
  const std::vector<double> eps = {0.2, 0.5, 0.1, 0.9};
  auto all = [&](bool cdp) {
    std::vector<Budget> bs;
    for (double e : eps) bs.push_back(cdp ? Budget::cdp(e) : Budget::pure(e));
    return compose_sequential(bs);
  };
  auto nested_pure = compose_sequential(
      {compose_sequential({Budget::pure(0.2), Budget::pure(0.5)}),
       compose_sequential({Budget::pure(0.1), Budget::pure(0.9)})});
  EXPECT_NEAR(all(false).eps(), nested_pure.eps(), 1e-12);
  auto nested_cdp = compose_sequential(
      {compose_sequential({Budget::cdp(0.9), Budget::cdp(0.1)}),
       compose_sequential({Budget::cdp(0.5), Budget::cdp(0.2)})});
  EXPECT_NEAR(all(true).eps(), nested_cdp.eps(), 1e-12);
}

TEST(Compose, PartialUniformPointwise) {
  const auto b = compose_sequential(
      {Budget::partial_pure(PrivacyMetric::uniform_per_attribute(0.2, 3)),
       Budget::partial_pure(PrivacyMetric::uniform_per_attribute(0.3, 3))});
  EXPECT_TRUE(b.is_partial());
  EXPECT_NEAR(b.metric().eps0(), 0.5, 1e-12);
  const auto c = compose_sequential(
      {Budget::partial_cdp(PrivacyMetric::uniform_per_attribute(0.3, 3)),
       Budget::partial_cdp(PrivacyMetric::uniform_per_attribute(0.4, 3))});
  EXPECT_NEAR(c.metric().eps0(), 0.5, 1e-12);
}

TEST(Compose, PartialGraphPointwiseLazy) {
  RecordGraph g;
  g.add_edge(R("0"), R("1"), 0.25);
  const auto b = compose_sequential(
      {Budget::partial_pure(PrivacyMetric::record_graph(g)),
       Budget::partial_pure(PrivacyMetric::uniform_per_attribute(0.5, 1))});
  EXPECT_NEAR(metric_eval(b.metric(), R("0"), R("1")).value(), 0.75, 1e-12);
  EXPECT_NEAR(metric_sup(b.metric()).value(), 0.75, 1e-12);
}

TEST(PartialToStandard, SpecExamples) {
  const auto pure = partial_to_standard(
      Budget::partial_pure(PrivacyMetric::uniform_per_attribute(0.1, 10)), 10);
  EXPECT_NEAR(pure.eps(), 1.0, 1e-12);
  const auto cdp = partial_to_standard(
      Budget::partial_cdp(PrivacyMetric::uniform_per_attribute(0.2, 5)), 5);
  EXPECT_NEAR(cdp.rho(), 0.5, 1e-12);
  const auto zero = partial_to_standard(
      Budget::partial_pure(PrivacyMetric::uniform_per_attribute(0.0, 7)), 7);
  EXPECT_DOUBLE_EQ(zero.eps(), 0.0);
}

TEST(PartialToStandard, NonUniformRejected) {
  EXPECT_THROW(partial_to_standard(
                   Budget::partial_pure(PrivacyMetric::weighted_per_attribute({1, 2})), 2),
               std::invalid_argument);
}

TEST(PartialToStandard, AgreesWithMetricSup) {
  const auto m = PrivacyMetric::uniform_per_attribute(0.37, 9);
  const auto converted = partial_to_standard(Budget::partial_pure(m), 9);
  EXPECT_NEAR(converted.eps(), metric_sup(m).value(), 1e-12);
}

TEST(SimpleConversion, SpecExamples) {
  EXPECT_NEAR(zcdp_to_approx_dp_simple(0.5, 2.5), std::exp(-2.0), 1e-12);
  EXPECT_DOUBLE_EQ(zcdp_to_approx_dp_simple(1.0, 1.0), 1.0);
  EXPECT_NEAR(zcdp_to_approx_dp_simple(1.0, 5.0), std::exp(-4.0), 1e-12);
  EXPECT_THROW(zcdp_to_approx_dp_simple(1.0, 0.5), std::invalid_argument);
}

TEST(TightConversion, CensusValues) {
  const double e1 = zcdp_to_approx_dp_tight(2.63, 1e-6);
  EXPECT_NEAR(e1, 13.8, 0.02 * 13.8);
  const double e2 = zcdp_to_approx_dp_tight(1.02, 1e-6);
  EXPECT_NEAR(e2, 7.85, 0.02 * 7.85);
}

TEST(TightConversion, DominatesSimpleInverse) {
  // Inverse of the simple formula at the same delta, by bisection.
  auto simple_inverse = [](double rho, double delta) {
    double lo = rho, hi = rho + 10 + 10 * std::sqrt(rho * std::log(1 / delta));
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (zcdp_to_approx_dp_simple(rho, mid) > delta)
        lo = mid;
      else
        hi = mid;
    }
    return hi;
  };
  for (double rho : {0.001, 0.05, 0.3, 1.0, 2.63, 10.0, 80.0}) {
    for (double delta : {1e-9, 1e-6, 1e-3}) {
      EXPECT_LE(zcdp_to_approx_dp_tight(rho, delta),
                simple_inverse(rho, delta) + 1e-3)
          << "rho=" << rho << " delta=" << delta;
    }
  }
}

TEST(TightConversion, ConvergesAcrossRhoRange) {
  for (double rho : {1e-6, 1e-4, 1e-2, 1.0, 50.0, 100.0}) {
    const double eps = zcdp_to_approx_dp_tight(rho, 1e-6);
    EXPECT_TRUE(std::isfinite(eps));
    EXPECT_GE(eps, 0.0);
    // The reported eps must actually achieve delta at most the target.
    EXPECT_LE(zcdp_delta_bound(rho, eps + 2e-3), 1e-6 * (1 + 1e-6));
  }
}

TEST(Budget, JsonShape) {
  const auto j = Budget::zcdp_from_rho(0.5).to_json();
  EXPECT_EQ(j.at("kind"), "zcdp");
  EXPECT_NEAR(j.at("rho").get<double>(), 0.5, 1e-12);
  const auto p = Budget::partial_pure(PrivacyMetric::uniform_per_attribute(0.3, 6)).to_json();
  EXPECT_EQ(p.at("kind"), "partial_pure");
  EXPECT_NEAR(p.at("metric").at("eps0").get<double>(), 0.3, 1e-12);
}

}  // namespace
}  // namespace pdp
