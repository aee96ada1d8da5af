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

#include "pdp/oracle.hpp"
#include "pdp/release.hpp"
#include "pdp/synth.hpp"

namespace pdp {
namespace {

TEST(Distribution, Invariants) {
  EXPECT_THROW(DistributionOverDomain::uniform(21), std::invalid_argument);
  EXPECT_THROW(DistributionOverDomain::from_probs(1, {0.6, 0.6}),
               std::invalid_argument);
  EXPECT_THROW(DistributionOverDomain::from_probs(1, {-0.1, 1.1}),
               std::invalid_argument);
  const auto u = DistributionOverDomain::uniform(3);
  EXPECT_DOUBLE_EQ(u.prob(5), 1.0 / 8);
}

TEST(FrankWolfe, HullVertexProjectsToItself) {
  const std::vector<std::vector<double>> hull = {{0, 0}, {1, 0}, {0, 1}};
  const std::vector<double> y = {1, 0};
  const auto res = frank_wolfe_project(y, hull);
  EXPECT_EQ(res.iterations, 1);
  EXPECT_DOUBLE_EQ(res.gap, 0.0);
  EXPECT_DOUBLE_EQ(res.point[0], 1.0);
  EXPECT_DOUBLE_EQ(res.point[1], 0.0);
}

TEST(FrankWolfe, NearestVertexGeometry) {
  const std::vector<std::vector<double>> hull = {{0, 0}, {1, 0}, {0, 1}};
  const std::vector<double> y = {2, 0};
  const auto res = frank_wolfe_project(y, hull);
  EXPECT_NEAR(res.point[0], 1.0, 1e-6);
  EXPECT_NEAR(res.point[1], 0.0, 1e-6);
}

TEST(FrankWolfe, SegmentEndpoint) {
  const std::vector<std::vector<double>> hull = {{0, 0}, {1, 0}};
  const std::vector<double> y = {1, 1};
  const auto res = frank_wolfe_project(y, hull);
  EXPECT_NEAR(res.point[0], 1.0, 1e-6);
  EXPECT_NEAR(res.point[1], 0.0, 1e-6);
}

TEST(FrankWolfe, ExhaustedIterationsFlagged) {
  const std::vector<std::vector<double>> hull = {{0, 0}, {1, 0}, {0.5, 0.9}};
  const std::vector<double> y = {0.5, 2.0};
  const auto res = frank_wolfe_project(y, hull, 1e-300, 3);
  EXPECT_FALSE(res.converged);
  EXPECT_THROW(frank_wolfe_project(y, {}, 1e-6, 10), std::invalid_argument);
}

TEST(Projection, ZeroNoiseReturnsExactAnswers) {
  RngStream rng(3);
  const Dataset ds = synth::bernoulli_dataset(5, 60, 0.3, rng);
  const auto w = kway_marginal_workload(5, 2, QueryKind::kConjunction);
  const auto exact = eval_workload(w, ds);
  const auto res = projection_mechanism(ds, w, 0.1, RngStream(9), NoiseConfig{true});
  for (std::size_t j = 0; j < exact.size(); ++j)
    EXPECT_NEAR(res.answers[j], exact[j], 1e-5);
}

TEST(Projection, ReportedBudgetArithmetic) {
  RngStream rng(4);
  const Dataset ds = synth::bernoulli_dataset(4, 100, 0.5, rng);
  const auto w = kway_marginal_workload(4, 2, QueryKind::kParity);
  const auto res = projection_mechanism(ds, w, 0.01, RngStream(10));
  EXPECT_NEAR(res.eps, std::sqrt(6.0), 1e-9);
  EXPECT_NEAR(res.eps0, std::sqrt(3.0), 1e-9);
}

TEST(Projection, RatioEqualsDiameterRatioExactly) {
  RngStream rng(5);
  const Dataset ds = synth::bernoulli_dataset(6, 37, 0.2, rng);
  const auto w = kway_marginal_workload(6, 2, QueryKind::kParity);
  for (double sigma : {0.003, 0.4}) {
    const auto res = projection_mechanism(ds, w, sigma, RngStream(11));
    EXPECT_NEAR(res.eps / res.eps0, res.delta / res.delta0, 1e-13);
    EXPECT_NEAR(res.eps / res.eps0, std::sqrt(3.0), 1e-12);
  }
}

TEST(Projection, NeverIncreasesErrorPerTrial) {
  RngStream data_rng(6);
  const Dataset ds = synth::bernoulli_dataset(5, 80, 0.1, data_rng);
  const auto w = kway_marginal_workload(5, 2, QueryKind::kParity);
  const auto exact = eval_workload(w, ds);
  RngStream root(77);
  for (int t = 0; t < 100; ++t) {
    const auto res =
        projection_mechanism(ds, w, 0.05, root.substream(static_cast<std::uint64_t>(t)));
    double err = 0, noise_err = 0;
    for (std::size_t j = 0; j < exact.size(); ++j) {
      err += (res.answers[j] - exact[j]) * (res.answers[j] - exact[j]);
      noise_err += (res.noisy_answers[j] - exact[j]) * (res.noisy_answers[j] - exact[j]);
    }
    // Frank-Wolfe stops within tol of the exact projection, hence the slack.
    EXPECT_LE(std::sqrt(err), std::sqrt(noise_err) + 2e-3);
  }
}

TEST(Projection, MseBoundAtSigma005) {
  RngStream data_rng(7);
  const Dataset ds = synth::bernoulli_dataset(6, 500, 0.1, data_rng);
  const auto w = kway_marginal_workload(6, 2, QueryKind::kParity);
  const auto exact = eval_workload(w, ds);
  const double sigma = 0.05;
  const auto dia = diameters(w);
  const double bound =
      std::min(sigma * sigma, sigma * dia.delta * std::sqrt(2.0 * 6 * std::log(2.0)) /
                                  static_cast<double>(w.m()));
  RngStream root(20260809);
  double total = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    const auto res =
        projection_mechanism(ds, w, sigma, root.substream(static_cast<std::uint64_t>(t)));
    double err = 0;
    for (std::size_t j = 0; j < exact.size(); ++j)
      err += (res.answers[j] - exact[j]) * (res.answers[j] - exact[j]);
    total += err / static_cast<double>(exact.size());
  }
  EXPECT_LE(total / trials, bound);
}

TEST(DisjointTuples, SpecExamples) {
  Workload w;
  w.d = 2;
  Query a;
  a.attrs = {0};
  a.kind = QueryKind::kConjunction;
  Query b = a;
  b.attrs = {1};
  Query ab = a;
  ab.attrs = {0, 1};
  w.queries = {a, b, ab};
  const auto pairs = enumerate_disjoint_tuples(w, 2);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0], (std::vector<int>{0, 1}));

  const auto singles = enumerate_disjoint_tuples(w, 1);
  EXPECT_EQ(singles.size(), 3u);

  const auto ones = kway_marginal_workload(4, 1, QueryKind::kConjunction);
  const auto full = enumerate_disjoint_tuples(ones, 4);
  ASSERT_EQ(full.size(), 1u);
  EXPECT_EQ(full[0], (std::vector<int>{0, 1, 2, 3}));
}

TEST(DisjointTuples, CapEnforced) {
  const auto w = kway_marginal_workload(10, 1, QueryKind::kConjunction);
  EXPECT_THROW(enumerate_disjoint_tuples(w, 3, 10), TupleExplosionError);
}

TEST(DisjointTuples, MatchingCountForPairs) {
  // Perfect matchings of K10 into 5 disjoint pairs: 9!! = 945.
  const auto w = kway_marginal_workload(10, 2, QueryKind::kConjunction);
  EXPECT_EQ(enumerate_disjoint_tuples(w, 5).size(), 945u);
}

TEST(Mwem, RoundNoiseScale) {
  RngStream rng(8);
  const Dataset ds = synth::bernoulli_dataset(3, 30, 0.5, rng);
  const auto w = kway_marginal_workload(3, 1, QueryKind::kConjunction);
  const auto res = mwem(ds, w, 1.0, 8, 1, RngStream(12));
  EXPECT_NEAR(res.eps_round, 0.25, 1e-12);
  EXPECT_NEAR(res.per_attribute_budget.metric().eps0(), 1.0, 1e-12);
}

TEST(Mwem, BudgetReport) {
  RngStream rng(9);
  const Dataset ds = synth::bernoulli_dataset(4, 30, 0.5, rng);
  const auto w = kway_marginal_workload(4, 1, QueryKind::kConjunction);
  const auto res = mwem(ds, w, 0.5, 4, 2, RngStream(13));
  EXPECT_NEAR(res.zcdp_budget.rho(), 0.5 * (2 * 0.5) * (2 * 0.5), 1e-12);
}

TEST(Mwem, MultiplicativeWeightsUpdateFormula) {
  // Domain {0,1}, all-ones data, one query q(u)=u, zero noise. Round 1 uses
  // the uniform A_1 and answers a = 1, so A_2(1) = e^{1/4} / (1 + e^{1/4});
  // with T = 2 the output averages A_1 and A_2.
  Dataset ds;
  ds.schema = AttributeSchema::with_default_names(1);
  for (int i = 0; i < 8; ++i) ds.rows.push_back(Record::from_string("1"));
  const auto w = kway_marginal_workload(1, 1, QueryKind::kConjunction);
  const auto res = mwem(ds, w, 1.0, 2, 1, RngStream(14), NoiseConfig{true});
  const double a2_one = std::exp(0.25) / (1 + std::exp(0.25));
  EXPECT_NEAR(a2_one, 0.5621765008857981, 1e-12);
  EXPECT_NEAR(res.synthetic.prob(1), 0.5 * (0.5 + a2_one), 1e-9);
}

TEST(Mwem, TraceMatchesStandardMwemOracleAtEllOne) {
  RngStream data_rng(15);
  const Dataset ds = synth::bernoulli_dataset(4, 50, 0.35, data_rng);
  const auto w = kway_marginal_workload(4, 2, QueryKind::kConjunction);
  const int T = 12;
  const auto ours = mwem(ds, w, 1.0, T, 1, RngStream(16), NoiseConfig{true});
  const auto ref = oracle::nonprivate_mwem(ds, w, T);
  ASSERT_EQ(ours.trace.size(), ref.trace.size());
  for (int t = 0; t < T; ++t) {
    ASSERT_EQ(ours.trace[static_cast<std::size_t>(t)].tuple.size(), 1u);
    EXPECT_EQ(ours.trace[static_cast<std::size_t>(t)].tuple[0],
              ref.trace[static_cast<std::size_t>(t)].selected_query)
        << "round " << t;
    EXPECT_NEAR(ours.trace[static_cast<std::size_t>(t)].noisy_answers[0],
                ref.trace[static_cast<std::size_t>(t)].answer, 1e-12);
  }
  for (std::size_t u = 0; u < ours.synthetic.domain_size(); ++u)
    EXPECT_NEAR(ours.synthetic.prob(u), ref.average[u], 1e-9);
}

TEST(Mwem, ZeroNoiseConvergenceAndPotential) {
  RngStream data_rng(17);
  const Dataset ds = synth::bernoulli_dataset(6, 64, 0.5, data_rng);
  const auto w = kway_marginal_workload(6, 2, QueryKind::kConjunction);
  const int T = 100;
  const auto ours = mwem(ds, w, 1.0, T, 1, RngStream(18), NoiseConfig{true});
  const double noiseless_bound = std::sqrt(4.0 * 6 * std::log(2.0) / T);
  EXPECT_LE(disjoint_tuple_max_error(w, 1, ours.synthetic, ds), noiseless_bound);
  const auto ref = oracle::nonprivate_mwem(ds, w, T);
  for (std::size_t t = 1; t < ref.potentials.size(); ++t)
    EXPECT_LE(ref.potentials[t], ref.potentials[t - 1] + 1e-12);
}

TEST(Mwem, PerRoundDistributionsNormalized) {
  RngStream data_rng(19);
  const Dataset ds = synth::bernoulli_dataset(5, 40, 0.4, data_rng);
  const auto w = kway_marginal_workload(5, 2, QueryKind::kConjunction);
  const auto res = mwem(ds, w, 0.7, 30, 2, RngStream(20));
  for (const auto& round : res.trace)
    EXPECT_LE(round.distribution_l1_error, 1e-9);
  double mass = 0;
  for (std::size_t u = 0; u < res.synthetic.domain_size(); ++u) {
    EXPECT_GE(res.synthetic.prob(u), 0.0);
    mass += res.synthetic.prob(u);
  }
  EXPECT_NEAR(mass, 1.0, 1e-9);
}

TEST(Mwem, AnswersMatchSyntheticEvaluation) {
  RngStream data_rng(21);
  const Dataset ds = synth::bernoulli_dataset(4, 30, 0.25, data_rng);
  const auto w = kway_marginal_workload(4, 2, QueryKind::kParity);
  const auto res = mwem(ds, w, 1.0, 10, 1, RngStream(22));
  const auto reeval = eval_workload_on_distribution(w, res.synthetic);
  for (std::size_t j = 0; j < w.m(); ++j)
    EXPECT_NEAR(res.answers[j], reeval[j], 1e-12);
}

TEST(Mwem, RejectsBadArguments) {
  RngStream rng(23);
  const Dataset ds = synth::bernoulli_dataset(3, 10, 0.5, rng);
  const auto w = kway_marginal_workload(3, 1, QueryKind::kConjunction);
  EXPECT_THROW(mwem(ds, w, 1.0, 0, 1, RngStream(1)), std::invalid_argument);
  EXPECT_THROW(mwem(ds, w, 0.0, 5, 1, RngStream(1)), std::invalid_argument);
  Dataset empty;
  empty.schema = ds.schema;
  EXPECT_THROW(mwem(empty, w, 1.0, 5, 1, RngStream(1)), std::invalid_argument);
}

TEST(Mwem, DefaultRoundsSchedule) {
  EXPECT_EQ(mwem_default_rounds(10, 5000, 1.0, 5, 45), 200);
  const double expected =
      std::ceil(std::sqrt(4 * std::log(2.0)) * 0.5 * 10 / (1.0 * std::log(6.0)));
  EXPECT_EQ(mwem_default_rounds(4, 10, 0.5, 1, 6), static_cast<int>(expected));
  EXPECT_GE(mwem_default_rounds(4, 1, 0.001, 1, 6), 1);
}

TEST(TupleMaxError, SpecExamples) {
  RngStream data_rng(24);
  const Dataset ds = synth::bernoulli_dataset(4, 60, 0.5, data_rng);
  const auto w = kway_marginal_workload(4, 2, QueryKind::kParity);
  const auto empirical = DistributionOverDomain::empirical(ds);
  EXPECT_NEAR(disjoint_tuple_max_error(w, 2, empirical, ds), 0.0, 1e-12);

  // ell = 1 reduces to the max single-query error.
  const auto uniform = DistributionOverDomain::uniform(4);
  const auto qx = eval_workload(w, ds);
  const auto qa = eval_workload_on_distribution(w, uniform);
  double linf = 0;
  for (std::size_t j = 0; j < w.m(); ++j)
    linf = std::max(linf, std::abs(qa[j] - qx[j]));
  EXPECT_NEAR(disjoint_tuple_max_error(w, 1, uniform, ds), linf, 1e-12);
}

TEST(TupleMaxError, MatchesBruteForceOracle) {
  RngStream data_rng(25);
  const Dataset ds = synth::bernoulli_dataset(4, 25, 0.3, data_rng);
  const auto w = kway_marginal_workload(4, 2, QueryKind::kParity);
  std::vector<double> probs(16, 0.0);
  double z = 0;
  RngStream prng(26);
  for (auto& p : probs) {
    p = prng.next_unit();
    z += p;
  }
  for (auto& p : probs) p /= z;
  const auto a = DistributionOverDomain::from_probs(4, probs);
  EXPECT_NEAR(disjoint_tuple_max_error(w, 2, a, ds),
              oracle::brute_disjoint_tuple_max_error(w, 2, a, ds), 1e-12);
}

}  // namespace
}  // namespace pdp
