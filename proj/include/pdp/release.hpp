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

#ifndef PDP_RELEASE_HPP_
#define PDP_RELEASE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pdp/accountant.hpp"
#include "pdp/core.hpp"
#include "pdp/mechanisms.hpp"
#include "pdp/workloads.hpp"

namespace pdp {

class TupleExplosionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Explicit probability vector over {0,1}^d, indexed by Record::to_index().
class DistributionOverDomain {
 public:
  static constexpr int kMaxD = 20;

  static DistributionOverDomain uniform(int d) {
    check_d(d);
    DistributionOverDomain a;
    a.d_ = d;
    a.probs_.assign(std::size_t{1} << d, 1.0 / static_cast<double>(std::uint64_t{1} << d));
    return a;
  }

  static DistributionOverDomain from_probs(int d, std::vector<double> probs) {
    check_d(d);
    if (probs.size() != (std::size_t{1} << d))
      throw std::invalid_argument("probability vector must have 2^d entries");
    double sum = 0;
    for (double p : probs) {
      if (p < 0) throw std::invalid_argument("probabilities must be >= 0");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("probabilities must sum to 1 within 1e-9");
    DistributionOverDomain a;
    a.d_ = d;
    a.probs_ = std::move(probs);
    return a;
  }

  static DistributionOverDomain empirical(const Dataset& ds) {
    check_d(ds.d());
    if (ds.n() == 0)
      throw std::invalid_argument("empirical distribution of an empty dataset");
    std::vector<double> probs(std::size_t{1} << ds.d(), 0.0);
    for (const auto& r : ds.rows) probs[r.to_index()] += 1.0;
    for (auto& p : probs) p /= static_cast<double>(ds.n());
    return from_probs(ds.d(), std::move(probs));
  }

  int d() const { return d_; }
  std::size_t domain_size() const { return probs_.size(); }
  double prob(std::uint64_t u) const { return probs_[u]; }
  const std::vector<double>& probs() const { return probs_; }

 private:
  static void check_d(int d) {
    if (d < 1 || d > kMaxD)
      throw std::invalid_argument("distribution requires 1 <= d <= 20");
  }
  int d_ = 1;
  std::vector<double> probs_;
};

inline double eval_query_on_distribution(const Query& q,
                                         const DistributionOverDomain& a) {
  double s = 0;
  for (std::uint64_t u = 0; u < a.domain_size(); ++u)
    s += a.prob(u) * eval_query(q, Record::from_index(u, a.d()));
  return s;
}

inline std::vector<double> eval_workload_on_distribution(
    const Workload& w, const DistributionOverDomain& a) {
  std::vector<double> out;
  out.reserve(w.m());
  for (const auto& q : w.queries) out.push_back(eval_query_on_distribution(q, a));
  return out;
}

// Answer vectors Q(x) of every record in the domain: the vertices whose
// convex hull the projection step targets.
inline std::vector<std::vector<double>> vertex_answers(const Workload& w) {
  if (w.d > 16)
    throw std::invalid_argument("vertex enumeration is capped at d <= 16");
  const std::uint64_t dom = std::uint64_t{1} << w.d;
  std::vector<std::vector<double>> vs(dom);
  for (std::uint64_t u = 0; u < dom; ++u) {
    Record r = Record::from_index(u, w.d);
    vs[u].reserve(w.m());
    for (const auto& q : w.queries) vs[u].push_back(eval_query(q, r));
  }
  return vs;
}

struct FrankWolfeResult {
  std::vector<double> point;
  double gap = 0;
  int iterations = 0;
  bool converged = false;
};

// Euclidean projection of y onto conv(vertices) by Frank-Wolfe with exact
// line search; the linear minimization oracle is an exhaustive vertex scan
// with lowest-index tie-breaking. Stops once the duality gap
// <y - p, v* - p> drops to tol/2, which bounds the squared distance to the
// true projection by tol.
inline FrankWolfeResult frank_wolfe_project(
    std::span<const double> y, const std::vector<std::vector<double>>& vertices,
    double tol = 1e-6, int max_iters = 10000) {
  if (vertices.empty())
    throw std::invalid_argument("frank_wolfe_project: empty vertex set");
  if (!(tol > 0)) throw std::invalid_argument("frank_wolfe_project: tol must be > 0");
  const std::size_t m = y.size();
  for (const auto& v : vertices)
    if (v.size() != m)
      throw std::invalid_argument("vertex dimension does not match y");

  // Start from the vertex nearest to y; if y is itself a vertex the gap is
  // zero immediately.
  std::size_t start = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    double s = 0;
    for (std::size_t j = 0; j < m; ++j) {
      double t = vertices[i][j] - y[j];
      s += t * t;
    }
    if (s < best) {
      best = s;
      start = i;
    }
  }
  FrankWolfeResult res;
  res.point = vertices[start];

  for (int it = 1; it <= max_iters; ++it) {
    res.iterations = it;
    // Linear minimization of <grad, v> with grad = p - y.
    std::size_t arg = 0;
    double low = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      double s = 0;
      for (std::size_t j = 0; j < m; ++j)
        s += (res.point[j] - y[j]) * vertices[i][j];
      if (s < low) {
        low = s;
        arg = i;
      }
    }
    double gap = 0, dir_norm2 = 0;
    for (std::size_t j = 0; j < m; ++j) {
      const double dir = vertices[arg][j] - res.point[j];
      gap += (y[j] - res.point[j]) * dir;
      dir_norm2 += dir * dir;
    }
    res.gap = std::max(gap, 0.0);
    if (res.gap <= 0.5 * tol) {
      res.converged = true;
      return res;
    }
    double step = dir_norm2 > 0 ? std::clamp(gap / dir_norm2, 0.0, 1.0) : 0.0;
    if (step == 0) {
      res.converged = true;
      return res;
    }
    for (std::size_t j = 0; j < m; ++j)
      res.point[j] += step * (vertices[arg][j] - res.point[j]);
  }
  res.converged = false;
  return res;
}

struct ProjectionResult {
  std::vector<double> answers;        // projected point
  std::vector<double> noisy_answers;  // pre-projection Gaussian draw
  double eps = 0;                     // Delta / (sigma n)
  double eps0 = 0;                    // Delta0 / (sigma n)
  double delta = 0;
  double delta0 = 0;
  double fw_gap = 0;
  bool fw_converged = true;
};

// Gaussian noise on the workload answer vector followed by projection onto
// the convex hull of attainable answers. Reports the per-person and
// per-attribute parameters eps = Delta/(sigma n), eps0 = Delta0/(sigma n).
inline ProjectionResult projection_mechanism(const Dataset& ds, const Workload& w,
                                             double sigma, RngStream rng,
                                             const NoiseConfig& cfg = {}) {
  w.validate();
  if (ds.d() != w.d) throw std::invalid_argument("dataset/workload dimension mismatch");
  if (ds.n() == 0) throw std::invalid_argument("projection_mechanism: n >= 1 required");
  if (!(sigma > 0)) throw std::invalid_argument("projection_mechanism: sigma > 0");

  const std::vector<double> exact = eval_workload(w, ds);
  ProjectionResult res;
  res.noisy_answers.resize(exact.size());
  for (std::size_t j = 0; j < exact.size(); ++j)
    res.noisy_answers[j] = exact[j] + gaussian_sample(sigma, rng, cfg);

  auto fw = frank_wolfe_project(res.noisy_answers, vertex_answers(w));
  res.answers = std::move(fw.point);
  res.fw_gap = fw.gap;
  res.fw_converged = fw.converged;

  const Diameters dia = diameters(w);
  res.delta = dia.delta;
  res.delta0 = dia.delta0;
  const double scale = sigma * static_cast<double>(ds.n());
  res.eps = dia.delta / scale;
  res.eps0 = dia.delta0 / scale;
  return res;
}

// All unordered ell-subsets of query indices with pairwise-disjoint
// attribute sets, in lexicographic order. Throws TupleExplosionError as soon
// as the count would exceed `cap`.
inline std::vector<std::vector<int>> enumerate_disjoint_tuples(
    const Workload& w, int ell, std::size_t cap = 1000000) {
  if (ell < 1) throw std::invalid_argument("ell must be >= 1");
  const int m = static_cast<int>(w.m());
  const int words = (w.d + 63) / 64;
  std::vector<std::vector<std::uint64_t>> masks(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    masks[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(words), 0);
    for (int a : w.queries[static_cast<std::size_t>(i)].attrs)
      masks[static_cast<std::size_t>(i)][static_cast<std::size_t>(a / 64)] |=
          std::uint64_t{1} << (a % 64);
  }
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::vector<std::uint64_t> used(static_cast<std::size_t>(words), 0);
  auto disjoint = [&](int i) {
    for (int t = 0; t < words; ++t)
      if (used[static_cast<std::size_t>(t)] &
          masks[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)])
        return false;
    return true;
  };
  auto rec = [&](auto&& self, int next) -> void {
    if (static_cast<int>(cur.size()) == ell) {
      if (out.size() >= cap)
        throw TupleExplosionError(
            "disjoint tuple enumeration exceeds cap of " + std::to_string(cap));
      out.push_back(cur);
      return;
    }
    const int need = ell - static_cast<int>(cur.size());
    for (int i = next; i <= m - need; ++i) {
      if (!disjoint(i)) continue;
      for (int t = 0; t < words; ++t)
        used[static_cast<std::size_t>(t)] ^=
            masks[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
      for (int t = 0; t < words; ++t)
        used[static_cast<std::size_t>(t)] ^=
            masks[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
    }
  };
  rec(rec, 0);
  return out;
}

struct MwemRound {
  int round = 0;
  std::vector<int> tuple;
  std::vector<double> noisy_answers;
  double distribution_l1_error = 0;  // |sum A_{t+1} - 1| after renormalizing
};

struct MwemResult {
  DistributionOverDomain synthetic;  // (1/T) sum of the round distributions
  std::vector<double> answers;       // workload evaluated under `synthetic`
  std::vector<MwemRound> trace;
  double eps_round = 0;              // eps0 / sqrt(2T)
  Budget per_attribute_budget;       // eps0-per-attribute partial CDP
  Budget zcdp_budget;                // (1/2)(ell*eps0)^2-zCDP
};

// Rounds schedule sqrt(log|X|) * eps0 * n / (sqrt(ell) * log m) with unit
// constant, clamped to [1, 200].
inline int mwem_default_rounds(int d, std::size_t n, double eps0, int ell,
                               std::size_t m) {
  const double logm = std::max(std::log(static_cast<double>(m)), 1e-9);
  const double t = std::sqrt(d * std::log(2.0)) * eps0 * static_cast<double>(n) /
                   (std::sqrt(static_cast<double>(ell)) * logm);
  return std::clamp(static_cast<int>(std::ceil(t)), 1, 200);
}

namespace detail {

// Per-query domain value lookup: value(u) = table[pattern of u on attrs].
struct QueryOnDomain {
  std::vector<int> attrs;
  std::vector<double> table;

  static QueryOnDomain build(const Query& q) {
    QueryOnDomain qd;
    qd.attrs = q.attrs;
    const std::size_t patterns = std::size_t{1} << q.attrs.size();
    qd.table.resize(patterns);
    for (std::size_t p = 0; p < patterns; ++p) {
      // Bits of pattern p in attribute order, first attribute most
      // significant: reconstruct a record carrying just those bits.
      std::vector<std::uint8_t> bits(static_cast<std::size_t>(
          q.attrs.empty() ? 1 : q.attrs.back() + 1), 0);
      for (std::size_t i = 0; i < q.attrs.size(); ++i)
        bits[static_cast<std::size_t>(q.attrs[i])] =
            static_cast<std::uint8_t>((p >> (q.attrs.size() - 1 - i)) & 1u);
      qd.table[p] = eval_query(q, Record(bits));
    }
    return qd;
  }

  double value(std::uint64_t u) const {
    std::size_t p = 0;
    for (int a : attrs) p = (p << 1) | ((u >> a) & 1u);
    return table[p];
  }

  double mean_under(const std::vector<double>& probs) const {
    double s = 0;
    for (std::uint64_t u = 0; u < probs.size(); ++u) s += probs[u] * value(u);
    return s;
  }
};

}  // namespace detail

// Multiplicative-weights release with ell attribute-disjoint queries per
// round. Each round selects a disjoint tuple by the exponential mechanism
// with exponent eps_round * n * sum_i |q_i(A_t) - q_i(x)|, answers the
// selected queries with N(0, 1/(n eps_round)^2) noise clipped to [0,1], and
// applies the update A_{t+1}(u) oc A_t(u) exp((1/2) sum_i q_i(u) (a_i -
// q_i(A_t))). Weights are kept in log space and renormalized every round.
inline MwemResult mwem(const Dataset& ds, const Workload& w, double eps0, int T,
                       int ell, RngStream rng, const NoiseConfig& cfg = {},
                       std::size_t tuple_cap = 1000000) {
  w.validate();
  if (ds.d() != w.d) throw std::invalid_argument("dataset/workload dimension mismatch");
  if (ds.d() > DistributionOverDomain::kMaxD)
    throw std::invalid_argument("mwem requires d <= 20");
  if (ds.n() == 0) throw std::invalid_argument("mwem: n >= 1 required");
  if (!(eps0 > 0)) throw std::invalid_argument("mwem: eps0 must be > 0");
  if (T < 1) throw std::invalid_argument("mwem: T >= 1 required");
  if (ell < 1) throw std::invalid_argument("mwem: ell >= 1 required");

  const auto tuples = enumerate_disjoint_tuples(w, ell, tuple_cap);
  if (tuples.empty())
    throw std::invalid_argument("mwem: no attribute-disjoint tuple of size ell");

  const double n = static_cast<double>(ds.n());
  const double eps_round = eps0 / std::sqrt(2.0 * T);
  const std::vector<double> qx = eval_workload(w, ds);

  std::vector<detail::QueryOnDomain> qdom;
  qdom.reserve(w.m());
  for (const auto& q : w.queries) qdom.push_back(detail::QueryOnDomain::build(q));

  const std::size_t dom = std::size_t{1} << ds.d();
  std::vector<double> logw(dom, 0.0), probs(dom, 1.0 / static_cast<double>(dom));
  std::vector<double> avg(dom, 0.0);
  std::vector<double> qa(w.m());
  std::vector<double> scores(tuples.size());

  MwemResult res{DistributionOverDomain::uniform(ds.d()),
                 {},
                 {},
                 eps_round,
                 Budget::partial_cdp(PrivacyMetric::uniform_per_attribute(eps0, ds.d())),
                 Budget::cdp(ell * eps0)};
  res.trace.reserve(static_cast<std::size_t>(T));

  for (int t = 1; t <= T; ++t) {
    for (std::uint64_t u = 0; u < dom; ++u) avg[u] += probs[u];

    for (std::size_t j = 0; j < w.m(); ++j) qa[j] = qdom[j].mean_under(probs);
    for (std::size_t i = 0; i < tuples.size(); ++i) {
      double s = 0;
      for (int j : tuples[i]) s += std::abs(qa[static_cast<std::size_t>(j)] -
                                            qx[static_cast<std::size_t>(j)]);
      scores[i] = s;
    }
    const std::size_t pick = exponential_select(scores, eps_round * n, rng, cfg);

    MwemRound round;
    round.round = t;
    round.tuple = tuples[pick];
    round.noisy_answers.reserve(tuples[pick].size());
    for (int j : tuples[pick]) {
      double a = qx[static_cast<std::size_t>(j)] +
                 gaussian_sample(1.0 / (n * eps_round), rng, cfg);
      a = std::clamp(a, 0.0, 1.0);
      round.noisy_answers.push_back(a);
    }

    for (std::uint64_t u = 0; u < dom; ++u) {
      double upd = 0;
      for (std::size_t i = 0; i < round.tuple.size(); ++i) {
        const auto j = static_cast<std::size_t>(round.tuple[i]);
        upd += qdom[j].value(u) * (round.noisy_answers[i] - qa[j]);
      }
      logw[u] += 0.5 * upd;
    }
    double mx = logw[0];
    for (double v : logw) mx = std::max(mx, v);
    double z = 0;
    for (std::uint64_t u = 0; u < dom; ++u) z += std::exp(logw[u] - mx);
    double mass = 0;
    for (std::uint64_t u = 0; u < dom; ++u) {
      probs[u] = std::exp(logw[u] - mx) / z;
      mass += probs[u];
    }
    round.distribution_l1_error = std::abs(mass - 1.0);

    res.trace.push_back(std::move(round));
  }

  for (auto& v : avg) v /= static_cast<double>(T);
  // Guard against accumulated rounding before the normalized-distribution
  // invariant check in from_probs.
  double total = 0;
  for (double v : avg) total += v;
  for (auto& v : avg) v /= total;
  res.synthetic = DistributionOverDomain::from_probs(ds.d(), std::move(avg));
  res.answers = eval_workload_on_distribution(w, res.synthetic);
  return res;
}

// Exact maximum over attribute-disjoint ell-tuples of the average absolute
// error between distribution answers and dataset answers.
inline double disjoint_tuple_max_error(const Workload& w, int ell,
                                       const DistributionOverDomain& a,
                                       const Dataset& ds,
                                       std::size_t tuple_cap = 1000000) {
  const auto tuples = enumerate_disjoint_tuples(w, ell, tuple_cap);
  const std::vector<double> qx = eval_workload(w, ds);
  const std::vector<double> qa = eval_workload_on_distribution(w, a);
  double best = 0;
  for (const auto& tup : tuples) {
    double s = 0;
    for (int j : tup) s += std::abs(qa[static_cast<std::size_t>(j)] -
                                    qx[static_cast<std::size_t>(j)]);
    best = std::max(best, s / static_cast<double>(ell));
  }
  return best;
}

// Right-hand side of the averaged-error guarantee for partial-DP MWEM.
inline double mwem_error_bound(int d, std::size_t n, double eps0, int T, int ell,
                               std::size_t m) {
  const double nn = static_cast<double>(n);
  return std::sqrt(2.0 * T / (nn * nn * eps0 * eps0) +
                   4.0 * d * std::log(2.0) / (static_cast<double>(T) * ell)) +
         std::sqrt(2.0 * T) / (eps0 * nn) * std::log(static_cast<double>(m));
}

}  // namespace pdp

#endif  // PDP_RELEASE_HPP_
