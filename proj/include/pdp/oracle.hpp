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

// Brute-force reference implementations used by the tests. Each oracle
// re-derives its result by direct enumeration with its own traversal and
// evaluation logic, deliberately sharing no code path with the mechanism it
// checks.

#ifndef PDP_ORACLE_HPP_
#define PDP_ORACLE_HPP_

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pdp/core.hpp"
#include "pdp/halfspace.hpp"
#include "pdp/histogram.hpp"
#include "pdp/release.hpp"
#include "pdp/rng.hpp"
#include "pdp/workloads.hpp"

namespace pdp::oracle {

namespace detail {

// Independent query evaluation on an index-encoded record (bit j = attr j).
inline double eval_query_raw(const Query& q, std::uint64_t u) {
  switch (q.kind) {
    case QueryKind::kParity: {
      unsigned acc = 0;
      for (int a : q.attrs) acc ^= (u >> a) & 1u;
      return acc;
    }
    case QueryKind::kConjunction: {
      for (int a : q.attrs)
        if (!((u >> a) & 1u)) return 0.0;
      return 1.0;
    }
    case QueryKind::kTable: {
      std::size_t p = 0;
      for (int a : q.attrs) p = (p << 1) | ((u >> a) & 1u);
      return q.table[p];
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace detail

// Exact multiset counts of a dataset.
inline SparseHistogram exact_frequencies(const Dataset& ds) {
  SparseHistogram h;
  for (const auto& r : ds.rows) h.entries[r] += 1.0;
  return h;
}

// Exhaustive minimum over all flip subsets of the distance to a point
// classified differently from y; nullopt if none exists.
inline std::optional<int> brute_dec(std::span<const std::int8_t> x, int y,
                                    const Halfspace& h) {
  const int d = static_cast<int>(h.w.size());
  if (d > 20) throw std::invalid_argument("brute_dec capped at d <= 20");
  std::optional<int> best;
  for (std::uint64_t flips = 0; flips < (std::uint64_t{1} << d); ++flips) {
    double dot = 0;
    int popcount = 0;
    for (int j = 0; j < d; ++j) {
      const double xs = (flips >> j) & 1u ? -x[static_cast<std::size_t>(j)]
                                          : x[static_cast<std::size_t>(j)];
      dot += h.w[static_cast<std::size_t>(j)] * xs;
      popcount += (flips >> j) & 1u;
    }
    const int label = dot < 0 ? -1 : 1;
    if (label != y && (!best || popcount < *best)) best = popcount;
  }
  return best;
}

// Fraction of samples with some differently-classified point inside the
// Hamming ball of radius gamma*d, by ball enumeration.
inline double brute_robust_error(const Halfspace& h, const LabeledDataset& s,
                                 double gamma) {
  if (s.n() == 0) return 0.0;
  double bad = 0;
  for (const auto& ex : s.rows) {
    const auto dist = brute_dec(ex.x, ex.y, h);
    bad += dist && *dist <= gamma * static_cast<double>(s.d());
  }
  return bad / static_cast<double>(s.n());
}

// True diameters by full enumeration of record pairs (and neighbor pairs).
inline Diameters brute_diameters(const Workload& w) {
  if (w.d > 16) throw std::invalid_argument("brute_diameters capped at d <= 16");
  const std::uint64_t dom = std::uint64_t{1} << w.d;
  std::vector<std::vector<double>> qv(dom, std::vector<double>(w.m()));
  for (std::uint64_t u = 0; u < dom; ++u)
    for (std::size_t j = 0; j < w.m(); ++j)
      qv[u][j] = detail::eval_query_raw(w.queries[j], u);
  double best = 0, best0 = 0;
  for (std::uint64_t a = 0; a < dom; ++a) {
    for (std::uint64_t b = a + 1; b < dom; ++b) {
      double s = 0;
      for (std::size_t j = 0; j < w.m(); ++j) {
        const double t = qv[a][j] - qv[b][j];
        s += t * t;
      }
      best = std::max(best, s);
      if (std::popcount(a ^ b) == 1) best0 = std::max(best0, s);
    }
  }
  return {std::sqrt(best), std::sqrt(best0)};
}

// Max over attribute-disjoint ell-tuples of the mean absolute error, by an
// independent recursive enumeration.
inline double brute_disjoint_tuple_max_error(const Workload& w, int ell,
                                             const DistributionOverDomain& a,
                                             const Dataset& ds) {
  if (ell < 1) throw std::invalid_argument("ell must be >= 1");
  const int m = static_cast<int>(w.m());
  std::vector<double> err(w.m());
  for (std::size_t j = 0; j < w.m(); ++j) {
    double qa = 0;
    for (std::uint64_t u = 0; u < a.domain_size(); ++u)
      qa += a.prob(u) * detail::eval_query_raw(w.queries[j], u);
    double qx = 0;
    for (const auto& row : ds.rows)
      qx += detail::eval_query_raw(w.queries[j], row.to_index());
    qx /= static_cast<double>(ds.n());
    err[j] = std::abs(qa - qx);
  }
  double best = -1;
  std::vector<int> chosen;
  std::function<void(int, std::uint64_t, double)> rec =
      [&](int next, std::uint64_t used, double sum) {
        if (static_cast<int>(chosen.size()) == ell) {
          best = std::max(best, sum / ell);
          return;
        }
        for (int i = next; i < m; ++i) {
          std::uint64_t mask = 0;
          for (int at : w.queries[static_cast<std::size_t>(i)].attrs)
            mask |= std::uint64_t{1} << at;
          if (mask & used) continue;
          chosen.push_back(i);
          rec(i + 1, used | mask, sum + err[static_cast<std::size_t>(i)]);
          chosen.pop_back();
        }
      };
  rec(0, 0, 0);
  if (best < 0)
    throw std::invalid_argument("no attribute-disjoint tuple of size ell");
  return best;
}

struct NonPrivateMwemRound {
  int selected_query = 0;
  double answer = 0;
};

struct NonPrivateMwemResult {
  std::vector<double> average;  // averaged distribution over the domain
  std::vector<double> answers;
  std::vector<NonPrivateMwemRound> trace;
  std::vector<double> potentials;  // KL(empirical || A_t), one per round
};

// Standard multiplicative-weights release: argmax single-query selection
// (lowest index on ties), exact answers, linear-space weights.
inline NonPrivateMwemResult nonprivate_mwem(const Dataset& ds, const Workload& w,
                                            int T) {
  if (T < 1) throw std::invalid_argument("T >= 1 required");
  const std::uint64_t dom = std::uint64_t{1} << w.d;
  std::vector<double> probs(dom, 1.0 / static_cast<double>(dom));
  std::vector<double> avg(dom, 0.0);
  std::vector<double> qx(w.m(), 0.0);
  for (const auto& row : ds.rows)
    for (std::size_t j = 0; j < w.m(); ++j)
      qx[j] += detail::eval_query_raw(w.queries[j], row.to_index());
  for (auto& v : qx) v /= static_cast<double>(ds.n());

  std::vector<double> empirical(dom, 0.0);
  for (const auto& row : ds.rows) empirical[row.to_index()] += 1.0;
  for (auto& v : empirical) v /= static_cast<double>(ds.n());

  NonPrivateMwemResult res;
  for (int t = 1; t <= T; ++t) {
    for (std::uint64_t u = 0; u < dom; ++u) avg[u] += probs[u];
    double kl = 0;
    for (std::uint64_t u = 0; u < dom; ++u)
      if (empirical[u] > 0) kl += empirical[u] * std::log(empirical[u] / probs[u]);
    res.potentials.push_back(kl);
    int sel = 0;
    double best = -1, qa_sel = 0;
    for (std::size_t j = 0; j < w.m(); ++j) {
      double qa = 0;
      for (std::uint64_t u = 0; u < dom; ++u)
        qa += probs[u] * detail::eval_query_raw(w.queries[j], u);
      const double e = std::abs(qa - qx[j]);
      if (e > best) {
        best = e;
        sel = static_cast<int>(j);
        qa_sel = qa;
      }
    }
    res.trace.push_back({sel, qx[static_cast<std::size_t>(sel)]});
    double z = 0;
    for (std::uint64_t u = 0; u < dom; ++u) {
      probs[u] *= std::exp(
          0.5 *
          detail::eval_query_raw(w.queries[static_cast<std::size_t>(sel)], u) *
          (qx[static_cast<std::size_t>(sel)] - qa_sel));
      z += probs[u];
    }
    for (auto& p : probs) p /= z;
  }
  for (auto& v : avg) v /= static_cast<double>(T);
  res.average = avg;
  res.answers.resize(w.m());
  for (std::size_t j = 0; j < w.m(); ++j) {
    double qa = 0;
    for (std::uint64_t u = 0; u < dom; ++u)
      qa += avg[u] * detail::eval_query_raw(w.queries[j], u);
    res.answers[j] = qa;
  }
  return res;
}

// One realized output value of a mechanism on neighboring datasets.
struct RatioEstimate {
  std::string event;
  double p_hat = 0;       // frequency on D
  double q_hat = 0;       // frequency on D'
  double stderr_log = 0;  // combined standard error of log(p_hat/q_hat)
  std::int64_t trials = 0;
  bool reliable = false;  // >= 100 occurrences on both sides
};

struct NeighborInfo {
  std::size_t row = 0;
  int attribute_distance = 0;
};

inline NeighborInfo check_neighboring(const Dataset& a, const Dataset& b) {
  if (a.d() != b.d() || a.n() != b.n())
    throw std::invalid_argument("neighboring datasets must have equal shape");
  std::optional<std::size_t> differing;
  for (std::size_t i = 0; i < a.n(); ++i) {
    if (a.rows[i] != b.rows[i]) {
      if (differing) throw std::invalid_argument("datasets differ in more than one row");
      differing = i;
    }
  }
  if (!differing)
    throw std::invalid_argument("datasets are identical, not neighboring");
  return {*differing, hamming_distance(a.rows[*differing], b.rows[*differing])};
}

// Runs the mechanism `trials` times on each dataset with disjoint
// substreams, tabulates realized outputs, and reports per-event frequency
// ratios with delta-method standard errors on the log ratio. Events seen
// fewer than 100 times on either side are flagged unreliable.
inline std::vector<RatioEstimate> mc_privacy_ratio(
    const std::function<std::string(const Dataset&, RngStream)>& mechanism,
    const Dataset& d_left, const Dataset& d_right, std::int64_t trials,
    RngStream rng) {
  check_neighboring(d_left, d_right);
  if (trials < 1) throw std::invalid_argument("trials >= 1 required");
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> tally;
  RngStream left_rng = rng.substream(0);
  RngStream right_rng = rng.substream(1);
  for (std::int64_t t = 0; t < trials; ++t) {
    tally[mechanism(d_left, left_rng.substream(static_cast<std::uint64_t>(t)))]
        .first++;
    tally[mechanism(d_right, right_rng.substream(static_cast<std::uint64_t>(t)))]
        .second++;
  }
  std::vector<RatioEstimate> out;
  out.reserve(tally.size());
  const double n = static_cast<double>(trials);
  for (const auto& [event, counts] : tally) {
    RatioEstimate e;
    e.event = event;
    e.trials = trials;
    e.p_hat = static_cast<double>(counts.first) / n;
    e.q_hat = static_cast<double>(counts.second) / n;
    e.reliable = counts.first >= 100 && counts.second >= 100;
    if (counts.first > 0 && counts.second > 0)
      e.stderr_log = std::sqrt((1 - e.p_hat) / (e.p_hat * n) +
                               (1 - e.q_hat) / (e.q_hat * n));
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace pdp::oracle

#endif  // PDP_ORACLE_HPP_
