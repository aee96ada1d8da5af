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

#ifndef PDP_WORKLOADS_HPP_
#define PDP_WORKLOADS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pdp/core.hpp"

namespace pdp {

enum class QueryKind { kParity, kConjunction, kTable };

// Statistical query with range [0,1] depending only on the attributes in
// `attrs` (sorted, 0-based). Table queries index their truth table by the
// selected bits read in attribute order, first attribute most significant.
struct Query {
  std::vector<int> attrs;
  QueryKind kind = QueryKind::kConjunction;
  std::vector<double> table;

  int arity() const { return static_cast<int>(attrs.size()); }

  void validate(int d) const {
    if (attrs.empty()) throw std::invalid_argument("query needs >= 1 attribute");
    for (std::size_t i = 0; i < attrs.size(); ++i) {
      if (attrs[i] < 0 || attrs[i] >= d)
        throw std::invalid_argument("query attribute out of range");
      if (i > 0 && attrs[i] <= attrs[i - 1])
        throw std::invalid_argument("query attributes must be sorted, unique");
    }
    if (kind == QueryKind::kTable) {
      if (table.size() != (std::size_t{1} << attrs.size()))
        throw std::invalid_argument("truth table must have 2^|attrs| entries");
      for (double v : table)
        if (!(v >= 0 && v <= 1))
          throw std::invalid_argument("truth table values must lie in [0,1]");
    } else if (!table.empty()) {
      throw std::invalid_argument("only table queries carry a truth table");
    }
  }

  std::size_t pattern_of(const Record& x) const {
    std::size_t p = 0;
    for (int a : attrs) p = (p << 1) | x[a];
    return p;
  }
};

inline double eval_query(const Query& q, const Record& x) {
  switch (q.kind) {
    case QueryKind::kParity: {
      unsigned acc = 0;
      for (int a : q.attrs) acc ^= x[a];
      return static_cast<double>(acc);
    }
    case QueryKind::kConjunction: {
      for (int a : q.attrs)
        if (!x[a]) return 0.0;
      return 1.0;
    }
    case QueryKind::kTable:
      return q.table[q.pattern_of(x)];
  }
  throw std::logic_error("unreachable");
}

struct MarginalSpec {
  int k = 0;
  QueryKind kind = QueryKind::kConjunction;
};

struct Workload {
  int d = 0;
  std::vector<Query> queries;
  // Set when generated by kway_marginal_workload; unlocks the closed-form
  // diameters for any d.
  std::optional<MarginalSpec> marginal;

  std::size_t m() const { return queries.size(); }

  void validate() const {
    if (d < 1) throw std::invalid_argument("workload requires d >= 1");
    if (queries.empty()) throw std::invalid_argument("workload requires m >= 1");
    for (const auto& q : queries) q.validate(d);
  }

  nlohmann::json to_json() const;
  static Workload from_json(const nlohmann::json& j);
};

// Mean of each query over the dataset rows.
inline std::vector<double> eval_workload(const Workload& w, const Dataset& ds) {
  if (ds.n() == 0)
    throw std::invalid_argument("eval_workload: dataset must be non-empty");
  std::vector<double> out(w.m(), 0.0);
  for (const auto& row : ds.rows)
    for (std::size_t j = 0; j < w.m(); ++j) out[j] += eval_query(w.queries[j], row);
  const double inv = 1.0 / static_cast<double>(ds.n());
  for (auto& v : out) v *= inv;
  return out;
}

// One query per k-subset of [d] in lexicographic order, m = C(d, k).
inline Workload kway_marginal_workload(int d, int k, QueryKind kind) {
  if (d < 1) throw std::invalid_argument("d must be >= 1");
  if (k < 1 || k > d) throw std::invalid_argument("k must satisfy 1 <= k <= d");
  if (kind == QueryKind::kTable)
    throw std::invalid_argument("marginal workloads are parity or conjunction");
  Workload w;
  w.d = d;
  w.marginal = MarginalSpec{k, kind};
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    Query q;
    q.attrs = idx;
    q.kind = kind;
    w.queries.push_back(std::move(q));
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == d - k + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j)
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  return w;
}

struct Diameters {
  double delta = 0;   // sup over record pairs of ||Q(x) - Q(x')||_2
  double delta0 = 0;  // same sup restricted to Hamming-neighbor pairs
};

namespace detail {

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace detail

// For k-way marginal workloads: delta = sqrt(m), delta0 = sqrt(C(d-1, k-1)).
inline Diameters closed_form_marginal_diameters(int d, int k) {
  return {std::sqrt(detail::binomial(d, k)),
          std::sqrt(detail::binomial(d - 1, k - 1))};
}

// Closed form for generated k-way marginal workloads; exhaustive
// maximization over the 2^d record domain otherwise (capped at d <= 16).
inline Diameters diameters(const Workload& w) {
  if (w.marginal) return closed_form_marginal_diameters(w.d, w.marginal->k);
  if (w.d > 16)
    throw std::invalid_argument(
        "diameters: exhaustive path enumerates 2^d records and is capped at "
        "d <= 16; only marginal workloads have a closed form");
  const std::uint64_t dom = std::uint64_t{1} << w.d;
  std::vector<std::vector<double>> qv(dom);
  for (std::uint64_t u = 0; u < dom; ++u) {
    Record r = Record::from_index(u, w.d);
    qv[u].reserve(w.m());
    for (const auto& q : w.queries) qv[u].push_back(eval_query(q, r));
  }
  auto dist2 = [&](std::uint64_t a, std::uint64_t b) {
    double s = 0;
    for (std::size_t j = 0; j < w.m(); ++j) {
      double t = qv[a][j] - qv[b][j];
      s += t * t;
    }
    return s;
  };
  double best = 0, best0 = 0;
  for (std::uint64_t a = 0; a < dom; ++a) {
    for (std::uint64_t b = a + 1; b < dom; ++b) best = std::max(best, dist2(a, b));
    for (int j = 0; j < w.d; ++j) {
      std::uint64_t b = a ^ (std::uint64_t{1} << j);
      if (b > a) best0 = std::max(best0, dist2(a, b));
    }
  }
  return {std::sqrt(best), std::sqrt(best0)};
}

inline nlohmann::json Workload::to_json() const {
  nlohmann::json j;
  j["d"] = d;
  if (marginal) {
    j["kind"] = marginal->kind == QueryKind::kParity ? "parity" : "conjunction";
    j["k"] = marginal->k;
    return j;
  }
  j["kind"] = "explicit";
  j["queries"] = nlohmann::json::array();
  for (const auto& q : queries) {
    nlohmann::json jq;
    // Serialized attribute indices are 1-based, matching attr_j column names.
    std::vector<int> attrs1;
    for (int a : q.attrs) attrs1.push_back(a + 1);
    jq["attrs"] = attrs1;
    jq["kind"] = q.kind == QueryKind::kParity
                     ? "parity"
                     : (q.kind == QueryKind::kConjunction ? "conjunction"
                                                          : "table");
    if (q.kind == QueryKind::kTable) jq["table"] = q.table;
    j["queries"].push_back(std::move(jq));
  }
  return j;
}

inline Workload Workload::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "parity" || kind == "conjunction") {
    return kway_marginal_workload(
        j.at("d").get<int>(), j.at("k").get<int>(),
        kind == "parity" ? QueryKind::kParity : QueryKind::kConjunction);
  }
  if (kind != "explicit")
    throw std::invalid_argument("workload kind must be parity, conjunction or explicit");
  Workload w;
  w.d = j.at("d").get<int>();
  for (const auto& jq : j.at("queries")) {
    Query q;
    for (int a : jq.at("attrs").get<std::vector<int>>()) q.attrs.push_back(a - 1);
    const std::string qk = jq.at("kind").get<std::string>();
    q.kind = qk == "parity" ? QueryKind::kParity
                            : (qk == "conjunction" ? QueryKind::kConjunction
                                                   : QueryKind::kTable);
    if (q.kind == QueryKind::kTable)
      q.table = jq.at("table").get<std::vector<double>>();
    w.queries.push_back(std::move(q));
  }
  w.validate();
  return w;
}

}  // namespace pdp

#endif  // PDP_WORKLOADS_HPP_
