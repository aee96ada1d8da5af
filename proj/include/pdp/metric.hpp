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

#ifndef PDP_METRIC_HPP_
#define PDP_METRIC_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pdp/core.hpp"

namespace pdp {

// Extended non-negative real. Unreachable graph pairs are an explicit
// "unbounded" state, never a sentinel float.
class MetricDistance {
 public:
  static MetricDistance finite(double v) {
    if (!(v >= 0)) throw std::invalid_argument("metric distance must be >= 0");
    return MetricDistance(v, false);
  }
  static MetricDistance infinity() { return MetricDistance(0, true); }

  bool is_infinite() const { return infinite_; }
  double value() const {
    if (infinite_)
      throw std::logic_error("value() called on an unbounded distance");
    return value_;
  }
  // Convenience for reports: +inf as a double.
  double value_or_inf() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

  friend bool operator<(const MetricDistance& a, const MetricDistance& b) {
    if (a.infinite_) return false;
    if (b.infinite_) return true;
    return a.value_ < b.value_;
  }
  friend bool operator==(const MetricDistance& a, const MetricDistance& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }

 private:
  MetricDistance(double v, bool inf) : value_(v), infinite_(inf) {}
  double value_;
  bool infinite_;
};

// Undirected non-negatively weighted graph on records.
class RecordGraph {
 public:
  void add_vertex(const Record& r) {
    if (index_.count(r)) return;
    index_.emplace(r, vertices_.size());
    vertices_.push_back(r);
    adj_.emplace_back();
  }

  void add_edge(const Record& a, const Record& b, double weight) {
    if (weight < 0) throw std::invalid_argument("edge weight must be >= 0");
    add_vertex(a);
    add_vertex(b);
    std::size_t ia = index_.at(a), ib = index_.at(b);
    adj_[ia].emplace_back(ib, weight);
    adj_[ib].emplace_back(ia, weight);
  }

  bool has_vertex(const Record& r) const { return index_.count(r) > 0; }
  const std::vector<Record>& vertices() const { return vertices_; }

  // Dijkstra with a binary heap.
  MetricDistance distance(const Record& a, const Record& b) const {
    auto ia = index_.find(a);
    auto ib = index_.find(b);
    if (ia == index_.end() || ib == index_.end())
      throw std::invalid_argument("record is not a vertex of the graph");
    const std::size_t src = ia->second, dst = ib->second;
    if (src == dst) return MetricDistance::finite(0);
    std::vector<double> dist(vertices_.size(),
                             std::numeric_limits<double>::infinity());
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[src] = 0;
    heap.emplace(0.0, src);
    while (!heap.empty()) {
      auto [du, u] = heap.top();
      heap.pop();
      if (du > dist[u]) continue;
      if (u == dst) return MetricDistance::finite(du);
      for (auto [v, w] : adj_[u]) {
        if (du + w < dist[v]) {
          dist[v] = du + w;
          heap.emplace(dist[v], v);
        }
      }
    }
    return MetricDistance::infinity();
  }

 private:
  std::vector<Record> vertices_;
  std::map<Record, std::size_t> index_;
  std::vector<std::vector<std::pair<std::size_t, double>>> adj_;
};

// Symmetric non-negative dissimilarity eps(x, x') between two records.
// Uniform: eps0 * Hamming; weighted: sum of weights over differing
// attributes; graph: shortest-path distance; combined: pointwise sum or
// root-sum-of-squares of children (sequential composition of partial
// budgets).
class PrivacyMetric {
 public:
  enum class Kind { kUniform, kWeighted, kGraph, kCombined };
  enum class CombineMode { kSum, kRootSumSquares };

  static PrivacyMetric uniform_per_attribute(double eps0, int d) {
    if (eps0 < 0) throw std::invalid_argument("eps0 must be >= 0");
    if (d < 1) throw std::invalid_argument("d must be >= 1");
    PrivacyMetric m;
    m.kind_ = Kind::kUniform;
    m.eps0_ = eps0;
    m.d_ = d;
    return m;
  }

  static PrivacyMetric weighted_per_attribute(std::vector<double> w) {
    if (w.empty()) throw std::invalid_argument("weights must be non-empty");
    for (double v : w)
      if (v < 0) throw std::invalid_argument("weights must be >= 0");
    PrivacyMetric m;
    m.kind_ = Kind::kWeighted;
    m.d_ = static_cast<int>(w.size());
    m.weights_ = std::move(w);
    return m;
  }

  static PrivacyMetric record_graph(RecordGraph g) {
    PrivacyMetric m;
    m.kind_ = Kind::kGraph;
    m.graph_ = std::make_shared<RecordGraph>(std::move(g));
    m.d_ = m.graph_->vertices().empty() ? 0 : m.graph_->vertices()[0].size();
    return m;
  }

  static PrivacyMetric combined(std::vector<PrivacyMetric> children,
                                CombineMode mode) {
    if (children.empty())
      throw std::invalid_argument("combined metric needs children");
    PrivacyMetric m;
    m.kind_ = Kind::kCombined;
    m.mode_ = mode;
    m.d_ = children.front().d_;
    m.children_ =
        std::make_shared<std::vector<PrivacyMetric>>(std::move(children));
    return m;
  }

  Kind kind() const { return kind_; }
  bool is_uniform() const { return kind_ == Kind::kUniform; }
  double eps0() const {
    if (kind_ != Kind::kUniform)
      throw std::logic_error("eps0() requires a uniform per-attribute metric");
    return eps0_;
  }
  int dimension() const { return d_; }
  const std::vector<double>& weights() const { return weights_; }

  MetricDistance eval(const Record& a, const Record& b) const {
    switch (kind_) {
      case Kind::kUniform:
        return MetricDistance::finite(eps0_ * hamming_distance(a, b));
      case Kind::kWeighted: {
        if (a.size() != d_ || b.size() != d_)
          throw std::invalid_argument("record length does not match metric");
        double s = 0;
        for (int j = 0; j < d_; ++j)
          if (a[j] != b[j]) s += weights_[static_cast<std::size_t>(j)];
        return MetricDistance::finite(s);
      }
      case Kind::kGraph:
        return graph_->distance(a, b);
      case Kind::kCombined: {
        double acc = 0;
        for (const auto& c : *children_) {
          MetricDistance v = c.eval(a, b);
          if (v.is_infinite()) return MetricDistance::infinity();
          acc += mode_ == CombineMode::kSum ? v.value() : v.value() * v.value();
        }
        return MetricDistance::finite(
            mode_ == CombineMode::kSum ? acc : std::sqrt(acc));
      }
    }
    throw std::logic_error("unreachable");
  }

  // Supremum of eval over all record pairs. Per-attribute metrics peak when
  // every attribute differs; graph metrics enumerate all vertex pairs.
  MetricDistance sup() const {
    switch (kind_) {
      case Kind::kUniform:
        return MetricDistance::finite(eps0_ * d_);
      case Kind::kWeighted: {
        double s = 0;
        for (double w : weights_) s += w;
        return MetricDistance::finite(s);
      }
      case Kind::kGraph: {
        const auto& vs = graph_->vertices();
        MetricDistance best = MetricDistance::finite(0);
        for (std::size_t i = 0; i < vs.size(); ++i)
          for (std::size_t j = i + 1; j < vs.size(); ++j) {
            MetricDistance dij = graph_->distance(vs[i], vs[j]);
            if (dij.is_infinite()) return MetricDistance::infinity();
            if (best < dij) best = dij;
          }
        return best;
      }
      case Kind::kCombined: {
        // With a graph child the joint sup needs a common finite domain.
        for (const auto& c : *children_)
          if (c.kind_ == Kind::kGraph || c.kind_ == Kind::kCombined)
            return sup_over_vertices();
        // All children per-attribute: each term is monotone in the set of
        // differing attributes, so the sup is at "all attributes differ".
        Record a = Record::zeros(d_);
        std::vector<std::uint8_t> ones(static_cast<std::size_t>(d_), 1);
        return eval(a, Record(std::move(ones)));
      }
    }
    throw std::logic_error("unreachable");
  }

 private:
  MetricDistance sup_over_vertices() const {
    const RecordGraph* g = nullptr;
    for (const auto& c : *children_)
      if (c.kind_ == Kind::kGraph) {
        g = c.graph_.get();
        break;
      }
    if (g == nullptr)
      throw std::logic_error("combined sup: no finite vertex domain");
    const auto& vs = g->vertices();
    MetricDistance best = MetricDistance::finite(0);
    for (std::size_t i = 0; i < vs.size(); ++i)
      for (std::size_t j = i + 1; j < vs.size(); ++j) {
        MetricDistance dij = eval(vs[i], vs[j]);
        if (dij.is_infinite()) return MetricDistance::infinity();
        if (best < dij) best = dij;
      }
    return best;
  }

  Kind kind_ = Kind::kUniform;
  double eps0_ = 0;
  int d_ = 1;
  std::vector<double> weights_;
  std::shared_ptr<RecordGraph> graph_;
  std::shared_ptr<std::vector<PrivacyMetric>> children_;
  CombineMode mode_ = CombineMode::kSum;
};

inline MetricDistance metric_eval(const PrivacyMetric& m, const Record& a,
                                  const Record& b) {
  return m.eval(a, b);
}

inline MetricDistance metric_sup(const PrivacyMetric& m) { return m.sup(); }

}  // namespace pdp

#endif  // PDP_METRIC_HPP_
