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

#ifndef PDP_HISTOGRAM_HPP_
#define PDP_HISTOGRAM_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pdp/core.hpp"
#include "pdp/mechanisms.hpp"

namespace pdp {

// Noise and threshold parameters of the tree-based heavy-hitter stage.
// lambda is the Laplace scale, tau the base threshold (in counts) and mu the
// per-level bias; privacy needs mu > 1 and check_hh_privacy(lambda, mu) <=
// the target per-attribute eps.
struct HeavyHitterParams {
  double lambda = 0;
  double tau = 0;
  double mu = 0;

  void validate() const {
    if (!(lambda > 0)) throw std::invalid_argument("lambda must be > 0");
    if (!(mu > 1)) throw std::invalid_argument("mu must be > 1");
    if (!(tau >= 0)) throw std::invalid_argument("tau must be >= 0");
  }
};

// Achieved per-attribute parameter (2/lambda)(1 + 1/(1 - e^{-mu/lambda})).
inline double check_hh_privacy(double lambda, double mu) {
  if (!(lambda > 0)) throw std::invalid_argument("lambda must be > 0");
  if (!(mu > 1)) throw std::invalid_argument("mu must be > 1");
  return 2.0 / lambda * (1.0 + 1.0 / (1.0 - std::exp(-mu / lambda)));
}

// Noise parameters hitting a target heavy-hitter budget: mu = lambda *
// ln(16/nu), and the smallest lambda with the achieved parameter <= eps_hh,
// found by bisection (mu/lambda is fixed, so the check is monotone in
// lambda). Roughly lambda ~= 4.02 / eps_hh for nu <= 0.1.
inline HeavyHitterParams solve_hh_noise_params(double eps_hh, double nu) {
  if (!(eps_hh > 0)) throw std::invalid_argument("eps_hh must be > 0");
  if (!(nu > 0 && nu <= 0.1)) throw std::invalid_argument("nu must lie in (0, 0.1]");
  const double ratio = std::log(16.0 / nu);
  auto achieved = [&](double lambda) {
    return 2.0 / lambda * (1.0 + 1.0 / (1.0 - std::exp(-ratio)));
  };
  double lo = 1e-9, hi = 1.0;
  while (achieved(hi) > eps_hh) {
    hi *= 2;
    if (hi > 1e12) throw std::runtime_error("hh parameter bisection diverged");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if (achieved(mid) > eps_hh)
      lo = mid;
    else
      hi = mid;
  }
  HeavyHitterParams p;
  p.lambda = hi;
  p.mu = hi * ratio;
  if (!(p.mu > 1))
    throw std::invalid_argument(
        "target eps_hh too large: mu = lambda*ln(16/nu) must exceed 1");
  return p;
}

// Estimated counts over a sparse support; every record absent from
// `entries` implicitly has estimate 0.
struct SparseHistogram {
  std::map<Record, double> entries;

  double at(const Record& r) const {
    auto it = entries.find(r);
    return it == entries.end() ? 0.0 : it->second;
  }

  nlohmann::json to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [r, v] : entries) j[r.to_string()] = v;
    return j;
  }
};

namespace detail {

// Up to 128 record bits packed for fast interval extraction and hashing.
struct Bits128 {
  std::uint64_t lo = 0, hi = 0;
  bool operator==(const Bits128&) const = default;
};

struct Bits128Hash {
  std::size_t operator()(const Bits128& b) const {
    return detail::mix64(b.lo ^ detail::mix64(b.hi));
  }
};

inline Bits128 pack_record(const Record& r) {
  Bits128 b;
  for (int j = 0; j < r.size(); ++j) {
    if (r[j]) {
      if (j < 64)
        b.lo |= std::uint64_t{1} << j;
      else
        b.hi |= std::uint64_t{1} << (j - 64);
    }
  }
  return b;
}

inline std::uint64_t mask_low(int len) {
  return len >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << len) - 1;
}

// Bits [begin, begin+len) of a packed record, right-aligned.
inline Bits128 extract_bits(const Bits128& b, int begin, int len) {
  if (begin + len <= 64) return Bits128{(b.lo >> begin) & mask_low(len), 0};
  if (begin >= 64) return Bits128{(b.hi >> (begin - 64)) & mask_low(len), 0};
  Bits128 out;
  for (int j = 0; j < len; ++j) {
    const int src = begin + j;
    const bool bit = src < 64 ? (b.lo >> src) & 1u : (b.hi >> (src - 64)) & 1u;
    if (bit) {
      if (j < 64)
        out.lo |= std::uint64_t{1} << j;
      else
        out.hi |= std::uint64_t{1} << (j - 64);
    }
  }
  return out;
}

// Concatenation in attribute order: `left` occupies the low bits.
inline Bits128 concat_bits(const Bits128& left, const Bits128& right,
                           int left_len, int right_len) {
  if (left_len + right_len <= 64)
    return Bits128{left.lo | (right.lo << left_len), 0};
  Bits128 out = left;
  for (int j = 0; j < right_len; ++j) {
    const bool bit = j < 64 ? (right.lo >> j) & 1u : (right.hi >> (j - 64)) & 1u;
    const int dst = left_len + j;
    if (bit) {
      if (dst < 64)
        out.lo |= std::uint64_t{1} << dst;
      else
        out.hi |= std::uint64_t{1} << (dst - 64);
    }
  }
  return out;
}

inline int next_pow2(int v) {
  int p = 1;
  while (p < v) p *= 2;
  return p;
}

}  // namespace detail

// Tree-based heavy hitters over attribute intervals. Level-l intervals have
// length 2^l and threshold tau_l = tau + (l-1) mu; a level-l candidate is a
// concatenation of surviving left and right children, and survives when
// max{count, tau_l - mu} + Lap(lambda) > tau_l. Non-power-of-two d is padded
// with constant-zero attributes whose leaf candidate set is {0}; the padding
// is stripped from the output. The returned list is sorted
// lexicographically.
inline std::vector<Record> priv_heavy_hitter(const Dataset& ds,
                                             const HeavyHitterParams& params,
                                             RngStream rng,
                                             const NoiseConfig& cfg = {}) {
  params.validate();
  ds.validate();
  const int d = ds.d();
  if (d > 128) throw std::invalid_argument("priv_heavy_hitter supports d <= 128");
  const int dp = detail::next_pow2(d);
  const int levels = dp == 1 ? 0 : static_cast<int>(std::round(std::log2(dp)));

  std::vector<detail::Bits128> packed;
  packed.reserve(ds.n());
  for (const auto& r : ds.rows) packed.push_back(detail::pack_record(r));

  // lists[j] at the current level: surviving substrings of interval j,
  // sorted; leaves are {0,1} for real attributes, {0} for padding.
  std::vector<std::vector<detail::Bits128>> lists(static_cast<std::size_t>(dp));
  for (int j = 0; j < dp; ++j) {
    if (j < d)
      lists[static_cast<std::size_t>(j)] = {detail::Bits128{0, 0},
                                            detail::Bits128{1, 0}};
    else
      lists[static_cast<std::size_t>(j)] = {detail::Bits128{0, 0}};
  }

  for (int level = 1; level <= levels; ++level) {
    const int len = 1 << level;
    const int count = dp / len;
    std::vector<std::vector<detail::Bits128>> next(
        static_cast<std::size_t>(count));
    for (int t = 0; t < count; ++t) {
      const int begin = t * len;
      std::unordered_map<detail::Bits128, std::int64_t, detail::Bits128Hash>
          freq;
      // Only intervals touching real attributes can have nonzero counts.
      if (begin < d) {
        freq.reserve(ds.n() * 2);
        for (const auto& row : packed) {
          auto key = detail::extract_bits(row, begin, len);
          ++freq[key];
        }
      }
      const double tau_l = params.tau + (level - 1) * params.mu;
      const auto& left = lists[static_cast<std::size_t>(2 * t)];
      const auto& right = lists[static_cast<std::size_t>(2 * t + 1)];
      RngStream interval_rng =
          rng.substream(static_cast<std::uint64_t>(level))
              .substream(static_cast<std::uint64_t>(t));
      std::uint64_t rank = 0;
      std::vector<detail::Bits128> survivors;
      // Candidate rank (s2-major over the sorted child lists) indexes the
      // per-candidate noise substream; any fixed order works, it only has to
      // be deterministic given the child lists.
      for (const auto& s2 : right) {
        for (const auto& s1 : left) {
          auto cand = detail::concat_bits(s1, s2, len / 2, len / 2);
          auto it = freq.find(cand);
          const double f = it == freq.end() ? 0.0 : static_cast<double>(it->second);
          RngStream cand_rng = interval_rng.substream(rank++);
          const double noisy = std::max(f, tau_l - params.mu) +
                               laplace_sample(params.lambda, cand_rng, cfg);
          if (noisy > tau_l) survivors.push_back(cand);
        }
      }
      std::sort(survivors.begin(), survivors.end(),
                [](const detail::Bits128& a, const detail::Bits128& b) {
                  return a.hi != b.hi ? a.hi < b.hi : a.lo < b.lo;
                });
      next[static_cast<std::size_t>(t)] = std::move(survivors);
    }
    lists = std::move(next);
  }

  std::vector<Record> out;
  out.reserve(lists[0].size());
  for (const auto& b : lists[0]) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j)
      bits[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(
          j < 64 ? (b.lo >> j) & 1u : (b.hi >> (j - 64)) & 1u);
    out.emplace_back(std::move(bits));
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct HistogramDiagnostics {
  std::vector<std::string> warnings;
  double min_n_for_utility = 0;
  HeavyHitterParams params;
  std::size_t list_size = 0;
};

// Exact multiset counts; also the zero-noise semantics of priv_histogram.
inline SparseHistogram exact_frequencies(const Dataset& ds) {
  SparseHistogram h;
  for (const auto& r : ds.rows) h.entries[r] += 1.0;
  return h;
}

// Heavy-hitter stage at budget eps/2 (lambda, mu from the target, tau =
// 0.5 nu n), then Laplace(2/eps) on the exact count of every listed record;
// unlisted records are implicitly 0. Under zero_noise the tree thresholds
// would still drop light items, so the debug contract is the exact
// histogram instead.
inline SparseHistogram priv_histogram(const Dataset& ds, double eps, double nu,
                                      double eta, RngStream rng,
                                      const NoiseConfig& cfg = {},
                                      HistogramDiagnostics* diag = nullptr) {
  ds.validate();
  if (ds.n() == 0) throw std::invalid_argument("priv_histogram: n >= 1 required");
  if (!(eps > 0)) throw std::invalid_argument("priv_histogram: eps must be > 0");
  if (!(nu > 0 && nu <= 0.1))
    throw std::invalid_argument("priv_histogram: nu must lie in (0, 0.1]");
  if (!(eta > 0 && eta <= 0.1))
    throw std::invalid_argument("priv_histogram: eta must lie in (0, 0.1]");

  if (cfg.zero_noise) return exact_frequencies(ds);

  const double n = static_cast<double>(ds.n());
  HeavyHitterParams params = solve_hh_noise_params(eps / 2, nu);
  params.tau = 0.5 * nu * n;

  if (diag != nullptr) {
    const int dp = detail::next_pow2(ds.d());
    const double need = 8 * params.mu * std::log(static_cast<double>(dp)) +
                        8 * params.lambda *
                            std::log(static_cast<double>(dp) / (eta * nu));
    diag->params = params;
    diag->min_n_for_utility = need / (0.5 * nu);
    if (params.tau < need) {
      diag->warnings.push_back(
          "utility precondition tau >= 8*mu*ln(d) + 8*lambda*ln(d/(eta*nu)) "
          "does not hold; need n >= " +
          std::to_string(diag->min_n_for_utility) + " (have " +
          std::to_string(ds.n()) + ")");
    }
  }

  const auto list = priv_heavy_hitter(ds, params, rng.substream(0), cfg);
  if (diag != nullptr) diag->list_size = list.size();
  const SparseHistogram exact = exact_frequencies(ds);
  RngStream count_rng = rng.substream(1);
  SparseHistogram out;
  for (const auto& r : list)
    out.entries[r] = exact.at(r) + laplace_sample(2.0 / eps, count_rng, cfg);
  return out;
}

// ---------------------------------------------------------------------------
// Applications: point functions, thresholds, distribution estimation.
// The PAC learners work on the {0,1}^d view of labeled data: feature -1/+1
// maps to bit 0/1 and the label is appended as attribute d+1.
// ---------------------------------------------------------------------------

struct PointHypothesis {
  Record u;
  bool predict(const Record& x) const { return x == u; }
};

struct ThresholdHypothesis {
  Record z;
  // Thre_z(x) = 1 iff x >= z lexicographically.
  bool predict(const Record& x) const { return !(x < z); }
};

namespace detail {

inline Record bits_of_example(const LabeledExample& ex) {
  std::vector<std::uint8_t> bits(ex.x.size());
  for (std::size_t j = 0; j < ex.x.size(); ++j) bits[j] = ex.x[j] > 0 ? 1 : 0;
  return Record(std::move(bits));
}

inline Dataset concat_features_and_labels(const LabeledDataset& s) {
  Dataset ds;
  ds.schema = AttributeSchema::with_default_names(s.d() + 1);
  ds.rows.reserve(s.n());
  for (const auto& ex : s.rows) {
    std::vector<std::uint8_t> bits(ex.x.size() + 1);
    for (std::size_t j = 0; j < ex.x.size(); ++j) bits[j] = ex.x[j] > 0 ? 1 : 0;
    bits.back() = ex.y > 0 ? 1 : 0;
    ds.rows.emplace_back(std::move(bits));
  }
  return ds;
}

inline Record with_label(const Record& x, std::uint8_t label) {
  std::vector<std::uint8_t> bits = x.bits();
  bits.push_back(label);
  return Record(std::move(bits));
}

}  // namespace detail

// Proper PAC learner for point functions: heavy hitters over x o y at error
// nu = 0.2 alpha. Prefer the smallest x with estimated (x o 1) count above
// nu n; otherwise the smallest x whose (x o 0) count is at most nu n;
// otherwise the smallest record unused by the sample.
inline PointHypothesis learn_point(const LabeledDataset& s, double eps,
                                   double alpha, RngStream rng,
                                   const NoiseConfig& cfg = {}) {
  s.validate();
  if (s.n() == 0) throw std::invalid_argument("learn_point: empty sample");
  if (!(alpha > 0 && alpha <= 1))
    throw std::invalid_argument("learn_point: alpha must lie in (0, 1]");
  const double nu = 0.2 * alpha;
  const double nun = nu * static_cast<double>(s.n());
  const Dataset joined = detail::concat_features_and_labels(s);
  const SparseHistogram hist = priv_histogram(joined, eps, nu, 0.01, rng, cfg);

  std::optional<Record> best_pos;
  for (const auto& [rec, est] : hist.entries) {
    if (rec[s.d()] == 1 && est > nun) {
      Record x(std::vector<std::uint8_t>(rec.bits().begin(),
                                         rec.bits().end() - 1));
      if (!best_pos || x < *best_pos) best_pos = std::move(x);
    }
  }
  if (best_pos) return PointHypothesis{*best_pos};

  // Smallest x with estimate(x o 0) <= nu n. Only listed records can block,
  // so scanning the first (#blockers + 1) records in lexicographic order
  // suffices and returns the overall lexicographic minimum.
  std::uint64_t blockers = 0;
  for (const auto& [rec, est] : hist.entries)
    blockers += rec[s.d()] == 0 && est > nun;
  auto record_at = [&](std::uint64_t v) {
    // v enumerated MSB-first so integer order matches string order; bits
    // beyond the low 64 attribute positions stay 0.
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(s.d()), 0);
    const int span = std::min(s.d(), 64);
    for (int j = 0; j < span; ++j)
      bits[static_cast<std::size_t>(s.d() - span + j)] =
          static_cast<std::uint8_t>((v >> (span - 1 - j)) & 1u);
    return Record(std::move(bits));
  };
  const std::uint64_t domain_cap =
      s.d() >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << s.d()) - 1;
  for (std::uint64_t v = 0; v <= std::min(blockers, domain_cap); ++v) {
    Record x = record_at(v);
    if (hist.at(detail::with_label(x, 0)) <= nun) return PointHypothesis{x};
  }

  // Fallback: lexicographically smallest record not used by the sample.
  std::map<Record, bool> used;
  for (const auto& ex : s.rows) used[detail::bits_of_example(ex)] = true;
  for (std::uint64_t v = 0; v <= std::min<std::uint64_t>(s.n(), domain_cap); ++v) {
    Record x = record_at(v);
    if (!used.count(x)) return PointHypothesis{x};
  }
  return PointHypothesis{record_at(0)};
}

struct PolarizingPrefixResult {
  std::vector<std::uint8_t> prefix;
  bool found = false;
  int length = 0;
};

namespace detail {

// pol(p) = min{#(p-prefixed, label 0), #(p-prefixed, label 1)} / n, maximized
// over all prefixes of the given length.
inline double max_polarization(const LabeledDataset& s, int len) {
  std::unordered_map<Bits128, std::pair<std::int64_t, std::int64_t>, Bits128Hash>
      counts;
  for (const auto& ex : s.rows) {
    Bits128 key;
    for (int j = 0; j < len; ++j) {
      if (ex.x[static_cast<std::size_t>(j)] > 0) {
        if (j < 64)
          key.lo |= std::uint64_t{1} << j;
        else
          key.hi |= std::uint64_t{1} << (j - 64);
      }
    }
    auto& c = counts[key];
    (ex.y > 0 ? c.second : c.first) += 1;
  }
  std::int64_t best = 0;
  for (const auto& [key, c] : counts)
    best = std::max(best, std::min(c.first, c.second));
  return static_cast<double>(best) / static_cast<double>(s.n());
}

}  // namespace detail

// Finds a gamma-polarizing prefix no longer than any 2 gamma-polarizing one:
// binary search over the prefix length with noisy max-polarization probes
// (P = ceil(log2(d+1)) probes at Laplace scale 2P/(eps n), spending eps/2),
// then a histogram over length-l* prefixes with the label appended at budget
// eps/2 and nu = 0.1 gamma. Returns the lexicographically smallest prefix p
// with both estimated counts >= 1.5 gamma n, or an empty prefix with found =
// false.
inline PolarizingPrefixResult find_polarizing_prefix(const LabeledDataset& s,
                                                     double eps, double gamma,
                                                     RngStream rng,
                                                     const NoiseConfig& cfg = {}) {
  s.validate();
  if (s.n() == 0) throw std::invalid_argument("find_polarizing_prefix: empty sample");
  if (!(gamma > 0 && gamma < 0.5))
    throw std::invalid_argument("gamma must lie in (0, 0.5)");
  const double n = static_cast<double>(s.n());
  const int d = s.d();
  const int probes = static_cast<int>(std::ceil(std::log2(d + 1)));
  const double probe_scale = 2.0 * std::max(probes, 1) / (eps * n);

  RngStream search_rng = rng.substream(0);
  int lo = 0, hi = d;
  while (lo < hi) {
    const int mid = lo + (hi - lo + 1) / 2;
    const double noisy = detail::max_polarization(s, mid) +
                         laplace_sample(probe_scale, search_rng, cfg);
    if (noisy >= 1.5 * gamma)
      lo = mid;
    else
      hi = mid - 1;
  }
  const int len = lo;

  // Histogram over (prefix o label).
  LabeledDataset prefixes;
  prefixes.schema = AttributeSchema::with_default_names(std::max(len, 1));
  if (len == 0) {
    // Degenerate: only the empty prefix; polarization is decided by the
    // label counts alone, estimated through the same histogram route over a
    // single constant attribute.
    prefixes.schema = AttributeSchema::with_default_names(1);
    for (const auto& ex : s.rows)
      prefixes.rows.push_back({{std::int8_t{-1}}, ex.y});
  } else {
    for (const auto& ex : s.rows) {
      LabeledExample p;
      p.x.assign(ex.x.begin(), ex.x.begin() + len);
      p.y = ex.y;
      prefixes.rows.push_back(std::move(p));
    }
  }
  const Dataset joined = detail::concat_features_and_labels(prefixes);
  const SparseHistogram hist =
      priv_histogram(joined, eps / 2, 0.1 * gamma, 0.01, rng.substream(1), cfg);

  const double bar = 1.5 * gamma * n;
  std::map<Record, std::pair<double, double>> by_prefix;
  for (const auto& [rec, est] : hist.entries) {
    Record p(std::vector<std::uint8_t>(rec.bits().begin(), rec.bits().end() - 1));
    if (rec[p.size()] == 1)
      by_prefix[p].second = est;
    else
      by_prefix[p].first = est;
  }
  for (const auto& [p, c] : by_prefix) {
    if (c.first >= bar && c.second >= bar) {
      PolarizingPrefixResult res;
      if (len > 0) res.prefix = p.bits();
      res.found = true;
      res.length = len;
      return res;
    }
  }
  return PolarizingPrefixResult{{}, false, 0};
}

// Proper PAC learner for lexicographic threshold functions. A noisy positive
// fraction routes the extreme cases; otherwise a polarizing prefix p is
// found at budget eps/3 and the exponential mechanism (budget eps/3) picks
// among the three thresholds cutting just below, inside, or just above the
// p block. With threshold_branch_swapped (default) the extreme branches
// return the error-minimizing constant-ish hypothesis; the literal variant
// returns the opposite assignment.
inline ThresholdHypothesis learn_threshold(const LabeledDataset& s, double eps,
                                           double alpha, RngStream rng,
                                           const NoiseConfig& cfg = {},
                                           bool threshold_branch_swapped = true) {
  s.validate();
  if (s.n() == 0) throw std::invalid_argument("learn_threshold: empty sample");
  if (!(alpha > 0 && alpha <= 1))
    throw std::invalid_argument("learn_threshold: alpha must lie in (0, 1]");
  const double n = static_cast<double>(s.n());
  const int d = s.d();

  double positives = 0;
  for (const auto& ex : s.rows) positives += ex.y > 0;
  RngStream frac_rng = rng.substream(0);
  const double a = positives / n + laplace_sample(3.0 / (eps * n), frac_rng, cfg);

  const Record all_zero = Record::zeros(d);
  const Record all_one(std::vector<std::uint8_t>(static_cast<std::size_t>(d), 1));
  // Thre_{0...0} labels everything 1; Thre_{1...1} labels only 1...1 as 1.
  if (a <= 0.5 * alpha)
    return ThresholdHypothesis{threshold_branch_swapped ? all_one : all_zero};
  if (a >= 1 - 0.5 * alpha)
    return ThresholdHypothesis{threshold_branch_swapped ? all_zero : all_one};

  const auto prefix =
      find_polarizing_prefix(s, eps / 3, 0.1 * alpha, rng.substream(1), cfg);
  const int len = prefix.found ? prefix.length : 0;

  auto make_candidate = [&](int mid_bit, bool ones_tail) {
    std::vector<std::uint8_t> bits(prefix.prefix.begin(), prefix.prefix.end());
    bits.resize(static_cast<std::size_t>(d), 0);
    if (mid_bit >= 0 && len < d) bits[static_cast<std::size_t>(len)] = 1;
    if (ones_tail)
      for (int j = len; j < d; ++j) bits[static_cast<std::size_t>(j)] = 1;
    return Record(std::move(bits));
  };
  std::vector<ThresholdHypothesis> candidates = {
      ThresholdHypothesis{make_candidate(-1, false)},  // p 0...0
      ThresholdHypothesis{make_candidate(0, false)},   // p 1 0...0
      ThresholdHypothesis{make_candidate(-1, true)}};  // p 1...1

  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (const auto& h : candidates) {
    double mistakes = 0;
    for (const auto& ex : s.rows) {
      const bool predicted = h.predict(detail::bits_of_example(ex));
      mistakes += predicted != (ex.y > 0);
    }
    scores.push_back(-mistakes);
  }
  RngStream select_rng = rng.substream(2);
  const std::size_t pick =
      exponential_select(scores, eps / 3.0 / 2.0, select_rng, cfg);
  return candidates[pick];
}

// Discrete distribution estimate with sparse support: heavy hitters at
// budget eps/2 with nu = 4 ln(d) / (eps n ln(eps n)), then fresh
// Laplace(2/eps) count noise divided by n on every record whose histogram
// estimate reaches 2 nu n. Entries can be negative and need not sum to 1;
// unlisted mass is 0.
inline SparseHistogram estimate_distribution(const Dataset& ds, double eps,
                                             RngStream rng,
                                             const NoiseConfig& cfg = {}) {
  ds.validate();
  if (ds.d() < 2) throw std::invalid_argument("estimate_distribution: d >= 2");
  const double n = static_cast<double>(ds.n());
  if (!(eps * n > std::exp(1.0)))
    throw std::invalid_argument("estimate_distribution requires eps*n > e");
  const double nu = 4.0 * std::log(static_cast<double>(ds.d())) /
                    (eps * n * std::log(eps * n));
  const SparseHistogram hist =
      priv_histogram(ds, eps / 2, nu, 0.01, rng.substream(0), cfg);
  const SparseHistogram exact = exact_frequencies(ds);
  RngStream count_rng = rng.substream(1);
  SparseHistogram theta;
  for (const auto& [rec, est] : hist.entries) {
    if (est >= 2 * nu * n)
      theta.entries[rec] =
          (exact.at(rec) + laplace_sample(2.0 / eps, count_rng, cfg)) / n;
  }
  return theta;
}

}  // namespace pdp

#endif  // PDP_HISTOGRAM_HPP_
