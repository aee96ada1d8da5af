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

#ifndef PDP_HALFSPACE_HPP_
#define PDP_HALFSPACE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pdp/core.hpp"
#include "pdp/mechanisms.hpp"

namespace pdp {

class NetExplosionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// h_w(x) = sign(<w, x>) on {-1,+1}^d, with sign(0) fixed to +1.
struct Halfspace {
  std::vector<double> w;

  int predict(std::span<const std::int8_t> x) const {
    double s = 0;
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * x[j];
    return s < 0 ? -1 : 1;
  }
};

struct RobustLearnConfig {
  double gamma = 0;        // target margin, in (0, 1]
  double gamma_prime = 0;  // output margin, 0 < gamma_prime < gamma
  double eps = 0;          // per-attribute budget

  // Net resolution fixed by the reduction to nets.
  double nu() const { return (gamma - gamma_prime) / 5.0; }

  void validate() const {
    if (!(gamma > 0 && gamma <= 1))
      throw std::invalid_argument("gamma must lie in (0, 1]");
    if (!(gamma_prime > 0 && gamma_prime < gamma))
      throw std::invalid_argument("gamma_prime must lie in (0, gamma)");
    if (!(eps > 0)) throw std::invalid_argument("eps must be > 0");
  }
};

// Minimum number of coordinate sign flips of x that produce a point
// classified differently from y; nullopt when no such point exists (only
// possible for w = 0, y = +1). Flips are taken greedily in decreasing order
// of their margin contribution y * w_j * x_j, which is optimal because flip
// contributions are independent: k flips move y<w,z> down by exactly twice
// the sum of the chosen contributions, so the top-k positive contributions
// reach the sign change first.
inline std::optional<int> dec(std::span<const std::int8_t> x, int y,
                              const Halfspace& h) {
  const std::size_t d = h.w.size();
  if (x.size() != d) throw std::invalid_argument("dec: dimension mismatch");
  if (y != 1 && y != -1) throw std::invalid_argument("dec: label must be -1/+1");
  double margin = 0;
  std::vector<double> contrib(d);
  for (std::size_t j = 0; j < d; ++j) {
    contrib[j] = y * h.w[j] * x[j];
    margin += contrib[j];
  }
  // Misclassified already: y=+1 needs <w,x> < 0; y=-1 needs <w,x> >= 0.
  if (y == 1 ? margin < 0 : margin <= 0) return 0;
  std::sort(contrib.begin(), contrib.end(), std::greater<>());
  double flipped = 0;
  int flips = 0;
  for (std::size_t k = 0; k < d && contrib[k] > 0; ++k) {
    flipped += contrib[k];
    ++flips;
    const double rem = margin - 2 * flipped;
    if (y == 1 ? rem < 0 : rem <= 0) return flips;
  }
  // Only reachable with w = 0 and y = +1: sign(0) = +1 everywhere.
  return std::nullopt;
}

// clip_[0,1]((gamma d - dec) / ((gamma - gamma') d)); an unreachable
// boundary counts as loss 0.
inline double smoothed_loss(std::span<const std::int8_t> x, int y,
                            const Halfspace& h, double gamma,
                            double gamma_prime) {
  if (!(gamma > gamma_prime && gamma_prime >= 0))
    throw std::invalid_argument("smoothed_loss: need gamma > gamma' >= 0");
  const auto dist = dec(x, y, h);
  if (!dist) return 0.0;
  const double d = static_cast<double>(h.w.size());
  const double v = (gamma * d - *dist) / ((gamma - gamma_prime) * d);
  return std::clamp(v, 0.0, 1.0);
}

// Fraction of samples with a misclassified point inside the Hamming ball of
// radius gamma*d, i.e. dec <= gamma*d.
inline double robust_error(const Halfspace& h, const LabeledDataset& s,
                           double gamma) {
  if (s.n() == 0) return 0.0;
  const double radius = gamma * static_cast<double>(s.d());
  double bad = 0;
  for (const auto& ex : s.rows) {
    const auto dist = dec(ex.x, ex.y, h);
    bad += dist && static_cast<double>(*dist) <= radius;
  }
  return bad / static_cast<double>(s.n());
}

// Population variant over an explicit finite-support distribution.
inline double robust_error(const Halfspace& h,
                           std::span<const LabeledExample> support,
                           std::span<const double> probs, double gamma) {
  if (support.size() != probs.size())
    throw std::invalid_argument("robust_error: support/probability mismatch");
  double bad = 0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    const double radius = gamma * static_cast<double>(support[i].x.size());
    const auto dist = dec(support[i].x, support[i].y, h);
    if (dist && static_cast<double>(*dist) <= radius) bad += probs[i];
  }
  return bad;
}

// Grid net of the unit l1-ball: all vectors with coordinates in multiples of
// 1/r, r = ceil(d / (2 nu)), and l1 norm <= 1. Covering radius <= d/(2r) <=
// nu. Stored as integer grid coordinates to keep multi-million-point nets
// compact; as_halfspace(i) materializes w = g/r.
class L1Net {
 public:
  static L1Net build(int d, double nu, std::size_t cap = 10000000) {
    if (d < 1) throw std::invalid_argument("net requires d >= 1");
    if (!(nu > 0)) throw std::invalid_argument("net requires nu > 0");
    L1Net net;
    net.d_ = d;
    net.r_ = static_cast<int>(std::ceil(d / (2 * nu)));
    std::vector<std::int16_t> point(static_cast<std::size_t>(d), 0);
    net.enumerate(point, 0, net.r_, cap);
    return net;
  }

  int d() const { return d_; }
  int resolution() const { return r_; }
  std::size_t size() const { return coords_.size() / static_cast<std::size_t>(d_); }

  std::span<const std::int16_t> grid_point(std::size_t i) const {
    return {coords_.data() + i * static_cast<std::size_t>(d_),
            static_cast<std::size_t>(d_)};
  }

  Halfspace as_halfspace(std::size_t i) const {
    Halfspace h;
    h.w.resize(static_cast<std::size_t>(d_));
    auto g = grid_point(i);
    for (int j = 0; j < d_; ++j)
      h.w[static_cast<std::size_t>(j)] = static_cast<double>(g[j]) / r_;
    return h;
  }

 private:
  void enumerate(std::vector<std::int16_t>& point, int j, int budget,
                 std::size_t cap) {
    if (j == d_) {
      if (size() >= cap)
        throw NetExplosionError("l1 net exceeds cap of " + std::to_string(cap));
      coords_.insert(coords_.end(), point.begin(), point.end());
      return;
    }
    for (int g = -budget; g <= budget; ++g) {
      point[static_cast<std::size_t>(j)] = static_cast<std::int16_t>(g);
      enumerate(point, j + 1, budget - std::abs(g), cap);
    }
    point[static_cast<std::size_t>(j)] = 0;
  }

  int d_ = 0;
  int r_ = 1;
  std::vector<std::int16_t> coords_;
};

inline std::vector<Halfspace> build_l1_net(int d, double nu,
                                           std::size_t cap = 10000000) {
  const L1Net net = L1Net::build(d, nu, cap);
  std::vector<Halfspace> out;
  out.reserve(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) out.push_back(net.as_halfspace(i));
  return out;
}

// Exponential-mechanism ERM over an explicit hypothesis list: selects h with
// probability proportional to exp(-eps (gamma - gamma') d |S| L(h; S) / 2),
// where L is the mean smoothed loss. Changing one attribute of one sample
// moves |S| L by at most 1/((gamma - gamma') d), the mechanism's
// sensitivity.
inline Halfspace erm_exponential(const LabeledDataset& s,
                                 const std::vector<Halfspace>& hypotheses,
                                 double eps, double gamma, double gamma_prime,
                                 RngStream rng, const NoiseConfig& cfg = {}) {
  s.validate();
  if (hypotheses.empty())
    throw std::invalid_argument("erm_exponential: empty hypothesis list");
  if (!(eps > 0)) throw std::invalid_argument("erm_exponential: eps must be > 0");
  const double d = static_cast<double>(s.d());
  std::vector<double> scores;
  scores.reserve(hypotheses.size());
  for (const auto& h : hypotheses) {
    double total = 0;
    for (const auto& ex : s.rows)
      total += smoothed_loss(ex.x, ex.y, h, gamma, gamma_prime);
    scores.push_back(-total);
  }
  const double scale = eps * (gamma - gamma_prime) * d / 2.0;
  const std::size_t pick = exponential_select(scores, scale, rng, cfg);
  return hypotheses[pick];
}

namespace detail {

// Sample buckets for the net ERM fast path: on {-1,+1}^d the loss of (x, y)
// under any halfspace depends only on s = (y x_1, ..., y x_d) and the
// strictness carried by y, so a dataset reduces to 2^(d+1) bucket weights.
struct BucketedSample {
  int d = 0;
  std::vector<double> counts;  // indexed by (s-pattern << 1) | (y == +1)

  static constexpr int kMaxD = 11;

  static BucketedSample build(const LabeledDataset& s) {
    BucketedSample b;
    b.d = s.d();
    if (b.d > kMaxD) throw std::logic_error("bucketed path requires small d");
    b.counts.assign(std::size_t{1} << (b.d + 1), 0.0);
    for (const auto& ex : s.rows) {
      std::size_t pattern = 0;
      for (int j = 0; j < b.d; ++j)
        if (ex.y * ex.x[static_cast<std::size_t>(j)] > 0)
          pattern |= std::size_t{1} << j;
      b.counts[(pattern << 1) | (ex.y > 0 ? 1 : 0)] += 1.0;
    }
    return b;
  }

  // Weighted variant for finite-support population distributions.
  static BucketedSample build(std::span<const LabeledExample> support,
                              std::span<const double> probs) {
    if (support.empty() || support.size() != probs.size())
      throw std::invalid_argument("bucketed sample: bad support");
    BucketedSample b;
    b.d = static_cast<int>(support[0].x.size());
    if (b.d > kMaxD) throw std::logic_error("bucketed path requires small d");
    b.counts.assign(std::size_t{1} << (b.d + 1), 0.0);
    for (std::size_t i = 0; i < support.size(); ++i) {
      std::size_t pattern = 0;
      for (int j = 0; j < b.d; ++j)
        if (support[i].y * support[i].x[static_cast<std::size_t>(j)] > 0)
          pattern |= std::size_t{1} << j;
      b.counts[(pattern << 1) | (support[i].y > 0 ? 1 : 0)] += probs[i];
    }
    return b;
  }
};

}  // namespace detail

// Dataset-independent dec tables for every hypothesis of an L1Net. dec of
// (x, y) under g depends only on the coordinate magnitudes |g| and on which
// contributions y x_j g_j are positive, so hypotheses sharing |g| share one
// kernel and differ only by the sign mask that relocates buckets. Building
// the scorer costs one pass over magnitude classes; scoring a dataset then
// costs ~2^(d+1) fused multiply-adds per hypothesis.
class NetErmScorer {
 public:
  explicit NetErmScorer(const L1Net& net) : net_(&net), d_(net.d()) {
    if (d_ > detail::BucketedSample::kMaxD)
      throw std::invalid_argument("net scorer supports d <= 11");
    const std::size_t npat = std::size_t{1} << d_;
    std::unordered_map<std::string, std::uint32_t> class_ids;
    class_of_.resize(net.size());
    mask_of_.resize(net.size());
    std::string key(static_cast<std::size_t>(d_) * 2, '\0');
    for (std::size_t i = 0; i < net.size(); ++i) {
      const auto g = net.grid_point(i);
      std::uint16_t mask = 0;
      for (int j = 0; j < d_; ++j) {
        const std::int16_t a = static_cast<std::int16_t>(std::abs(g[j]));
        key[static_cast<std::size_t>(2 * j)] = static_cast<char>(a & 0xff);
        key[static_cast<std::size_t>(2 * j) + 1] = static_cast<char>(a >> 8);
        if (g[j] > 0) mask |= static_cast<std::uint16_t>(1u << j);
      }
      auto [it, inserted] =
          class_ids.emplace(key, static_cast<std::uint32_t>(class_ids.size()));
      if (inserted) build_kernel(g, npat);
      class_of_[i] = it->second;
      mask_of_[i] = mask;
    }
  }

  // Mean of loss_by_dec[dec] over the buckets, for every hypothesis.
  // loss_by_dec has d+2 entries; index d+1 is the unreachable-boundary case.
  std::vector<double> mean_losses(const detail::BucketedSample& buckets,
                                  std::span<const double> loss_by_dec) const {
    if (buckets.d != d_) throw std::invalid_argument("bucket dimension mismatch");
    double weight = 0;
    for (double c : buckets.counts) weight += c;
    if (weight <= 0) throw std::invalid_argument("empty bucketed sample");
    const std::size_t npat = std::size_t{1} << d_;
    // Per magnitude class and flip pattern f, fold the loss table once, then
    // every hypothesis is a masked lookup.
    const std::size_t nclasses = kernels_.size() / (npat * 2);
    std::vector<float> folded(kernels_.size());
    for (std::size_t c = 0; c < nclasses; ++c)
      for (std::size_t idx = 0; idx < npat * 2; ++idx)
        folded[c * npat * 2 + idx] = static_cast<float>(
            loss_by_dec[kernels_[c * npat * 2 + idx]]);
    std::vector<double> out(net_->size());
    for (std::size_t i = 0; i < net_->size(); ++i) {
      const float* kernel = folded.data() + class_of_[i] * npat * 2;
      const std::uint16_t mask = mask_of_[i];
      double total = 0;
      for (std::size_t f = 0; f < npat; ++f) {
        const std::size_t s = f ^ mask;
        total += buckets.counts[(s << 1) | 1] * kernel[(f << 1) | 1] +
                 buckets.counts[s << 1] * kernel[f << 1];
      }
      out[i] = total / weight;
    }
    return out;
  }

  std::vector<double> smoothed_losses(const detail::BucketedSample& buckets,
                                      double gamma, double gamma_prime) const {
    return mean_losses(buckets, ramp_table(gamma, gamma_prime));
  }

  std::vector<double> robust_errors(const detail::BucketedSample& buckets,
                                    double gamma) const {
    std::vector<double> table(static_cast<std::size_t>(d_) + 2, 0.0);
    for (int v = 0; v <= d_; ++v)
      table[static_cast<std::size_t>(v)] = v <= gamma * d_ ? 1.0 : 0.0;
    return mean_losses(buckets, table);
  }

  std::vector<double> ramp_table(double gamma, double gamma_prime) const {
    const double dd = static_cast<double>(d_);
    std::vector<double> table(static_cast<std::size_t>(d_) + 2);
    for (int v = 0; v <= d_; ++v)
      table[static_cast<std::size_t>(v)] =
          std::clamp((gamma * dd - v) / ((gamma - gamma_prime) * dd), 0.0, 1.0);
    table[static_cast<std::size_t>(d_) + 1] = 0.0;
    return table;
  }

 private:
  // Kernel of one magnitude class: dec for every flip pattern f (bit j set
  // means contribution j is negative) and label strictness; d+1 encodes an
  // unreachable boundary.
  void build_kernel(std::span<const std::int16_t> g, std::size_t npat) {
    std::vector<std::int16_t> abs_desc(static_cast<std::size_t>(d_));
    std::vector<int> order(static_cast<std::size_t>(d_));
    for (int j = 0; j < d_; ++j) {
      abs_desc[static_cast<std::size_t>(j)] =
          static_cast<std::int16_t>(std::abs(g[j]));
      order[static_cast<std::size_t>(j)] = j;
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return std::abs(g[a]) > std::abs(g[b]);
    });
    for (std::size_t f = 0; f < npat; ++f) {
      long margin = 0;
      for (int j = 0; j < d_; ++j)
        margin += (f >> j) & 1u ? -std::abs(g[j]) : std::abs(g[j]);
      for (int y_pos = 0; y_pos <= 1; ++y_pos) {
        int dec_val;
        if (y_pos ? margin < 0 : margin <= 0) {
          dec_val = 0;
        } else {
          dec_val = d_ + 1;
          long flipped = 0;
          int flips = 0;
          for (int j = 0; j < d_; ++j) {
            const int a = order[static_cast<std::size_t>(j)];
            if ((f >> a) & 1u || g[a] == 0) continue;
            flipped += std::abs(g[a]);
            ++flips;
            const long rem = margin - 2 * flipped;
            if (y_pos ? rem < 0 : rem <= 0) {
              dec_val = flips;
              break;
            }
          }
        }
        kernels_.push_back(static_cast<std::uint8_t>(dec_val));
      }
    }
  }

  const L1Net* net_;
  int d_;
  std::vector<std::uint32_t> class_of_;
  std::vector<std::uint16_t> mask_of_;
  std::vector<std::uint8_t> kernels_;  // [class][flip pattern][y] -> dec
};

struct NetErmResult {
  std::size_t selected_index = 0;
  Halfspace hypothesis;
  double selected_mean_loss = 0;
  double min_mean_loss = 0;
};

// ERM over an L1Net with the same selection distribution as
// erm_exponential; the scorer is reusable across calls on the same net.
inline NetErmResult erm_exponential_net(const LabeledDataset& s, const L1Net& net,
                                        const NetErmScorer& scorer, double eps,
                                        double gamma, double gamma_prime,
                                        RngStream rng,
                                        const NoiseConfig& cfg = {}) {
  s.validate();
  if (net.size() == 0) throw std::invalid_argument("empty net");
  if (s.d() != net.d()) throw std::invalid_argument("net/sample dimension mismatch");
  if (!(eps > 0)) throw std::invalid_argument("eps must be > 0");
  const auto buckets = detail::BucketedSample::build(s);
  const std::vector<double> mean_loss =
      scorer.smoothed_losses(buckets, gamma, gamma_prime);
  const double n = static_cast<double>(s.n());
  std::vector<double> scores(mean_loss.size());
  for (std::size_t i = 0; i < scores.size(); ++i) scores[i] = -mean_loss[i] * n;
  const double scale = eps * (gamma - gamma_prime) * s.d() / 2.0;
  NetErmResult res;
  res.selected_index = exponential_select(scores, scale, rng, cfg);
  res.hypothesis = net.as_halfspace(res.selected_index);
  res.selected_mean_loss = mean_loss[res.selected_index];
  res.min_mean_loss = *std::min_element(mean_loss.begin(), mean_loss.end());
  return res;
}

// Robust halfspace learner: randomized response on the labels at eps, then
// exponential-mechanism ERM at eps over the l1 net with resolution nu =
// (gamma - gamma')/5 and the smoothed loss ramp between gamma' and
// gamma' + nu (the margin pair the net reduction hands to the ERM).
inline Halfspace learn_halfspace_robust(const LabeledDataset& s,
                                        const RobustLearnConfig& cfg,
                                        const L1Net& net,
                                        const NetErmScorer& scorer,
                                        RngStream rng,
                                        const NoiseConfig& ncfg = {}) {
  s.validate();
  cfg.validate();
  if (s.n() == 0) throw std::invalid_argument("learn_halfspace_robust: empty sample");
  LabeledDataset noisy = s;
  RngStream label_rng = rng.substream(0);
  for (auto& ex : noisy.rows)
    ex.y = static_cast<std::int8_t>(
        randomized_response(ex.y, cfg.eps, label_rng, ncfg));
  const double nu = cfg.nu();
  return erm_exponential_net(noisy, net, scorer, cfg.eps, cfg.gamma_prime + nu,
                             cfg.gamma_prime, rng.substream(1), ncfg)
      .hypothesis;
}

// Convenience overload building the net and scorer in place.
inline Halfspace learn_halfspace_robust(const LabeledDataset& s,
                                        const RobustLearnConfig& cfg,
                                        RngStream rng,
                                        const NoiseConfig& ncfg = {},
                                        std::size_t net_cap = 10000000) {
  const L1Net net = L1Net::build(s.d(), cfg.nu(), net_cap);
  const NetErmScorer scorer(net);
  return learn_halfspace_robust(s, cfg, net, scorer, rng, ncfg);
}

}  // namespace pdp

#endif  // PDP_HALFSPACE_HPP_
