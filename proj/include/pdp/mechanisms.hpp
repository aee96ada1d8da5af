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

#ifndef PDP_MECHANISMS_HPP_
#define PDP_MECHANISMS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "pdp/rng.hpp"

namespace pdp {

// Test-only switch: with zero_noise set, samplers return 0 and selection
// becomes a deterministic lowest-index argmax. The CLI refuses it outside
// --test-harness mode.
struct NoiseConfig {
  bool zero_noise = false;
};

namespace detail {

// Inverse-CDF Laplace transform of one uniform draw; u in (0, 1), u = 0.5
// maps to exactly 0.
inline double laplace_from_unit(double u, double scale) {
  const double t = u - 0.5;
  return -scale * (t > 0 ? 1.0 : (t < 0 ? -1.0 : 0.0)) *
         std::log(1.0 - 2.0 * std::abs(t));
}

// Basic trigonometric polar transform: two uniforms to one standard normal.
inline double gaussian_from_units(double u1, double u2) {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

}  // namespace detail

// One Laplace(scale) draw, density exp(-|z|/scale) / (2 scale). Consumes a
// single uniform so stream accounting stays stable across refactors.
inline double laplace_sample(double scale, RngStream& rng,
                             const NoiseConfig& cfg = {}) {
  if (!(scale > 0)) throw std::invalid_argument("laplace scale must be > 0");
  if (cfg.zero_noise) return 0.0;
  return detail::laplace_from_unit(rng.next_open_unit(), scale);
}

// One N(0, sigma^2) draw; consumes exactly two uniforms.
inline double gaussian_sample(double sigma, RngStream& rng,
                              const NoiseConfig& cfg = {}) {
  if (!(sigma > 0)) throw std::invalid_argument("gaussian sigma must be > 0");
  if (cfg.zero_noise) return 0.0;
  const double u1 = rng.next_open_unit();
  const double u2 = rng.next_open_unit();
  return sigma * detail::gaussian_from_units(u1, u2);
}

// Samples index i with probability proportional to exp(exponent_scale *
// scores[i]), stabilized by max subtraction. Ties under zero_noise break to
// the lowest index.
inline std::size_t exponential_select(std::span<const double> scores,
                                      double exponent_scale, RngStream& rng,
                                      const NoiseConfig& cfg = {}) {
  if (scores.empty())
    throw std::invalid_argument("exponential_select: empty score list");
  if (!(exponent_scale > 0))
    throw std::invalid_argument("exponential_select: scale must be > 0");
  double best = scores[0];
  std::size_t best_idx = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i]))
      throw std::invalid_argument("exponential_select: non-finite score");
    if (scores[i] > best) {
      best = scores[i];
      best_idx = i;
    }
  }
  if (cfg.zero_noise) return best_idx;
  double total = 0;
  std::vector<double> weights(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    weights[i] = std::exp(exponent_scale * (scores[i] - best));
    total += weights[i];
  }
  double u = rng.next_open_unit() * total;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    u -= weights[i];
    if (u <= 0) return i;
  }
  return scores.size() - 1;
}

// Keeps the label with probability e^eps / (e^eps + 1), flips it otherwise.
// eps = 0 is permitted (fair coin) so tests can probe the boundary.
inline int randomized_response(int label, double eps, RngStream& rng,
                               const NoiseConfig& cfg = {}) {
  if (label != 1 && label != -1)
    throw std::invalid_argument("randomized_response: label must be -1/+1");
  if (eps < 0) throw std::invalid_argument("randomized_response: eps must be >= 0");
  if (cfg.zero_noise) return label;
  const double keep = 1.0 / (1.0 + std::exp(-eps));
  return rng.next_unit() < keep ? label : -label;
}

}  // namespace pdp

#endif  // PDP_MECHANISMS_HPP_
