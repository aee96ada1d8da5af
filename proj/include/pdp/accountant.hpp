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

#ifndef PDP_ACCOUNTANT_HPP_
#define PDP_ACCOUNTANT_HPP_

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pdp/metric.hpp"

namespace pdp {

// Privacy budget in one of four forms:
//   pure(eps)          eps-DP
//   cdp(eps)           (1/2)eps^2-zCDP, i.e. rho = eps^2/2
//   partial_pure(m)    m(x,x')-DP per differing record pair
//   partial_cdp(m)     (1/2)m(x,x')^2-CDP per differing record pair
// The CDP family is stored via its eps parameter so sequential composition is
// root-sum-of-squares on eps (equivalently, rho is additive).
class Budget {
 public:
  enum class Kind { kPure, kCdp, kPartialPure, kPartialCdp };

  static Budget pure(double eps) {
    require_nonneg(eps);
    return Budget(Kind::kPure, eps);
  }
  static Budget cdp(double eps) {
    require_nonneg(eps);
    return Budget(Kind::kCdp, eps);
  }
  static Budget zcdp_from_rho(double rho) {
    require_nonneg(rho);
    return Budget(Kind::kCdp, std::sqrt(2 * rho));
  }
  static Budget partial_pure(PrivacyMetric m) {
    return Budget(Kind::kPartialPure, std::move(m));
  }
  static Budget partial_cdp(PrivacyMetric m) {
    return Budget(Kind::kPartialCdp, std::move(m));
  }

  Kind kind() const { return kind_; }
  bool is_partial() const {
    return kind_ == Kind::kPartialPure || kind_ == Kind::kPartialCdp;
  }
  bool is_pure_family() const {
    return kind_ == Kind::kPure || kind_ == Kind::kPartialPure;
  }

  double eps() const {
    if (is_partial()) throw std::logic_error("partial budgets carry a metric");
    return eps_;
  }
  double rho() const {
    if (kind_ != Kind::kCdp) throw std::logic_error("rho() requires a zCDP budget");
    return 0.5 * eps_ * eps_;
  }
  const PrivacyMetric& metric() const {
    if (!is_partial()) throw std::logic_error("scalar budget has no metric");
    return metric_;
  }

  nlohmann::json to_json() const {
    switch (kind_) {
      case Kind::kPure:
        return {{"kind", "pure"}, {"eps", eps_}};
      case Kind::kCdp:
        return {{"kind", "zcdp"}, {"rho", rho()}, {"eps_param", eps_}};
      case Kind::kPartialPure:
      case Kind::kPartialCdp: {
        nlohmann::json j;
        j["kind"] = kind_ == Kind::kPartialPure ? "partial_pure" : "partial_cdp";
        if (metric_.is_uniform()) {
          j["metric"] = {{"kind", "uniform_per_attribute"},
                         {"eps0", metric_.eps0()},
                         {"d", metric_.dimension()}};
        } else {
          j["metric"] = {{"kind", "non_uniform"},
                         {"d", metric_.dimension()}};
        }
        return j;
      }
    }
    throw std::logic_error("unreachable");
  }

 private:
  static void require_nonneg(double v) {
    if (!(v >= 0)) throw std::invalid_argument("budget parameter must be >= 0");
  }
  Budget(Kind k, double eps) : kind_(k), eps_(eps), metric_(PrivacyMetric::uniform_per_attribute(0, 1)) {}
  Budget(Kind k, PrivacyMetric m) : kind_(k), eps_(0), metric_(std::move(m)) {}

  Kind kind_;
  double eps_;
  PrivacyMetric metric_;
};

// Sequential composition. Pure family adds eps (pointwise for metrics); the
// CDP family takes root-sum-of-squares of the eps parameters (pointwise for
// metrics). Scalar and partial budgets cannot be mixed.
inline Budget compose_sequential(const std::vector<Budget>& budgets) {
  if (budgets.empty())
    throw std::invalid_argument("compose_sequential: empty budget list");
  const bool pure_family = budgets.front().is_pure_family();
  const bool partial = budgets.front().is_partial();
  for (const auto& b : budgets) {
    if (b.is_pure_family() != pure_family)
      throw std::invalid_argument(
          "compose_sequential: cannot mix pure-DP and CDP families");
    if (b.is_partial() != partial)
      throw std::invalid_argument(
          "compose_sequential: cannot mix scalar and partial budgets");
  }
  if (!partial) {
    if (pure_family) {
      double s = 0;
      for (const auto& b : budgets) s += b.eps();
      return Budget::pure(s);
    }
    double ss = 0;
    for (const auto& b : budgets) ss += b.eps() * b.eps();
    return Budget::cdp(std::sqrt(ss));
  }
  // Closed forms when every child is uniform over the same dimension,
  // otherwise a lazily evaluated pointwise combination.
  bool all_uniform = true;
  int d = budgets.front().metric().dimension();
  for (const auto& b : budgets)
    all_uniform = all_uniform && b.metric().is_uniform() &&
                  b.metric().dimension() == d;
  if (all_uniform) {
    if (pure_family) {
      double s = 0;
      for (const auto& b : budgets) s += b.metric().eps0();
      return Budget::partial_pure(PrivacyMetric::uniform_per_attribute(s, d));
    }
    double ss = 0;
    for (const auto& b : budgets) ss += b.metric().eps0() * b.metric().eps0();
    return Budget::partial_cdp(
        PrivacyMetric::uniform_per_attribute(std::sqrt(ss), d));
  }
  std::vector<PrivacyMetric> children;
  children.reserve(budgets.size());
  for (const auto& b : budgets) children.push_back(b.metric());
  auto mode = pure_family ? PrivacyMetric::CombineMode::kSum
                          : PrivacyMetric::CombineMode::kRootSumSquares;
  PrivacyMetric m = PrivacyMetric::combined(std::move(children), mode);
  return pure_family ? Budget::partial_pure(std::move(m))
                     : Budget::partial_cdp(std::move(m));
}

// Per-attribute partial guarantee to a standard per-person one:
// partial_pure(eps0) -> pure(d*eps0); partial_cdp(eps0) -> (1/2)d^2 eps0^2
// zCDP. Non-uniform metrics must go through metric_sup instead.
inline Budget partial_to_standard(const Budget& b, int d) {
  if (!b.is_partial())
    throw std::invalid_argument("partial_to_standard requires a partial budget");
  if (!b.metric().is_uniform())
    throw std::invalid_argument(
        "partial_to_standard requires a uniform per-attribute metric; take "
        "metric_sup for non-uniform metrics");
  if (d < 1) throw std::invalid_argument("d must be >= 1");
  const double eps0 = b.metric().eps0();
  return b.kind() == Budget::Kind::kPartialPure ? Budget::pure(d * eps0)
                                                : Budget::cdp(d * eps0);
}

// delta for which rho-zCDP implies (eps, delta)-DP, via the one-parameter
// tail bound exp(-(eps - rho)^2 / (4 rho)); requires eps >= rho > 0.
inline double zcdp_to_approx_dp_simple(double rho, double eps_tilde) {
  if (!(rho > 0)) throw std::invalid_argument("rho must be > 0");
  if (eps_tilde < rho)
    throw std::invalid_argument("conversion requires eps >= rho");
  const double gap = eps_tilde - rho;
  return std::exp(-gap * gap / (4 * rho));
}

namespace detail {

// log of the optimal-order zCDP tail bound at Renyi order alpha:
//   delta(alpha) = exp((alpha-1)(alpha rho - eps)) / (alpha-1) * (1-1/alpha)^alpha
inline double log_zcdp_delta_at(double rho, double eps, double alpha) {
  return (alpha - 1) * (alpha * rho - eps) - std::log(alpha - 1) +
         alpha * std::log1p(-1.0 / alpha);
}

// min over alpha in (1, 500] of log delta(alpha): coarse log-spaced grid,
// then golden-section refinement around the best cell.
inline double log_zcdp_delta_bound(double rho, double eps) {
  constexpr double kAlphaMax = 500.0;
  constexpr int kGrid = 2048;
  double best = std::numeric_limits<double>::infinity();
  double best_t = 0;
  const double t_lo = std::log(1e-9), t_hi = std::log(kAlphaMax - 1);
  for (int i = 0; i <= kGrid; ++i) {
    double t = t_lo + (t_hi - t_lo) * i / kGrid;
    double v = log_zcdp_delta_at(rho, eps, 1 + std::exp(t));
    if (v < best) {
      best = v;
      best_t = t;
    }
  }
  double span = (t_hi - t_lo) / kGrid;
  double lo = best_t - span, hi = best_t + span;
  constexpr double kGolden = 0.6180339887498949;
  double x1 = hi - kGolden * (hi - lo), x2 = lo + kGolden * (hi - lo);
  double f1 = log_zcdp_delta_at(rho, eps, 1 + std::exp(x1));
  double f2 = log_zcdp_delta_at(rho, eps, 1 + std::exp(x2));
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGolden * (hi - lo);
      f1 = log_zcdp_delta_at(rho, eps, 1 + std::exp(x1));
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGolden * (hi - lo);
      f2 = log_zcdp_delta_at(rho, eps, 1 + std::exp(x2));
    }
  }
  return std::min({best, f1, f2});
}

}  // namespace detail

// Privacy failure probability of the optimal zCDP -> approximate-DP
// conversion (minimized over Renyi order). Exposed for the tests.
inline double zcdp_delta_bound(double rho, double eps) {
  if (!(rho > 0)) throw std::invalid_argument("rho must be > 0");
  return std::exp(detail::log_zcdp_delta_bound(rho, eps));
}

// Smallest eps such that rho-zCDP implies (eps, delta)-DP under the
// order-optimized conversion; bisection to absolute tolerance 1e-3 (the
// returned midpoint is well inside it).
inline double zcdp_to_approx_dp_tight(double rho, double delta) {
  if (!(rho > 0)) throw std::invalid_argument("rho must be > 0");
  if (!(delta > 0 && delta < 1))
    throw std::invalid_argument("delta must lie in (0, 1)");
  const double log_delta = std::log(delta);
  double lo = 0;
  double hi = rho + 2 * std::sqrt(rho * std::log(1 / delta)) + 1;
  int expand = 0;
  while (detail::log_zcdp_delta_bound(rho, hi) > log_delta) {
    hi *= 2;
    if (++expand > 60)
      throw std::runtime_error("zcdp_to_approx_dp_tight failed to bracket");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-4; ++it) {
    double mid = 0.5 * (lo + hi);
    if (detail::log_zcdp_delta_bound(rho, mid) > log_delta)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace pdp

#endif  // PDP_ACCOUNTANT_HPP_
