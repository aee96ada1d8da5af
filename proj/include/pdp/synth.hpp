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

// Seeded synthetic instances used by the experiment harness and the
// statistical test suites.

#ifndef PDP_SYNTH_HPP_
#define PDP_SYNTH_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pdp/core.hpp"
#include "pdp/rng.hpp"

namespace pdp::synth {

// n records with i.i.d. Bernoulli(p) bits.
inline Dataset bernoulli_dataset(int d, std::size_t n, double p, RngStream rng) {
  if (!(p >= 0 && p <= 1)) throw std::invalid_argument("p must lie in [0,1]");
  Dataset ds;
  ds.schema = AttributeSchema::with_default_names(d);
  ds.rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j)
      bits[static_cast<std::size_t>(j)] = rng.next_unit() < p ? 1 : 0;
    ds.rows.emplace_back(std::move(bits));
  }
  return ds;
}

// Deterministic planted histogram: `planted` holds (record, count) pairs,
// and `background` light records are derived from distinct low indices so
// each appears about background_total / background_distinct times.
struct PlantedSpec {
  std::vector<std::pair<Record, std::size_t>> planted;
  std::size_t background_total = 0;
  std::size_t background_distinct = 0;
};

inline Dataset planted_dataset(int d, const PlantedSpec& spec) {
  Dataset ds;
  ds.schema = AttributeSchema::with_default_names(d);
  std::vector<Record> taken;
  for (const auto& [rec, count] : spec.planted) {
    if (rec.size() != d) throw std::invalid_argument("planted record length");
    for (std::size_t i = 0; i < count; ++i) ds.rows.push_back(rec);
    taken.push_back(rec);
  }
  std::sort(taken.begin(), taken.end());
  if (spec.background_distinct > 0) {
    const std::uint64_t span = d >= 40 ? (std::uint64_t{1} << 40)
                                       : (std::uint64_t{1} << d);
    std::vector<Record> lights;
    for (std::uint64_t v = 1; lights.size() < spec.background_distinct; ++v) {
      if (v >= span)
        throw std::invalid_argument("domain too small for requested background");
      Record r = Record::from_index(v * 2654435761ULL % span, d);
      if (std::binary_search(taken.begin(), taken.end(), r)) continue;
      if (std::find(lights.begin(), lights.end(), r) != lights.end()) continue;
      lights.push_back(std::move(r));
    }
    for (std::size_t i = 0; i < spec.background_total; ++i)
      ds.rows.push_back(lights[i % lights.size()]);
  }
  return ds;
}

// Realizable point-function sample: P(x = u) = pos_frac with label 1, other
// records uniform among those differing from u, labeled 0.
inline LabeledDataset point_realizable(const Record& u, std::size_t n,
                                       double pos_frac, RngStream rng) {
  const int d = u.size();
  LabeledDataset s;
  s.schema = AttributeSchema::with_default_names(d);
  s.rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    LabeledExample ex;
    ex.x.resize(static_cast<std::size_t>(d));
    if (rng.next_unit() < pos_frac) {
      for (int j = 0; j < d; ++j) ex.x[static_cast<std::size_t>(j)] = u[j] ? 1 : -1;
      ex.y = 1;
    } else {
      // Resample until the record differs from u.
      while (true) {
        for (int j = 0; j < d; ++j)
          ex.x[static_cast<std::size_t>(j)] = rng.next_unit() < 0.5 ? 1 : -1;
        bool same = true;
        for (int j = 0; j < d && same; ++j)
          same = (ex.x[static_cast<std::size_t>(j)] > 0) == (u[j] != 0);
        if (!same) break;
      }
      ex.y = -1;
    }
    s.rows.push_back(std::move(ex));
  }
  return s;
}

// Realizable threshold sample: features uniform over {0,1}^d, label 1 iff
// the record is lexicographically >= z.
inline LabeledDataset threshold_realizable(const Record& z, std::size_t n,
                                           RngStream rng) {
  const int d = z.size();
  LabeledDataset s;
  s.schema = AttributeSchema::with_default_names(d);
  s.rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    LabeledExample ex;
    ex.x.resize(static_cast<std::size_t>(d));
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
      bits[static_cast<std::size_t>(j)] = rng.next_unit() < 0.5 ? 1 : 0;
      ex.x[static_cast<std::size_t>(j)] =
          bits[static_cast<std::size_t>(j)] ? 1 : -1;
    }
    ex.y = !(Record(bits) < z) ? 1 : -1;
    s.rows.push_back(std::move(ex));
  }
  return s;
}

// Finite-support distribution over labeled examples in {-1,+1}^d; sampling
// and exact population error share the same support.
struct LabeledPopulation {
  std::vector<LabeledExample> support;
  std::vector<double> probs;

  LabeledDataset sample(std::size_t n, RngStream rng) const {
    LabeledDataset s;
    s.schema = AttributeSchema::with_default_names(
        static_cast<int>(support.at(0).x.size()));
    s.rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      double u = rng.next_unit();
      std::size_t pick = probs.size() - 1;
      for (std::size_t k = 0; k < probs.size(); ++k) {
        u -= probs[k];
        if (u < 0) {
          pick = k;
          break;
        }
      }
      s.rows.push_back(support[pick]);
    }
    return s;
  }
};

// iid sample of n records from an explicit distribution over a record list.
inline Dataset sample_discrete(const std::vector<Record>& support,
                               const std::vector<double>& probs, std::size_t n,
                               RngStream rng) {
  if (support.empty() || support.size() != probs.size())
    throw std::invalid_argument("sample_discrete: bad support");
  Dataset ds;
  ds.schema = AttributeSchema::with_default_names(support[0].size());
  ds.rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double u = rng.next_unit();
    std::size_t pick = probs.size() - 1;
    for (std::size_t k = 0; k < probs.size(); ++k) {
      u -= probs[k];
      if (u < 0) {
        pick = k;
        break;
      }
    }
    ds.rows.push_back(support[pick]);
  }
  return ds;
}

}  // namespace pdp::synth

#endif  // PDP_SYNTH_HPP_
