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

#ifndef PDP_REPORT_HPP_
#define PDP_REPORT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace pdp {

// One experiment trial: the metric columns are fixed per subcommand so the
// CSV schema stays stable.
struct TrialReport {
  std::int64_t trial = 0;
  std::string seed_path;
  std::map<std::string, double> metrics;
  double wall_ms = 0;
};

struct AggregateRow {
  std::string statistic;  // mean, stddev, p50, min, max
  std::map<std::string, double> metrics;
};

inline std::vector<AggregateRow> aggregate_trials(
    const std::vector<TrialReport>& trials,
    const std::vector<std::string>& columns) {
  std::vector<AggregateRow> rows;
  if (trials.empty()) return rows;
  const double n = static_cast<double>(trials.size());
  AggregateRow mean{"mean", {}}, stddev{"stddev", {}}, median{"p50", {}},
      lo{"min", {}}, hi{"max", {}};
  for (const auto& col : columns) {
    std::vector<double> vals;
    vals.reserve(trials.size());
    for (const auto& t : trials) {
      auto it = t.metrics.find(col);
      vals.push_back(it == t.metrics.end() ? 0.0 : it->second);
    }
    double m = 0;
    for (double v : vals) m += v;
    m /= n;
    double var = 0;
    for (double v : vals) var += (v - m) * (v - m);
    var = trials.size() > 1 ? var / (n - 1) : 0.0;
    std::sort(vals.begin(), vals.end());
    mean.metrics[col] = m;
    stddev.metrics[col] = std::sqrt(var);
    median.metrics[col] = vals[vals.size() / 2];
    lo.metrics[col] = vals.front();
    hi.metrics[col] = vals.back();
  }
  rows.push_back(std::move(mean));
  rows.push_back(std::move(stddev));
  rows.push_back(std::move(median));
  rows.push_back(std::move(lo));
  rows.push_back(std::move(hi));
  return rows;
}

namespace detail {

inline std::string format_full(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace detail

inline void write_trials_csv(std::ostream& out,
                             const std::vector<TrialReport>& trials,
                             const std::vector<std::string>& columns) {
  out << "trial,seed_path";
  for (const auto& c : columns) out << "," << c;
  out << ",wall_ms\n";
  for (const auto& t : trials) {
    out << t.trial << "," << t.seed_path;
    for (const auto& c : columns) {
      auto it = t.metrics.find(c);
      out << "," << detail::format_full(it == t.metrics.end() ? 0.0 : it->second);
    }
    out << "," << detail::format_full(t.wall_ms) << "\n";
  }
  for (const auto& row : aggregate_trials(trials, columns)) {
    out << row.statistic << ",";
    for (const auto& c : columns) out << "," << detail::format_full(row.metrics.at(c));
    out << ",\n";
  }
}

inline nlohmann::json trials_to_json(const std::vector<TrialReport>& trials,
                                     const std::vector<std::string>& columns) {
  nlohmann::json j;
  j["trials"] = nlohmann::json::array();
  for (const auto& t : trials) {
    nlohmann::json jt;
    jt["trial"] = t.trial;
    jt["seed_path"] = t.seed_path;
    for (const auto& c : columns) {
      auto it = t.metrics.find(c);
      jt[c] = it == t.metrics.end() ? 0.0 : it->second;
    }
    jt["wall_ms"] = t.wall_ms;
    j["trials"].push_back(std::move(jt));
  }
  j["summary"] = nlohmann::json::object();
  for (const auto& row : aggregate_trials(trials, columns)) {
    nlohmann::json jr;
    for (const auto& c : columns) jr[c] = row.metrics.at(c);
    j["summary"][row.statistic] = std::move(jr);
  }
  return j;
}

}  // namespace pdp

#endif  // PDP_REPORT_HPP_
