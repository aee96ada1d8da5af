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

// Experiment harness: one subcommand per mechanism, seeded multi-trial
// sweeps, CSV/JSON reports. Exit codes: 0 success, 2 configuration error,
// 1 runtime error.

#ifndef PDP_CLI_HPP_
#define PDP_CLI_HPP_

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pdp/accountant.hpp"
#include "pdp/core.hpp"
#include "pdp/halfspace.hpp"
#include "pdp/histogram.hpp"
#include "pdp/oracle.hpp"
#include "pdp/release.hpp"
#include "pdp/report.hpp"
#include "pdp/synth.hpp"
#include "pdp/workloads.hpp"

namespace pdp::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

struct CommonOpts {
  std::string config_path;
  std::uint64_t seed = 0;
  std::int64_t trials = 1;
  std::string out;
  std::string format = "json";
  int jobs = 1;
  bool zero_noise = false;
  bool test_harness = false;

  void check() const {
    if (trials < 1) throw ConfigError("--trials must be >= 1");
    if (jobs < 1) throw ConfigError("--jobs must be >= 1");
    if (format != "json" && format != "csv")
      throw ConfigError("--format must be json or csv");
    if (zero_noise && !test_harness)
      throw ConfigError("--zero-noise requires --test-harness");
  }
  NoiseConfig noise() const { return NoiseConfig{zero_noise}; }
};

inline void add_common_options(CLI::App* sub, CommonOpts* opts) {
  sub->add_option("--config", opts->config_path, "JSON config file");
  sub->add_option("--seed", opts->seed, "base seed");
  sub->add_option("--trials", opts->trials, "number of trials");
  sub->add_option("--out", opts->out, "output path (stdout if omitted)");
  sub->add_option("--format", opts->format, "json or csv");
  sub->add_option("--jobs", opts->jobs, "concurrent trials");
  sub->add_flag("--zero-noise", opts->zero_noise,
                "debug mode: samplers return 0 (needs --test-harness)");
  sub->add_flag("--test-harness", opts->test_harness,
                "acknowledge non-private debug use");
}

inline nlohmann::json load_config(const CommonOpts& opts) {
  if (opts.config_path.empty()) throw ConfigError("--config is required");
  std::ifstream in(opts.config_path);
  if (!in) throw ConfigError("cannot open config " + opts.config_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return j;
}

template <typename T>
T require(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key)) throw ConfigError("config missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

template <typename T>
T value_or(const nlohmann::json& j, const std::string& key, T fallback) {
  return j.contains(key) ? require<T>(j, key) : fallback;
}

// Dataset specs: {"kind":"csv","path":...} | {"kind":"bernoulli","d","n","p"}
// | {"kind":"planted","d","planted":[{"record","count"}...],
//    "background_total","background_distinct"}
inline Dataset make_dataset(const nlohmann::json& spec, RngStream rng) {
  const auto kind = require<std::string>(spec, "kind");
  if (kind == "csv") return load_dataset(require<std::string>(spec, "path"));
  if (kind == "bernoulli")
    return synth::bernoulli_dataset(require<int>(spec, "d"),
                                    require<std::size_t>(spec, "n"),
                                    require<double>(spec, "p"), rng);
  if (kind == "planted") {
    synth::PlantedSpec ps;
    const int d = require<int>(spec, "d");
    for (const auto& item : require<nlohmann::json>(spec, "planted"))
      ps.planted.emplace_back(
          Record::from_string(require<std::string>(item, "record")),
          require<std::size_t>(item, "count"));
    ps.background_total = value_or<std::size_t>(spec, "background_total", 0);
    ps.background_distinct = value_or<std::size_t>(spec, "background_distinct", 0);
    return synth::planted_dataset(d, ps);
  }
  throw ConfigError("unknown dataset kind '" + kind + "'");
}

inline Workload make_workload(const nlohmann::json& spec) {
  try {
    Workload w = Workload::from_json(spec);
    w.validate();
    return w;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("workload: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("workload: ") + e.what());
  }
}

using TrialFn = std::function<TrialReport(std::int64_t)>;

inline std::vector<TrialReport> run_trials(std::int64_t trials, int jobs,
                                           const TrialFn& fn) {
  std::vector<TrialReport> out(static_cast<std::size_t>(trials));
  if (jobs <= 1) {
    for (std::int64_t t = 0; t < trials; ++t)
      out[static_cast<std::size_t>(t)] = fn(t);
    return out;
  }
  std::atomic<std::int64_t> next{0};
  std::vector<std::thread> workers;
  const int count = std::min<std::int64_t>(jobs, trials);
  workers.reserve(static_cast<std::size_t>(count));
  for (int wkr = 0; wkr < count; ++wkr) {
    workers.emplace_back([&]() {
      while (true) {
        const std::int64_t t = next.fetch_add(1);
        if (t >= trials) return;
        out[static_cast<std::size_t>(t)] = fn(t);
      }
    });
  }
  for (auto& w : workers) w.join();
  return out;
}

inline void emit(const CommonOpts& opts, const std::vector<TrialReport>& trials,
                 const std::vector<std::string>& columns) {
  std::ostringstream buffer;
  if (opts.format == "csv")
    write_trials_csv(buffer, trials, columns);
  else
    buffer << trials_to_json(trials, columns).dump(2) << "\n";
  if (opts.out.empty()) {
    std::cout << buffer.str();
  } else {
    std::ofstream f(opts.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + opts.out);
    f << buffer.str();
  }
}

inline void emit_json(const CommonOpts& opts, const nlohmann::json& j) {
  if (opts.out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream f(opts.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + opts.out);
    f << j.dump(2) << "\n";
  }
}

template <typename Fn>
TrialReport timed_trial(std::int64_t t, Fn&& body) {
  TrialReport rep;
  rep.trial = t;
  rep.seed_path = "seed/" + std::to_string(t);
  const auto start = std::chrono::steady_clock::now();
  body(rep);
  rep.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  return rep;
}

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

inline int cmd_account(const CommonOpts& opts, double rho, double delta,
                       double eps0, int d, const std::string& family) {
  nlohmann::json j;
  if (rho > 0) {
    if (!(delta > 0 && delta < 1))
      throw ConfigError("account: --delta in (0,1) required with --rho");
    j["rho"] = rho;
    j["delta"] = delta;
    j["eps"] = zcdp_to_approx_dp_tight(rho, delta);
    j["eps_simple_inverse"] = rho + 2 * std::sqrt(rho * std::log(1 / delta));
  }
  if (eps0 >= 0) {
    if (d < 1) throw ConfigError("account: --d >= 1 required with --eps0");
    Budget b = family == "pure"
                   ? Budget::partial_pure(PrivacyMetric::uniform_per_attribute(eps0, d))
                   : Budget::partial_cdp(PrivacyMetric::uniform_per_attribute(eps0, d));
    const Budget std_budget = partial_to_standard(b, d);
    j["eps0"] = eps0;
    j["d"] = d;
    j["family"] = family;
    if (family == "pure")
      j["eps_person"] = std_budget.eps();
    else
      j["rho_person"] = std_budget.rho();
  }
  if (j.empty())
    throw ConfigError("account: provide --rho/--delta and/or --eps0/--d");
  emit_json(opts, j);
  return 0;
}

inline int cmd_projection(const CommonOpts& opts) {
  const auto cfg = load_config(opts);
  const Workload w = make_workload(require<nlohmann::json>(cfg, "workload"));
  RngStream root(opts.seed);
  const Dataset data =
      make_dataset(require<nlohmann::json>(cfg, "data"), root.substream(1u << 20));
  double sigma = value_or<double>(cfg, "sigma", 0.0);
  if (sigma <= 0) {
    const double eps0 = require<double>(cfg, "eps0");
    if (!(eps0 > 0)) throw ConfigError("projection: eps0 must be > 0");
    sigma = diameters(w).delta0 / (eps0 * static_cast<double>(data.n()));
  }
  const auto exact = eval_workload(w, data);
  const auto fn = [&](std::int64_t t) {
    return timed_trial(t, [&](TrialReport& rep) {
      auto res = projection_mechanism(data, w, sigma, root.substream(static_cast<std::uint64_t>(t)),
                                      opts.noise());
      double err = 0, noise_err = 0;
      for (std::size_t j = 0; j < exact.size(); ++j) {
        err += (res.answers[j] - exact[j]) * (res.answers[j] - exact[j]);
        noise_err += (res.noisy_answers[j] - exact[j]) * (res.noisy_answers[j] - exact[j]);
      }
      rep.metrics["mean_sq_error"] = err / static_cast<double>(exact.size());
      rep.metrics["noise_mean_sq_error"] = noise_err / static_cast<double>(exact.size());
      rep.metrics["eps"] = res.eps;
      rep.metrics["eps0"] = res.eps0;
      rep.metrics["rho_person"] = 0.5 * res.eps * res.eps;
      rep.metrics["fw_gap"] = res.fw_gap;
      rep.metrics["bound_mse"] =
          std::min(sigma * sigma,
                   sigma * res.delta * std::sqrt(2.0 * w.d * std::log(2.0)) /
                       static_cast<double>(w.m()));
    });
  };
  emit(opts, run_trials(opts.trials, opts.jobs, fn),
       {"mean_sq_error", "noise_mean_sq_error", "bound_mse", "eps", "eps0",
        "rho_person", "fw_gap"});
  return 0;
}

inline int cmd_mwem(const CommonOpts& opts) {
  const auto cfg = load_config(opts);
  const Workload w = make_workload(require<nlohmann::json>(cfg, "workload"));
  RngStream root(opts.seed);
  const Dataset data =
      make_dataset(require<nlohmann::json>(cfg, "data"), root.substream(1u << 20));
  const double eps0 = require<double>(cfg, "eps0");
  const int ell = require<int>(cfg, "ell");
  const int T = value_or<int>(cfg, "T",
                              mwem_default_rounds(w.d, data.n(), eps0, ell, w.m()));
  const double bound = mwem_error_bound(w.d, data.n(), eps0, T, ell, w.m());
  const auto fn = [&](std::int64_t t) {
    return timed_trial(t, [&](TrialReport& rep) {
      auto res = mwem(data, w, eps0, T, ell,
                      root.substream(static_cast<std::uint64_t>(t)), opts.noise());
      rep.metrics["tuple_max_error"] =
          disjoint_tuple_max_error(w, ell, res.synthetic, data);
      rep.metrics["bound_rhs"] = bound;
      rep.metrics["T"] = T;
      rep.metrics["eps_round"] = res.eps_round;
      rep.metrics["eps0"] = eps0;
      rep.metrics["rho_person"] = res.zcdp_budget.rho();
    });
  };
  emit(opts, run_trials(opts.trials, opts.jobs, fn),
       {"tuple_max_error", "bound_rhs", "T", "eps_round", "eps0", "rho_person"});
  return 0;
}

inline int cmd_heavy_hitters(const CommonOpts& opts) {
  const auto cfg = load_config(opts);
  RngStream root(opts.seed);
  const Dataset data =
      make_dataset(require<nlohmann::json>(cfg, "data"), root.substream(1u << 20));
  const double eps = require<double>(cfg, "eps");
  const double nu = require<double>(cfg, "nu");
  const double eta = require<double>(cfg, "eta");
  const double nun = nu * static_cast<double>(data.n());
  const SparseHistogram exact = oracle::exact_frequencies(data);
  // Warn once about the utility precondition.
  {
    HistogramDiagnostics diag;
    priv_histogram(data, eps, nu, eta, root.substream(2), {}, &diag);
    for (const auto& wmsg : diag.warnings) std::cerr << "warning: " << wmsg << "\n";
  }
  const Budget person =
      partial_to_standard(Budget::partial_pure(PrivacyMetric::uniform_per_attribute(eps, data.d())),
                          data.d());
  const auto fn = [&](std::int64_t t) {
    return timed_trial(t, [&](TrialReport& rep) {
      const SparseHistogram hist = priv_histogram(
          data, eps, nu, eta, root.substream(static_cast<std::uint64_t>(t)),
          opts.noise());
      double max_err = 0;
      bool recovered = true;
      for (const auto& [rec, f] : exact.entries) {
        const double est = hist.at(rec);
        max_err = std::max(max_err, std::abs(est - f));
        if (f >= nun && est == 0.0 && hist.entries.find(rec) == hist.entries.end())
          recovered = false;
      }
      for (const auto& [rec, est] : hist.entries)
        if (exact.entries.find(rec) == exact.entries.end())
          max_err = std::max(max_err, std::abs(est));
      rep.metrics["max_count_error"] = max_err;
      rep.metrics["list_size"] = static_cast<double>(hist.entries.size());
      rep.metrics["heavy_recovered"] = recovered ? 1.0 : 0.0;
      rep.metrics["bound_nu_n"] = nun;
      rep.metrics["eps0"] = eps;
      rep.metrics["eps_person"] = person.eps();
    });
  };
  emit(opts, run_trials(opts.trials, opts.jobs, fn),
       {"max_count_error", "list_size", "heavy_recovered", "bound_nu_n", "eps0",
        "eps_person"});
  return 0;
}

inline int cmd_learn_point(const CommonOpts& opts) {
  const auto cfg = load_config(opts);
  RngStream root(opts.seed);
  const double eps = require<double>(cfg, "eps");
  const double alpha = require<double>(cfg, "alpha");
  const auto data_spec = require<nlohmann::json>(cfg, "data");
  const int d = require<int>(data_spec, "d");
  const std::size_t n = require<std::size_t>(data_spec, "n");
  const double pos_frac = value_or<double>(data_spec, "pos_frac", 0.3);
  const Budget person = partial_to_standard(
      Budget::partial_pure(PrivacyMetric::uniform_per_attribute(eps, d + 1)), d + 1);
  const auto fn = [&](std::int64_t t) {
    return timed_trial(t, [&](TrialReport& rep) {
      RngStream trial_rng = root.substream(static_cast<std::uint64_t>(t));
      RngStream data_rng = trial_rng.substream(0);
      std::vector<std::uint8_t> ubits(static_cast<std::size_t>(d));
      for (int j = 0; j < d; ++j)
        ubits[static_cast<std::size_t>(j)] = data_rng.next_unit() < 0.5 ? 1 : 0;
      const Record u(std::move(ubits));
      const LabeledDataset s = synth::point_realizable(u, n, pos_frac, data_rng);
      const auto hyp = learn_point(s, eps, alpha, trial_rng.substream(1), opts.noise());
      double err;
      if (hyp.u == u) {
        err = 0.0;
      } else {
        err = pos_frac + (1 - pos_frac) / (std::pow(2.0, d) - 1);
      }
      rep.metrics["population_error"] = err;
      rep.metrics["within_alpha"] = err <= alpha ? 1.0 : 0.0;
      rep.metrics["eps0"] = eps;
      rep.metrics["eps_person"] = person.eps();
    });
  };
  emit(opts, run_trials(opts.trials, opts.jobs, fn),
       {"population_error", "within_alpha", "eps0", "eps_person"});
  return 0;
}

inline int cmd_learn_threshold(const CommonOpts& opts) {
  const auto cfg = load_config(opts);
  RngStream root(opts.seed);
  const double eps = require<double>(cfg, "eps");
  const double alpha = require<double>(cfg, "alpha");
  const auto data_spec = require<nlohmann::json>(cfg, "data");
  const int d = require<int>(data_spec, "d");
  const std::size_t n = require<std::size_t>(data_spec, "n");
  if (d > 62) throw ConfigError("learn-threshold harness supports d <= 62");
  const Budget person = partial_to_standard(
      Budget::partial_pure(PrivacyMetric::uniform_per_attribute(eps, d + 1)), d + 1);
  const auto fn = [&](std::int64_t t) {
    return timed_trial(t, [&](TrialReport& rep) {
      RngStream trial_rng = root.substream(static_cast<std::uint64_t>(t));
      RngStream data_rng = trial_rng.substream(0);
      // Threshold drawn away from the extremes so the polarizing branch runs.
      const std::uint64_t span = std::uint64_t{1} << d;
      const std::uint64_t zi =
          span / 4 + static_cast<std::uint64_t>(data_rng.next_unit() * (span / 2));
      std::vector<std::uint8_t> zbits(static_cast<std::size_t>(d));
      for (int j = 0; j < d; ++j)
        zbits[static_cast<std::size_t>(j)] =
            static_cast<std::uint8_t>((zi >> (d - 1 - j)) & 1u);
      const Record z(std::move(zbits));
      const LabeledDataset s = synth::threshold_realizable(z, n, data_rng);
      const auto hyp =
          learn_threshold(s, eps, alpha, trial_rng.substream(1), opts.noise());
      std::uint64_t hi = 0;
      for (int j = 0; j < d; ++j)
        hi = (hi << 1) | hyp.z[j];
      const double err = std::abs(static_cast<double>(hi) - static_cast<double>(zi)) /
                         std::pow(2.0, d);
      rep.metrics["population_error"] = err;
      rep.metrics["within_alpha"] = err <= alpha ? 1.0 : 0.0;
      rep.metrics["eps0"] = eps;
      rep.metrics["eps_person"] = person.eps();
    });
  };
  emit(opts, run_trials(opts.trials, opts.jobs, fn),
       {"population_error", "within_alpha", "eps0", "eps_person"});
  return 0;
}

inline int cmd_estimate_dist(const CommonOpts& opts) {
  const auto cfg = load_config(opts);
  RngStream root(opts.seed);
  const double eps = require<double>(cfg, "eps");
  const auto data_spec = require<nlohmann::json>(cfg, "data");
  const int d = require<int>(data_spec, "d");
  const std::size_t n = require<std::size_t>(data_spec, "n");
  const std::size_t support = require<std::size_t>(data_spec, "support");
  std::vector<Record> atoms;
  RngStream atom_rng = root.substream(1u << 20);
  while (atoms.size() < support) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j)
      bits[static_cast<std::size_t>(j)] = atom_rng.next_unit() < 0.5 ? 1 : 0;
    Record r(std::move(bits));
    if (std::find(atoms.begin(), atoms.end(), r) == atoms.end())
      atoms.push_back(std::move(r));
  }
  const std::vector<double> probs(atoms.size(), 1.0 / static_cast<double>(atoms.size()));
  const double bound = 50.0 * (std::log(static_cast<double>(d)) /
                                   (eps * static_cast<double>(n)) +
                               1.0 / static_cast<double>(n));
  const Budget person = partial_to_standard(
      Budget::partial_pure(PrivacyMetric::uniform_per_attribute(eps, d)), d);
  const auto fn = [&](std::int64_t t) {
    return timed_trial(t, [&](TrialReport& rep) {
      RngStream trial_rng = root.substream(static_cast<std::uint64_t>(t));
      const Dataset data = synth::sample_discrete(atoms, probs, n, trial_rng.substream(0));
      const SparseHistogram theta =
          estimate_distribution(data, eps, trial_rng.substream(1), opts.noise());
      double err = 0;
      for (std::size_t k = 0; k < atoms.size(); ++k) {
        const double diff = theta.at(atoms[k]) - probs[k];
        err += diff * diff;
      }
      for (const auto& [rec, v] : theta.entries)
        if (std::find(atoms.begin(), atoms.end(), rec) == atoms.end()) err += v * v;
      rep.metrics["l2sq_error"] = err;
      rep.metrics["bound"] = bound;
      rep.metrics["eps0"] = eps;
      rep.metrics["eps_person"] = person.eps();
    });
  };
  emit(opts, run_trials(opts.trials, opts.jobs, fn),
       {"l2sq_error", "bound", "eps0", "eps_person"});
  return 0;
}

inline int cmd_learn_halfspace(const CommonOpts& opts) {
  const auto cfg = load_config(opts);
  RngStream root(opts.seed);
  RobustLearnConfig rl;
  rl.gamma = require<double>(cfg, "gamma");
  rl.gamma_prime = require<double>(cfg, "gamma_prime");
  rl.eps = require<double>(cfg, "eps");
  rl.validate();
  const auto data_spec = require<nlohmann::json>(cfg, "data");
  const int d = require<int>(data_spec, "d");
  const std::size_t n = require<std::size_t>(data_spec, "n");
  const double label_noise = value_or<double>(data_spec, "label_noise", 0.0);

  // Margin population: features cluster on +/- a reference direction.
  synth::LabeledPopulation pop;
  RngStream pop_rng = root.substream(1u << 20);
  for (int i = 0; i < 8; ++i) {
    LabeledExample ex;
    ex.x.resize(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j)
      ex.x[static_cast<std::size_t>(j)] = pop_rng.next_unit() < 0.5 ? 1 : -1;
    int vote = 0;
    for (auto v : ex.x) vote += v;
    ex.y = vote >= 0 ? 1 : -1;
    if (pop_rng.next_unit() < label_noise) ex.y = static_cast<std::int8_t>(-ex.y);
    pop.support.push_back(std::move(ex));
    pop.probs.push_back(1.0 / 8.0);
  }
  const L1Net net = L1Net::build(d, rl.nu());
  const NetErmScorer scorer(net);
  const auto fn = [&](std::int64_t t) {
    return timed_trial(t, [&](TrialReport& rep) {
      RngStream trial_rng = root.substream(static_cast<std::uint64_t>(t));
      const LabeledDataset s = pop.sample(n, trial_rng.substream(0));
      const Halfspace h = learn_halfspace_robust(s, rl, net, scorer,
                                                 trial_rng.substream(1), opts.noise());
      rep.metrics["robust_error"] =
          robust_error(h, pop.support, pop.probs, rl.gamma_prime);
      rep.metrics["eps0"] = rl.eps;
      rep.metrics["net_size"] = static_cast<double>(net.size());
    });
  };
  emit(opts, run_trials(opts.trials, opts.jobs, fn),
       {"robust_error", "eps0", "net_size"});
  return 0;
}

// Sweep: grid of runs along one axis with per-point aggregates, a
// theoretical bound column, and (for heavy hitters) the per-cell Laplace
// baseline whose full-domain max error is sampled exactly via the inverse
// CDF of the maximum of 2^d - |support| absolute Laplace draws.
inline int cmd_sweep(const CommonOpts& opts) {
  const auto cfg = load_config(opts);
  const std::string sub = require<std::string>(cfg, "subcommand");
  const std::string axis = require<std::string>(cfg, "axis");
  const auto values = require<std::vector<double>>(cfg, "values");
  if (values.empty()) throw ConfigError("sweep: empty grid");
  const nlohmann::json base = require<nlohmann::json>(cfg, "base");
  const std::int64_t trials = opts.trials;

  nlohmann::json rows = nlohmann::json::array();
  if (sub == "heavy-hitters") {
    if (axis != "d" && axis != "n" && axis != "eps0" && axis != "nu")
      throw ConfigError("sweep heavy-hitters: axis must be d, n, eps0 or nu");
    for (const double value : values) {
      nlohmann::json point = base;
      double eps = require<double>(point, "eps");
      double nu = require<double>(point, "nu");
      const double eta = require<double>(point, "eta");
      int d = require<int>(point.at("data"), "d");
      std::size_t n = require<std::size_t>(point.at("data"), "n");
      if (axis == "d") d = static_cast<int>(value);
      if (axis == "n") n = static_cast<std::size_t>(value);
      if (axis == "eps0") eps = value;
      if (axis == "nu") nu = value;

      RngStream root(opts.seed + static_cast<std::uint64_t>(value * 1000));
      synth::PlantedSpec ps;
      const std::size_t heavy = value_or<std::size_t>(point.at("data"), "heavies", 4);
      for (std::size_t i = 0; i < heavy; ++i) {
        std::vector<std::uint8_t> bits(static_cast<std::size_t>(d), 0);
        for (int j = 0; j < d; ++j)
          bits[static_cast<std::size_t>(j)] =
              static_cast<std::uint8_t>(((i + 1) >> (j % 8)) & 1u);
        ps.planted.emplace_back(Record(std::move(bits)),
                                static_cast<std::size_t>(0.13 * static_cast<double>(n)));
      }
      std::size_t planted_total = 0;
      for (auto& [r, c] : ps.planted) planted_total += c;
      ps.background_total = n - planted_total;
      ps.background_distinct = std::min<std::size_t>(
          100, (std::size_t{1} << std::min(d, 20)) - heavy - 1);
      const Dataset data = synth::planted_dataset(d, ps);
      const SparseHistogram exact = oracle::exact_frequencies(data);

      double ours_sum = 0, base_sum = 0, list_sum = 0;
      for (std::int64_t t = 0; t < trials; ++t) {
        RngStream trial_rng = root.substream(static_cast<std::uint64_t>(t));
        const SparseHistogram hist =
            priv_histogram(data, eps, nu, eta, trial_rng.substream(0), opts.noise());
        double max_err = 0;
        for (const auto& [rec, f] : exact.entries)
          max_err = std::max(max_err, std::abs(hist.at(rec) - f));
        for (const auto& [rec, est] : hist.entries)
          if (exact.entries.find(rec) == exact.entries.end())
            max_err = std::max(max_err, std::abs(est));
        ours_sum += max_err;
        list_sum += static_cast<double>(hist.entries.size());

        // Baseline: Laplace(2/eps) on every cell of {0,1}^d.
        RngStream base_rng = trial_rng.substream(1);
        const double scale = 2.0 / eps;
        double base_err = 0;
        for (std::size_t k = 0; k < exact.entries.size(); ++k)
          base_err = std::max(base_err,
                              std::abs(laplace_sample(scale, base_rng, opts.noise())));
        const double empty_cells =
            std::pow(2.0, d) - static_cast<double>(exact.entries.size());
        if (empty_cells > 0.5 && !opts.zero_noise) {
          const double u = base_rng.next_open_unit();
          // max of M iid |Laplace|: t = -scale * log(1 - u^(1/M)).
          const double one_minus = -std::expm1(std::log(u) / empty_cells);
          base_err = std::max(base_err, -scale * std::log(one_minus));
        }
        base_sum += base_err;
      }
      nlohmann::json row;
      row["axis"] = axis;
      row["value"] = value;
      row["d"] = d;
      row["n"] = n;
      row["mean_max_count_error"] = ours_sum / static_cast<double>(trials);
      row["mean_list_size"] = list_sum / static_cast<double>(trials);
      row["bound_nu_n"] = nu * static_cast<double>(n);
      row["baseline_mean_max_count_error"] = base_sum / static_cast<double>(trials);
      row["baseline_theory"] = 2.0 * d * std::log(2.0) / eps;
      rows.push_back(std::move(row));
    }
  } else if (sub == "marginals-projection") {
    if (axis != "k" && axis != "n" && axis != "eps0")
      throw ConfigError("sweep marginals-projection: axis must be k, n or eps0");
    for (const double value : values) {
      nlohmann::json point = base;
      int d = require<int>(point.at("workload"), "d");
      int k = require<int>(point.at("workload"), "k");
      const std::string kind = require<std::string>(point.at("workload"), "kind");
      std::size_t n = require<std::size_t>(point.at("data"), "n");
      double eps0 = require<double>(point, "eps0");
      if (axis == "k") k = static_cast<int>(value);
      if (axis == "n") n = static_cast<std::size_t>(value);
      if (axis == "eps0") eps0 = value;
      const Workload w = kway_marginal_workload(
          d, k, kind == "parity" ? QueryKind::kParity : QueryKind::kConjunction);
      RngStream root(opts.seed + static_cast<std::uint64_t>(value * 1000));
      const Dataset data = synth::bernoulli_dataset(
          d, n, value_or<double>(point.at("data"), "p", 0.1), root.substream(1u << 20));
      const Diameters dia = diameters(w);
      const double sigma = dia.delta0 / (eps0 * static_cast<double>(n));
      const auto exact = eval_workload(w, data);
      double mse_sum = 0;
      for (std::int64_t t = 0; t < trials; ++t) {
        auto res = projection_mechanism(data, w, sigma,
                                        root.substream(static_cast<std::uint64_t>(t)),
                                        opts.noise());
        double err = 0;
        for (std::size_t j = 0; j < exact.size(); ++j)
          err += (res.answers[j] - exact[j]) * (res.answers[j] - exact[j]);
        mse_sum += err / static_cast<double>(exact.size());
      }
      nlohmann::json row;
      row["axis"] = axis;
      row["value"] = value;
      row["k"] = k;
      row["n"] = n;
      row["sigma"] = sigma;
      row["mean_sq_error"] = mse_sum / static_cast<double>(trials);
      row["bound_mse"] =
          std::min(sigma * sigma, sigma * dia.delta * std::sqrt(2.0 * d * std::log(2.0)) /
                                      static_cast<double>(w.m()));
      rows.push_back(std::move(row));
    }
  } else {
    throw ConfigError("sweep: unsupported subcommand '" + sub + "'");
  }

  nlohmann::json out;
  out["sweep"] = sub;
  out["axis"] = axis;
  out["rows"] = rows;
  if (opts.format == "csv") {
    std::ostringstream csv;
    if (!rows.empty()) {
      std::vector<std::string> cols;
      for (auto it = rows[0].begin(); it != rows[0].end(); ++it)
        cols.push_back(it.key());
      for (std::size_t i = 0; i < cols.size(); ++i)
        csv << cols[i] << (i + 1 < cols.size() ? "," : "\n");
      for (const auto& row : rows) {
        for (std::size_t i = 0; i < cols.size(); ++i) {
          const auto& cell = row.at(cols[i]);
          if (cell.is_number())
            csv << pdp::detail::format_full(cell.get<double>());
          else
            csv << cell.get<std::string>();
          csv << (i + 1 < cols.size() ? "," : "\n");
        }
      }
    }
    if (opts.out.empty()) {
      std::cout << csv.str();
    } else {
      std::ofstream f(opts.out, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + opts.out);
      f << csv.str();
    }
  } else {
    emit_json(opts, out);
  }
  return 0;
}

}  // namespace detail

// Entry point used by the binary and the tests. `args` excludes argv[0].
inline int run(const std::vector<std::string>& args) {
  CLI::App app{"per-attribute differential privacy toolkit"};
  app.require_subcommand(1);

  detail::CommonOpts account_opts;
  double rho = -1, delta = -1, eps0 = -1;
  int conv_d = 0;
  std::string family = "cdp";
  auto* account = app.add_subcommand("account", "budget conversions");
  account->add_option("--rho", rho, "zCDP parameter");
  account->add_option("--delta", delta, "approximate-DP delta");
  account->add_option("--eps0", eps0, "per-attribute parameter");
  account->add_option("--d", conv_d, "number of attributes");
  account->add_option("--family", family, "pure or cdp");
  account->add_option("--out", account_opts.out, "output path");

  detail::CommonOpts proj_opts, mwem_opts, hh_opts, point_opts, thresh_opts,
      dist_opts, half_opts, sweep_opts;
  detail::add_common_options(
      app.add_subcommand("marginals-projection", "projection mechanism"), &proj_opts);
  detail::add_common_options(app.add_subcommand("mwem", "multiplicative weights"),
                             &mwem_opts);
  detail::add_common_options(app.add_subcommand("heavy-hitters", "sparse histogram"),
                             &hh_opts);
  detail::add_common_options(app.add_subcommand("learn-point", "point functions"),
                             &point_opts);
  detail::add_common_options(
      app.add_subcommand("learn-threshold", "threshold functions"), &thresh_opts);
  detail::add_common_options(
      app.add_subcommand("estimate-dist", "distribution estimation"), &dist_opts);
  detail::add_common_options(
      app.add_subcommand("learn-halfspace", "robust halfspace learner"), &half_opts);
  detail::add_common_options(app.add_subcommand("sweep", "grid of runs"), &sweep_opts);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") {
      std::cout << app.help();
      return 0;
    }
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (app.got_subcommand("account"))
      return detail::cmd_account(account_opts, rho, delta, eps0, conv_d, family);
    const struct {
      const char* name;
      detail::CommonOpts* opts;
      int (*fn)(const detail::CommonOpts&);
    } table[] = {
        {"marginals-projection", &proj_opts, detail::cmd_projection},
        {"mwem", &mwem_opts, detail::cmd_mwem},
        {"heavy-hitters", &hh_opts, detail::cmd_heavy_hitters},
        {"learn-point", &point_opts, detail::cmd_learn_point},
        {"learn-threshold", &thresh_opts, detail::cmd_learn_threshold},
        {"estimate-dist", &dist_opts, detail::cmd_estimate_dist},
        {"learn-halfspace", &half_opts, detail::cmd_learn_halfspace},
        {"sweep", &sweep_opts, detail::cmd_sweep},
    };
    for (const auto& entry : table) {
      if (app.got_subcommand(entry.name)) {
        entry.opts->check();
        return entry.fn(*entry.opts);
      }
    }
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace pdp::cli

#endif  // PDP_CLI_HPP_
