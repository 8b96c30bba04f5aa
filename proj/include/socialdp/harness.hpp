// Copyright 2026 The socialdp Authors
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

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

#include "socialdp/cascade.hpp"
#include "socialdp/error.hpp"
#include "socialdp/graph.hpp"
#include "socialdp/inference.hpp"
#include "socialdp/ldag.hpp"
#include "socialdp/metrics.hpp"
#include "socialdp/netgen.hpp"
#include "socialdp/privacy.hpp"
#include "socialdp/rng.hpp"

namespace socialdp {

// Thrown for unreadable or invalid experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Scoring method: the report-only Bayesian baseline or one attack variant.
// The numeric values are stable and feed seed derivation.
enum class Method : std::uint8_t { kBayesian = 0, kCoDag = 1, kODag = 2, kCoRnd = 3, kORnd = 4 };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::kBayesian: return "Bayesian";
    case Method::kCoDag: return "CO-DAG";
    case Method::kODag: return "O-DAG";
    case Method::kCoRnd: return "CO-RND";
    case Method::kORnd: return "O-RND";
  }
  return "unknown";
}

inline Method parse_method(std::string_view name) {
  for (auto m : {Method::kBayesian, Method::kCoDag, Method::kODag, Method::kCoRnd,
                 Method::kORnd}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown method: " + std::string(name));
}

inline AttackVariant attack_variant(Method m) {
  switch (m) {
    case Method::kCoDag: return AttackVariant::kCoDag;
    case Method::kODag: return AttackVariant::kODag;
    case Method::kCoRnd: return AttackVariant::kCoRnd;
    case Method::kORnd: return AttackVariant::kORnd;
    case Method::kBayesian: break;
  }
  throw InvalidArgument("Bayesian is not an attack variant");
}

struct NetworkSpec {
  std::string name;
  bool from_file = false;
  GeneratorSpec generator;
  std::filesystem::path path;
  bool undirected = false;
  bool prune = true;
  int min_degree = 3;
  SeedPolicy seeds;
};

struct ExperimentConfig {
  std::vector<NetworkSpec> networks;
  std::vector<double> betas;
  std::vector<Method> methods;
  DagParams dag;
  std::vector<double> sweep_eta;
  std::vector<std::size_t> sweep_n_max;
  Method sweep_method = Method::kCoDag;
  SolverConfig solver;
  int cascades = 10;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "out";
  int jobs = 1;
  std::optional<double> bayes_prior;
  std::vector<Method> pernode_methods{Method::kCoDag};

  void validate() const {
    if (networks.empty()) throw ConfigError("at least one network is required");
    if (betas.empty()) throw ConfigError("at least one beta is required");
    for (double b : betas) {
      if (!(b >= 0.0 && b < 1.0)) throw ConfigError("beta values must be in [0, 1)");
    }
    if (methods.empty()) throw ConfigError("at least one method is required");
    if (cascades < 1) throw ConfigError("cascades must be >= 1");
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
    if (!(dag.eta > 0.0 && dag.eta <= 1.0)) throw ConfigError("eta must be in (0, 1]");
    if (dag.n_max < 1) throw ConfigError("n_max must be >= 1");
    for (double e : sweep_eta) {
      if (!(e > 0.0 && e <= 1.0)) throw ConfigError("sweep_eta values must be in (0, 1]");
    }
    for (std::size_t m : sweep_n_max) {
      if (m < 1) throw ConfigError("sweep_n_max values must be >= 1");
    }
    if (bayes_prior && !(*bayes_prior > 0.0 && *bayes_prior < 1.0)) {
      throw ConfigError("bayes_prior must be in (0, 1)");
    }
    try {
      solver.validate();
      for (const NetworkSpec& n : networks) {
        n.seeds.validate();
        if (!n.from_file) n.generator.validate();
      }
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }
};

// ---------------------------------------------------------------------------
// Config file: "key = value" lines, '#' comments, list keys may repeat and
// may hold several whitespace- or comma-separated values.

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

inline double to_double(const std::string& key, const std::string& v) {
  double d;
  if (!socialdp::detail::parse_double(v, d)) throw ConfigError(key + ": not a number: " + v);
  return d;
}

inline long long to_int(const std::string& key, const std::string& v) {
  long long x;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError(key + ": not an integer: " + v);
  }
  return x;
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": not a boolean: " + v);
}

}  // namespace detail

inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  cfg.methods.clear();
  std::vector<std::string> network_names;
  std::size_t nodes = 500;
  double er_degree = 5.0, gamma = 1.0;
  int d_min = 1, d_max = 0, min_degree = 3;
  std::map<std::string, KroneckerSeed> kronecker{{"core-periphery", kCorePeripherySeed},
                                                 {"hierarchical", kHierarchicalSeed}};
  std::map<std::string, int> seed_count{{"hierarchical", 50}};
  int default_seed_count = 5;
  double seed_fraction = 0.05;
  double window_min = 0.25, window_max = 0.75;
  int max_retries = 100;
  std::optional<bool> prune_files;
  bool pernode_set = false;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string body = detail::trim(line);
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = detail::trim(body.substr(0, eq));
    const std::string value = detail::trim(body.substr(eq + 1));
    const auto values = detail::split_list(value);
    if (values.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty value");
    const std::string& v0 = values.front();

    if (key == "network") {
      network_names.insert(network_names.end(), values.begin(), values.end());
    } else if (key == "nodes") {
      nodes = static_cast<std::size_t>(detail::to_int(key, v0));
    } else if (key == "er_out_degree") {
      er_degree = detail::to_double(key, v0);
    } else if (key == "powerlaw_gamma") {
      gamma = detail::to_double(key, v0);
    } else if (key == "powerlaw_d_min") {
      d_min = static_cast<int>(detail::to_int(key, v0));
    } else if (key == "powerlaw_d_max") {
      d_max = static_cast<int>(detail::to_int(key, v0));
    } else if (key.rfind("kronecker.", 0) == 0) {
      if (values.size() != 4) throw ConfigError(key + ": expected 4 entries");
      KroneckerSeed k;
      for (int i = 0; i < 4; ++i) k[i] = detail::to_double(key, values[i]);
      kronecker[key.substr(10)] = k;
    } else if (key == "min_degree") {
      min_degree = static_cast<int>(detail::to_int(key, v0));
    } else if (key == "prune_edgelists") {
      prune_files = detail::to_bool(key, v0);
    } else if (key == "seed_count") {
      default_seed_count = static_cast<int>(detail::to_int(key, v0));
      seed_count.clear();
    } else if (key.rfind("seed_count.", 0) == 0) {
      seed_count[key.substr(11)] = static_cast<int>(detail::to_int(key, v0));
    } else if (key == "seed_fraction") {
      seed_fraction = detail::to_double(key, v0);
    } else if (key == "window_min") {
      window_min = detail::to_double(key, v0);
    } else if (key == "window_max") {
      window_max = detail::to_double(key, v0);
    } else if (key == "max_retries") {
      max_retries = static_cast<int>(detail::to_int(key, v0));
    } else if (key == "beta") {
      for (const auto& v : values) cfg.betas.push_back(detail::to_double(key, v));
    } else if (key == "method" || key == "variant") {
      for (const auto& v : values) cfg.methods.push_back(parse_method(v));
    } else if (key == "cascades") {
      cfg.cascades = static_cast<int>(detail::to_int(key, v0));
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(detail::to_int(key, v0));
    } else if (key == "eta") {
      cfg.dag.eta = detail::to_double(key, v0);
    } else if (key == "n_max") {
      cfg.dag.n_max = static_cast<std::size_t>(detail::to_int(key, v0));
    } else if (key == "match_capacity") {
      cfg.dag.match_capacity = detail::to_bool(key, v0);
    } else if (key == "sweep_eta") {
      for (const auto& v : values) cfg.sweep_eta.push_back(detail::to_double(key, v));
    } else if (key == "sweep_n_max") {
      for (const auto& v : values) {
        cfg.sweep_n_max.push_back(static_cast<std::size_t>(detail::to_int(key, v)));
      }
    } else if (key == "sweep_method") {
      cfg.sweep_method = parse_method(v0);
      if (cfg.sweep_method == Method::kBayesian) {
        throw ConfigError("sweep_method must be an attack variant");
      }
    } else if (key == "bayes_prior") {
      cfg.bayes_prior = detail::to_double(key, v0);
    } else if (key == "pernode_method") {
      if (!pernode_set) cfg.pernode_methods.clear();
      pernode_set = true;
      for (const auto& v : values) {
        if (v != "none") cfg.pernode_methods.push_back(parse_method(v));
      }
    } else if (key == "out") {
      cfg.out_dir = value;
    } else if (key == "jobs") {
      cfg.jobs = static_cast<int>(detail::to_int(key, v0));
    } else if (key == "solver.max_iterations") {
      cfg.solver.max_iterations = static_cast<int>(detail::to_int(key, v0));
    } else if (key == "solver.tolerance") {
      cfg.solver.tolerance = detail::to_double(key, v0);
    } else if (key == "solver.initial_step") {
      cfg.solver.initial_step = detail::to_double(key, v0);
    } else if (key == "solver.armijo") {
      cfg.solver.armijo = detail::to_double(key, v0);
    } else if (key == "solver.initial_penalty") {
      cfg.solver.initial_penalty = detail::to_double(key, v0);
    } else if (key == "solver.penalty_growth") {
      cfg.solver.penalty_growth = detail::to_double(key, v0);
    } else if (key == "solver.max_penalty_rounds") {
      cfg.solver.max_penalty_rounds = static_cast<int>(detail::to_int(key, v0));
    } else if (key == "solver.violation_tolerance") {
      cfg.solver.violation_tolerance = detail::to_double(key, v0);
    } else if (key == "solver.init") {
      if (v0 == "population") {
        cfg.solver.init = SolverConfig::Init::kPopulation;
      } else {
        cfg.solver.init = SolverConfig::Init::kConstant;
        cfg.solver.init_value = detail::to_double(key, v0);
      }
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }

  if (cfg.methods.empty()) {
    cfg.methods = {Method::kBayesian, Method::kCoDag, Method::kODag, Method::kCoRnd,
                   Method::kORnd};
  }
  for (const std::string& name : network_names) {
    NetworkSpec net;
    net.min_degree = min_degree;
    auto colon = name.find(':');
    if (colon != std::string::npos) {
      std::string kind = name.substr(0, colon);
      if (kind != "edgelist" && kind != "edgelist-undirected") {
        throw ConfigError("unknown network source: " + kind);
      }
      net.from_file = true;
      net.undirected = kind == "edgelist-undirected";
      net.path = name.substr(colon + 1);
      net.name = net.path.stem().string();
      net.prune = prune_files.value_or(false);
      net.seeds = SeedPolicy::fraction(seed_fraction);
    } else {
      GeneratorKind kind;
      try {
        kind = parse_generator_kind(name);
      } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
      }
      net.name = name;
      net.generator = GeneratorSpec::defaults(kind, nodes, 0);
      net.generator.er_out_degree = er_degree;
      net.generator.powerlaw_gamma = gamma;
      net.generator.powerlaw_d_min = d_min;
      net.generator.powerlaw_d_max = d_max;
      if (auto it = kronecker.find(name); it != kronecker.end()) {
        net.generator.kronecker = it->second;
      }
      net.prune = !net.generator.skip_prune();
      auto it = seed_count.find(name);
      net.seeds = SeedPolicy::fixed_count(it != seed_count.end() ? it->second : default_seed_count);
    }
    net.seeds.min_fraction = window_min;
    net.seeds.max_fraction = window_max;
    net.seeds.max_retries = max_retries;
    cfg.networks.push_back(std::move(net));
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse_config(in);
}

// ---------------------------------------------------------------------------
// Records

struct RunRecord {
  std::string network;
  std::size_t network_index = 0;
  int cascade = 0;
  double beta = 0.0;
  double epsilon = 0.0;
  Method method = Method::kBayesian;
  double auc = 0.0;
  double upper_bound = 0.0;
  double runtime_ms = 0.0;
  double violation = 0.0;
  bool converged = true;
  int iterations = 0;
  double dag_mean_size = 0.0;
  std::size_t dag_max_size = 0;
  double cascade_fraction = 0.0;
  std::size_t seed_count = 0;
  bool within_window = true;
  std::optional<std::string> error;
};

struct PerNodeRow {
  std::size_t network_index = 0;
  int cascade = 0;
  double beta = 0.0;
  Method method = Method::kBayesian;
  NodeId node = 0;
  int x = 0;
  int z = 0;
  double alpha = 0.0;
  double x_hat = 0.0;
  double expected_accuracy = 0.0;
  NodeMetrics metrics;
};

struct SummaryRow {
  std::string network;
  double beta = 0.0;
  double epsilon = 0.0;
  Method method = Method::kBayesian;
  std::size_t runs = 0;
  double mean_auc = 0.0;
  double std_auc = 0.0;
  double upper_bound = 0.0;
  bool beats_bound = false;
};

struct CorrelationRow {
  std::string network;
  double beta = 0.0;
  Method method = Method::kBayesian;
  std::string attribute;
  Correlation correlation;
};

struct SweepRecord {
  std::string network;
  std::string parameter;  // "n_max" or "eta"
  double value = 0.0;
  double beta = 0.0;
  std::size_t runs = 0;
  double mean_auc = 0.0;
  double relative_auc = 0.0;
};

struct ExperimentResult {
  std::vector<RunRecord> records;  // includes error-marked runs
  std::vector<PerNodeRow> pernode;
  std::vector<SummaryRow> summary;
  std::vector<CorrelationRow> correlations;

  std::size_t error_count() const {
    return static_cast<std::size_t>(std::count_if(
        records.begin(), records.end(), [](const RunRecord& r) { return r.error.has_value(); }));
  }
};

// Mean AUC and sample standard deviation per (network, beta, method), in
// first-appearance order. Error-marked records are skipped.
inline std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
  std::vector<SummaryRow> rows;
  std::vector<std::vector<double>> values;
  std::map<std::tuple<std::size_t, double, int>, std::size_t> slot;
  for (const RunRecord& r : records) {
    if (r.error) continue;
    auto key = std::make_tuple(r.network_index, r.beta, static_cast<int>(r.method));
    auto [it, inserted] = slot.emplace(key, rows.size());
    if (inserted) {
      SummaryRow row;
      row.network = r.network;
      row.beta = r.beta;
      row.epsilon = r.epsilon;
      row.method = r.method;
      row.upper_bound = r.upper_bound;
      rows.push_back(row);
      values.emplace_back();
    }
    values[it->second].push_back(r.auc);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& v = values[i];
    // Deviations are taken from the first value so identical inputs give an
    // exact mean and a zero spread.
    const double n = static_cast<double>(v.size());
    double shift = 0.0, ss = 0.0;
    for (double x : v) shift += x - v.front();
    shift /= n;
    for (double x : v) ss += (x - v.front() - shift) * (x - v.front() - shift);
    rows[i].runs = v.size();
    rows[i].mean_auc = v.front() + shift;
    rows[i].std_auc = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    rows[i].beats_bound = rows[i].mean_auc > rows[i].upper_bound;
  }
  return rows;
}

// Shifts each curve so that its anchor point sits at zero.
inline std::vector<double> anchor_relative(const std::vector<double>& values,
                                           std::size_t anchor) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] - values[anchor];
  return out;
}

// ---------------------------------------------------------------------------
// Pipeline pieces

// A prepared network with its metrics and DAG indexes.
struct NetworkContext {
  DirectedGraph graph;
  std::vector<NodeMetrics> metrics;
  std::optional<DagIndex> greedy;
  std::optional<DagIndex> random;
};

inline DirectedGraph build_network(const NetworkSpec& spec, std::uint64_t seed) {
  if (spec.from_file) {
    auto loaded = load_edge_list(spec.path, LoadOptions{!spec.undirected, false});
    DirectedGraph g = prepare_graph(loaded.graph, spec.min_degree, !spec.prune);
    return loaded.has_weights ? g : assign_random_weights(g, derive_seed(seed, {2}));
  }
  GeneratorSpec gen = spec.generator;
  gen.seed = derive_seed(seed, {1});
  DirectedGraph raw = generate(gen);
  return assign_random_weights(prepare_graph(raw, spec.min_degree, !spec.prune),
                               derive_seed(seed, {2}));
}

// Simple bounded worker pool; tasks write to preassigned slots so output
// order never depends on scheduling.
inline void run_parallel(std::size_t count, int jobs, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) task(i);
    });
  }
}

namespace detail {

inline double clamp_prior(double p) { return std::clamp(p, 1e-6, 1.0 - 1e-6); }

struct MethodOutput {
  std::vector<double> scores;
  std::vector<double> alpha;
  double violation = 0.0;
  bool converged = true;
  int iterations = 0;
  const DagIndex* index = nullptr;
};

inline MethodOutput run_method(Method method, const NetworkContext& net,
                               const PerturbedReports& reports, const ExperimentConfig& cfg,
                               const DagIndex* greedy_override = nullptr,
                               const DagIndex* random_override = nullptr) {
  MethodOutput out;
  if (method == Method::kBayesian) {
    double prior = 0.5;
    if (cfg.bayes_prior) {
      prior = *cfg.bayes_prior;
    } else if (reports.mechanism.contrast() > 0.0) {
      prior = clamp_prior(estimate_population(reports, reports.mechanism).p_tilde_x);
    }
    out.scores = bayesian_scores(reports, reports.mechanism, prior);
    out.alpha = out.scores;
    return out;
  }
  AttackVariant variant = attack_variant(method);
  const DagIndex* index = uses_greedy_dags(variant)
                              ? (greedy_override ? greedy_override : &*net.greedy)
                              : (random_override ? random_override : &*net.random);
  InferenceResult r = infer(*index, reports, variant, cfg.solver);
  out.scores = std::move(r.x_hat);
  out.alpha = std::move(r.alpha);
  out.violation = r.constraint_violation;
  out.converged = r.converged;
  out.iterations = r.iterations;
  out.index = index;
  return out;
}

inline bool needs_greedy(const std::vector<Method>& methods) {
  return std::any_of(methods.begin(), methods.end(),
                     [](Method m) { return m != Method::kBayesian; });
}

inline bool needs_random(const std::vector<Method>& methods) {
  return std::any_of(methods.begin(), methods.end(),
                     [](Method m) { return m == Method::kCoRnd || m == Method::kORnd; });
}

}  // namespace detail

// Child seeds: network i uses derive(seed, {0, i}); cascade c on it uses
// derive(seed, {1, i, c}); reports for beta b use derive(seed, {2, i, c, b}).
// Random DAG indexes use derive(network seed, {3}).
inline std::optional<NetworkContext> prepare_network(const NetworkSpec& spec,
                                                     const ExperimentConfig& cfg,
                                                     std::size_t index, bool greedy, bool random,
                                                     std::string& error) {
  try {
    const std::uint64_t net_seed = derive_seed(cfg.seed, {0, index});
    NetworkContext ctx;
    ctx.graph = build_network(spec, net_seed);
    ctx.metrics = compute_node_metrics(ctx.graph);
    if (greedy || random) {
      ctx.greedy = build_index(ctx.graph, DagMode::kGreedy, cfg.dag.eta, cfg.dag.n_max, net_seed);
    }
    if (random) {
      std::size_t capacity = cfg.dag.match_capacity ? matched_capacity(*ctx.greedy) : cfg.dag.n_max;
      ctx.random = build_index(ctx.graph, DagMode::kRandom, cfg.dag.eta, capacity,
                               derive_seed(net_seed, {3}));
    }
    return ctx;
  } catch (const std::exception& e) {
    error = e.what();
    return std::nullopt;
  }
}

// Generate -> cascade -> perturb -> attack -> evaluate for every configured
// (network, cascade, beta, method). Failures are recorded on the affected
// records; the remaining runs proceed.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t nets = cfg.networks.size();
  const std::size_t casc = static_cast<std::size_t>(cfg.cascades);
  const std::size_t nb = cfg.betas.size();
  const std::size_t nm = cfg.methods.size();

  std::vector<std::optional<NetworkContext>> contexts(nets);
  std::vector<std::string> net_errors(nets);
  run_parallel(nets, cfg.jobs, [&](std::size_t i) {
    contexts[i] = prepare_network(cfg.networks[i], cfg, i, detail::needs_greedy(cfg.methods),
                                  detail::needs_random(cfg.methods), net_errors[i]);
  });

  const std::size_t units = nets * casc * nb;
  std::vector<RunRecord> records(units * nm);
  std::vector<std::vector<PerNodeRow>> pernode(units);
  run_parallel(units, cfg.jobs, [&](std::size_t u) {
    const std::size_t i = u / (casc * nb);
    const std::size_t c = (u / nb) % casc;
    const std::size_t b = u % nb;
    const double beta = cfg.betas[b];
    for (std::size_t m = 0; m < nm; ++m) {
      RunRecord& rec = records[u * nm + m];
      rec.network = cfg.networks[i].name;
      rec.network_index = i;
      rec.cascade = static_cast<int>(c);
      rec.beta = beta;
      rec.epsilon = epsilon_of_beta(beta);
      rec.method = cfg.methods[m];
      rec.upper_bound = auc_upper_bound(rec.epsilon, 0.0);
      if (!contexts[i]) rec.error = "network: " + net_errors[i];
    }
    if (!contexts[i]) return;
    const NetworkContext& net = *contexts[i];

    GroundTruth truth;
    PerturbedReports reports;
    try {
      truth = generate_ground_truth(net.graph, cfg.networks[i].seeds, derive_seed(cfg.seed, {1, i, c}));
      reports = perturb(truth, beta, derive_seed(cfg.seed, {2, i, c, b}));
    } catch (const std::exception& e) {
      for (std::size_t m = 0; m < nm; ++m) records[u * nm + m].error = e.what();
      return;
    }

    for (std::size_t m = 0; m < nm; ++m) {
      RunRecord& rec = records[u * nm + m];
      rec.cascade_fraction = truth.cascade_fraction;
      rec.seed_count = truth.seeds.size();
      rec.within_window = truth.within_window;
      auto start = std::chrono::steady_clock::now();
      try {
        auto out = detail::run_method(rec.method, net, reports, cfg);
        EvaluationReport eval = evaluate(out.scores, truth, reports.mechanism, {});
        rec.auc = eval.auc;
        rec.violation = out.violation;
        rec.converged = out.converged;
        rec.iterations = out.iterations;
        if (out.index != nullptr) {
          rec.dag_mean_size = out.index->mean_size();
          rec.dag_max_size = out.index->max_size();
        }
        if (std::find(cfg.pernode_methods.begin(), cfg.pernode_methods.end(), rec.method) !=
            cfg.pernode_methods.end()) {
          for (NodeId v = 0; v < net.graph.node_count(); ++v) {
            pernode[u].push_back({i, static_cast<int>(c), beta, rec.method, v, truth.x[v],
                                  reports.z[v], out.alpha[v], out.scores[v],
                                  eval.per_node_expected_accuracy[v], net.metrics[v]});
          }
        }
      } catch (const std::exception& e) {
        rec.error = e.what();
      }
      rec.runtime_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
    }
  });

  ExperimentResult result;
  result.records = std::move(records);
  for (auto& rows : pernode) {
    result.pernode.insert(result.pernode.end(), rows.begin(), rows.end());
  }
  result.summary = summarize(result.records);

  // Correlations pooled over cascades per (network, beta, method).
  std::map<std::tuple<std::size_t, double, int>, std::vector<const PerNodeRow*>> groups;
  std::vector<std::tuple<std::size_t, double, int>> order;
  for (const PerNodeRow& row : result.pernode) {
    auto key = std::make_tuple(row.network_index, row.beta, static_cast<int>(row.method));
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&row);
  }
  const std::pair<const char*, double NodeMetrics::*> attributes[] = {
      {"weighted_out_degree", &NodeMetrics::weighted_out_degree},
      {"weighted_in_degree", &NodeMetrics::weighted_in_degree},
      {"pagerank", &NodeMetrics::pagerank},
  };
  for (const auto& key : order) {
    const auto& rows = groups.at(key);
    std::vector<double> acc;
    for (const PerNodeRow* r : rows) acc.push_back(r->expected_accuracy);
    for (const auto& [name, member] : attributes) {
      std::vector<double> attr;
      for (const PerNodeRow* r : rows) attr.push_back(r->metrics.*member);
      CorrelationRow row;
      row.network = cfg.networks[std::get<0>(key)].name;
      row.beta = std::get<1>(key);
      row.method = static_cast<Method>(std::get<2>(key));
      row.attribute = name;
      try {
        row.correlation = correlate(acc, attr);
      } catch (const std::exception&) {
        row.correlation = {std::nan(""), std::nan(""), acc.size()};
      }
      result.correlations.push_back(row);
    }
  }
  return result;
}

// For each network, beta and swept value, the mean AUC of cfg.sweep_method
// over all cascades. N_max curves are anchored at their first point and eta
// curves at their last.
inline std::vector<SweepRecord> sweep_dag_params(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.sweep_eta.empty() && cfg.sweep_n_max.empty()) {
    throw ConfigError("sweep needs sweep_eta or sweep_n_max values");
  }
  struct Point {
    std::string parameter;
    double value;
    DagParams dag;
  };
  std::vector<Point> points;
  for (std::size_t m : cfg.sweep_n_max) {
    DagParams d = cfg.dag;
    d.n_max = m;
    points.push_back({"n_max", static_cast<double>(m), d});
  }
  for (double e : cfg.sweep_eta) {
    DagParams d = cfg.dag;
    d.eta = e;
    points.push_back({"eta", e, d});
  }

  const std::size_t nets = cfg.networks.size();
  const std::size_t casc = static_cast<std::size_t>(cfg.cascades);
  const std::size_t nb = cfg.betas.size();
  const bool random = cfg.sweep_method == Method::kCoRnd || cfg.sweep_method == Method::kORnd;

  std::vector<std::optional<NetworkContext>> contexts(nets);
  std::vector<std::string> errors(nets);
  run_parallel(nets, cfg.jobs, [&](std::size_t i) {
    contexts[i] = prepare_network(cfg.networks[i], cfg, i, false, false, errors[i]);
  });

  // One unit per (network, point, cascade, beta).
  const std::size_t per_net = points.size() * casc * nb;
  std::vector<double> aucs(nets * per_net, std::nan(""));
  std::vector<std::optional<DagIndex>> greedy(nets * points.size()), rnd(nets * points.size());
  run_parallel(nets * points.size(), cfg.jobs, [&](std::size_t k) {
    const std::size_t i = k / points.size(), p = k % points.size();
    if (!contexts[i]) return;
    const DagParams& d = points[p].dag;
    const std::uint64_t net_seed = derive_seed(cfg.seed, {0, i});
    greedy[k] = build_index(contexts[i]->graph, DagMode::kGreedy, d.eta, d.n_max, net_seed);
    if (random) {
      std::size_t capacity = d.match_capacity ? matched_capacity(*greedy[k]) : d.n_max;
      rnd[k] = build_index(contexts[i]->graph, DagMode::kRandom, d.eta, capacity,
                           derive_seed(net_seed, {3}));
    }
  });
  run_parallel(nets * per_net, cfg.jobs, [&](std::size_t u) {
    const std::size_t i = u / per_net;
    const std::size_t p = (u / (casc * nb)) % points.size();
    const std::size_t c = (u / nb) % casc;
    const std::size_t b = u % nb;
    if (!contexts[i]) return;
    try {
      const NetworkContext& net = *contexts[i];
      auto truth = generate_ground_truth(net.graph, cfg.networks[i].seeds,
                                         derive_seed(cfg.seed, {1, i, c}));
      auto reports = perturb(truth, cfg.betas[b], derive_seed(cfg.seed, {2, i, c, b}));
      const std::size_t k = i * points.size() + p;
      auto out = detail::run_method(cfg.sweep_method, net, reports, cfg, &*greedy[k],
                                    random ? &*rnd[k] : nullptr);
      aucs[u] = auc(out.scores, truth.x);
    } catch (const std::exception&) {
    }
  });

  std::vector<SweepRecord> out;
  for (std::size_t i = 0; i < nets; ++i) {
    for (const std::string param : {"n_max", "eta"}) {
      for (std::size_t b = 0; b < nb; ++b) {
        std::vector<SweepRecord> curve;
        for (std::size_t p = 0; p < points.size(); ++p) {
          if (points[p].parameter != param) continue;
          SweepRecord r;
          r.network = cfg.networks[i].name;
          r.parameter = param;
          r.value = points[p].value;
          r.beta = cfg.betas[b];
          double sum = 0.0;
          for (std::size_t c = 0; c < casc; ++c) {
            double a = aucs[i * per_net + (p * casc + c) * nb + b];
            if (!std::isnan(a)) {
              sum += a;
              ++r.runs;
            }
          }
          r.mean_auc = r.runs > 0 ? sum / static_cast<double>(r.runs) : std::nan("");
          curve.push_back(r);
        }
        if (curve.empty()) continue;
        std::vector<double> means;
        for (const auto& r : curve) means.push_back(r.mean_auc);
        auto rel = anchor_relative(means, param == "n_max" ? 0 : means.size() - 1);
        for (std::size_t j = 0; j < curve.size(); ++j) {
          curve[j].relative_auc = rel[j];
          out.push_back(curve[j]);
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Output files

namespace detail {

inline std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
}

}  // namespace detail

// results.csv holds only deterministic columns so reruns compare
// byte-for-byte; wall-clock timings go to timing.csv.
inline std::string results_csv(const std::vector<RunRecord>& records) {
  std::ostringstream o;
  o << "network,cascade,beta,epsilon,method,auc,upper_bound,beats_bound,violation,converged,"
       "iterations,dag_mean_size,dag_max_size,cascade_fraction,seeds,within_window\n";
  for (const RunRecord& r : records) {
    if (r.error) continue;
    o << r.network << ',' << r.cascade << ',' << detail::fmt("%g", r.beta) << ','
      << detail::fmt("%.12f", r.epsilon) << ',' << to_string(r.method) << ','
      << detail::fmt("%.4f", r.auc) << ',' << detail::fmt("%.4f", r.upper_bound) << ','
      << (r.auc > r.upper_bound ? 1 : 0) << ',' << detail::fmt("%.3e", r.violation) << ','
      << (r.converged ? 1 : 0) << ',' << r.iterations << ','
      << detail::fmt("%.2f", r.dag_mean_size) << ',' << r.dag_max_size << ','
      << detail::fmt("%.4f", r.cascade_fraction) << ',' << r.seed_count << ','
      << (r.within_window ? 1 : 0) << '\n';
  }
  return o.str();
}

inline std::string errors_csv(const std::vector<RunRecord>& records) {
  std::ostringstream o;
  o << "network,cascade,beta,method,error\n";
  for (const RunRecord& r : records) {
    if (!r.error) continue;
    std::string msg = *r.error;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    o << r.network << ',' << r.cascade << ',' << detail::fmt("%g", r.beta) << ','
      << to_string(r.method) << ',' << msg << '\n';
  }
  return o.str();
}

inline std::string timing_csv(const std::vector<RunRecord>& records) {
  std::ostringstream o;
  o << "network,cascade,beta,method,runtime_ms\n";
  for (const RunRecord& r : records) {
    o << r.network << ',' << r.cascade << ',' << detail::fmt("%g", r.beta) << ','
      << to_string(r.method) << ',' << detail::fmt("%.3f", r.runtime_ms) << '\n';
  }
  return o.str();
}

inline std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream o;
  o << "network,beta,epsilon,method,runs,mean_auc,std_auc,upper_bound,beats_bound\n";
  for (const SummaryRow& r : rows) {
    o << r.network << ',' << detail::fmt("%g", r.beta) << ',' << detail::fmt("%.3f", r.epsilon)
      << ',' << to_string(r.method) << ',' << r.runs << ',' << detail::fmt("%.4f", r.mean_auc)
      << ',' << detail::fmt("%.4f", r.std_auc) << ',' << detail::fmt("%.4f", r.upper_bound)
      << ',' << (r.beats_bound ? 1 : 0) << '\n';
  }
  return o.str();
}

inline std::string pernode_csv(const ExperimentConfig& cfg, const std::vector<PerNodeRow>& rows) {
  std::ostringstream o;
  o << "network,cascade,beta,method,node,x,z,alpha,x_hat,expected_accuracy,"
       "weighted_in_degree,weighted_out_degree,pagerank\n";
  for (const PerNodeRow& r : rows) {
    o << cfg.networks[r.network_index].name << ',' << r.cascade << ','
      << detail::fmt("%g", r.beta) << ',' << to_string(r.method) << ',' << r.node << ',' << r.x
      << ',' << r.z << ',' << detail::fmt("%.17g", r.alpha) << ','
      << detail::fmt("%.17g", r.x_hat) << ',' << detail::fmt("%.17g", r.expected_accuracy) << ','
      << detail::fmt("%.17g", r.metrics.weighted_in_degree) << ','
      << detail::fmt("%.17g", r.metrics.weighted_out_degree) << ','
      << detail::fmt("%.17g", r.metrics.pagerank) << '\n';
  }
  return o.str();
}

inline std::string correlations_csv(const std::vector<CorrelationRow>& rows) {
  std::ostringstream o;
  o << "network,beta,method,attribute,n,pearson_r,p_value\n";
  for (const CorrelationRow& r : rows) {
    o << r.network << ',' << detail::fmt("%g", r.beta) << ',' << to_string(r.method) << ','
      << r.attribute << ',' << r.correlation.n << ','
      << detail::fmt("%.6f", r.correlation.pearson_r) << ','
      << detail::fmt("%.6e", r.correlation.p_value) << '\n';
  }
  return o.str();
}

inline std::string sweep_csv(const std::vector<SweepRecord>& rows) {
  std::ostringstream o;
  o << "network,parameter,value,beta,runs,mean_auc,relative_auc\n";
  for (const SweepRecord& r : rows) {
    o << r.network << ',' << r.parameter << ',' << detail::fmt("%g", r.value) << ','
      << detail::fmt("%g", r.beta) << ',' << r.runs << ',' << detail::fmt("%.4f", r.mean_auc)
      << ',' << detail::fmt("%.4f", r.relative_auc) << '\n';
  }
  return o.str();
}

inline void write_experiment(const ExperimentConfig& cfg, const ExperimentResult& result) {
  std::filesystem::create_directories(cfg.out_dir);
  detail::write_file(cfg.out_dir / "results.csv", results_csv(result.records));
  detail::write_file(cfg.out_dir / "summary.csv", summary_csv(result.summary));
  detail::write_file(cfg.out_dir / "timing.csv", timing_csv(result.records));
  detail::write_file(cfg.out_dir / "errors.csv", errors_csv(result.records));
  if (!result.pernode.empty()) {
    detail::write_file(cfg.out_dir / "pernode.csv", pernode_csv(cfg, result.pernode));
    detail::write_file(cfg.out_dir / "correlations.csv", correlations_csv(result.correlations));
  }
}

inline void write_sweep(const ExperimentConfig& cfg, const std::vector<SweepRecord>& rows) {
  std::filesystem::create_directories(cfg.out_dir);
  detail::write_file(cfg.out_dir / "sweep.csv", sweep_csv(rows));
}

}  // namespace socialdp
