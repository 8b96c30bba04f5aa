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

// Command-line driver: run, sweep, gen, eval.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "socialdp/socialdp.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPartial = 2;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> jobs;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "experiment config file")->required();
  cmd->add_option("--seed", o.seed, "master seed (overrides config)");
  cmd->add_option("--out", o.out, "output directory (overrides config)");
  cmd->add_option("--jobs", o.jobs, "worker threads (overrides config)")
      ->check(CLI::PositiveNumber);
}

socialdp::ExperimentConfig load(const Overrides& o) {
  auto cfg = socialdp::load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.out) cfg.out_dir = *o.out;
  if (o.jobs) cfg.jobs = *o.jobs;
  cfg.validate();
  return cfg;
}

int cmd_run(const Overrides& o) {
  socialdp::ExperimentConfig cfg;
  try {
    cfg = load(o);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  auto result = socialdp::run_experiment(cfg);
  socialdp::write_experiment(cfg, result);
  std::cout << socialdp::summary_csv(result.summary);
  if (std::size_t failed = result.error_count(); failed > 0) {
    std::cerr << failed << " run(s) failed; see " << (cfg.out_dir / "errors.csv").string() << "\n";
    return kExitPartial;
  }
  return kExitOk;
}

int cmd_sweep(const Overrides& o) {
  socialdp::ExperimentConfig cfg;
  try {
    cfg = load(o);
    if (cfg.sweep_eta.empty() && cfg.sweep_n_max.empty()) {
      throw socialdp::ConfigError("sweep needs sweep_eta or sweep_n_max values");
    }
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  auto rows = socialdp::sweep_dag_params(cfg);
  socialdp::write_sweep(cfg, rows);
  std::cout << socialdp::sweep_csv(rows);
  for (const auto& r : rows) {
    if (r.runs == 0) return kExitPartial;
  }
  return kExitOk;
}

struct GenArgs {
  std::string kind = "core-periphery";
  std::size_t nodes = 500;
  std::uint64_t seed = 1;
  std::string out;
  bool raw = false;
  int min_degree = 3;
};

int cmd_gen(const GenArgs& a) {
  socialdp::DirectedGraph g;
  try {
    auto spec = socialdp::GeneratorSpec::defaults(socialdp::parse_generator_kind(a.kind), a.nodes,
                                                  socialdp::derive_seed(a.seed, {1}));
    g = socialdp::generate(spec);
    if (!a.raw) {
      g = socialdp::assign_random_weights(
          socialdp::prepare_graph(g, a.min_degree, spec.skip_prune()),
          socialdp::derive_seed(a.seed, {2}));
    }
  } catch (const socialdp::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPartial;
  }
  if (a.out.empty()) {
    socialdp::write_edge_list(std::cout, g);
  } else {
    socialdp::save_edge_list(a.out, g);
  }
  std::cerr << g.node_count() << " nodes, " << g.edge_count() << " edges\n";
  return kExitOk;
}

struct EvalArgs {
  std::string scores;
  std::string truth;
  double beta = 0.5;
  std::string graph;
};

int cmd_eval(const EvalArgs& a) {
  try {
    std::ifstream sin(a.scores), tin(a.truth);
    if (!sin) throw socialdp::ConfigError("cannot open " + a.scores);
    if (!tin) throw socialdp::ConfigError("cannot open " + a.truth);
    auto x_hat = socialdp::read_scores_csv(sin);
    auto truth = socialdp::read_ground_truth_csv(tin);
    if (x_hat.size() != truth.x.size()) {
      throw socialdp::ConfigError("score and ground-truth files differ in node count");
    }
    std::vector<socialdp::NodeMetrics> metrics;
    if (!a.graph.empty()) {
      auto loaded = socialdp::load_edge_list(a.graph);
      if (loaded.graph.node_count() != x_hat.size()) {
        throw socialdp::ConfigError("graph node count does not match scores");
      }
      metrics = socialdp::compute_node_metrics(loaded.graph);
    }
    auto report = socialdp::evaluate(x_hat, truth, socialdp::RRMechanism(a.beta), metrics);
    std::cout << socialdp::to_json(report).dump(2) << "\n";
  } catch (const socialdp::DegenerateResult& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPartial;
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contagion-aware inference against randomized-response reports"};
  app.require_subcommand(1);

  Overrides run_o, sweep_o;
  auto* run = app.add_subcommand("run", "generate, cascade, perturb, attack and score");
  add_common(run, run_o);
  auto* sweep = app.add_subcommand("sweep", "AUC as a function of eta and N_max");
  add_common(sweep, sweep_o);

  GenArgs gen_a;
  auto* gen = app.add_subcommand("gen", "write a synthetic network as an edge list");
  gen->add_option("--kind", gen_a.kind, "core-periphery | erdos-renyi | power-law | hierarchical");
  gen->add_option("--nodes", gen_a.nodes, "target node count")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_a.seed, "seed");
  gen->add_option("--out", gen_a.out, "output file (default stdout)");
  gen->add_option("--min-degree", gen_a.min_degree, "pruning threshold");
  gen->add_flag("--raw", gen_a.raw, "skip pruning and weight assignment");

  EvalArgs eval_a;
  auto* eval = app.add_subcommand("eval", "score an x_hat CSV against a ground-truth CSV");
  eval->add_option("--scores", eval_a.scores, "node_id,alpha,x_hat file")->required();
  eval->add_option("--truth", eval_a.truth, "node_id,x,is_seed file")->required();
  eval->add_option("--beta", eval_a.beta, "randomized-response beta")
      ->check(CLI::Range(0.0, 0.999999999));
  eval->add_option("--graph", eval_a.graph, "edge list for vulnerability correlations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_o);
    if (*sweep) return cmd_sweep(sweep_o);
    if (*gen) return cmd_gen(gen_a);
    if (*eval) return cmd_eval(eval_a);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPartial;
  }
  return kExitConfig;
}
