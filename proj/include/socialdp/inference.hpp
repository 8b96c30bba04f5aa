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
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "socialdp/error.hpp"
#include "socialdp/graph.hpp"
#include "socialdp/ldag.hpp"
#include "socialdp/privacy.hpp"

namespace socialdp {

// ---------------------------------------------------------------------------
// Objective coefficients

// f = sum_v c_v x_v is the expected symmetric difference between a fresh
// report vector and the observed one, up to a constant.
struct ObjectiveCoefficients {
  std::vector<double> c;
};

// c_v = Pr[z = ~z_v | x = 1] - Pr[z = ~z_v | x = 0]; for randomized response
// this is -beta when z_v = 1 and +beta when z_v = 0.
inline ObjectiveCoefficients compute_coefficients(const PerturbedReports& reports,
                                                  const RRMechanism& mechanism) {
  ObjectiveCoefficients out;
  out.c.reserve(reports.z.size());
  for (std::uint8_t z : reports.z) {
    int flipped = z ? 0 : 1;
    out.c.push_back(mechanism.p_z_given_x(flipped, 1) - mechanism.p_z_given_x(flipped, 0));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Activation and gradient inside one local DAG

// lp_t(v) = alpha_v + (1 - alpha_v) * sum_{u in parents(v)} w(u, v) lp_t(u),
// evaluated sources first. `inflow` receives the parent sum per member.
inline void dag_activation_into(const LocalDag& dag, std::span<const double> alpha,
                                std::span<double> lp, std::span<double> inflow) {
  for (std::size_t j = dag.size(); j-- > 0;) {
    const auto local = static_cast<std::uint32_t>(j);
    double s = 0.0;
    for (const DagParent& p : dag.parents(local)) s += p.weight * lp[p.parent];
    const double a = alpha[dag.member(local)];
    inflow[j] = s;
    lp[j] = a + (1.0 - a) * s;
  }
}

// Local activation probabilities indexed like dag.members().
inline std::vector<double> dag_activation(const LocalDag& dag, std::span<const double> alpha) {
  std::vector<double> lp(dag.size()), inflow(dag.size());
  dag_activation_into(dag, alpha, lp, inflow);
  return lp;
}

struct DagGradient {
  std::vector<double> dlp_dlp;     // d lp_t(t) / d lp_t(v), local index
  std::vector<double> dlp_dalpha;  // d lp_t(t) / d alpha_v, local index
};

// Reverse sweep from the target. `inflow` is the parent sum from
// dag_activation_into.
inline void dag_gradient_into(const LocalDag& dag, std::span<const double> alpha,
                              std::span<const double> inflow, std::span<double> dlp_dlp,
                              std::span<double> dlp_dalpha) {
  std::fill(dlp_dlp.begin(), dlp_dlp.begin() + static_cast<std::ptrdiff_t>(dag.size()), 0.0);
  dlp_dlp[0] = 1.0;
  for (std::uint32_t j = 0; j < dag.size(); ++j) {
    const double g = dlp_dlp[j];
    dlp_dalpha[j] = g * (1.0 - inflow[j]);
    if (g == 0.0) continue;
    const double pass = (1.0 - alpha[dag.member(j)]) * g;
    for (const DagParent& p : dag.parents(j)) dlp_dlp[p.parent] += p.weight * pass;
  }
}

inline DagGradient dag_gradient(const LocalDag& dag, std::span<const double> alpha,
                                std::span<const double> lp) {
  std::vector<double> inflow(dag.size());
  for (std::uint32_t j = 0; j < dag.size(); ++j) {
    double s = 0.0;
    for (const DagParent& p : dag.parents(j)) s += p.weight * lp[p.parent];
    inflow[j] = s;
  }
  DagGradient g{std::vector<double>(dag.size()), std::vector<double>(dag.size())};
  dag_gradient_into(dag, alpha, inflow, g.dlp_dlp, g.dlp_dalpha);
  return g;
}

// ---------------------------------------------------------------------------
// Full objective

struct ObjectiveValue {
  double value = 0.0;            // f + penalty
  double f = 0.0;                // sum_t c_t lp_t(t)
  double mean_activation = 0.0;  // sum_t lp_t(t) / n
  double violation = 0.0;        // max(0, |mean - p~(x)| - radius)
  std::vector<double> x_hat;     // lp_t(t) per target
  std::vector<double> gradient;  // empty when not requested
};

// Evaluates f plus the slab penalty
//   penalty_weight * max(0, |sum_t lp_t(t)/n - p~(x)| - radius)^2
// and its gradient over alpha. Reuses scratch buffers across calls.
class ObjectiveEvaluator {
 public:
  ObjectiveEvaluator(const DagIndex& index, const ObjectiveCoefficients& coefficients,
                     const PopulationEstimate& estimate)
      : index_(index), coefficients_(coefficients), estimate_(estimate) {
    if (coefficients.c.size() != index.dags.size()) {
      throw InvalidArgument("coefficient count does not match the index");
    }
    offsets_.reserve(index.dags.size() + 1);
    offsets_.push_back(0);
    std::size_t widest = 0;
    for (const LocalDag& d : index.dags) {
      offsets_.push_back(offsets_.back() + d.size());
      widest = std::max(widest, d.size());
    }
    lp_.resize(offsets_.back());
    inflow_.resize(offsets_.back());
    dlp_dlp_.resize(widest);
    dlp_dalpha_.resize(widest);
  }

  std::size_t node_count() const noexcept { return index_.dags.size(); }

  ObjectiveValue evaluate(std::span<const double> alpha, double penalty_weight,
                          bool with_gradient) {
    const std::size_t n = node_count();
    if (alpha.size() != n) throw InvalidArgument("alpha has wrong length");
    ObjectiveValue out;
    out.x_hat.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
      const LocalDag& dag = index_.dags[t];
      std::span<double> lp(lp_.data() + offsets_[t], dag.size());
      std::span<double> inflow(inflow_.data() + offsets_[t], dag.size());
      dag_activation_into(dag, alpha, lp, inflow);
      out.x_hat[t] = lp[0];
      out.f += coefficients_.c[t] * lp[0];
      out.mean_activation += lp[0];
    }
    out.mean_activation /= static_cast<double>(n);

    const double gap = out.mean_activation - estimate_.p_tilde_x;
    out.violation = std::max(0.0, std::abs(gap) - estimate_.radius);
    out.value = out.f + penalty_weight * out.violation * out.violation;
    if (!std::isfinite(out.value)) throw DegenerateResult("objective is not finite");
    if (!with_gradient) return out;

    // d penalty / d x_hat_t is the same for every target.
    const double shared = penalty_weight * 2.0 * out.violation * (gap >= 0.0 ? 1.0 : -1.0) /
                          static_cast<double>(n);
    out.gradient.assign(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      const LocalDag& dag = index_.dags[t];
      const double k = coefficients_.c[t] + shared;
      if (k == 0.0) continue;
      std::span<const double> inflow(inflow_.data() + offsets_[t], dag.size());
      dag_gradient_into(dag, alpha, inflow, dlp_dlp_, dlp_dalpha_);
      for (std::uint32_t j = 0; j < dag.size(); ++j) {
        out.gradient[dag.member(j)] += k * dlp_dalpha_[j];
      }
    }
    return out;
  }

 private:
  const DagIndex& index_;
  const ObjectiveCoefficients& coefficients_;
  const PopulationEstimate& estimate_;
  std::vector<std::size_t> offsets_;
  std::vector<double> lp_, inflow_, dlp_dlp_, dlp_dalpha_;
};

inline ObjectiveValue objective_and_gradient(const DagIndex& index,
                                             const ObjectiveCoefficients& coefficients,
                                             std::span<const double> alpha,
                                             const PopulationEstimate& estimate,
                                             double penalty_weight) {
  ObjectiveEvaluator evaluator(index, coefficients, estimate);
  return evaluator.evaluate(alpha, penalty_weight, true);
}

// ---------------------------------------------------------------------------
// Solver

// Defaults are a short, early-stopped descent from alpha = 0: one step per
// penalty round with a small fixed step. Run to convergence, the relaxation
// pushes most alpha to the box bounds and the resulting ties in x_hat cost
// more ranking quality than the lower objective buys. full() gives the
// long-run configuration.
struct SolverConfig {
  enum class Init { kPopulation, kConstant };

  int max_iterations = 1;    // per penalty round
  double tolerance = 1e-7;   // relative objective change
  double initial_step = 0.03;
  // Divide initial_step by the largest gradient magnitude, so the trial
  // step moves no coordinate of alpha by more than initial_step.
  bool normalize_step = false;
  double armijo = 1e-4;
  double min_step = 1e-12;
  bool constrained = true;
  double initial_penalty = 1.0;
  double penalty_growth = 10.0;
  int max_penalty_rounds = 12;
  double violation_tolerance = 1e-3;
  Init init = Init::kConstant;
  double init_value = 0.0;

  static SolverConfig full() {
    SolverConfig c;
    c.max_iterations = 500;
    c.initial_step = 1.0;
    c.init = Init::kPopulation;
    return c;
  }

  void validate() const {
    if (max_iterations < 1 || max_penalty_rounds < 1) {
      throw InvalidArgument("iteration counts must be positive");
    }
    if (!(tolerance > 0.0 && initial_step > 0.0 && armijo > 0.0 && armijo < 1.0 &&
          min_step > 0.0 && initial_penalty > 0.0 && penalty_growth > 1.0 &&
          violation_tolerance > 0.0)) {
      throw InvalidArgument("solver tolerances must be positive");
    }
    if (!(init_value >= 0.0 && init_value <= 1.0)) throw InvalidArgument("init_value not in [0,1]");
  }
};

struct TraceRow {
  int iteration = 0;
  double objective = 0.0;
  double violation = 0.0;
  double step = 0.0;
  double penalty_weight = 0.0;
};

struct InferenceResult {
  std::vector<double> alpha;
  std::vector<double> x_hat;
  std::vector<double> objective_trace;  // penalized objective per iteration
  std::vector<TraceRow> trace;
  double f = 0.0;
  double constraint_violation = 0.0;
  double penalty_weight = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Projected gradient descent on alpha in [0,1]^n with Armijo backtracking
// (step halves from initial_step). The slab constraint on the mean
// activation is handled by a quadratic penalty whose weight grows by
// penalty_growth each time a round ends with the constraint still violated.
inline InferenceResult solve(const DagIndex& index, const ObjectiveCoefficients& coefficients,
                             const PopulationEstimate& estimate, const SolverConfig& config) {
  config.validate();
  const std::size_t n = index.dags.size();
  ObjectiveEvaluator evaluator(index, coefficients, estimate);

  InferenceResult result;
  const double start = config.init == SolverConfig::Init::kPopulation
                           ? std::clamp(estimate.p_tilde_x, 0.01, 0.99)
                           : config.init_value;
  std::vector<double> alpha(n, start), candidate(n);
  double weight = config.constrained ? config.initial_penalty : 0.0;

  ObjectiveValue current = evaluator.evaluate(alpha, weight, true);
  auto record = [&](double step) {
    result.objective_trace.push_back(current.value);
    result.trace.push_back({result.iterations, current.value, current.violation, step, weight});
  };
  record(0.0);

  bool inner_converged = false;
  for (int round = 0; round < config.max_penalty_rounds; ++round) {
    inner_converged = false;
    for (int it = 0; it < config.max_iterations; ++it) {
      double step = config.initial_step;
      if (config.normalize_step) {
        double g_max = 0.0;
        for (double g : current.gradient) g_max = std::max(g_max, std::abs(g));
        if (g_max > 0.0) step /= g_max;
      }
      bool accepted = false;
      ObjectiveValue next;
      while (step >= config.min_step) {
        double directional = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
          candidate[v] = std::clamp(alpha[v] - step * current.gradient[v], 0.0, 1.0);
          directional += current.gradient[v] * (candidate[v] - alpha[v]);
        }
        if (directional == 0.0) break;  // projected gradient vanished
        next = evaluator.evaluate(candidate, weight, false);
        if (next.value <= current.value + config.armijo * directional) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        inner_converged = true;
        break;
      }
      alpha.swap(candidate);
      const double previous = current.value;
      current = evaluator.evaluate(alpha, weight, true);
      ++result.iterations;
      record(step);
      if (std::abs(previous - current.value) <=
          config.tolerance * std::max(1.0, std::abs(previous))) {
        inner_converged = true;
        break;
      }
    }
    if (!config.constrained || current.violation <= config.violation_tolerance) break;
    if (round + 1 == config.max_penalty_rounds) break;
    weight *= config.penalty_growth;
    current = evaluator.evaluate(alpha, weight, true);
    record(0.0);
  }

  result.alpha = std::move(alpha);
  result.x_hat = std::move(current.x_hat);
  result.f = current.f;
  result.constraint_violation = current.violation;
  result.penalty_weight = weight;
  result.converged =
      inner_converged && (!config.constrained || current.violation <= config.violation_tolerance);
  return result;
}

// ---------------------------------------------------------------------------
// Attack variants

enum class AttackVariant { kCoDag, kODag, kCoRnd, kORnd };

inline std::string_view to_string(AttackVariant v) {
  switch (v) {
    case AttackVariant::kCoDag: return "CO-DAG";
    case AttackVariant::kODag: return "O-DAG";
    case AttackVariant::kCoRnd: return "CO-RND";
    case AttackVariant::kORnd: return "O-RND";
  }
  return "unknown";
}

inline AttackVariant parse_attack_variant(std::string_view name) {
  for (auto v : {AttackVariant::kCoDag, AttackVariant::kODag, AttackVariant::kCoRnd,
                 AttackVariant::kORnd}) {
    if (to_string(v) == name) return v;
  }
  throw InvalidArgument("unknown attack variant: " + std::string(name));
}

inline bool uses_greedy_dags(AttackVariant v) {
  return v == AttackVariant::kCoDag || v == AttackVariant::kODag;
}

inline bool is_constrained(AttackVariant v) {
  return v == AttackVariant::kCoDag || v == AttackVariant::kCoRnd;
}

struct DagParams {
  double eta = 0.01;
  std::size_t n_max = 100;
  // Random DAGs take the rounded mean greedy DAG size as their capacity.
  bool match_capacity = true;
};

// Runs one variant against a prebuilt index of the matching DAG mode.
inline InferenceResult infer(const DagIndex& index, const PerturbedReports& reports,
                             AttackVariant variant, SolverConfig config) {
  if (reports.z.size() != index.dags.size()) {
    throw InvalidArgument("reports do not cover every node");
  }
  config.constrained = is_constrained(variant);
  auto estimate = estimate_population(reports, reports.mechanism);
  auto coefficients = compute_coefficients(reports, reports.mechanism);
  return solve(index, coefficients, estimate, config);
}

// Builds the DAG index the variant calls for, then solves.
inline InferenceResult infer(const DirectedGraph& graph, const PerturbedReports& reports,
                             AttackVariant variant, const DagParams& dag_params,
                             const SolverConfig& config, std::uint64_t seed) {
  if (reports.z.size() != graph.node_count()) {
    throw InvalidArgument("reports do not cover every node");
  }
  DagIndex greedy = build_index(graph, DagMode::kGreedy, dag_params.eta, dag_params.n_max, seed);
  if (uses_greedy_dags(variant)) return infer(greedy, reports, variant, config);
  std::size_t capacity = dag_params.match_capacity ? matched_capacity(greedy) : dag_params.n_max;
  DagIndex random = build_index(graph, DagMode::kRandom, dag_params.eta, capacity, seed);
  return infer(random, reports, variant, config);
}

// CSV: node_id,alpha,x_hat
inline void write_inference_csv(std::ostream& out, const InferenceResult& result) {
  out << "node_id,alpha,x_hat\n";
  char buf[96];
  for (std::size_t v = 0; v < result.x_hat.size(); ++v) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", v, result.alpha[v], result.x_hat[v]);
    out << buf;
  }
}

// Reads the x_hat column of a node_id,alpha,x_hat file. Rows must list
// node ids 0..n-1 in order.
inline std::vector<double> read_scores_csv(std::istream& in) {
  std::vector<double> x_hat;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.rfind("node_id", 0) == 0) continue;
    unsigned long long id = 0;
    double alpha = 0.0, score = 0.0;
    if (std::sscanf(line.c_str(), "%llu,%lf,%lf", &id, &alpha, &score) != 3) {
      throw ParseError("expected node_id,alpha,x_hat", line_no);
    }
    if (id != x_hat.size()) throw ParseError("node ids must be 0..n-1 in order", line_no);
    if (!(score >= 0.0 && score <= 1.0)) throw ParseError("x_hat outside [0, 1]", line_no);
    x_hat.push_back(score);
  }
  if (x_hat.empty()) throw ParseError("score file is empty", 0);
  return x_hat;
}

// CSV: iteration,objective,violation,step
inline void write_trace_csv(std::ostream& out, const InferenceResult& result) {
  out << "iteration,objective,violation,step\n";
  char buf[128];
  for (const TraceRow& r : result.trace) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", r.iteration, r.objective,
                  r.violation, r.step);
    out << buf;
  }
}

}  // namespace socialdp
