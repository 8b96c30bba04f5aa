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
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "socialdp/error.hpp"
#include "socialdp/graph.hpp"
#include "socialdp/rng.hpp"

namespace socialdp {

enum class GeneratorKind { kCorePeriphery, kErdosRenyi, kPowerLaw, kHierarchical };

inline std::string_view to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::kCorePeriphery: return "core-periphery";
    case GeneratorKind::kErdosRenyi: return "erdos-renyi";
    case GeneratorKind::kPowerLaw: return "power-law";
    case GeneratorKind::kHierarchical: return "hierarchical";
  }
  return "unknown";
}

inline GeneratorKind parse_generator_kind(std::string_view name) {
  for (auto k : {GeneratorKind::kCorePeriphery, GeneratorKind::kErdosRenyi,
                 GeneratorKind::kPowerLaw, GeneratorKind::kHierarchical}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidArgument("unknown generator kind: " + std::string(name));
}

// Row-major 2x2 initiator matrix for stochastic Kronecker graphs.
using KroneckerSeed = std::array<double, 4>;

inline constexpr KroneckerSeed kCorePeripherySeed{0.9, 0.5, 0.5, 0.3};
inline constexpr KroneckerSeed kHierarchicalSeed{0.9, 0.1, 0.1, 0.9};

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::kErdosRenyi;
  std::size_t target_nodes = 500;
  std::uint64_t seed = 0;
  KroneckerSeed kronecker = kCorePeripherySeed;
  double er_out_degree = 5.0;
  double powerlaw_gamma = 1.0;
  int powerlaw_d_min = 1;
  int powerlaw_d_max = 0;  // 0 selects floor(5 * sqrt(n))

  // Parameters used for each kind in the published experiments.
  static GeneratorSpec defaults(GeneratorKind kind, std::size_t nodes, std::uint64_t seed) {
    GeneratorSpec s;
    s.kind = kind;
    s.target_nodes = nodes;
    s.seed = seed;
    s.kronecker = kind == GeneratorKind::kHierarchical ? kHierarchicalSeed : kCorePeripherySeed;
    return s;
  }

  // Hierarchical graphs are not degree-pruned.
  bool skip_prune() const { return kind == GeneratorKind::kHierarchical; }

  void validate() const {
    if (target_nodes < 2) throw InvalidArgument("target_nodes must be >= 2");
    for (double p : kronecker) {
      if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("kronecker entries must be in [0,1]");
    }
    if (!(er_out_degree > 0.0)) throw InvalidArgument("expected out-degree must be > 0");
    if (!(powerlaw_gamma > 0.0)) throw InvalidArgument("gamma must be > 0");
  }
};

inline int kronecker_iterations_for(std::size_t target_nodes) {
  int k = 0;
  while ((std::size_t{1} << k) < target_nodes) ++k;
  return std::max(k, 1);
}

// Stochastic Kronecker graph on 2^iterations nodes: the ordered pair (u, v)
// is an edge with probability prod_k seed[bit_k(u)][bit_k(v)]. Self-pairs are
// included; prepare_graph drops them.
inline std::vector<Edge> kronecker_sample(const KroneckerSeed& seed_matrix, int iterations,
                                          std::uint64_t seed) {
  if (iterations < 1 || iterations > 20) throw InvalidArgument("iterations must be in [1, 20]");
  const std::size_t n = std::size_t{1} << iterations;
  Rng rng(seed);
  std::vector<Edge> edges;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      double p = 1.0;
      for (int k = 0; k < iterations && p > 0.0; ++k) {
        p *= seed_matrix[((u >> k) & 1) * 2 + ((v >> k) & 1)];
      }
      // Always consume one draw so the stream layout is independent of p.
      double r = rng.uniform();
      if (r < p) edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v), 1.0});
    }
  }
  return edges;
}

// Truncated discrete power law p(d) ~ d^-gamma on [d_min, d_max], sampled
// by inverse CDF. An odd total is made even by adjusting one entry.
inline std::vector<int> powerlaw_degree_sequence(std::size_t n, double gamma, int d_min,
                                                 int d_max, std::uint64_t seed) {
  if (d_min < 1 || d_min > d_max || static_cast<std::size_t>(d_max) + 1 > n) {
    throw InvalidArgument("need 1 <= d_min <= d_max <= n-1");
  }
  std::vector<double> cdf;
  double total = 0.0;
  for (int d = d_min; d <= d_max; ++d) {
    total += std::pow(static_cast<double>(d), -gamma);
    cdf.push_back(total);
  }
  Rng rng(seed);
  std::vector<int> degrees(n);
  long long sum = 0;
  for (int& d : degrees) {
    double r = rng.uniform() * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), r);
    if (it == cdf.end()) --it;
    d = d_min + static_cast<int>(it - cdf.begin());
    sum += d;
  }
  if (sum % 2 != 0) {
    auto inc = std::find_if(degrees.begin(), degrees.end(), [&](int d) { return d < d_max; });
    if (inc != degrees.end()) {
      ++*inc;
    } else {
      --degrees.front();
    }
  }
  return degrees;
}

// Directed configuration model: out-stubs are matched to a random permutation
// of in-stubs. Self-loops and repeated pairs are discarded after matching.
inline std::vector<Edge> configuration_model(const std::vector<int>& in_degrees,
                                             const std::vector<int>& out_degrees,
                                             std::uint64_t seed) {
  if (in_degrees.size() != out_degrees.size()) throw InvalidArgument("degree length mismatch");
  long long in_sum = 0, out_sum = 0;
  for (int d : in_degrees) {
    if (d < 0) throw InvalidArgument("negative degree");
    in_sum += d;
  }
  for (int d : out_degrees) {
    if (d < 0) throw InvalidArgument("negative degree");
    out_sum += d;
  }
  if (in_sum != out_sum) throw InvalidArgument("in/out stub sums differ");

  std::vector<NodeId> out_stubs, in_stubs;
  for (NodeId v = 0; v < out_degrees.size(); ++v) {
    out_stubs.insert(out_stubs.end(), out_degrees[v], v);
    in_stubs.insert(in_stubs.end(), in_degrees[v], v);
  }
  Rng rng(seed);
  rng.shuffle(std::span<NodeId>(in_stubs));
  std::vector<Edge> edges;
  edges.reserve(out_stubs.size());
  for (std::size_t i = 0; i < out_stubs.size(); ++i) {
    if (out_stubs[i] != in_stubs[i]) edges.push_back({out_stubs[i], in_stubs[i], 1.0});
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.source != b.source ? a.source < b.source : a.target < b.target;
  });
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const Edge& a, const Edge& b) {
                            return a.source == b.source && a.target == b.target;
                          }),
              edges.end());
  return edges;
}

// Builds an unweighted (weight 1) raw graph; prepare_graph and
// assign_random_weights run downstream.
inline DirectedGraph generate(const GeneratorSpec& spec) {
  spec.validate();
  std::size_t n = spec.target_nodes;
  std::vector<Edge> edges;
  switch (spec.kind) {
    case GeneratorKind::kCorePeriphery:
    case GeneratorKind::kHierarchical: {
      int iterations = kronecker_iterations_for(n);
      n = std::size_t{1} << iterations;
      edges = kronecker_sample(spec.kronecker, iterations, spec.seed);
      break;
    }
    case GeneratorKind::kErdosRenyi: {
      double p = spec.er_out_degree / static_cast<double>(n - 1);
      if (p > 1.0) throw InvalidArgument("expected out-degree exceeds n-1");
      Rng rng(spec.seed);
      for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = 0; v < n; ++v) {
          if (u != v && rng.bernoulli(p)) edges.push_back({u, v, 1.0});
        }
      }
      break;
    }
    case GeneratorKind::kPowerLaw: {
      int d_max = spec.powerlaw_d_max > 0
                      ? spec.powerlaw_d_max
                      : static_cast<int>(std::floor(std::sqrt(static_cast<double>(n)) * 5.0));
      d_max = std::min<int>(d_max, static_cast<int>(n) - 1);
      auto out = powerlaw_degree_sequence(n, spec.powerlaw_gamma, spec.powerlaw_d_min, d_max,
                                          derive_seed(spec.seed, {1}));
      auto in = out;
      Rng rng(derive_seed(spec.seed, {2}));
      rng.shuffle(std::span<int>(in));
      edges = configuration_model(in, out, derive_seed(spec.seed, {3}));
      break;
    }
  }
  if (edges.empty()) throw DegenerateResult("generator produced no edges");
  return DirectedGraph::from_edges(n, std::move(edges));
}

}  // namespace socialdp
