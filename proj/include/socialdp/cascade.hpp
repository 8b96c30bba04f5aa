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
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "socialdp/error.hpp"
#include "socialdp/graph.hpp"
#include "socialdp/rng.hpp"

namespace socialdp {

struct GroundTruth {
  std::vector<std::uint8_t> x;  // final activation state per node
  std::vector<NodeId> seeds;    // sorted
  double cascade_fraction = 0.0;
  // Set by generate_ground_truth: false when the retry budget ran out and the
  // closest attempt was returned instead.
  bool within_window = true;
  int attempts = 1;
};

struct SeedPolicy {
  enum class Mode { kFixedCount, kFraction };

  Mode mode = Mode::kFixedCount;
  double value = 5;
  double min_fraction = 0.25;
  double max_fraction = 0.75;
  int max_retries = 100;

  static SeedPolicy fixed_count(int count) {
    SeedPolicy p;
    p.value = count;
    return p;
  }
  static SeedPolicy fraction(double f) {
    SeedPolicy p;
    p.mode = Mode::kFraction;
    p.value = f;
    return p;
  }

  void validate() const {
    if (!(0.0 < min_fraction && min_fraction < max_fraction && max_fraction <= 1.0)) {
      throw InvalidArgument("size window must satisfy 0 < min < max <= 1");
    }
    if (max_retries < 1) throw InvalidArgument("max_retries must be >= 1");
    if (mode == Mode::kFraction && !(value > 0.0 && value <= 1.0)) {
      throw InvalidArgument("seed fraction must be in (0, 1]");
    }
    if (mode == Mode::kFixedCount && value < 1) throw InvalidArgument("seed count must be >= 1");
  }

  std::size_t seed_count(std::size_t n) const {
    std::size_t k = mode == Mode::kFixedCount
                        ? static_cast<std::size_t>(value)
                        : static_cast<std::size_t>(std::llround(value * static_cast<double>(n)));
    return std::clamp<std::size_t>(k, 1, n);
  }
};

// Triggering-set sample for the linear threshold model: every node keeps at
// most one incoming edge, edge (u, v) with probability w(u, v), none with
// probability 1 - sum of v's in-weights. Each edge is therefore retained with
// marginal probability equal to its weight. Returns a mask over
// graph.edges().
inline std::vector<char> sample_live_edge_graph(const DirectedGraph& graph, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<char> kept(graph.edge_count(), 0);
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    auto in = graph.in_edges(v);
    if (in.empty()) continue;
    double r = rng.uniform();
    double cumulative = 0.0;
    for (const InEdge& ie : in) {
      cumulative += ie.weight;
      if (r < cumulative) {
        kept[ie.edge_index] = 1;
        break;
      }
    }
  }
  return kept;
}

// Nodes reachable from `seeds` through the retained edges.
inline std::vector<std::uint8_t> reachable_from(const DirectedGraph& graph,
                                                std::span<const NodeId> seeds,
                                                std::span<const char> kept) {
  std::vector<std::uint8_t> active(graph.node_count(), 0);
  std::vector<NodeId> queue;
  for (NodeId s : seeds) {
    if (s >= graph.node_count()) throw InvalidArgument("seed out of range");
    if (!active[s]) {
      active[s] = 1;
      queue.push_back(s);
    }
  }
  const Edge* base = graph.edges().data();
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (const Edge& e : graph.out_edges(queue[head])) {
      if (kept[static_cast<std::size_t>(&e - base)] && !active[e.target]) {
        active[e.target] = 1;
        queue.push_back(e.target);
      }
    }
  }
  return active;
}

inline GroundTruth simulate_cascade(const DirectedGraph& graph, std::span<const NodeId> seeds,
                                    std::uint64_t seed) {
  if (seeds.empty()) throw InvalidArgument("seed set must be nonempty");
  GroundTruth truth;
  truth.x = reachable_from(graph, seeds, sample_live_edge_graph(graph, seed));
  truth.seeds.assign(seeds.begin(), seeds.end());
  std::sort(truth.seeds.begin(), truth.seeds.end());
  truth.seeds.erase(std::unique(truth.seeds.begin(), truth.seeds.end()), truth.seeds.end());
  std::size_t active = std::count(truth.x.begin(), truth.x.end(), 1);
  truth.cascade_fraction = static_cast<double>(active) / static_cast<double>(graph.node_count());
  return truth;
}

// Draws seeds uniformly without replacement and simulates a cascade,
// resampling until the active fraction lands inside the policy's window.
inline GroundTruth generate_ground_truth(const DirectedGraph& graph, const SeedPolicy& policy,
                                         std::uint64_t seed) {
  policy.validate();
  const std::size_t n = graph.node_count();
  const std::size_t k = policy.seed_count(n);
  auto distance = [&](double f) {
    if (f < policy.min_fraction) return policy.min_fraction - f;
    if (f > policy.max_fraction) return f - policy.max_fraction;
    return 0.0;
  };

  GroundTruth best;
  double best_distance = INFINITY;
  std::vector<NodeId> pool(n);
  for (int attempt = 0; attempt < policy.max_retries; ++attempt) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(attempt), 0}));
    for (NodeId v = 0; v < n; ++v) pool[v] = v;
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
      std::swap(pool[i], pool[j]);
    }
    GroundTruth truth = simulate_cascade(
        graph, std::span<const NodeId>(pool.data(), k),
        derive_seed(seed, {static_cast<std::uint64_t>(attempt), 1}));
    truth.attempts = attempt + 1;
    double d = distance(truth.cascade_fraction);
    if (d == 0.0) return truth;
    if (d < best_distance) {
      best_distance = d;
      best = std::move(truth);
    }
  }
  best.within_window = false;
  best.attempts = policy.max_retries;
  return best;
}

// CSV: node_id,x,is_seed
inline void write_ground_truth_csv(std::ostream& out, const GroundTruth& truth) {
  out << "node_id,x,is_seed\n";
  std::vector<char> is_seed(truth.x.size(), 0);
  for (NodeId s : truth.seeds) is_seed[s] = 1;
  for (std::size_t v = 0; v < truth.x.size(); ++v) {
    out << v << ',' << int(truth.x[v]) << ',' << int(is_seed[v]) << '\n';
  }
}

inline GroundTruth read_ground_truth_csv(std::istream& in) {
  GroundTruth truth;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.rfind("node_id", 0) == 0) continue;
    unsigned long long id = 0;
    int x = 0, s = 0;
    if (std::sscanf(line.c_str(), "%llu,%d,%d", &id, &x, &s) != 3 || (x != 0 && x != 1)) {
      throw ParseError("expected node_id,x,is_seed", line_no);
    }
    if (id != truth.x.size()) throw ParseError("node ids must be 0..n-1 in order", line_no);
    truth.x.push_back(static_cast<std::uint8_t>(x));
    if (s) truth.seeds.push_back(static_cast<NodeId>(id));
  }
  if (truth.x.empty()) throw ParseError("ground truth file is empty", 0);
  std::size_t active = std::count(truth.x.begin(), truth.x.end(), 1);
  truth.cascade_fraction = static_cast<double>(active) / static_cast<double>(truth.x.size());
  return truth;
}

}  // namespace socialdp
