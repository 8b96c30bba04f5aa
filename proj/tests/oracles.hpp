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

// Reference implementations used only by the tests. They share no code
// with the library beyond the graph container.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <vector>

#include "socialdp/graph.hpp"

namespace socialdp::oracle {

using Mask = std::uint64_t;

// Linear threshold process run literally: each node draws lambda_v from
// (0, 1] and turns active once the weight of its active in-neighbours
// reaches lambda_v. Iterates until no node changes.
inline Mask threshold_cascade(const DirectedGraph& g, Mask seeds, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> lambda(g.node_count());
  for (double& l : lambda) l = 1.0 - u(rng);
  Mask active = seeds;
  for (bool changed = true; changed;) {
    changed = false;
    for (NodeId v = 0; v < g.node_count(); ++v) {
      if (active >> v & 1) continue;
      double pressure = 0.0;
      for (const InEdge& ie : g.in_edges(v)) {
        if (active >> ie.source & 1) pressure += ie.weight;
      }
      if (pressure >= lambda[v]) {
        active |= Mask{1} << v;
        changed = true;
      }
    }
  }
  return active;
}

// Exact distribution of the final active set under the linear threshold
// model, by enumerating every combination of per-node in-edge choices
// (one in-edge with probability w, or none).
inline std::map<Mask, double> lt_active_set_distribution(const DirectedGraph& g, Mask seeds) {
  const std::size_t n = g.node_count();
  std::map<Mask, double> dist;
  std::vector<std::size_t> choice(n, 0);  // 0 = none, k = k-th in-edge
  std::function<void(std::size_t, double)> rec = [&](std::size_t v, double p) {
    if (p == 0.0) return;
    if (v == n) {
      Mask active = seeds;
      for (bool changed = true; changed;) {
        changed = false;
        for (NodeId x = 0; x < n; ++x) {
          if (active >> x & 1 || choice[x] == 0) continue;
          NodeId src = g.in_edges(x)[choice[x] - 1].source;
          if (active >> src & 1) {
            active |= Mask{1} << x;
            changed = true;
          }
        }
      }
      dist[active] += p;
      return;
    }
    auto in = g.in_edges(static_cast<NodeId>(v));
    double rest = 1.0;
    for (std::size_t k = 0; k < in.size(); ++k) {
      choice[v] = k + 1;
      rec(v + 1, p * in[k].weight);
      rest -= in[k].weight;
    }
    choice[v] = 0;
    rec(v + 1, p * std::max(rest, 0.0));
  };
  rec(0, 1.0);
  return dist;
}

// Pr[target active] when every node v seeds itself independently with
// probability alpha[v] and influence follows linear threshold triggering
// sets. Enumerates all triggering-set combinations; the chosen in-edges form
// an in-forest, so the target is active iff some node on its backward chain
// is a seed.
inline double lt_activation_probability(const DirectedGraph& g, std::span<const double> alpha,
                                        NodeId target) {
  const std::size_t n = g.node_count();
  std::vector<std::size_t> choice(n, 0);
  double total = 0.0;
  std::function<void(std::size_t, double)> rec = [&](std::size_t v, double p) {
    if (p == 0.0) return;
    if (v == n) {
      double none_seeded = 1.0;
      std::vector<char> seen(n, 0);
      for (NodeId x = target; !seen[x];) {
        seen[x] = 1;
        none_seeded *= 1.0 - alpha[x];
        if (choice[x] == 0) break;
        x = g.in_edges(x)[choice[x] - 1].source;
      }
      total += p * (1.0 - none_seeded);
      return;
    }
    auto in = g.in_edges(static_cast<NodeId>(v));
    double rest = 1.0;
    for (std::size_t k = 0; k < in.size(); ++k) {
      choice[v] = k + 1;
      rec(v + 1, p * in[k].weight);
      rest -= in[k].weight;
    }
    choice[v] = 0;
    rec(v + 1, p * std::max(rest, 0.0));
  };
  rec(0, 1.0);
  return total;
}

// Same quantity when every edge is kept independently with probability w.
inline double independent_edge_activation_probability(const DirectedGraph& g,
                                                      std::span<const double> alpha,
                                                      NodeId target) {
  const std::size_t m = g.edge_count();
  const auto edges = g.edges();
  double total = 0.0;
  for (Mask pattern = 0; pattern < (Mask{1} << m); ++pattern) {
    double p = 1.0;
    for (std::size_t i = 0; i < m; ++i) p *= (pattern >> i & 1) ? edges[i].weight : 1.0 - edges[i].weight;
    if (p == 0.0) continue;
    // Backward reachability to the target through kept edges.
    std::vector<char> reach(g.node_count(), 0);
    reach[target] = 1;
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t i = 0; i < m; ++i) {
        if ((pattern >> i & 1) && reach[edges[i].target] && !reach[edges[i].source]) {
          reach[edges[i].source] = 1;
          changed = true;
        }
      }
    }
    double none_seeded = 1.0;
    for (NodeId v = 0; v < g.node_count(); ++v) {
      if (reach[v]) none_seeded *= 1.0 - alpha[v];
    }
    total += p * (1.0 - none_seeded);
  }
  return total;
}

// AUC by explicit pair enumeration, ties counted as one half.
inline double brute_force_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) {
        wins += 1.0;
      } else if (scores[i] == scores[j]) {
        wins += 0.5;
      }
    }
  }
  return wins / pairs;
}

// Central difference of f along coordinate k.
inline double central_difference(const std::function<double(std::span<const double>)>& f,
                                 std::vector<double> x, std::size_t k, double h) {
  const double x0 = x[k];
  x[k] = x0 + h;
  const double up = f(x);
  x[k] = x0 - h;
  const double down = f(x);
  return (up - down) / (2.0 * h);
}

inline double total_variation(const std::map<Mask, double>& p, const std::map<Mask, double>& q) {
  double tv = 0.0;
  for (const auto& [k, v] : p) {
    auto it = q.find(k);
    tv += std::abs(v - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : q) {
    if (!p.count(k)) tv += v;
  }
  return 0.5 * tv;
}

inline std::map<Mask, double> normalize_counts(const std::map<Mask, std::size_t>& counts,
                                               std::size_t trials) {
  std::map<Mask, double> out;
  for (const auto& [k, c] : counts) out[k] = static_cast<double>(c) / static_cast<double>(trials);
  return out;
}

// Every rooted unlabeled tree on n nodes as a parent array (parent[0] = 0
// for the root), via canonical level sequences.
inline std::vector<std::vector<NodeId>> rooted_trees(std::size_t n) {
  std::vector<std::vector<NodeId>> out;
  if (n == 0) return out;
  std::vector<std::size_t> level(n);
  for (std::size_t i = 0; i < n; ++i) level[i] = i;
  for (;;) {
    std::vector<NodeId> parent(n, 0);
    for (std::size_t i = 1; i < n; ++i) {
      std::size_t j = i;
      while (level[--j] != level[i] - 1) {
      }
      parent[i] = static_cast<NodeId>(j);
    }
    out.push_back(std::move(parent));
    std::size_t p = n;
    for (std::size_t i = n; i-- > 1;) {
      if (level[i] != 1) {
        p = i;
        break;
      }
    }
    if (p == n) break;
    std::size_t q = p;
    while (level[--q] != level[p] - 1) {
    }
    for (std::size_t i = p; i < n; ++i) level[i] = level[i - (p - q)];
  }
  return out;
}

}  // namespace socialdp::oracle
