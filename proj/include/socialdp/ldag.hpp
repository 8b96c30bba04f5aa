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
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "socialdp/error.hpp"
#include "socialdp/graph.hpp"
#include "socialdp/rng.hpp"

namespace socialdp {

// Edge inside a local DAG, stored at its head. `parent` is a local index.
struct DagParent {
  std::uint32_t parent = 0;
  double weight = 0.0;
};

// Acyclic neighbourhood of a target node. Members are kept in admission
// order with the target at local index 0. A node admitted at local index k
// only gets edges to members admitted before it, so every parent has a larger
// local index than its child and descending local index is a topological
// order.
class LocalDag {
 public:
  NodeId target() const noexcept { return members_.front(); }
  std::size_t size() const noexcept { return members_.size(); }
  std::size_t edge_count() const noexcept { return parents_.size(); }

  std::span<const NodeId> members() const noexcept { return members_; }
  NodeId member(std::uint32_t local) const noexcept { return members_[local]; }

  // In(v, t) at the moment v was admitted.
  std::span<const double> influence() const noexcept { return influence_; }

  std::span<const DagParent> parents(std::uint32_t local) const noexcept {
    return std::span<const DagParent>(parents_).subspan(offsets_[local],
                                                        offsets_[local + 1] - offsets_[local]);
  }

  // Sources first, target last.
  std::vector<NodeId> topo_order() const {
    return std::vector<NodeId>(members_.rbegin(), members_.rend());
  }

  // Edges with global ids.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(parents_.size());
    for (std::uint32_t v = 0; v < size(); ++v) {
      for (const DagParent& p : parents(v)) out.push_back({members_[p.parent], members_[v], p.weight});
    }
    return out;
  }

 private:
  friend class DagBuilder;

  std::vector<NodeId> members_;
  std::vector<double> influence_;
  std::vector<std::size_t> offsets_;
  std::vector<DagParent> parents_;
};

// Incremental construction shared by the greedy and random growth rules.
// Scratch arrays are sized to the graph and reset per target, so one builder
// can be reused across all targets of an index.
class DagBuilder {
 public:
  explicit DagBuilder(const DirectedGraph& graph)
      : graph_(graph), local_(graph.node_count(), kNotMember) {}

  void reset() {
    for (NodeId v : members_) local_[v] = kNotMember;
    members_.clear();
    influence_.clear();
    links_.clear();
  }

  bool is_member(NodeId v) const noexcept { return local_[v] != kNotMember; }
  std::size_t size() const noexcept { return members_.size(); }
  double influence_of_member(NodeId v) const noexcept { return influence_[local_[v]]; }

  // Sum over out-neighbours already in the DAG of w(v, u) * In(u, t).
  double influence_through_members(NodeId v) const {
    double s = 0.0;
    for (const Edge& e : graph_.out_edges(v)) {
      if (is_member(e.target)) s += e.weight * influence_[local_[e.target]];
    }
    return s;
  }

  // Adds v together with its edges into current members.
  void admit(NodeId v, double influence) {
    const auto local = static_cast<std::uint32_t>(members_.size());
    for (const Edge& e : graph_.out_edges(v)) {
      if (is_member(e.target)) links_.push_back({local_[e.target], DagParent{local, e.weight}});
    }
    local_[v] = local;
    members_.push_back(v);
    influence_.push_back(influence);
  }

  LocalDag finish() const {
    LocalDag dag;
    dag.members_ = members_;
    dag.influence_ = influence_;
    dag.offsets_.assign(members_.size() + 1, 0);
    for (const auto& [child, p] : links_) ++dag.offsets_[child + 1];
    for (std::size_t i = 1; i < dag.offsets_.size(); ++i) dag.offsets_[i] += dag.offsets_[i - 1];
    dag.parents_.resize(links_.size());
    std::vector<std::size_t> cursor(dag.offsets_.begin(), dag.offsets_.end() - 1);
    for (const auto& [child, p] : links_) dag.parents_[cursor[child]++] = p;
    return dag;
  }

 private:
  static constexpr std::uint32_t kNotMember = UINT32_MAX;

  const DirectedGraph& graph_;
  std::vector<std::uint32_t> local_;
  std::vector<NodeId> members_;
  std::vector<double> influence_;
  std::vector<std::pair<std::uint32_t, DagParent>> links_;
};

namespace detail {

struct InfluenceEntry {
  double influence;
  NodeId node;
  std::uint32_t version;
};

// Max-heap on influence; equal influence prefers the lower node id.
struct InfluenceLess {
  bool operator()(const InfluenceEntry& a, const InfluenceEntry& b) const {
    if (a.influence != b.influence) return a.influence < b.influence;
    return a.node > b.node;
  }
};

inline void check_dag_args(const DirectedGraph& graph, NodeId target, std::size_t n_max) {
  if (target >= graph.node_count()) throw InvalidArgument("target out of range");
  if (n_max < 1) throw InvalidArgument("n_max must be >= 1");
}

}  // namespace detail

// Greedy growth: repeatedly admit the outside node with the largest In(v, t)
// while that value is at least eta and the DAG holds fewer than n_max nodes.
// Uses a lazy max-heap; stale entries are skipped by version number.
inline LocalDag build_greedy_dag(const DirectedGraph& graph, NodeId target, double eta,
                                 std::size_t n_max, DagBuilder& builder) {
  detail::check_dag_args(graph, target, n_max);
  if (!(eta > 0.0)) throw InvalidArgument("eta must be > 0");
  builder.reset();

  std::priority_queue<detail::InfluenceEntry, std::vector<detail::InfluenceEntry>,
                      detail::InfluenceLess>
      heap;

  // Influence and heap version of outside nodes touched so far.
  std::unordered_map<NodeId, std::pair<double, std::uint32_t>> pending;
  pending.reserve(4 * n_max);
  heap.push({1.0, target, 0});
  pending[target] = {1.0, 0};

  while (!heap.empty()) {
    detail::InfluenceEntry top = heap.top();
    heap.pop();
    if (builder.is_member(top.node)) continue;
    auto it = pending.find(top.node);
    if (it->second.second != top.version) continue;
    // The target itself is admitted whatever eta is.
    if (builder.size() > 0 && top.influence < eta) break;
    if (builder.size() + 1 > n_max) break;
    builder.admit(top.node, top.influence);
    pending.erase(it);
    for (const InEdge& ie : graph.in_edges(top.node)) {
      if (builder.is_member(ie.source)) continue;
      auto& [value, version] = pending[ie.source];
      value += ie.weight * top.influence;
      ++version;
      heap.push({value, ie.source, version});
    }
  }
  return builder.finish();
}

inline LocalDag build_greedy_dag(const DirectedGraph& graph, NodeId target, double eta,
                                 std::size_t n_max) {
  DagBuilder builder(graph);
  return build_greedy_dag(graph, target, eta, n_max, builder);
}

// Random growth: the next member is drawn uniformly from the distinct
// in-neighbours of current members, until n_max members or no candidates.
inline LocalDag build_random_dag(const DirectedGraph& graph, NodeId target, std::size_t n_max,
                                 std::uint64_t seed, DagBuilder& builder) {
  detail::check_dag_args(graph, target, n_max);
  builder.reset();
  Rng rng(seed);
  std::vector<NodeId> frontier;
  std::unordered_map<NodeId, std::size_t> position;

  auto admit = [&](NodeId v) {
    builder.admit(v, v == target ? 1.0 : builder.influence_through_members(v));
    for (const InEdge& ie : graph.in_edges(v)) {
      if (!builder.is_member(ie.source) && !position.contains(ie.source)) {
        position.emplace(ie.source, frontier.size());
        frontier.push_back(ie.source);
      }
    }
  };

  admit(target);
  while (builder.size() < n_max && !frontier.empty()) {
    std::size_t i = static_cast<std::size_t>(rng.below(frontier.size()));
    NodeId v = frontier[i];
    position[frontier.back()] = i;
    frontier[i] = frontier.back();
    frontier.pop_back();
    position.erase(v);
    admit(v);
  }
  return builder.finish();
}

inline LocalDag build_random_dag(const DirectedGraph& graph, NodeId target, std::size_t n_max,
                                 std::uint64_t seed) {
  DagBuilder builder(graph);
  return build_random_dag(graph, target, n_max, seed, builder);
}

// Rebuilds a DAG from a member list in admission order.
inline LocalDag dag_from_members(const DirectedGraph& graph, std::span<const NodeId> members) {
  if (members.empty()) throw InvalidArgument("member list is empty");
  DagBuilder builder(graph);
  for (NodeId v : members) {
    if (v >= graph.node_count()) throw InvalidArgument("member out of range");
    if (builder.is_member(v)) throw InvalidArgument("duplicate member");
    builder.admit(v, builder.size() == 0 ? 1.0 : builder.influence_through_members(v));
  }
  return builder.finish();
}

enum class DagMode { kGreedy, kRandom };

struct DagIndex {
  std::vector<LocalDag> dags;                  // dags[t] has target t
  std::vector<std::vector<NodeId>> membership; // membership[v] = {t : v in V_t}, sorted

  double mean_size() const {
    if (dags.empty()) return 0.0;
    double s = 0.0;
    for (const LocalDag& d : dags) s += static_cast<double>(d.size());
    return s / static_cast<double>(dags.size());
  }

  std::size_t max_size() const {
    std::size_t m = 0;
    for (const LocalDag& d : dags) m = std::max(m, d.size());
    return m;
  }

  std::size_t total_edges() const {
    std::size_t m = 0;
    for (const LocalDag& d : dags) m += d.edge_count();
    return m;
  }
};

inline DagIndex index_from_dags(std::size_t node_count, std::vector<LocalDag> dags) {
  DagIndex index;
  index.dags = std::move(dags);
  index.membership.assign(node_count, {});
  for (const LocalDag& dag : index.dags) {
    for (NodeId v : dag.members()) index.membership[v].push_back(dag.target());
  }
  return index;
}

// One DAG per node. In random mode each target gets its own child seed.
inline DagIndex build_index(const DirectedGraph& graph, DagMode mode, double eta,
                            std::size_t n_max, std::uint64_t seed) {
  DagBuilder builder(graph);
  std::vector<LocalDag> dags;
  dags.reserve(graph.node_count());
  for (NodeId t = 0; t < graph.node_count(); ++t) {
    dags.push_back(mode == DagMode::kGreedy
                       ? build_greedy_dag(graph, t, eta, n_max, builder)
                       : build_random_dag(graph, t, n_max, derive_seed(seed, {t}), builder));
  }
  return index_from_dags(graph.node_count(), std::move(dags));
}

// Node capacity for random DAGs: the rounded mean greedy DAG size.
inline std::size_t matched_capacity(const DagIndex& greedy) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(greedy.mean_size())));
}

// One line per target: "t: m0 m1 ..." in admission order.
inline void write_index(std::ostream& out, const DagIndex& index) {
  for (const LocalDag& dag : index.dags) {
    out << dag.target() << ':';
    for (NodeId v : dag.members()) out << ' ' << v;
    out << '\n';
  }
}

inline DagIndex read_index(std::istream& in, const DirectedGraph& graph) {
  std::vector<LocalDag> dags(graph.node_count());
  std::vector<char> seen(graph.node_count(), 0);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError("expected 'target: members...'", line_no);
    std::istringstream head(line.substr(0, colon)), body(line.substr(colon + 1));
    long long t = -1;
    if (!(head >> t) || t < 0 || static_cast<std::size_t>(t) >= graph.node_count()) {
      throw ParseError("bad target id", line_no);
    }
    std::vector<NodeId> members;
    long long v;
    while (body >> v) {
      if (v < 0) throw ParseError("bad member id", line_no);
      members.push_back(static_cast<NodeId>(v));
    }
    if (members.empty() || members.front() != static_cast<NodeId>(t)) {
      throw ParseError("member list must start with the target", line_no);
    }
    dags[t] = dag_from_members(graph, members);
    seen[t] = 1;
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw ParseError("index does not cover every node", 0);
  }
  return index_from_dags(graph.node_count(), std::move(dags));
}

}  // namespace socialdp
