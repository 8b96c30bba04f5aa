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
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "socialdp/error.hpp"
#include "socialdp/rng.hpp"

namespace socialdp {

using NodeId = std::uint32_t;

struct Edge {
  NodeId source = 0;
  NodeId target = 0;
  double weight = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// An in-edge as seen from its target.
struct InEdge {
  NodeId source = 0;
  double weight = 1.0;
  std::uint32_t edge_index = 0;  // position in DirectedGraph::edges()
};

// Weighted directed graph without parallel edges. Edges are stored sorted by
// (source, target); in- and out-adjacency are CSR views over them. Values are
// immutable once built.
class DirectedGraph {
 public:
  DirectedGraph() = default;

  // Duplicate (source, target) pairs collapse to the first occurrence; the
  // number dropped is written to *duplicates when given.
  static DirectedGraph from_edges(std::size_t node_count, std::vector<Edge> edges,
                                  std::size_t* duplicates = nullptr) {
    for (const Edge& e : edges) {
      if (e.source >= node_count || e.target >= node_count) {
        throw InvalidArgument("edge endpoint out of range");
      }
    }
    std::stable_sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
      return a.source != b.source ? a.source < b.source : a.target < b.target;
    });
    std::size_t before = edges.size();
    auto last = std::unique(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
      return a.source == b.source && a.target == b.target;
    });
    edges.erase(last, edges.end());
    if (duplicates != nullptr) *duplicates = before - edges.size();

    DirectedGraph g;
    g.node_count_ = node_count;
    g.edges_ = std::move(edges);
    g.build_adjacency();
    return g;
  }

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }

  std::span<const Edge> out_edges(NodeId u) const noexcept {
    return std::span<const Edge>(edges_).subspan(out_offsets_[u],
                                                 out_offsets_[u + 1] - out_offsets_[u]);
  }
  std::span<const InEdge> in_edges(NodeId v) const noexcept {
    return std::span<const InEdge>(in_).subspan(in_offsets_[v],
                                                in_offsets_[v + 1] - in_offsets_[v]);
  }
  std::size_t out_degree(NodeId u) const noexcept {
    return out_offsets_[u + 1] - out_offsets_[u];
  }
  std::size_t in_degree(NodeId v) const noexcept {
    return in_offsets_[v + 1] - in_offsets_[v];
  }

  // Copy with the weights replaced, in edges() order.
  DirectedGraph with_weights(std::span<const double> weights) const {
    if (weights.size() != edges_.size()) throw InvalidArgument("weight count mismatch");
    DirectedGraph g = *this;
    for (std::size_t i = 0; i < g.edges_.size(); ++i) g.edges_[i].weight = weights[i];
    for (InEdge& ie : g.in_) ie.weight = weights[ie.edge_index];
    return g;
  }

  friend bool operator==(const DirectedGraph& a, const DirectedGraph& b) {
    return a.node_count_ == b.node_count_ && a.edges_ == b.edges_;
  }

 private:
  void build_adjacency() {
    out_offsets_.assign(node_count_ + 1, 0);
    in_offsets_.assign(node_count_ + 1, 0);
    for (const Edge& e : edges_) {
      ++out_offsets_[e.source + 1];
      ++in_offsets_[e.target + 1];
    }
    std::partial_sum(out_offsets_.begin(), out_offsets_.end(), out_offsets_.begin());
    std::partial_sum(in_offsets_.begin(), in_offsets_.end(), in_offsets_.begin());
    in_.resize(edges_.size());
    std::vector<std::size_t> cursor(in_offsets_.begin(), in_offsets_.end() - 1);
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      const Edge& e = edges_[i];
      in_[cursor[e.target]++] = InEdge{e.source, e.weight, static_cast<std::uint32_t>(i)};
    }
  }

  std::size_t node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> out_offsets_{0};
  std::vector<std::size_t> in_offsets_{0};
  std::vector<InEdge> in_;
};

struct NodeMetrics {
  double weighted_in_degree = 0.0;
  double weighted_out_degree = 0.0;
  double pagerank = 0.0;
};

// ---------------------------------------------------------------------------
// Edge-list text format

struct LoadOptions {
  bool directed = true;
  // Accept arbitrary tokens as node names instead of non-negative integers.
  bool string_ids = false;
};

struct EdgeListLoad {
  DirectedGraph graph;
  std::size_t duplicates = 0;
  bool has_weights = false;
  // Original label of each dense node id.
  std::vector<std::string> labels;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline bool parse_u64(std::string_view s, std::uint64_t& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

inline bool parse_double(std::string_view s, double& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

}  // namespace detail

// Reads "src dst [weight]" lines. '#' starts a comment line. Integer ids are
// remapped densely in increasing numeric order; string ids in order of first
// appearance. Unweighted input gets placeholder weight 1.
inline EdgeListLoad parse_edge_list(std::istream& in, const LoadOptions& options = {}) {
  struct RawEdge {
    std::string src, dst;
    double weight;
  };
  std::vector<RawEdge> raw;
  int columns = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = detail::split_ws(line);
    if (tokens.empty() || tokens.front().front() == '#') continue;
    if (tokens.size() != 2 && tokens.size() != 3) {
      throw ParseError("expected 'src dst [weight]'", line_no);
    }
    if (columns == 0) columns = static_cast<int>(tokens.size());
    if (columns != static_cast<int>(tokens.size())) {
      throw ParseError("inconsistent column count", line_no);
    }
    if (!options.string_ids) {
      std::uint64_t id;
      if (!detail::parse_u64(tokens[0], id) || !detail::parse_u64(tokens[1], id)) {
        throw ParseError("node ids must be non-negative integers", line_no);
      }
    }
    double w = 1.0;
    if (tokens.size() == 3) {
      if (!detail::parse_double(tokens[2], w) || !(w > 0.0 && w <= 1.0)) {
        throw ParseError("weight must be a number in (0, 1]", line_no);
      }
    }
    raw.push_back({std::string(tokens[0]), std::string(tokens[1]), w});
  }
  if (raw.empty()) throw DegenerateResult("edge list contains no edges");

  EdgeListLoad result;
  result.has_weights = columns == 3;
  std::unordered_map<std::string, NodeId> index;
  if (options.string_ids) {
    for (const RawEdge& r : raw) {
      for (const std::string* s : {&r.src, &r.dst}) {
        if (index.emplace(*s, static_cast<NodeId>(result.labels.size())).second) {
          result.labels.push_back(*s);
        }
      }
    }
  } else {
    std::map<std::uint64_t, std::string> sorted;
    for (const RawEdge& r : raw) {
      std::uint64_t a, b;
      detail::parse_u64(r.src, a);
      detail::parse_u64(r.dst, b);
      sorted.emplace(a, r.src);
      sorted.emplace(b, r.dst);
    }
    for (const auto& [id, label] : sorted) {
      index.emplace(label, static_cast<NodeId>(result.labels.size()));
      result.labels.push_back(label);
    }
    // Labels with leading zeros ("01") map to the same numeric id.
    for (const RawEdge& r : raw) {
      for (const std::string* s : {&r.src, &r.dst}) {
        if (!index.contains(*s)) {
          std::uint64_t v;
          detail::parse_u64(*s, v);
          index.emplace(*s, index.at(sorted.at(v)));
        }
      }
    }
  }

  std::vector<Edge> edges;
  edges.reserve(raw.size() * (options.directed ? 1 : 2));
  for (const RawEdge& r : raw) {
    NodeId a = index.at(r.src), b = index.at(r.dst);
    edges.push_back({a, b, r.weight});
    if (!options.directed) edges.push_back({b, a, r.weight});
  }
  result.graph = DirectedGraph::from_edges(result.labels.size(), std::move(edges),
                                           &result.duplicates);
  return result;
}

inline EdgeListLoad load_edge_list(const std::filesystem::path& path,
                                   const LoadOptions& options = {}) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  return parse_edge_list(in, options);
}

// Writes "src dst weight" with 9 significant digits.
inline void write_edge_list(std::ostream& out, const DirectedGraph& graph) {
  char buf[64];
  for (const Edge& e : graph.edges()) {
    std::snprintf(buf, sizeof buf, "%u %u %.9g\n", e.source, e.target, e.weight);
    out << buf;
  }
}

inline void save_edge_list(const std::filesystem::path& path, const DirectedGraph& graph) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  write_edge_list(out, graph);
}

// ---------------------------------------------------------------------------
// Weights

// Divides every node's incoming weights by their sum. Nodes whose in-weights
// already sum to 1 within 1e-12 are left untouched, which keeps the
// operation idempotent bit for bit.
inline DirectedGraph normalize_in_weights(const DirectedGraph& graph) {
  std::vector<double> w(graph.edge_count());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = graph.edges()[i].weight;
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    auto in = graph.in_edges(v);
    if (in.empty()) continue;
    double sum = 0.0;
    for (const InEdge& ie : in) sum += ie.weight;
    if (std::abs(sum - 1.0) <= 1e-12) continue;
    for (const InEdge& ie : in) w[ie.edge_index] = ie.weight / sum;
  }
  return graph.with_weights(w);
}

// Draws each weight uniformly from (0, 1] then normalizes incoming weights.
inline DirectedGraph assign_random_weights(const DirectedGraph& graph, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> w(graph.edge_count());
  for (double& x : w) x = rng.uniform_open_closed();
  return normalize_in_weights(graph.with_weights(w));
}

// ---------------------------------------------------------------------------
// Preparation

// Removes self-loops, then (unless skip_prune) repeatedly removes nodes whose
// in-degree and out-degree are both below min_degree until none remain.
// Surviving nodes are renumbered densely in their original order and incoming
// weights are renormalized. `kept`, when given, receives the original id of
// each surviving node.
inline DirectedGraph prepare_graph(const DirectedGraph& graph, int min_degree = 3,
                                   bool skip_prune = false,
                                   std::vector<NodeId>* kept = nullptr) {
  const std::size_t n = graph.node_count();
  std::vector<char> alive(n, 1);
  std::vector<std::size_t> indeg(n, 0), outdeg(n, 0);
  for (const Edge& e : graph.edges()) {
    if (e.source == e.target) continue;
    ++outdeg[e.source];
    ++indeg[e.target];
  }
  if (!skip_prune) {
    const auto md = static_cast<std::size_t>(std::max(min_degree, 0));
    std::vector<NodeId> stack;
    for (NodeId v = 0; v < n; ++v) {
      if (indeg[v] < md && outdeg[v] < md) stack.push_back(v);
    }
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      if (!alive[v]) continue;
      alive[v] = 0;
      for (const Edge& e : graph.out_edges(v)) {
        if (e.target == v || !alive[e.target]) continue;
        if (--indeg[e.target] < md && outdeg[e.target] < md) stack.push_back(e.target);
      }
      for (const InEdge& ie : graph.in_edges(v)) {
        if (ie.source == v || !alive[ie.source]) continue;
        if (--outdeg[ie.source] < md && indeg[ie.source] < md) stack.push_back(ie.source);
      }
    }
  }

  std::vector<NodeId> remap(n, 0);
  std::vector<NodeId> survivors;
  for (NodeId v = 0; v < n; ++v) {
    if (alive[v]) {
      remap[v] = static_cast<NodeId>(survivors.size());
      survivors.push_back(v);
    }
  }
  std::vector<Edge> edges;
  for (const Edge& e : graph.edges()) {
    if (e.source == e.target || !alive[e.source] || !alive[e.target]) continue;
    edges.push_back({remap[e.source], remap[e.target], e.weight});
  }
  if (survivors.empty() || edges.empty()) {
    throw DegenerateResult("graph is empty after preparation");
  }
  if (kept != nullptr) *kept = survivors;
  return normalize_in_weights(DirectedGraph::from_edges(survivors.size(), std::move(edges)));
}

// ---------------------------------------------------------------------------
// Node metrics

// Weighted PageRank by power iteration. A node passes rank to its
// out-neighbours in proportion to edge weight; dangling mass and the
// teleport term are spread uniformly. Stops after `iterations` rounds or when
// the L1 change drops below 1e-10.
inline std::vector<double> pagerank(const DirectedGraph& graph, double damping = 0.85,
                                    int iterations = 100) {
  const std::size_t n = graph.node_count();
  if (n == 0) return {};
  std::vector<double> out_weight(n, 0.0);
  for (const Edge& e : graph.edges()) out_weight[e.source] += e.weight;
  std::vector<double> rank(n, 1.0 / static_cast<double>(n)), next(n);
  for (int it = 0; it < iterations; ++it) {
    double dangling = 0.0;
    for (NodeId u = 0; u < n; ++u) {
      if (out_weight[u] <= 0.0) dangling += rank[u];
    }
    const double base = (1.0 - damping + damping * dangling) / static_cast<double>(n);
    std::fill(next.begin(), next.end(), base);
    for (const Edge& e : graph.edges()) {
      next[e.target] += damping * rank[e.source] * e.weight / out_weight[e.source];
    }
    double total = std::accumulate(next.begin(), next.end(), 0.0);
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] /= total;
      change += std::abs(next[i] - rank[i]);
    }
    rank.swap(next);
    if (change < 1e-10) break;
  }
  return rank;
}

inline std::vector<NodeMetrics> compute_node_metrics(const DirectedGraph& graph,
                                                     double damping = 0.85,
                                                     int iterations = 100) {
  std::vector<NodeMetrics> m(graph.node_count());
  for (const Edge& e : graph.edges()) {
    m[e.source].weighted_out_degree += e.weight;
    m[e.target].weighted_in_degree += e.weight;
  }
  auto pr = pagerank(graph, damping, iterations);
  for (std::size_t i = 0; i < m.size(); ++i) m[i].pagerank = pr[i];
  return m;
}

}  // namespace socialdp
