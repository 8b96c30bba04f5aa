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
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <nlohmann/json.hpp>

#include "socialdp/cascade.hpp"
#include "socialdp/error.hpp"
#include "socialdp/graph.hpp"
#include "socialdp/privacy.hpp"

namespace socialdp {

// Mann-Whitney AUC: the fraction of (positive, negative) pairs where the
// positive scores higher, ties counting one half. Computed from average
// ranks in O(n log n).
inline double auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw InvalidArgument("scores/labels length mismatch");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    // Ranks i+1..j share their average.
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]]) {
        positive_rank_sum += rank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) {
    throw DegenerateResult("AUC needs at least one positive and one negative label");
  }
  const double p = static_cast<double>(positives);
  const double u = positive_rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(negatives));
}

// Accuracy of thresholding x_hat_v at a uniform random threshold:
// x_hat_v when the node is truly active, 1 - x_hat_v otherwise.
inline std::vector<double> expected_accuracy(std::span<const double> x_hat,
                                             std::span<const std::uint8_t> truth) {
  if (x_hat.size() != truth.size()) throw InvalidArgument("length mismatch");
  std::vector<double> out(x_hat.size());
  for (std::size_t v = 0; v < out.size(); ++v) out[v] = truth[v] ? x_hat[v] : 1.0 - x_hat[v];
  return out;
}

struct Correlation {
  double pearson_r = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

// Sample Pearson correlation with a two-sided p-value from Student's t on
// n - 2 degrees of freedom.
inline Correlation correlate(std::span<const double> values, std::span<const double> attribute) {
  if (values.size() != attribute.size()) throw InvalidArgument("length mismatch");
  const std::size_t n = values.size();
  if (n < 3) throw InvalidArgument("correlation needs at least 3 points");
  const double nd = static_cast<double>(n);
  const double mx = std::accumulate(values.begin(), values.end(), 0.0) / nd;
  const double my = std::accumulate(attribute.begin(), attribute.end(), 0.0) / nd;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = values[i] - mx, dy = attribute[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) throw DegenerateResult("correlation undefined: zero variance");
  Correlation c;
  c.n = n;
  c.pearson_r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double r2 = c.pearson_r * c.pearson_r;
  if (r2 >= 1.0) {
    c.p_value = 0.0;
  } else {
    const double df = nd - 2.0;
    const double t = std::abs(c.pearson_r) * std::sqrt(df / (1.0 - r2));
    boost::math::students_t dist(df);
    c.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, t));
  }
  return c;
}

struct EvaluationReport {
  double auc = 0.5;
  double upper_bound = 0.5;
  bool beats_bound = false;
  std::vector<double> per_node_expected_accuracy;
  std::map<std::string, Correlation> correlations;
};

// AUC against the bound, expected accuracy per node, and its correlation
// with weighted in/out-degree and PageRank. Attributes with zero variance
// are left out of `correlations`.
inline EvaluationReport evaluate(std::span<const double> x_hat, const GroundTruth& truth,
                                 const RRMechanism& mechanism,
                                 std::span<const NodeMetrics> node_metrics) {
  EvaluationReport r;
  r.auc = auc(x_hat, truth.x);
  r.upper_bound = auc_upper_bound(mechanism.epsilon(), mechanism.delta());
  r.beats_bound = r.auc > r.upper_bound;
  r.per_node_expected_accuracy = expected_accuracy(x_hat, truth.x);
  if (node_metrics.empty()) return r;
  if (node_metrics.size() != x_hat.size()) throw InvalidArgument("node metric length mismatch");
  const std::pair<const char*, double NodeMetrics::*> attributes[] = {
      {"weighted_out_degree", &NodeMetrics::weighted_out_degree},
      {"weighted_in_degree", &NodeMetrics::weighted_in_degree},
      {"pagerank", &NodeMetrics::pagerank},
  };
  for (const auto& [name, member] : attributes) {
    std::vector<double> attr;
    attr.reserve(node_metrics.size());
    for (const NodeMetrics& m : node_metrics) attr.push_back(m.*member);
    try {
      r.correlations[name] = correlate(r.per_node_expected_accuracy, attr);
    } catch (const DegenerateResult&) {
    }
  }
  return r;
}

inline nlohmann::json to_json(const EvaluationReport& r) {
  nlohmann::json j;
  j["auc"] = r.auc;
  j["upper_bound"] = r.upper_bound;
  j["beats_bound"] = r.beats_bound;
  j["mean_expected_accuracy"] =
      r.per_node_expected_accuracy.empty()
          ? 0.0
          : std::accumulate(r.per_node_expected_accuracy.begin(),
                            r.per_node_expected_accuracy.end(), 0.0) /
                static_cast<double>(r.per_node_expected_accuracy.size());
  j["per_node_expected_accuracy"] = r.per_node_expected_accuracy;
  nlohmann::json corr = nlohmann::json::object();
  for (const auto& [name, c] : r.correlations) {
    corr[name] = {{"pearson_r", c.pearson_r}, {"p_value", c.p_value}, {"n", c.n}};
  }
  j["correlations"] = corr;
  return j;
}

}  // namespace socialdp
