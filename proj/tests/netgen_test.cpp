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

#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>

#include "socialdp/graph.hpp"
#include "socialdp/netgen.hpp"

namespace socialdp {
namespace {

TEST(ErdosRenyi, MeanOutDegreeNearTarget) {
  double total = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    DirectedGraph g = generate(GeneratorSpec::defaults(GeneratorKind::kErdosRenyi, 500, seed));
    EXPECT_EQ(g.node_count(), 500u);
    const double mean = static_cast<double>(g.edge_count()) / 500.0;
    EXPECT_GE(mean, 4.3);
    EXPECT_LE(mean, 5.7);
    total += mean;
    for (const Edge& e : g.edges()) EXPECT_NE(e.source, e.target);
  }
  EXPECT_NEAR(total / 20.0, 5.0, 0.15);
}

TEST(Kronecker, AllOnesSeedGivesEveryPair) {
  auto edges = kronecker_sample({1, 1, 1, 1}, 3, 7);
  EXPECT_EQ(edges.size(), 64u);
  GeneratorSpec spec = GeneratorSpec::defaults(GeneratorKind::kCorePeriphery, 8, 7);
  spec.kronecker = {1, 1, 1, 1};
  DirectedGraph g = prepare_graph(generate(spec), 3);
  EXPECT_EQ(g.node_count(), 8u);
  EXPECT_EQ(g.edge_count(), 56u);
}

TEST(Kronecker, ZeroSeedGivesNothing) {
  EXPECT_TRUE(kronecker_sample({0, 0, 0, 0}, 4, 1).empty());
}

TEST(Kronecker, IdentitySeedGivesDiagonal) {
  auto edges = kronecker_sample({1, 0, 0, 1}, 2, 1);
  ASSERT_EQ(edges.size(), 4u);
  for (const Edge& e : edges) EXPECT_EQ(e.source, e.target);
}

TEST(Kronecker, EdgeCountMatchesExpectation) {
  const double expected = std::pow(2.2, 9);
  double total = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const double m = static_cast<double>(kronecker_sample(kCorePeripherySeed, 9, seed).size());
    EXPECT_NEAR(m, expected, 0.1 * expected);
    total += m;
  }
  // Sum of Bernoullis: the variance is below the mean.
  EXPECT_NEAR(total / 20.0, expected, 3.0 * std::sqrt(expected / 20.0));
}

TEST(Kronecker, IterationsCoverTarget) {
  EXPECT_EQ(kronecker_iterations_for(500), 9);
  EXPECT_EQ(kronecker_iterations_for(512), 9);
  EXPECT_EQ(kronecker_iterations_for(513), 10);
}

TEST(PowerLaw, SteepExponentConcentratesOnMinimum) {
  auto d = powerlaw_degree_sequence(10000, 50.0, 2, 40, 3);
  std::size_t at_min = std::count(d.begin(), d.end(), 2);
  EXPECT_GE(static_cast<double>(at_min), 0.99 * 10000.0);
}

TEST(PowerLaw, DegenerateSupport) {
  EXPECT_EQ(powerlaw_degree_sequence(4, 1.0, 2, 2, 1), (std::vector<int>{2, 2, 2, 2}));
}

TEST(PowerLaw, FrequenciesFollowInverseDegree) {
  const std::size_t n = 100000;
  auto d = powerlaw_degree_sequence(n, 1.0, 1, 100, 11);
  std::vector<double> counts(101, 0.0);
  for (int x : d) counts[x] += 1.0;
  double norm = 0.0;
  for (int k = 1; k <= 100; ++k) norm += 1.0 / k;
  double chi2 = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double e = static_cast<double>(n) / k / norm;
    chi2 += (counts[k] - e) * (counts[k] - e) / e;
  }
  boost::math::chi_squared dist(99);
  EXPECT_LT(chi2, boost::math::quantile(dist, 0.99));
}

TEST(PowerLaw, EvenTotalAndRangeChecks) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto d = powerlaw_degree_sequence(501, 1.0, 1, 30, seed);
    long long sum = 0;
    for (int x : d) {
      EXPECT_GE(x, 1);
      EXPECT_LE(x, 30);
      sum += x;
    }
    EXPECT_EQ(sum % 2, 0);
  }
  EXPECT_THROW(powerlaw_degree_sequence(10, 1.0, 0, 5, 1), InvalidArgument);
  EXPECT_THROW(powerlaw_degree_sequence(10, 1.0, 3, 10, 1), InvalidArgument);
}

TEST(PowerLaw, GeneratedDegreesRespectCap) {
  GeneratorSpec spec = GeneratorSpec::defaults(GeneratorKind::kPowerLaw, 500, 5);
  DirectedGraph g = generate(spec);
  const std::size_t cap = static_cast<std::size_t>(std::floor(5.0 * std::sqrt(500.0)));
  // Realized out-degrees never exceed the sampled sequence.
  auto sampled = powerlaw_degree_sequence(500, 1.0, 1, static_cast<int>(cap),
                                          derive_seed(spec.seed, {1}));
  std::size_t dangling = 0;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    EXPECT_LE(g.out_degree(v), cap);
    EXPECT_LE(g.out_degree(v), static_cast<std::size_t>(sampled[v]));
    if (g.out_degree(v) == 0) ++dangling;
  }
  EXPECT_LT(dangling, 10u);
}

TEST(ConfigurationModel, ZeroDegreesGiveNoEdges) {
  EXPECT_TRUE(configuration_model({0, 0, 0}, {0, 0, 0}, 1).empty());
}

TEST(ConfigurationModel, ForcedMatching) {
  auto edges = configuration_model({0, 1}, {1, 0}, 1);
  ASSERT_EQ(edges.size(), 1u);
  EXPECT_EQ(edges[0], (Edge{0, 1, 1.0}));
}

TEST(ConfigurationModel, DiscardsOnlyReduceDegrees) {
  auto out = powerlaw_degree_sequence(300, 1.0, 1, 40, 2);
  auto in = out;
  Rng rng(3);
  rng.shuffle(std::span<int>(in));
  auto edges = configuration_model(in, out, 4);
  std::vector<int> realized_out(300, 0), realized_in(300, 0);
  for (const Edge& e : edges) {
    EXPECT_NE(e.source, e.target);
    ++realized_out[e.source];
    ++realized_in[e.target];
  }
  for (int v = 0; v < 300; ++v) {
    EXPECT_LE(realized_out[v], out[v]);
    EXPECT_LE(realized_in[v], in[v]);
  }
  EXPECT_THROW(configuration_model({1, 0}, {0, 0}, 1), InvalidArgument);
}

TEST(Generate, SameSeedSameGraph) {
  for (auto kind : {GeneratorKind::kCorePeriphery, GeneratorKind::kErdosRenyi,
                    GeneratorKind::kPowerLaw, GeneratorKind::kHierarchical}) {
    auto spec = GeneratorSpec::defaults(kind, 500, 99);
    EXPECT_EQ(generate(spec), generate(spec)) << to_string(kind);
  }
}

TEST(Generate, PublishedParametersSurvivePreparation) {
  for (auto kind : {GeneratorKind::kCorePeriphery, GeneratorKind::kErdosRenyi,
                    GeneratorKind::kPowerLaw, GeneratorKind::kHierarchical}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      auto spec = GeneratorSpec::defaults(kind, 500, seed);
      DirectedGraph g;
      ASSERT_NO_THROW(g = prepare_graph(generate(spec), 3, spec.skip_prune()))
          << to_string(kind) << " seed " << seed;
      EXPECT_GT(g.node_count(), 50u) << to_string(kind);
    }
  }
}

TEST(Generate, RejectsInvalidSpecs) {
  auto spec = GeneratorSpec::defaults(GeneratorKind::kErdosRenyi, 1, 1);
  EXPECT_THROW(generate(spec), InvalidArgument);
  spec = GeneratorSpec::defaults(GeneratorKind::kCorePeriphery, 100, 1);
  spec.kronecker = {1.2, 0, 0, 0};
  EXPECT_THROW(generate(spec), InvalidArgument);
  spec = GeneratorSpec::defaults(GeneratorKind::kPowerLaw, 100, 1);
  spec.powerlaw_gamma = 0.0;
  EXPECT_THROW(generate(spec), InvalidArgument);
  EXPECT_THROW(parse_generator_kind("lattice"), InvalidArgument);
  EXPECT_EQ(parse_generator_kind("core-periphery"), GeneratorKind::kCorePeriphery);
}

}  // namespace
}  // namespace socialdp
