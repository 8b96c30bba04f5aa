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

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "socialdp/metrics.hpp"

namespace socialdp {
namespace {

using Labels = std::vector<std::uint8_t>;

TEST(Auc, PerfectOrdering) {
  std::vector<double> s{0.1, 0.2, 0.8, 0.9};
  EXPECT_EQ(auc(s, Labels{0, 0, 1, 1}), 1.0);
  EXPECT_EQ(auc(s, Labels{1, 1, 0, 0}), 0.0);
}

TEST(Auc, AllTiesGiveOneHalf) {
  std::vector<double> s(6, 0.3);
  EXPECT_EQ(auc(s, Labels{1, 0, 1, 0, 0, 1}), 0.5);
}

TEST(Auc, SmallWorkedExample) {
  Labels y{1, 0, 1, 0};
  EXPECT_EQ(auc(std::vector<double>{0.9, 0.4, 0.6, 0.1}, y), 1.0);
  EXPECT_EQ(auc(std::vector<double>{0.3, 0.4, 0.6, 0.1}, y), 0.75);
}

TEST(Auc, DegenerateLabelsRejected) {
  std::vector<double> s{0.1, 0.2};
  EXPECT_THROW(auc(s, Labels{1, 1}), DegenerateResult);
  EXPECT_THROW(auc(s, Labels{0, 0}), DegenerateResult);
  EXPECT_THROW(auc(s, Labels{0}), InvalidArgument);
}

TEST(Auc, EqualsPairEnumeration) {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 2 + rng() % 199;
    std::vector<double> s(n);
    Labels y(n);
    // Coarse scores so ties are common.
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng() % 12) / 4.0;
      y[i] = rng() % 3 == 0;
    }
    y[0] = 1;
    y[1] = 0;
    EXPECT_EQ(auc(s, y), oracle::brute_force_auc(s, y));
  }
}

TEST(Auc, RankOnlyAndComplementary) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  std::vector<double> s(300), transformed(300), negated(300);
  Labels y(300);
  for (std::size_t i = 0; i < 300; ++i) {
    y[i] = i % 4 == 0;
    s[i] = normal(rng) + (y[i] ? 0.7 : 0.0);
    transformed[i] = std::atan(s[i]) * 5.0 + 2.0;
    negated[i] = -s[i];
  }
  EXPECT_DOUBLE_EQ(auc(transformed, y), auc(s, y));
  EXPECT_NEAR(auc(s, y) + auc(negated, y), 1.0, 1e-12);
}

TEST(Auc, RandomScoresNearOneHalf) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u;
  std::vector<double> s(20000);
  Labels y(20000);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = u(rng);
    y[i] = i % 2;
  }
  EXPECT_NEAR(auc(s, y), 0.5, 0.02);
}

TEST(ExpectedAccuracy, Formula) {
  std::vector<double> x_hat{1.0, 0.5, 0.5, 0.8, 0.3};
  auto acc = expected_accuracy(x_hat, Labels{1, 1, 0, 0, 1});
  EXPECT_EQ(acc, (std::vector<double>{1.0, 0.5, 0.5, 1.0 - 0.8, 0.3}));
  EXPECT_THROW(expected_accuracy(x_hat, Labels{1}), InvalidArgument);
}

TEST(Correlate, PerfectAndInverse) {
  std::vector<double> v{0.1, 0.5, 0.2, 0.9, 0.4};
  std::vector<double> neg;
  for (double x : v) neg.push_back(-x);
  auto same = correlate(v, v);
  EXPECT_NEAR(same.pearson_r, 1.0, 1e-12);
  EXPECT_EQ(same.p_value, 0.0);
  EXPECT_NEAR(correlate(v, neg).pearson_r, -1.0, 1e-12);
}

TEST(Correlate, MatchesReferenceValues) {
  // Reference values from an independent statistics package.
  std::vector<double> x{1, 2, 3, 4, 5, 6, 7, 8}, y{2, 1, 4, 3, 7, 8, 6, 9};
  auto c = correlate(x, y);
  EXPECT_NEAR(c.pearson_r, 0.8964214570007951, 1e-12);
  EXPECT_NEAR(c.p_value, 0.002566766096253243, 1e-9);
  EXPECT_EQ(c.n, 8u);
  std::vector<double> a{0.3, 1.2, -0.5, 2.2, 0.9, -1.1, 0.4, 1.7, 0.0, -0.2};
  std::vector<double> b{1.0, 0.2, 0.5, -0.3, 0.8, 0.1, -0.9, 0.6, 0.3, 0.4};
  c = correlate(a, b);
  EXPECT_NEAR(c.pearson_r, -0.09983576902906288, 1e-12);
  EXPECT_NEAR(c.p_value, 0.7837730085976796, 1e-9);
}

TEST(Correlate, IndependentSamplesNearZero) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  std::vector<double> a(10000), b(10000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = normal(rng);
    b[i] = normal(rng);
  }
  EXPECT_LT(std::abs(correlate(a, b).pearson_r), 0.05);
}

TEST(Correlate, RejectsDegenerateInput) {
  std::vector<double> flat{1, 1, 1, 1}, v{1, 2, 3, 4};
  EXPECT_THROW(correlate(flat, v), DegenerateResult);
  EXPECT_THROW(correlate(std::vector<double>{1, 2}, std::vector<double>{1, 2}),
               InvalidArgument);
}

TEST(Evaluate, BayesianScoresTrackTheBound) {
  GroundTruth truth;
  for (int i = 0; i < 20000; ++i) truth.x.push_back(i % 2);
  auto reports = perturb(truth, 0.5, 5);
  auto scores = bayesian_scores(reports, reports.mechanism, 0.5);
  auto r = evaluate(scores, truth, reports.mechanism, {});
  EXPECT_NEAR(r.upper_bound, 0.75, 1e-12);
  EXPECT_NEAR(r.auc, 0.75, 0.01);
  EXPECT_EQ(r.beats_bound, r.auc > r.upper_bound);
  EXPECT_TRUE(r.correlations.empty());
}

TEST(Evaluate, CorrelationsAgainstNodeMetrics) {
  GroundTruth truth;
  truth.x = {1, 0, 1, 0, 1, 0};
  std::vector<double> x_hat{0.9, 0.2, 0.6, 0.5, 0.7, 0.1};
  std::vector<NodeMetrics> metrics(6);
  for (std::size_t v = 0; v < 6; ++v) {
    metrics[v].weighted_out_degree = static_cast<double>(v);
    metrics[v].weighted_in_degree = 1.0;  // constant: left out
    metrics[v].pagerank = 1.0 / (1.0 + static_cast<double>(v));
  }
  auto r = evaluate(x_hat, truth, RRMechanism(0.9), metrics);
  EXPECT_EQ(r.correlations.count("weighted_in_degree"), 0u);
  ASSERT_EQ(r.correlations.count("weighted_out_degree"), 1u);
  auto acc = expected_accuracy(x_hat, truth.x);
  std::vector<double> out{0, 1, 2, 3, 4, 5};
  EXPECT_DOUBLE_EQ(r.correlations["weighted_out_degree"].pearson_r,
                   correlate(acc, out).pearson_r);
  auto j = to_json(r);
  EXPECT_TRUE(j.contains("auc"));
  EXPECT_TRUE(j["correlations"].contains("pagerank"));
  EXPECT_NEAR(j["mean_expected_accuracy"].get<double>(),
              (0.9 + 0.8 + 0.6 + 0.5 + 0.7 + 0.9) / 6.0, 1e-12);
}

}  // namespace
}  // namespace socialdp
