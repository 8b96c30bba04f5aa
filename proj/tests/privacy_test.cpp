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
#include <sstream>

#include "oracles.hpp"
#include "socialdp/privacy.hpp"

namespace socialdp {
namespace {

GroundTruth balanced_truth(std::size_t n) {
  GroundTruth t;
  t.x.resize(n);
  for (std::size_t v = 0; v < n; ++v) t.x[v] = v % 2;
  return t;
}

GroundTruth constant_truth(std::size_t n, std::uint8_t value) {
  GroundTruth t;
  t.x.assign(n, value);
  return t;
}

double fraction_of_ones(const std::vector<std::uint8_t>& z) {
  return static_cast<double>(std::count(z.begin(), z.end(), 1)) / static_cast<double>(z.size());
}

TEST(RandomizedResponse, NearOneBetaIsIdentity) {
  auto truth = balanced_truth(10000);
  auto reports = perturb(truth, 1.0 - 1e-12, 3);
  EXPECT_EQ(reports.z, truth.x);
}

TEST(RandomizedResponse, ZeroBetaIsPureNoise) {
  auto reports = perturb(constant_truth(10000, 1), 0.0, 4);
  EXPECT_NEAR(fraction_of_ones(reports.z), 0.5, 0.02);
}

TEST(RandomizedResponse, ActiveNodesReportOneAtExpectedRate) {
  auto reports = perturb(constant_truth(10000, 1), 0.5, 5);
  EXPECT_NEAR(fraction_of_ones(reports.z), 0.75, 0.02);
  reports = perturb(constant_truth(10000, 0), 0.5, 6);
  EXPECT_NEAR(fraction_of_ones(reports.z), 0.25, 0.02);
}

TEST(RandomizedResponse, DeterministicAndValidated) {
  auto truth = balanced_truth(500);
  EXPECT_EQ(perturb(truth, 0.3, 8).z, perturb(truth, 0.3, 8).z);
  EXPECT_THROW(perturb(truth, 1.0, 1), InvalidArgument);
  EXPECT_THROW(perturb(truth, -0.1, 1), InvalidArgument);
}

TEST(RandomizedResponse, ConditionalTable) {
  for (double beta : {0.0, 0.1, 0.5, 0.9}) {
    RRMechanism m(beta);
    EXPECT_DOUBLE_EQ(m.p_z_given_x(1, 1), (1.0 + beta) / 2.0);
    EXPECT_DOUBLE_EQ(m.p_z_given_x(1, 0), (1.0 - beta) / 2.0);
    for (int x = 0; x < 2; ++x) EXPECT_DOUBLE_EQ(m.p_z_given_x(0, x) + m.p_z_given_x(1, x), 1.0);
    EXPECT_NEAR(m.contrast(), beta, 1e-15);
    EXPECT_EQ(m.delta(), 0.0);
  }
}

TEST(RandomizedResponse, PrivacyInequalityIsTight) {
  for (double beta : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    RRMechanism m(beta);
    const double bound = std::exp(m.epsilon());
    double worst = 0.0;
    for (int z = 0; z < 2; ++z) {
      for (int x = 0; x < 2; ++x) {
        const double ratio = m.p_z_given_x(z, x) / m.p_z_given_x(z, 1 - x);
        EXPECT_LE(ratio, bound * (1.0 + 1e-12));
        worst = std::max(worst, ratio);
      }
    }
    EXPECT_NEAR(worst, bound, 1e-9 * bound);
  }
}

TEST(Epsilon, PublishedValues) {
  EXPECT_NEAR(epsilon_of_beta(0.5), 1.099, 5e-4);
  EXPECT_NEAR(epsilon_of_beta(0.9), 2.944, 5e-4);
  EXPECT_EQ(epsilon_of_beta(0.0), 0.0);
  EXPECT_THROW(epsilon_of_beta(1.0), InvalidArgument);
}

TEST(AucBound, ClosedForm) {
  EXPECT_NEAR(auc_upper_bound(1.099, 0.0), 0.750, 5e-4);
  EXPECT_DOUBLE_EQ(auc_upper_bound(0.0, 0.0), 0.5);
  EXPECT_DOUBLE_EQ(auc_upper_bound(2.0, 1.0), 1.0);
  // With delta = 0 the bound is exactly (1 + beta) / 2.
  for (double beta : {0.1, 0.3, 0.7}) {
    EXPECT_NEAR(auc_upper_bound(epsilon_of_beta(beta), 0.0), (1.0 + beta) / 2.0, 1e-12);
  }
  EXPECT_THROW(auc_upper_bound(-1.0, 0.0), InvalidArgument);
  EXPECT_THROW(auc_upper_bound(1.0, 1.5), InvalidArgument);
}

TEST(AucBound, MonotoneInBothArguments) {
  double previous = 0.0;
  for (double eps = 0.0; eps <= 5.0; eps += 0.25) {
    const double b = auc_upper_bound(eps, 0.1);
    EXPECT_GT(b, previous);
    previous = b;
  }
  previous = 0.0;
  for (double delta = 0.0; delta <= 1.0; delta += 0.1) {
    const double b = auc_upper_bound(1.0, delta);
    EXPECT_GT(b, previous);
    previous = b;
  }
}

TEST(Bayesian, UninformativeReportsReturnPrior) {
  auto reports = perturb(balanced_truth(100), 0.0, 1);
  for (double s : bayesian_scores(reports, reports.mechanism, 0.3)) EXPECT_NEAR(s, 0.3, 1e-15);
}

TEST(Bayesian, PosteriorForPositiveReport) {
  PerturbedReports reports{{1, 0}, RRMechanism(0.5)};
  auto s = bayesian_scores(reports, reports.mechanism, 0.5);
  EXPECT_DOUBLE_EQ(s[0], 0.75);
  EXPECT_DOUBLE_EQ(s[1], 0.25);
  EXPECT_THROW(bayesian_scores(reports, reports.mechanism, 1.0), InvalidArgument);
}

TEST(Bayesian, AucAttainsBoundOnBalancedData) {
  for (double beta : {0.3, 0.5, 0.9}) {
    auto truth = balanced_truth(10000);
    auto reports = perturb(truth, beta, 10);
    auto scores = bayesian_scores(reports, reports.mechanism, 0.5);
    const double a = oracle::brute_force_auc(scores, truth.x);
    const RRMechanism& m = reports.mechanism;
    EXPECT_NEAR(a, (m.p_z_given_x(1, 1) + m.p_z_given_x(0, 0)) / 2.0, 0.01) << beta;
    EXPECT_NEAR(a, auc_upper_bound(m.epsilon(), 0.0), 0.01) << beta;
    // Any strictly increasing transform ranks identically.
    for (double& s : scores) s = std::exp(3.0 * s) - 7.0;
    EXPECT_DOUBLE_EQ(oracle::brute_force_auc(scores, truth.x), a);
  }
}

TEST(Population, RadiusFormula) {
  PerturbedReports reports{std::vector<std::uint8_t>(1000, 0), RRMechanism(0.5)};
  auto est = estimate_population(reports, reports.mechanism);
  EXPECT_NEAR(est.radius, 0.1175, 5e-5);
  EXPECT_NEAR(est.radius, std::sqrt(std::log(1000.0) / (2.0 * 1000.0 * 0.25)), 1e-15);
  EXPECT_EQ(est.p_tilde_z, 0.0);
  EXPECT_DOUBLE_EQ(est.p_tilde_x_raw, -0.5);
  EXPECT_EQ(est.p_tilde_x, 0.0);
}

TEST(Population, AllOnesNearIdentityMechanism) {
  PerturbedReports reports{std::vector<std::uint8_t>(50, 1), RRMechanism(1.0 - 1e-9)};
  auto est = estimate_population(reports, reports.mechanism);
  EXPECT_DOUBLE_EQ(est.p_tilde_x, 1.0);
}

TEST(Population, UndefinedWithoutSignal) {
  PerturbedReports reports{std::vector<std::uint8_t>(50, 1), RRMechanism(0.0)};
  EXPECT_THROW(estimate_population(reports, reports.mechanism), InvalidArgument);
  PerturbedReports one{{1}, RRMechanism(0.5)};
  EXPECT_THROW(estimate_population(one, one.mechanism), InvalidArgument);
}

TEST(Population, ChernoffRadiusCovers) {
  GroundTruth truth;
  truth.x.resize(500);
  for (std::size_t v = 0; v < 500; ++v) truth.x[v] = (v % 10) < 3;
  const double mean = 0.3;
  int covered = 0;
  double raw_sum = 0.0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    auto reports = perturb(truth, 0.5, derive_seed(31, {s}));
    auto est = estimate_population(reports, reports.mechanism);
    if (std::abs(est.p_tilde_x - mean) <= est.radius) ++covered;
    raw_sum += est.p_tilde_x_raw;
  }
  EXPECT_GE(covered, 190);
  // Unbiased: the standard error of the mean over 200 draws is about 0.003.
  EXPECT_NEAR(raw_sum / 200.0, mean, 0.012);
}

TEST(Reports, CsvRoundTrip) {
  auto reports = perturb(balanced_truth(40), 0.5, 2);
  std::stringstream io;
  write_reports_csv(io, reports);
  auto back = read_reports_csv(io, 0.5);
  EXPECT_EQ(back.z, reports.z);
  EXPECT_DOUBLE_EQ(back.mechanism.beta(), 0.5);
  std::istringstream gap("node_id,z\n1,0\n");
  EXPECT_THROW(read_reports_csv(gap, 0.5), ParseError);
}

}  // namespace
}  // namespace socialdp
