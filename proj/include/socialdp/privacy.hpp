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
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "socialdp/cascade.hpp"
#include "socialdp/error.hpp"
#include "socialdp/rng.hpp"

namespace socialdp {

// Privacy loss of randomized response that reports the truth with
// probability beta and a fair coin otherwise.
inline double epsilon_of_beta(double beta) {
  if (!(beta >= 0.0 && beta < 1.0)) throw InvalidArgument("beta must be in [0, 1)");
  return std::log((1.0 + beta) / (1.0 - beta));
}

// Randomized response over one bit. delta is always 0.
class RRMechanism {
 public:
  explicit RRMechanism(double beta) : beta_(beta), epsilon_(epsilon_of_beta(beta)) {}

  double beta() const noexcept { return beta_; }
  double epsilon() const noexcept { return epsilon_; }
  double delta() const noexcept { return 0.0; }

  // Pr[z | x].
  double p_z_given_x(int z, int x) const noexcept {
    double p1 = x == 1 ? (1.0 + beta_) / 2.0 : (1.0 - beta_) / 2.0;
    return z == 1 ? p1 : 1.0 - p1;
  }

  // Pr[z=1 | x=1] - Pr[z=1 | x=0], which equals beta.
  double contrast() const noexcept { return p_z_given_x(1, 1) - p_z_given_x(1, 0); }

  std::uint8_t apply(std::uint8_t x, Rng& rng) const {
    double u = rng.uniform();
    if (u < beta_) return x;
    return u < beta_ + (1.0 - beta_) / 2.0 ? 1 : 0;
  }

 private:
  double beta_;
  double epsilon_;
};

struct PerturbedReports {
  std::vector<std::uint8_t> z;
  RRMechanism mechanism{0.0};
};

inline PerturbedReports perturb(const GroundTruth& truth, double beta, std::uint64_t seed) {
  PerturbedReports reports{{}, RRMechanism(beta)};
  Rng rng(seed);
  reports.z.reserve(truth.x.size());
  for (std::uint8_t x : truth.x) reports.z.push_back(reports.mechanism.apply(x, rng));
  return reports;
}

// Largest AUC any classifier can reach from (epsilon, delta)-DP reports
// alone: 1 - (1 - delta) / (e^epsilon + 1).
inline double auc_upper_bound(double epsilon, double delta) {
  if (!(epsilon >= 0.0)) throw InvalidArgument("epsilon must be >= 0");
  if (!(delta >= 0.0 && delta <= 1.0)) throw InvalidArgument("delta must be in [0, 1]");
  if (std::isinf(epsilon)) return 1.0;
  return 1.0 - (1.0 - delta) / (std::exp(epsilon) + 1.0);
}

// Posterior Pr[x_v = 1 | z_v] under the mechanism and a prior Pr[x = 1].
inline std::vector<double> bayesian_scores(const PerturbedReports& reports,
                                           const RRMechanism& mechanism, double prior_p1) {
  if (!(prior_p1 > 0.0 && prior_p1 < 1.0)) throw InvalidArgument("prior must be in (0, 1)");
  double level[2];
  for (int z = 0; z < 2; ++z) {
    double a = mechanism.p_z_given_x(z, 1) * prior_p1;
    double b = mechanism.p_z_given_x(z, 0) * (1.0 - prior_p1);
    level[z] = a / (a + b);
  }
  std::vector<double> scores;
  scores.reserve(reports.z.size());
  for (std::uint8_t z : reports.z) scores.push_back(level[z ? 1 : 0]);
  return scores;
}

struct PopulationEstimate {
  std::size_t n = 0;
  double p_tilde_z = 0.0;      // fraction reporting 1
  double p_tilde_x_raw = 0.0;  // debiased, unclamped
  double p_tilde_x = 0.0;      // debiased, clamped to [0, 1]
  double radius = 0.0;         // Chernoff half-width sqrt(ln n / (2 n c^2))
};

inline PopulationEstimate estimate_population(const PerturbedReports& reports,
                                              const RRMechanism& mechanism) {
  const std::size_t n = reports.z.size();
  if (n < 2) throw InvalidArgument("need at least two reports");
  const double c = mechanism.contrast();
  if (!(c > 0.0)) throw InvalidArgument("estimator undefined when beta = 0");
  PopulationEstimate est;
  est.n = n;
  std::size_t ones = std::count(reports.z.begin(), reports.z.end(), 1);
  est.p_tilde_z = static_cast<double>(ones) / static_cast<double>(n);
  est.p_tilde_x_raw = (est.p_tilde_z - mechanism.p_z_given_x(1, 0)) / c;
  est.p_tilde_x = std::clamp(est.p_tilde_x_raw, 0.0, 1.0);
  const double nd = static_cast<double>(n);
  est.radius = std::sqrt(std::log(nd) / (2.0 * nd * c * c));
  return est;
}

// CSV: node_id,z
inline void write_reports_csv(std::ostream& out, const PerturbedReports& reports) {
  out << "node_id,z\n";
  for (std::size_t v = 0; v < reports.z.size(); ++v) out << v << ',' << int(reports.z[v]) << '\n';
}

inline PerturbedReports read_reports_csv(std::istream& in, double beta) {
  PerturbedReports reports{{}, RRMechanism(beta)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.rfind("node_id", 0) == 0) continue;
    unsigned long long id = 0;
    int z = 0;
    if (std::sscanf(line.c_str(), "%llu,%d", &id, &z) != 2 || (z != 0 && z != 1)) {
      throw ParseError("expected node_id,z", line_no);
    }
    if (id != reports.z.size()) throw ParseError("node ids must be 0..n-1 in order", line_no);
    reports.z.push_back(static_cast<std::uint8_t>(z));
  }
  return reports;
}

}  // namespace socialdp
