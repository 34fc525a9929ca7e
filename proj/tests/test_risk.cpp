// Copyright 2026 The tether_va Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "tether_va/errors.hpp"
#include "tether_va/risk.hpp"

using namespace tva;
using std::numbers::pi;

namespace
{

// Direct product written out longhand.
double product_oracle(const Eigen::MatrixXd & m)
{
  long double s = 1.0L;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) s *= 1.0L - m(i, k);
  return static_cast<double>(1.0L - s);
}

Eigen::MatrixXd random_profile(std::mt19937 & rng, int rows)
{
  std::uniform_real_distribution<double> u(0.0, 0.3);
  Eigen::MatrixXd m(rows, kNumRiskElements);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = u(rng);
  return m;
}

}  // namespace

TEST(Normalizers, ObstacleDistance)
{
  RiskNormalizers n;
  n.r_max = 0.5;
  EXPECT_NEAR(n.obstacle_distance(n.d0), 0.5 / std::exp(1.0), 1e-15);
  EXPECT_NEAR(n.obstacle_distance(n.d0), 0.1839, 1e-4);
  EXPECT_EQ(n.obstacle_distance(0.0), 0.5);
  EXPECT_LT(n.obstacle_distance(1e3), 1e-12);
}

TEST(Normalizers, TurnAndLength)
{
  const RiskNormalizers n;
  EXPECT_EQ(n.turn(0.0), 0.0);
  EXPECT_DOUBLE_EQ(n.turn(pi), n.c_t);
  EXPECT_DOUBLE_EQ(n.turn(pi / 2), n.c_t / 2);
  EXPECT_DOUBLE_EQ(n.action_length(0.25, 0.25), n.c_a);
  EXPECT_DOUBLE_EQ(n.action_length(0.25 * std::sqrt(3.0), 0.25), n.c_a * std::sqrt(3.0));
}

TEST(Normalizers, ContactCount)
{
  RiskNormalizers n;
  n.c_cp = 0.1;
  EXPECT_EQ(n.contact_count(0), 0.0);
  EXPECT_DOUBLE_EQ(n.contact_count(1), 0.1);
  EXPECT_DOUBLE_EQ(n.contact_count(2), 0.19);
}

TEST(Normalizers, TetherLengthSaturates)
{
  const RiskNormalizers n;
  EXPECT_EQ(n.tether_length(0.0), 0.0);
  EXPECT_DOUBLE_EQ(n.tether_length(n.L_budget / 2), n.c_L / 2);
  EXPECT_EQ(n.tether_length(n.L_budget * 3), n.tether_length(n.L_budget));
}

TEST(Normalizers, MonotoneAndBounded)
{
  RiskNormalizers n;
  n.r_max = 5.0;
  n.c_a = 2.0;
  double prev_d = 2.0, prev_v = 2.0, prev_a = -1.0, prev_c = -1.0;
  for (int i = 0; i <= 200; ++i) {
    const double x = 0.05 * i;
    const double d = n.obstacle_distance(x), v = n.visibility(x), a = n.action_length(x, 1.0);
    const double c = n.contact_count(static_cast<std::size_t>(i));
    for (double r : {d, v, a, c}) {
      EXPECT_GE(r, 0.0);
      EXPECT_LE(r, 1.0 - n.eps);
    }
    EXPECT_LE(d, prev_d);
    EXPECT_LE(v, prev_v);
    EXPECT_GE(a, prev_a);
    EXPECT_GE(c, prev_c);
    prev_d = d, prev_v = v, prev_a = a, prev_c = c;
  }
}

TEST(LocaleRisks, EmptyAndAdjacent)
{
  RiskConfig cfg;
  VoxelGrid empty({9, 9, 9}, 1.0);
  const LocaleRisk far = locale_risks(empty, {4, 4, 4}, cfg);
  EXPECT_EQ(far.obstacle_distance, cfg.normalizers.obstacle_distance(empty.diagonal()));
  EXPECT_LT(far.visibility, cfg.normalizers.r_max);

  VoxelGrid g({5, 5, 5}, 1.0);
  g.set_occupied({2, 2, 3}, true);
  const LocaleRisk near = locale_risks(g, {2, 2, 2}, cfg);
  EXPECT_DOUBLE_EQ(near.obstacle_distance, cfg.normalizers.obstacle_distance(1.0));
  EXPECT_GT(near.obstacle_distance, far.obstacle_distance);
  EXPECT_THROW(locale_risks(g, {2, 2, 3}, cfg), DomainError);
  EXPECT_THROW(locale_risks(g, {7, 2, 3}, cfg), DomainError);
}

TEST(LocaleRisks, IndependentOfQueryOrder)
{
  RiskConfig cfg;
  cfg.isovist_rays = 32;
  VoxelGrid g({6, 4, 6}, 0.5);
  g.set_occupied({3, 1, 3}, true);
  const LocaleRisk a = locale_risks(g, {1, 1, 1}, cfg);
  locale_risks(g, {4, 2, 4}, cfg);
  const LocaleRisk b = locale_risks(g, {1, 1, 1}, cfg);
  EXPECT_EQ(a.obstacle_distance, b.obstacle_distance);
  EXPECT_EQ(a.visibility, b.visibility);
}

TEST(ActionRisks, TurnCases)
{
  const RiskConfig cfg;
  const double c_t = cfg.normalizers.c_t;
  EXPECT_EQ(action_risks({0, 0, 0}, {1, 0, 0}, {2, 0, 0}, 0.25, cfg).turn, 0.0);
  EXPECT_DOUBLE_EQ(action_risks({0, 0, 0}, {1, 0, 0}, {0, 0, 0}, 0.25, cfg).turn, c_t);
  EXPECT_DOUBLE_EQ(action_risks({0, 0, 0}, {1, 0, 0}, {1, 1, 0}, 0.25, cfg).turn, c_t / 2);
  EXPECT_EQ(action_risks({0, 0, 0}, {1, 0, 0}, 0.25, cfg).turn, 0.0);
  EXPECT_DOUBLE_EQ(turn_angle({0, 0, 0}, {1, 0, 0}, {2, 1, 0}), pi / 4);
}

TEST(ActionRisks, LengthScalesWithStep)
{
  const RiskConfig cfg;
  const double c_a = cfg.normalizers.c_a;
  EXPECT_DOUBLE_EQ(action_risks({0, 0, 0}, {0, 0, 1}, 0.25, cfg).length, c_a);
  EXPECT_DOUBLE_EQ(action_risks({0, 0, 0}, {1, 1, 0}, 2.0, cfg).length, c_a * std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(action_risks({0, 0, 0}, {1, 1, 1}, 0.5, cfg).length, c_a * std::sqrt(3.0));
}

TEST(ActionRisks, RejectsNonAdjacent)
{
  const RiskConfig cfg;
  EXPECT_THROW(action_risks({0, 0, 0}, {2, 0, 0}, 1.0, cfg), DomainError);
  EXPECT_THROW(action_risks({0, 0, 0}, {0, 0, 0}, 1.0, cfg), DomainError);
  EXPECT_THROW(action_risks({0, 0, 0}, {0, 2, 0}, {0, 3, 0}, 1.0, cfg), DomainError);
}

TEST(TraverseRisks, Examples)
{
  RiskConfig cfg;
  cfg.normalizers.c_cp = 0.1;
  const TetherConfig home = make_tether(Vec3(1, 1, 1), Vec3(1, 1, 1));
  const TraverseRisk r0 = traverse_risks(home, cfg);
  EXPECT_EQ(r0.tether_length, 0.0);
  EXPECT_EQ(r0.contact_count, 0.0);

  const TetherConfig one{{Vec3(0, 0, 0), Vec3(3, 0, 0)}, Vec3(3, 0, 4)};
  const TraverseRisk r1 = traverse_risks(one, cfg);
  EXPECT_DOUBLE_EQ(r1.contact_count, 0.1);
  EXPECT_DOUBLE_EQ(r1.tether_length, cfg.normalizers.c_L * 7.0 / cfg.normalizers.L_budget);

  const TetherConfig two{{Vec3(0, 0, 0), Vec3(3, 0, 0), Vec3(3, 0, 4)}, Vec3(4, 0, 4)};
  EXPECT_DOUBLE_EQ(traverse_risks(two, cfg).contact_count, 0.19);
}

TEST(Aggregate, Examples)
{
  EXPECT_EQ(aggregate(Eigen::MatrixXd::Zero(3, 6)), 0.0);
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(2, 2, 0.1);
  EXPECT_NEAR(aggregate(m), 0.3439, 1e-15);
  m(1, 0) = 1.0;
  EXPECT_EQ(aggregate(m), 1.0);
  m(0, 0) = -0.1;
  EXPECT_THROW(aggregate(m), DomainError);
  m(0, 0) = 1.1;
  EXPECT_THROW(aggregate(m), DomainError);
  EXPECT_EQ(aggregate(Eigen::MatrixXd(0, 6)), 0.0);
}

TEST(Aggregate, MatchesProductAndSplits)
{
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> rows(1, 10);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = rows(rng);
    const Eigen::MatrixXd m = random_profile(rng, n);
    const double total = aggregate(m);
    EXPECT_NEAR(total, product_oracle(m), 1e-12);
    EXPECT_GE(total, 0.0);
    EXPECT_LE(total, 1.0);
    for (int cut = 0; cut <= n; ++cut) {
      const double a = aggregate(m.topRows(cut));
      const double b = aggregate(m.bottomRows(n - cut));
      EXPECT_NEAR(total, 1.0 - (1.0 - a) * (1.0 - b), 1e-12);
    }
  }
}

TEST(Aggregate, MonotoneInEveryEntry)
{
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::MatrixXd m = random_profile(rng, 4);
    const double before = aggregate(m);
    const Eigen::Index i = static_cast<Eigen::Index>(u(rng) * static_cast<double>(m.size())) % m.size();
    m(i) = m(i) + (1.0 - m(i)) * u(rng);
    EXPECT_GE(aggregate(m), before);
  }
}

TEST(SurvivalCost, LogOfSurvival)
{
  EXPECT_EQ(survival_cost(0.0), 0.0);
  EXPECT_NEAR(survival_cost(0.5), std::log(2.0), 1e-15);
  EXPECT_TRUE(std::isfinite(survival_cost(1.0)));
  EXPECT_NEAR(survival_cost(0.1) + survival_cost(0.2), -std::log(0.9 * 0.8), 1e-15);
}

TEST(RiskReport, RunningRiskEndsAtTotal)
{
  std::mt19937 rng(9);
  const std::vector<Cell> path = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {2, 1, 1}};
  const RiskProfile p = make_profile(random_profile(rng, 4));
  const std::string csv = format_risk_report(path, p);
  std::istringstream in(csv);
  std::string line, last;
  std::getline(in, line);
  EXPECT_EQ(line, "state,x,y,z,obstacle_distance,visibility,action_length,turn,tether_length,contact_count,survival,risk");
  int rows = 0;
  while (std::getline(in, line)) {
    last = line;
    ++rows;
  }
  EXPECT_EQ(rows, 4);
  EXPECT_EQ(last.rfind("3,2,1,1,", 0), 0u);
  EXPECT_NEAR(std::stod(last.substr(last.rfind(',') + 1)), p.total, 1e-12);
  EXPECT_THROW(format_risk_report({{0, 0, 0}}, p), DomainError);
}

TEST(FormatNumber, RoundTrips)
{
  std::mt19937 rng(10);
  std::normal_distribution<double> n(0.0, 100.0);
  for (int i = 0; i < 100; ++i) {
    const double v = n(rng);
    EXPECT_EQ(std::stod(format_number(v)), v);
  }
  EXPECT_EQ(format_number(0.25), "0.25");
  EXPECT_EQ(format_number(3.0), "3");
}
