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

#ifndef TETHER_VA__RISK_HPP_
#define TETHER_VA__RISK_HPP_

#include <Eigen/Core>

#include <array>
#include <string>
#include <vector>

#include "tether_va/tether.hpp"
#include "tether_va/workspace.hpp"

namespace tva
{

enum class RiskElement : int {
  kObstacleDistance = 0,
  kVisibility = 1,
  kActionLength = 2,
  kTurn = 3,
  kTetherLength = 4,
  kContactCount = 5,
};
inline constexpr int kNumRiskElements = 6;

/// How far back in the path history an element looks.
enum class RiskCategory { kLocale, kAction, kTraverse };

RiskCategory category_of(RiskElement e);
const char * element_name(RiskElement e);

/// Monotone maps from raw features to per-state failure probabilities.
/// Every output is clamped to [0, 1 - eps].
struct RiskNormalizers
{
  double r_max{0.2};
  double d0{1.0};
  double v0{2.0};
  double c_a{0.05};
  double c_t{0.1};
  double c_L{0.1};
  double L_budget{20.0};
  double c_cp{0.05};
  double eps{1e-6};

  double obstacle_distance(double d) const;
  double visibility(double v) const;
  /// `unit_step` is the length of one face-adjacent move.
  double action_length(double length, double unit_step) const;
  double turn(double angle) const;
  double tether_length(double L) const;
  double contact_count(std::size_t m) const;

  double clamp(double r) const;
};

struct RiskConfig
{
  RiskNormalizers normalizers;
  int isovist_rays{64};
  /// <= 0 selects the grid diagonal.
  double isovist_range{0.0};
  double distance_range{0.0};
};

struct LocaleRisk
{
  double obstacle_distance{0.0};
  double visibility{0.0};
};

struct ActionRisk
{
  double length{0.0};
  double turn{0.0};
};

struct TraverseRisk
{
  double tether_length{0.0};
  double contact_count{0.0};
};

/// Risks of being at free cell s. Depend on nothing but the map.
LocaleRisk locale_risks(const VoxelGrid & grid, const Cell & s, const RiskConfig & cfg);

/// Risks of the move cur -> next, with the turn measured against prev -> cur.
ActionRisk action_risks(
  const Cell & prev, const Cell & cur, const Cell & next, double resolution,
  const RiskConfig & cfg);
/// First move of a path: no turn term.
ActionRisk action_risks(
  const Cell & cur, const Cell & next, double resolution, const RiskConfig & cfg);

/// Turn angle between consecutive 26-neighbor moves, in [0, pi].
double turn_angle(const Cell & prev, const Cell & cur, const Cell & next);

TraverseRisk traverse_risks(const TetherConfig & t, const RiskConfig & cfg);

/// Rows are path states, columns follow RiskElement order.
using RiskMatrix = Eigen::Matrix<double, Eigen::Dynamic, kNumRiskElements>;

struct RiskProfile
{
  RiskMatrix values;
  double total{0.0};
};

/// Path risk 1 - prod_i prod_k (1 - r_k(i)). Entries must lie in [0, 1].
double aggregate(const Eigen::Ref<const Eigen::MatrixXd> & values);

RiskProfile make_profile(RiskMatrix values);

/// -log of one element's survival probability, clamped away from zero survival.
double survival_cost(double r, double eps = 1e-6);

/// CSV rows: state, cell, six element values, survival so far, running risk.
std::string format_risk_report(const std::vector<Cell> & path, const RiskProfile & profile);

/// Shortest text that round-trips the double.
std::string format_number(double v);

}  // namespace tva

#endif  // TETHER_VA__RISK_HPP_
