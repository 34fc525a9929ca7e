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

#ifndef TETHER_VA__PLANNER_HPP_
#define TETHER_VA__PLANNER_HPP_

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

#include "tether_va/risk.hpp"
#include "tether_va/tether.hpp"
#include "tether_va/workspace.hpp"

namespace tva
{

enum class RewardMode { kTerminal, kIntegrated };

struct PlannerConfig
{
  RiskConfig risk;
  /// Floor on the risk in the utility denominator.
  double utility_floor{1e-3};
  RewardMode reward_mode{RewardMode::kTerminal};
  bool allow_contacts{true};
  /// Waypoint spacing for tether replay, as a fraction of the resolution.
  double densify_fraction{0.25};
};

struct PlanResult
{
  std::vector<Cell> path;
  std::vector<Vec3> waypoints;
  /// Per-state values of all six elements.
  RiskProfile profile;
  /// Sum of -log survival over locale and action elements (what the search minimizes).
  double search_cost{0.0};
  double exact_risk{0.0};
  double reward{0.0};
  double utility{0.0};
  std::vector<TetherTraceRecord> trace;
  TetherConfig tether;
};

/// One state's search cost: -log survival of its locale and action elements,
/// summed in element order.
double state_search_cost(const LocaleRisk & locale, const ActionRisk & action, double eps);

/// 26-connected move between free cells that does not cut an occupied corner.
bool valid_move(const VoxelGrid & grid, const Cell & from, const Cell & to);

/// Cell centers joined by straight pieces no longer than `step`.
std::vector<Vec3> densify(const VoxelGrid & grid, const std::vector<Cell> & path, double step);

/// Minimum-risk planner over (cell, incoming direction) states.
///
/// `flight` decides where the vehicle may go; `obstacles` is the raw map used
/// for risk features and tether contacts. Both must share geometry.
class RiskAwarePlanner
{
public:
  RiskAwarePlanner(
    const VoxelGrid & flight, const VoxelGrid & obstacles, const Vec3 & reel,
    PlannerConfig config = {});

  /// Single-source search over augmented states.
  struct SearchTree
  {
    Cell start;
    std::vector<double> cost;
    std::vector<double> length;
    std::vector<std::int64_t> parent;
  };
  SearchTree search_from(const Cell & start) const;

  /// Best path to `goal` in a finished tree, or nullopt if unreachable.
  std::optional<std::vector<Cell>> extract(const SearchTree & tree, const Cell & goal) const;

  /// Minimum locale+action risk path with exact full risk attached.
  PlanResult min_risk_search(const Cell & start, const Cell & goal) const;

  /// Full risk profile and tether replay of a given path.
  PlanResult evaluate(const std::vector<Cell> & path) const;

  /// Plan to every candidate (all positive-reward cells when empty) and keep
  /// the best reward-to-risk ratio.
  PlanResult select_viewpoint(
    const Cell & start, const Eigen::VectorXd & reward, std::vector<Cell> candidates = {}) const;

  const LocaleRisk & locale(const Cell & c) const;
  /// Vehicle may occupy this cell.
  bool traversable(const Cell & c) const;

  const PlannerConfig & config() const { return config_; }
  const VoxelGrid & flight_grid() const { return flight_; }
  const VoxelGrid & obstacle_grid() const { return obstacles_; }

private:
  double reward_of(const std::vector<Cell> & path, const Eigen::VectorXd & reward) const;
  bool lex_less(const SearchTree & tree, std::int64_t a, std::int64_t b) const;

  const VoxelGrid & flight_;
  const VoxelGrid & obstacles_;
  Vec3 reel_;
  PlannerConfig config_;
  mutable std::vector<std::optional<LocaleRisk>> locale_cache_;
  mutable std::vector<std::int8_t> reel_visible_;
};

/// Single-grid convenience: the grid is both flight and obstacle map and the
/// reel sits at the start cell center.
PlanResult min_risk_search(
  const VoxelGrid & grid, const Cell & start, const Cell & goal, const PlannerConfig & config = {});

}  // namespace tva

#endif  // TETHER_VA__PLANNER_HPP_
