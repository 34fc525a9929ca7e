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

#ifndef TETHER_VA__SCENARIO_HPP_
#define TETHER_VA__SCENARIO_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tether_va/planner.hpp"
#include "tether_va/viewpoint.hpp"
#include "tether_va/workspace.hpp"

namespace tva
{

inline constexpr const char * kScenarioSchema = "tether_va.scenario/1";
inline constexpr const char * kPlanSchema = "tether_va.plan/1";

struct Scenario
{
  /// Directory that relative file references resolve against.
  std::filesystem::path base_dir;
  /// "text" or "binary".
  std::string map_format{"text"};
  std::string map_path;
  Vec3 reel{Vec3::Zero()};
  Cell start{};
  TaskPose task;
  Affordance affordance{Affordance::kReachability};
  /// nullopt means every positive-reward cell.
  std::optional<std::vector<Cell>> candidates;
  RiskConfig risk;
  bool allow_contacts{true};
  double inflation_radius{0.25};
  RewardMode reward_mode{RewardMode::kTerminal};
  /// Empty selects the built-in manifolds.
  std::string manifolds_path;

  VoxelGrid grid{Eigen::Vector3i(1, 1, 1), 1.0};
};

/// Parse and validate. Unknown keys, missing fields and out-of-bounds
/// positions raise ConfigError naming the field.
Scenario parse_scenario(const std::string & text, const std::filesystem::path & base_dir);
Scenario load_scenario(const std::filesystem::path & path);

/// Fully resolved scenario with every default spelled out.
std::string scenario_to_json(const Scenario & s);

struct RunOptions
{
  std::optional<int> rays;
  bool no_inflate{false};
  std::optional<RewardMode> reward_mode;
  bool timestamps{false};
  std::uint64_t seed{0};
};

struct RunArtifacts
{
  std::string plan_json;
  std::string risk_csv;
  std::string tether_jsonl;
  std::string geometry;
  std::string resolved_json;
  PlanResult plan;
};

/// Load map, build reward field, plan, replay tether, format outputs.
RunArtifacts run_scenario(Scenario scenario, const RunOptions & options = {});

/// plan.json, risk.csv, tether.jsonl, geometry.txt, scenario.resolved.json
void write_artifacts(const RunArtifacts & artifacts, const std::filesystem::path & out_dir);

/// Line records: obstacle/inflated/waypoint/contact x y z, tether_segment x1 y1 z1 x2 y2 z2.
std::string format_geometry(
  const VoxelGrid & raw, const VoxelGrid & flight, const PlanResult & plan, const Vec3 & reel);

RewardMode parse_reward_mode(const std::string & name);
const char * reward_mode_name(RewardMode m);

}  // namespace tva

#endif  // TETHER_VA__SCENARIO_HPP_
