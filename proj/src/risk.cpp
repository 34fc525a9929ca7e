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

#include "tether_va/risk.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tether_va/errors.hpp"

namespace tva
{

RiskCategory category_of(RiskElement e)
{
  switch (e) {
    case RiskElement::kObstacleDistance:
    case RiskElement::kVisibility:
      return RiskCategory::kLocale;
    case RiskElement::kActionLength:
    case RiskElement::kTurn:
      return RiskCategory::kAction;
    case RiskElement::kTetherLength:
    case RiskElement::kContactCount:
      return RiskCategory::kTraverse;
  }
  return RiskCategory::kLocale;
}

const char * element_name(RiskElement e)
{
  switch (e) {
    case RiskElement::kObstacleDistance:
      return "obstacle_distance";
    case RiskElement::kVisibility:
      return "visibility";
    case RiskElement::kActionLength:
      return "action_length";
    case RiskElement::kTurn:
      return "turn";
    case RiskElement::kTetherLength:
      return "tether_length";
    case RiskElement::kContactCount:
      return "contact_count";
  }
  return "?";
}

double RiskNormalizers::clamp(double r) const { return std::clamp(r, 0.0, 1.0 - eps); }

double RiskNormalizers::obstacle_distance(double d) const
{
  return clamp(r_max * std::exp(-std::max(d, 0.0) / d0));
}

double RiskNormalizers::visibility(double v) const
{
  return clamp(r_max * std::exp(-std::max(v, 0.0) / v0));
}

double RiskNormalizers::action_length(double length, double unit_step) const
{
  return clamp(c_a * length / unit_step);
}

double RiskNormalizers::turn(double angle) const
{
  return clamp(c_t * angle / std::numbers::pi);
}

double RiskNormalizers::tether_length(double L) const
{
  return clamp(c_L * std::min(L / L_budget, 1.0));
}

double RiskNormalizers::contact_count(std::size_t m) const
{
  return clamp(1.0 - std::pow(1.0 - c_cp, static_cast<double>(m)));
}

LocaleRisk locale_risks(const VoxelGrid & grid, const Cell & s, const RiskConfig & cfg)
{
  if (!grid.in_bounds(s)) {
    throw DomainError("locale risk: cell out of bounds");
  }
  if (grid.occupied(s)) {
    throw DomainError("locale risk: cell is occupied");
  }
  const Vec3 p = grid.center(s);
  const double dist_range = cfg.distance_range > 0.0 ? cfg.distance_range : grid.diagonal();
  const double d = distance_to_obstacle(grid, p, dist_range);
  const double v = isovist_visibility(grid, p, cfg.isovist_rays, cfg.isovist_range);
  return {cfg.normalizers.obstacle_distance(d), cfg.normalizers.visibility(v)};
}

namespace
{

void require_adjacent(const Cell & a, const Cell & b)
{
  const Cell d = b - a;
  const int m = std::max({std::abs(d.x), std::abs(d.y), std::abs(d.z)});
  if (m != 1) {
    throw DomainError("action risk: cells are not 26-adjacent");
  }
}

}  // namespace

double turn_angle(const Cell & prev, const Cell & cur, const Cell & next)
{
  const Eigen::Vector3d a = (cur - prev).vec().cast<double>();
  const Eigen::Vector3d b = (next - cur).vec().cast<double>();
  const double c = a.dot(b) / (a.norm() * b.norm());
  return std::acos(std::clamp(c, -1.0, 1.0));
}

ActionRisk action_risks(
  const Cell & cur, const Cell & next, double resolution, const RiskConfig & cfg)
{
  require_adjacent(cur, next);
  const double len = (next - cur).vec().cast<double>().norm() * resolution;
  return {cfg.normalizers.action_length(len, resolution), 0.0};
}

ActionRisk action_risks(
  const Cell & prev, const Cell & cur, const Cell & next, double resolution,
  const RiskConfig & cfg)
{
  require_adjacent(prev, cur);
  ActionRisk r = action_risks(cur, next, resolution, cfg);
  r.turn = cfg.normalizers.turn(turn_angle(prev, cur, next));
  return r;
}

TraverseRisk traverse_risks(const TetherConfig & t, const RiskConfig & cfg)
{
  const Vec3 d = t.vehicle - t.last_contact();
  // A vehicle sitting on the reel has paid out no tether; angles are irrelevant here.
  const double L = static_length(t) + d.norm();
  return {cfg.normalizers.tether_length(L), cfg.normalizers.contact_count(t.contact_count())};
}

double aggregate(const Eigen::Ref<const Eigen::MatrixXd> & values)
{
  double survival = 1.0;
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index k = 0; k < values.cols(); ++k) {
      const double r = values(i, k);
      if (!(r >= 0.0 && r <= 1.0)) {
        throw DomainError("risk element value outside [0, 1]");
      }
      survival *= 1.0 - r;
    }
  }
  return 1.0 - survival;
}

RiskProfile make_profile(RiskMatrix values)
{
  RiskProfile p;
  p.total = aggregate(values);
  p.values = std::move(values);
  return p;
}

double survival_cost(double r, double eps)
{
  return -std::log1p(-std::clamp(r, 0.0, 1.0 - eps));
}

std::string format_number(double v)
{
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_risk_report(const std::vector<Cell> & path, const RiskProfile & profile)
{
  if (static_cast<Eigen::Index>(path.size()) != profile.values.rows()) {
    throw DomainError("risk report: path and profile sizes differ");
  }
  std::ostringstream out;
  out << "state,x,y,z";
  for (int k = 0; k < kNumRiskElements; ++k) {
    out << ',' << element_name(static_cast<RiskElement>(k));
  }
  out << ",survival,risk\n";
  double survival = 1.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    out << i << ',' << path[i].x << ',' << path[i].y << ',' << path[i].z;
    for (int k = 0; k < kNumRiskElements; ++k) {
      const double r = profile.values(static_cast<Eigen::Index>(i), k);
      survival *= 1.0 - r;
      out << ',' << format_number(r);
    }
    out << ',' << format_number(survival) << ',' << format_number(1.0 - survival) << '\n';
  }
  return out.str();
}

}  // namespace tva
