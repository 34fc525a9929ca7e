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

#include "tether_va/planner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <tuple>

#include "tether_va/errors.hpp"

namespace tva
{

namespace
{

constexpr int kStartDir = 26;
constexpr int kDirs = 27;

struct QueueEntry
{
  double cost;
  double length;
  std::int64_t id;

  bool operator>(const QueueEntry & o) const
  {
    return std::tie(cost, length, id) > std::tie(o.cost, o.length, o.id);
  }
};

// Action risks depend only on the incoming and outgoing offsets.
std::array<std::array<ActionRisk, 26>, kDirs> action_table(double resolution, const RiskConfig & cfg)
{
  std::array<std::array<ActionRisk, 26>, kDirs> table{};
  const auto & off = neighbor_offsets();
  const Cell cur{0, 0, 0};
  for (int in = 0; in < kDirs; ++in) {
    for (int out = 0; out < 26; ++out) {
      const Cell next = cur + off[out];
      table[in][out] = in == kStartDir
                         ? action_risks(cur, next, resolution, cfg)
                         : action_risks(cur - off[in], cur, next, resolution, cfg);
    }
  }
  return table;
}

}  // namespace

double state_search_cost(const LocaleRisk & locale, const ActionRisk & action, double eps)
{
  double c = 0.0;
  c += survival_cost(locale.obstacle_distance, eps);
  c += survival_cost(locale.visibility, eps);
  c += survival_cost(action.length, eps);
  c += survival_cost(action.turn, eps);
  return c;
}

bool valid_move(const VoxelGrid & grid, const Cell & from, const Cell & to)
{
  const Cell d = to - from;
  if (std::max({std::abs(d.x), std::abs(d.y), std::abs(d.z)}) != 1) {
    return false;
  }
  if (!grid.free(from) || !grid.free(to)) {
    return false;
  }
  // Every cell of the bounding box spanned by the move must be free.
  for (int x = std::min(from.x, to.x); x <= std::max(from.x, to.x); ++x) {
    for (int y = std::min(from.y, to.y); y <= std::max(from.y, to.y); ++y) {
      for (int z = std::min(from.z, to.z); z <= std::max(from.z, to.z); ++z) {
        if (!grid.free({x, y, z})) {
          return false;
        }
      }
    }
  }
  return true;
}

std::vector<Vec3> densify(const VoxelGrid & grid, const std::vector<Cell> & path, double step)
{
  if (!(step > 0.0)) {
    throw DomainError("densify: step must be > 0");
  }
  std::vector<Vec3> out;
  if (path.empty()) {
    return out;
  }
  out.push_back(grid.center(path.front()));
  for (std::size_t i = 1; i < path.size(); ++i) {
    const Vec3 a = grid.center(path[i - 1]);
    const Vec3 b = grid.center(path[i]);
    const double len = (b - a).norm();
    const int k = std::max(1, static_cast<int>(std::ceil(len / step - 1e-12)));
    for (int j = 1; j < k; ++j) {
      out.push_back(a + (b - a) * (static_cast<double>(j) / k));
    }
    out.push_back(b);
  }
  return out;
}

RiskAwarePlanner::RiskAwarePlanner(
  const VoxelGrid & flight, const VoxelGrid & obstacles, const Vec3 & reel, PlannerConfig config)
: flight_(flight),
  obstacles_(obstacles),
  reel_(reel),
  config_(std::move(config)),
  locale_cache_(obstacles.size()),
  reel_visible_(obstacles.size(), -1)
{
  if (flight.dims() != obstacles.dims() || flight.resolution() != obstacles.resolution() ||
      flight.origin() != obstacles.origin()) {
    throw DomainError("flight and obstacle grids must share geometry");
  }
  if (!obstacles.contains(reel)) {
    throw DomainError("reel is outside the grid");
  }
}

const LocaleRisk & RiskAwarePlanner::locale(const Cell & c) const
{
  auto & slot = locale_cache_.at(obstacles_.index(c));
  if (!slot) {
    slot = locale_risks(obstacles_, c, config_.risk);
  }
  return *slot;
}

bool RiskAwarePlanner::traversable(const Cell & c) const
{
  if (!flight_.free(c)) {
    return false;
  }
  if (config_.allow_contacts) {
    return true;
  }
  auto & v = reel_visible_[flight_.index(c)];
  if (v < 0) {
    v = line_of_sight(obstacles_, reel_, obstacles_.center(c)) ? 1 : 0;
  }
  return v == 1;
}

namespace
{

std::vector<Cell> sequence(
  const VoxelGrid & grid, const std::vector<std::int64_t> & parent, std::int64_t id)
{
  std::vector<Cell> seq;
  while (id >= 0) {
    seq.push_back(grid.cell_at(static_cast<std::size_t>(id / kDirs)));
    id = parent[static_cast<std::size_t>(id)];
  }
  std::reverse(seq.begin(), seq.end());
  return seq;
}

}  // namespace

bool RiskAwarePlanner::lex_less(const SearchTree & tree, std::int64_t a, std::int64_t b) const
{
  return sequence(flight_, tree.parent, a) < sequence(flight_, tree.parent, b);
}

RiskAwarePlanner::SearchTree RiskAwarePlanner::search_from(const Cell & start) const
{
  if (!flight_.in_bounds(start) || !traversable(start)) {
    throw DomainError("start cell is not traversable");
  }
  const double eps = config_.risk.normalizers.eps;
  const auto table = action_table(flight_.resolution(), config_.risk);
  const auto & off = neighbor_offsets();
  std::array<double, 26> step_len{};
  for (int j = 0; j < 26; ++j) {
    step_len[j] = off[j].vec().cast<double>().norm();
  }

  const std::size_t n_states = flight_.size() * kDirs;
  constexpr double inf = std::numeric_limits<double>::infinity();
  SearchTree tree{start, std::vector<double>(n_states, inf), std::vector<double>(n_states, inf),
                  std::vector<std::int64_t>(n_states, -1)};
  std::vector<bool> settled(n_states, false);
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> open;

  const auto s0 = static_cast<std::int64_t>(flight_.index(start)) * kDirs + kStartDir;
  tree.cost[s0] = state_search_cost(locale(start), ActionRisk{}, eps);
  tree.length[s0] = 0.0;
  open.push({tree.cost[s0], 0.0, s0});

  while (!open.empty()) {
    const QueueEntry top = open.top();
    open.pop();
    const auto uid = static_cast<std::size_t>(top.id);
    if (settled[uid] || top.cost != tree.cost[uid] || top.length != tree.length[uid]) {
      continue;
    }
    settled[uid] = true;
    const Cell u = flight_.cell_at(uid / kDirs);
    const int in = static_cast<int>(uid % kDirs);

    for (int j = 0; j < 26; ++j) {
      const Cell v = u + off[j];
      if (!flight_.in_bounds(v) || !traversable(v) || !valid_move(flight_, u, v)) {
        continue;
      }
      const auto vid = static_cast<std::int64_t>(flight_.index(v)) * kDirs + j;
      const auto vidx = static_cast<std::size_t>(vid);
      if (settled[vidx]) {
        continue;
      }
      const double c = tree.cost[uid] + state_search_cost(locale(v), table[in][j], eps);
      const double l = tree.length[uid] + step_len[j];
      bool better = c < tree.cost[vidx] || (c == tree.cost[vidx] && l < tree.length[vidx]);
      if (!better && c == tree.cost[vidx] && l == tree.length[vidx]) {
        std::vector<Cell> cand = sequence(flight_, tree.parent, top.id);
        cand.push_back(v);
        better = cand < sequence(flight_, tree.parent, vid);
      }
      if (better) {
        tree.cost[vidx] = c;
        tree.length[vidx] = l;
        tree.parent[vidx] = top.id;
        open.push({c, l, vid});
      }
    }
  }
  return tree;
}

std::optional<std::vector<Cell>> RiskAwarePlanner::extract(
  const SearchTree & tree, const Cell & goal) const
{
  if (!flight_.in_bounds(goal)) {
    return std::nullopt;
  }
  std::int64_t best = -1;
  const auto base = static_cast<std::int64_t>(flight_.index(goal)) * kDirs;
  for (int d = 0; d < kDirs; ++d) {
    const std::int64_t id = base + d;
    const auto i = static_cast<std::size_t>(id);
    if (!std::isfinite(tree.cost[i])) {
      continue;
    }
    if (best < 0) {
      best = id;
      continue;
    }
    const auto b = static_cast<std::size_t>(best);
    if (
      tree.cost[i] < tree.cost[b] ||
      (tree.cost[i] == tree.cost[b] &&
       (tree.length[i] < tree.length[b] ||
        (tree.length[i] == tree.length[b] && lex_less(tree, id, best))))) {
      best = id;
    }
  }
  if (best < 0) {
    return std::nullopt;
  }
  return sequence(flight_, tree.parent, best);
}

PlanResult RiskAwarePlanner::evaluate(const std::vector<Cell> & path) const
{
  if (path.empty()) {
    throw DomainError("cannot evaluate an empty path");
  }
  if (!flight_.in_bounds(path.front()) || !traversable(path.front())) {
    throw DomainError("path starts in a blocked cell");
  }
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (!valid_move(flight_, path[i - 1], path[i]) || !traversable(path[i])) {
      throw DomainError("path contains an invalid move");
    }
  }
  const double res = flight_.resolution();
  const double eps = config_.risk.normalizers.eps;
  const auto n = static_cast<Eigen::Index>(path.size());
  RiskMatrix values(n, kNumRiskElements);
  PlanResult out;
  out.path = path;

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const LocaleRisk & lr = locale(path[ui]);
    ActionRisk ar;
    if (i == 1) {
      ar = action_risks(path[0], path[1], res, config_.risk);
    } else if (i >= 2) {
      ar = action_risks(path[ui - 2], path[ui - 1], path[ui], res, config_.risk);
    }
    out.search_cost += state_search_cost(lr, ar, eps);
    values(i, 0) = lr.obstacle_distance;
    values(i, 1) = lr.visibility;
    values(i, 2) = ar.length;
    values(i, 3) = ar.turn;
    out.waypoints.push_back(flight_.center(path[ui]));
  }

  // Tether replay along the densified path.
  if (!line_of_sight(obstacles_, reel_, out.waypoints.front())) {
    throw ConfigError("tether reel has no line of sight to the start cell");
  }
  ContactOptions opts;
  opts.allow_contacts = config_.allow_contacts;
  TetherConfig tether = make_tether(reel_, out.waypoints.front());
  std::size_t step = 0;
  out.trace.push_back(trace_record(step, tether));
  TraverseRisk tr = traverse_risks(tether, config_.risk);
  values(0, 4) = tr.tether_length;
  values(0, 5) = tr.contact_count;
  const double spacing = config_.densify_fraction * res;
  try {
    for (std::size_t i = 1; i < path.size(); ++i) {
      const std::vector<Vec3> pts = densify(flight_, {path[i - 1], path[i]}, spacing);
      for (std::size_t k = 1; k < pts.size(); ++k) {
        tether = update_contacts(tether, pts[k], obstacles_, opts);
        out.trace.push_back(trace_record(++step, tether));
      }
      tr = traverse_risks(tether, config_.risk);
      values(static_cast<Eigen::Index>(i), 4) = tr.tether_length;
      values(static_cast<Eigen::Index>(i), 5) = tr.contact_count;
    }
  } catch (const EntanglementError & e) {
    if (!config_.allow_contacts) {
      throw NoPathError(std::string("no contact-free path: ") + e.what());
    }
    throw;
  }
  out.tether = tether;
  out.profile = make_profile(std::move(values));
  out.exact_risk = out.profile.total;
  return out;
}

PlanResult RiskAwarePlanner::min_risk_search(const Cell & start, const Cell & goal) const
{
  const SearchTree tree = search_from(start);
  const auto path = extract(tree, goal);
  if (!path) {
    std::ostringstream msg;
    msg << (config_.allow_contacts ? "goal " : "no contact-free path: goal ") << goal
        << " is unreachable from " << start;
    throw NoPathError(msg.str());
  }
  return evaluate(*path);
}

double RiskAwarePlanner::reward_of(const std::vector<Cell> & path, const Eigen::VectorXd & reward) const
{
  if (config_.reward_mode == RewardMode::kTerminal) {
    return reward[static_cast<Eigen::Index>(flight_.index(path.back()))];
  }
  double sum = 0.0;
  for (const Cell & c : path) {
    sum += reward[static_cast<Eigen::Index>(flight_.index(c))];
  }
  return sum / static_cast<double>(path.size());
}

PlanResult RiskAwarePlanner::select_viewpoint(
  const Cell & start, const Eigen::VectorXd & reward, std::vector<Cell> candidates) const
{
  if (reward.size() != static_cast<Eigen::Index>(flight_.size())) {
    throw DomainError("reward field does not match the grid");
  }
  if (candidates.empty()) {
    for (std::size_t i = 0; i < flight_.size(); ++i) {
      if (reward[static_cast<Eigen::Index>(i)] > 0.0) {
        candidates.push_back(flight_.cell_at(i));
      }
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  const bool any_positive = std::any_of(candidates.begin(), candidates.end(), [&](const Cell & c) {
    return flight_.in_bounds(c) && reward[static_cast<Eigen::Index>(flight_.index(c))] > 0.0;
  });
  if (!any_positive) {
    throw ConfigError("no candidate viewpoint has positive reward");
  }

  const SearchTree tree = search_from(start);
  std::optional<PlanResult> best;
  std::vector<Cell> unreachable;
  std::vector<std::string> failures;
  bool entangled = false;

  for (const Cell & goal : candidates) {
    const auto path = extract(tree, goal);
    if (!path) {
      unreachable.push_back(goal);
      continue;
    }
    PlanResult r;
    try {
      r = evaluate(*path);
    } catch (const EntanglementError & e) {
      entangled = true;
      failures.push_back(e.what());
      continue;
    } catch (const NoPathError & e) {
      unreachable.push_back(goal);
      failures.push_back(e.what());
      continue;
    }
    r.reward = reward_of(r.path, reward);
    r.utility = r.reward / std::max(r.exact_risk, config_.utility_floor);
    if (
      !best || r.utility > best->utility ||
      (r.utility == best->utility && r.exact_risk < best->exact_risk)) {
      best = std::move(r);
    }
  }
  if (best) {
    return *best;
  }
  if (entangled) {
    throw EntanglementError("every reachable candidate entangles the tether: " + failures.front());
  }
  std::ostringstream msg;
  msg << (config_.allow_contacts ? "no reachable candidate" : "no contact-free path to any candidate")
      << "; unreachable:";
  for (const Cell & c : unreachable) {
    msg << ' ' << c;
  }
  throw NoPathError(msg.str());
}

PlanResult min_risk_search(
  const VoxelGrid & grid, const Cell & start, const Cell & goal, const PlannerConfig & config)
{
  if (!grid.in_bounds(start)) {
    throw DomainError("start cell out of bounds");
  }
  const RiskAwarePlanner planner(grid, grid, grid.center(start), config);
  return planner.min_risk_search(start, goal);
}

}  // namespace tva
