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

#include "tether_va/tether.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Geometry>

#include "json.hpp"
#include "tether_va/errors.hpp"

namespace tva
{

namespace
{

// Bisection depth when locating where sight of the last contact is lost.
constexpr int kBisectIterations = 40;
// Candidate contact vertices lie within this lattice distance of the grazing line.
constexpr double kCandidateReach = 1.75;
// Successive contacts a single sub-step may need before we call it entangled.
constexpr int kMaxContactsPerStep = 4;
// Penetration (lattice units) below which a triangle only grazes a cell.
constexpr double kGrazeTol = 1e-9;
// Sub-steps whose sweep hits an obstacle are halved down to this depth.
constexpr int kMaxSplit = 12;
// Lattice distance under which a contact coordinate is moved onto the lattice plane.
constexpr double kSnap = 1e-6;

double point_segment_distance(const Vec3 & p, const Vec3 & a, const Vec3 & b)
{
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  double s = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return (a + s * ab - p).norm();
}

// Triangle (lattice coordinates) overlaps the unit cell at `cell` by more than
// kGrazeTol in every separating direction. Separating-axis test.
bool triangle_hits_cell(const Vec3 & a, const Vec3 & b, const Vec3 & c, const Eigen::Vector3i & cell)
{
  const Vec3 ctr = cell.cast<double>().array() + 0.5;
  const double h = 0.5 - kGrazeTol;
  const Vec3 v[3] = {a - ctr, b - ctr, c - ctr};
  for (int k = 0; k < 3; ++k) {
    const double lo = std::min({v[0][k], v[1][k], v[2][k]});
    const double hi = std::max({v[0][k], v[1][k], v[2][k]});
    if (lo >= h || hi <= -h) {
      return false;
    }
  }
  const Vec3 e[3] = {v[1] - v[0], v[2] - v[1], v[0] - v[2]};
  auto separated = [&](const Vec3 & axis) {
    const double len = axis.norm();
    if (len < 1e-12) {
      return false;
    }
    const double r = h * axis.cwiseAbs().sum();
    const double p0 = axis.dot(v[0]), p1 = axis.dot(v[1]), p2 = axis.dot(v[2]);
    return std::min({p0, p1, p2}) >= r || std::max({p0, p1, p2}) <= -r;
  };
  if (separated(e[0].cross(e[1]))) {
    return false;
  }
  for (const Vec3 & edge : e) {
    for (int k = 0; k < 3; ++k) {
      if (separated(Vec3::Unit(k).cross(edge))) {
        return false;
      }
    }
  }
  return true;
}

// Some occupied cell pokes through the triangle a-b-c (world coordinates).
bool triangle_blocked(const VoxelGrid & grid, const Vec3 & aw, const Vec3 & bw, const Vec3 & cw)
{
  const Vec3 a = grid.to_lattice(aw), b = grid.to_lattice(bw), c = grid.to_lattice(cw);
  const Vec3 lo = a.cwiseMin(b).cwiseMin(c);
  const Vec3 hi = a.cwiseMax(b).cwiseMax(c);
  const Eigen::Vector3i n = grid.dims();
  Eigen::Vector3i ilo, ihi;
  for (int k = 0; k < 3; ++k) {
    ilo[k] = std::max(0, static_cast<int>(std::floor(lo[k])));
    ihi[k] = std::min(n[k] - 1, static_cast<int>(std::floor(hi[k])));
  }
  for (int z = ilo.z(); z <= ihi.z(); ++z) {
    for (int y = ilo.y(); y <= ihi.y(); ++y) {
      for (int x = ilo.x(); x <= ihi.x(); ++x) {
        if (grid.occupied({x, y, z}) && triangle_hits_cell(a, b, c, {x, y, z})) {
          return true;
        }
      }
    }
  }
  return false;
}

// Vertex lies on the obstacle surface: it touches both occupied and free cells.
bool surface_vertex(const VoxelGrid & grid, const Eigen::Vector3i & v)
{
  bool any_occ = false;
  bool any_free = false;
  for (int dz = -1; dz <= 0; ++dz) {
    for (int dy = -1; dy <= 0; ++dy) {
      for (int dx = -1; dx <= 0; ++dx) {
        const bool occ = grid.occupied({v.x() + dx, v.y() + dy, v.z() + dz});
        any_occ |= occ;
        any_free |= !occ;
      }
    }
  }
  return any_occ && any_free;
}

// Obstacle-surface vertices near the lattice segment a-b, in lexicographic order.
std::vector<Eigen::Vector3i> candidate_vertices(
  const VoxelGrid & grid, const Vec3 & a_world, const Vec3 & b_world)
{
  const Vec3 a = grid.to_lattice(a_world);
  const Vec3 b = grid.to_lattice(b_world);
  const Vec3 lo = a.cwiseMin(b).array() - kCandidateReach;
  const Vec3 hi = a.cwiseMax(b).array() + kCandidateReach;
  const Eigen::Vector3i n = grid.dims();
  Eigen::Vector3i ilo, ihi;
  for (int ax = 0; ax < 3; ++ax) {
    ilo[ax] = std::max(0, static_cast<int>(std::ceil(lo[ax])));
    ihi[ax] = std::min(n[ax], static_cast<int>(std::floor(hi[ax])));
  }
  std::vector<Eigen::Vector3i> out;
  for (int x = ilo.x(); x <= ihi.x(); ++x) {
    for (int y = ilo.y(); y <= ihi.y(); ++y) {
      for (int z = ilo.z(); z <= ihi.z(); ++z) {
        const Eigen::Vector3i v(x, y, z);
        if (point_segment_distance(v.cast<double>(), a, b) <= kCandidateReach &&
            surface_vertex(grid, v)) {
          out.push_back(v);
        }
      }
    }
  }
  return out;
}

// Point where the segment last->lost first enters the obstacle. Just after
// sight is lost this is where the taut tether touches the obstacle edge.
std::optional<Vec3> graze_point(const VoxelGrid & grid, const Vec3 & last, const Vec3 & lost)
{
  const Vec3 d = lost - last;
  const double len = d.norm();
  if (!(len > 0.0)) {
    return std::nullopt;
  }
  const auto hit = cast_ray(grid, last, d / len, len);
  if (!hit) {
    return std::nullopt;
  }
  // Snap onto the edge lines of the lattice.
  Vec3 l = grid.to_lattice(last + d * (*hit / len));
  for (int k = 0; k < 3; ++k) {
    const double r = std::round(l[k]);
    if (std::abs(l[k] - r) < kSnap) {
      l[k] = r;
    }
  }
  const Vec3 c = grid.origin() + l * grid.resolution();
  if ((c - last).norm() < 1e-9 || !line_of_sight(grid, last, c) || !line_of_sight(grid, c, lost)) {
    return std::nullopt;
  }
  return c;
}

// Vertex where the tether wraps when the segment last->vehicle starts to
// graze the obstacle at vehicle position `lost`: it must see both ends, and
// the one adding the least length wins.
std::optional<Vec3> place_contact(const VoxelGrid & grid, const Vec3 & last, const Vec3 & lost)
{
  std::optional<Vec3> best;
  double best_len = std::numeric_limits<double>::infinity();
  for (const Eigen::Vector3i & v : candidate_vertices(grid, last, lost)) {
    const Vec3 c = grid.vertex(v);
    if ((c - last).norm() < 1e-9 || (c - lost).norm() < 1e-9) {
      continue;
    }
    const double len = (c - last).norm() + (lost - c).norm();
    // Strict comparison keeps the lexicographically first vertex on ties.
    if (len >= best_len) {
      continue;
    }
    if (!line_of_sight(grid, last, c) || !line_of_sight(grid, c, lost)) {
      continue;
    }
    best = c;
    best_len = len;
  }
  return best;
}

// The tether slides off its last contact only if it can sweep the triangle
// (previous contact, last contact, vehicle) without passing through anything.
bool can_unwrap(const VoxelGrid & grid, const Vec3 & prev, const Vec3 & last, const Vec3 & p)
{
  return line_of_sight(grid, prev, p) && !triangle_blocked(grid, prev, last, p);
}

void relax(TetherConfig & t, const Vec3 & p, const VoxelGrid & grid)
{
  while (t.contacts.size() >= 2 &&
         can_unwrap(grid, t.contacts[t.contacts.size() - 2], t.contacts.back(), p)) {
    t.contacts.pop_back();
  }
}

void plan(TetherConfig & t, const Vec3 & p, const VoxelGrid & grid, const ContactOptions & opts)
{
  if (line_of_sight(grid, t.last_contact(), p)) {
    return;
  }
  if (!opts.allow_contacts) {
    throw EntanglementError("motion requires a tether contact but contacts are disabled");
  }
  // Wrap events inside one sub-step are handled in the order they happen.
  Vec3 from = t.vehicle;
  for (int k = 0; k < kMaxContactsPerStep; ++k) {
    // First vehicle position along from->p that loses sight of the contact.
    Vec3 seen = from;
    Vec3 lost = p;
    for (int i = 0; i < kBisectIterations; ++i) {
      const Vec3 mid = 0.5 * (seen + lost);
      if (line_of_sight(grid, t.last_contact(), mid)) {
        seen = mid;
      } else {
        lost = mid;
      }
    }
    auto c = graze_point(grid, t.last_contact(), lost);
    if (!c) {
      c = place_contact(grid, t.last_contact(), lost);
    }
    if (!c) {
      break;
    }
    t.contacts.push_back(*c);
    if (line_of_sight(grid, *c, p)) {
      return;
    }
    from = lost;
  }
  throw EntanglementError("no valid tether contact vertex found");
}

// Move the vehicle to p. A sweep of the free segment that clips an obstacle
// between samples is refined so the wrap is not skipped over.
void advance(TetherConfig & t, const Vec3 & p, const VoxelGrid & grid, const ContactOptions & opts, int depth)
{
  if (depth < kMaxSplit && triangle_blocked(grid, t.last_contact(), t.vehicle, p)) {
    const Vec3 mid = 0.5 * (t.vehicle + p);
    advance(t, mid, grid, opts, depth + 1);
    advance(t, p, grid, opts, depth + 1);
    return;
  }
  relax(t, p, grid);
  plan(t, p, grid, opts);
  t.vehicle = p;
}

}  // namespace

TetherConfig make_tether(const Vec3 & reel, const Vec3 & vehicle)
{
  return TetherConfig{{reel}, vehicle};
}

double static_length(const TetherConfig & t)
{
  double total = 0.0;
  for (std::size_t i = 1; i < t.contacts.size(); ++i) {
    total += (t.contacts[i] - t.contacts[i - 1]).norm();
  }
  return total;
}

TetherCoords effective_coords(const TetherConfig & t)
{
  if (t.contacts.empty()) {
    throw DomainError("tether has no reel contact");
  }
  const Vec3 d = t.vehicle - t.last_contact();
  if (d.norm() == 0.0) {
    throw DegenerateError("vehicle coincides with the last tether contact");
  }
  return position_control(d);
}

TetherCoords commanded_coords(const TetherConfig & t)
{
  TetherCoords c = effective_coords(t);
  c.L += static_length(t);
  return c;
}

TetherConfig update_contacts(
  const TetherConfig & t, const Vec3 & new_vehicle, const VoxelGrid & grid,
  const ContactOptions & opts)
{
  if (t.contacts.empty()) {
    throw DomainError("tether has no reel contact");
  }
  if (!grid.contains(new_vehicle)) {
    throw DomainError("vehicle position is outside the grid");
  }
  if (grid.occupied(grid.cell_of(new_vehicle))) {
    throw DomainError("vehicle position is inside an obstacle");
  }
  TetherConfig cur = t;
  const Vec3 delta = new_vehicle - t.vehicle;
  const double max_sub = std::max(opts.substep, 1e-3) * grid.resolution();
  const int n = std::max(1, static_cast<int>(std::ceil(delta.norm() / max_sub)));
  for (int s = 1; s <= n; ++s) {
    const Vec3 p = s == n ? new_vehicle : Vec3(t.vehicle + delta * (double(s) / n));
    advance(cur, p, grid, opts, 0);
  }
  return cur;
}

bool chain_is_taut(const TetherConfig & t, const VoxelGrid & grid)
{
  for (std::size_t i = 1; i < t.contacts.size(); ++i) {
    if (!line_of_sight(grid, t.contacts[i - 1], t.contacts[i])) {
      return false;
    }
  }
  return !t.contacts.empty() && line_of_sight(grid, t.last_contact(), t.vehicle);
}

TetherTraceRecord trace_record(std::size_t step, const TetherConfig & t)
{
  TetherTraceRecord r;
  r.step = step;
  r.vehicle = t.vehicle;
  r.contacts = t.contacts;
  r.static_length = static_length(t);
  // A vehicle parked on its last contact has no free segment to describe.
  if ((t.vehicle - t.last_contact()).norm() > 0.0) {
    r.effective = effective_coords(t);
  }
  return r;
}

std::string format_trace_line(const TetherTraceRecord & r)
{
  nlohmann::ordered_json j;
  j["step"] = r.step;
  j["vehicle"] = {r.vehicle.x(), r.vehicle.y(), r.vehicle.z()};
  auto contacts = nlohmann::ordered_json::array();
  // contacts[0] is the reel and is not a contact point.
  for (std::size_t i = 1; i < r.contacts.size(); ++i) {
    contacts.push_back({r.contacts[i].x(), r.contacts[i].y(), r.contacts[i].z()});
  }
  j["contacts"] = contacts;
  j["L_sta"] = r.static_length;
  j["L_eff"] = r.effective.L;
  j["theta_eff"] = r.effective.theta;
  j["phi_eff"] = r.effective.phi;
  return j.dump();
}

}  // namespace tva
