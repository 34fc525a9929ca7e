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

#include "tether_va/workspace.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "tether_va/errors.hpp"

namespace tva
{

namespace
{

// Lattice-unit tolerance for "this coordinate sits on a cell boundary".
constexpr double kLatticeTol = 1e-9;

// True iff every cell whose closure contains lattice point m is occupied, i.e.
// m is in the interior of the occupied region. Axes in `on_plane` pin the
// point to the boundary plane `plane[ax]`.
bool interior_occupied(
  const VoxelGrid & grid, const Vec3 & m, const std::array<bool, 3> & on_plane,
  const std::array<int, 3> & plane)
{
  std::array<std::array<int, 2>, 3> choices{};
  std::array<int, 3> count{};
  for (int ax = 0; ax < 3; ++ax) {
    if (on_plane[ax]) {
      choices[ax] = {plane[ax] - 1, plane[ax]};
      count[ax] = 2;
    } else {
      choices[ax] = {static_cast<int>(std::floor(m[ax])), 0};
      count[ax] = 1;
    }
  }
  for (int i = 0; i < count[0]; ++i) {
    for (int j = 0; j < count[1]; ++j) {
      for (int k = 0; k < count[2]; ++k) {
        if (!grid.occupied({choices[0][i], choices[1][j], choices[2][k]})) {
          return false;
        }
      }
    }
  }
  return true;
}

// Voxel walk along lattice segment u0 -> u1, stepping cell boundary to cell
// boundary (Amanatides & Woo). Returns the segment parameter at which the
// first stretch of positive length inside the occupied interior begins.
std::optional<double> first_blocked(const VoxelGrid & grid, const Vec3 & u0, const Vec3 & u1)
{
  const Vec3 d = u1 - u0;
  std::array<bool, 3> on_plane{};
  std::array<int, 3> plane{};
  std::array<double, 3> t_next{};
  std::array<double, 3> t_delta{};
  std::array<double, 3> next_bound{};
  std::array<int, 3> step{};
  constexpr double inf = std::numeric_limits<double>::infinity();

  for (int ax = 0; ax < 3; ++ax) {
    const double r0 = std::round(u0[ax]);
    on_plane[ax] = std::abs(u0[ax] - r0) < kLatticeTol && std::abs(u1[ax] - r0) < kLatticeTol;
    plane[ax] = static_cast<int>(r0);
    if (on_plane[ax] || d[ax] == 0.0) {
      t_next[ax] = inf;
      t_delta[ax] = inf;
      continue;
    }
    step[ax] = d[ax] > 0.0 ? 1 : -1;
    next_bound[ax] = d[ax] > 0.0 ? std::floor(u0[ax]) + 1.0 : std::ceil(u0[ax]) - 1.0;
    t_next[ax] = (next_bound[ax] - u0[ax]) / d[ax];
    t_delta[ax] = 1.0 / std::abs(d[ax]);
  }

  const double span = d.cwiseAbs().maxCoeff();
  double t = 0.0;
  while (true) {
    const double t1 = std::min({t_next[0], t_next[1], t_next[2], 1.0});
    if ((t1 - t) * span > kLatticeTol) {
      const Vec3 mid = u0 + 0.5 * (t + t1) * d;
      if (interior_occupied(grid, mid, on_plane, plane)) {
        return t;
      }
    }
    if (t1 >= 1.0) {
      break;
    }
    for (int ax = 0; ax < 3; ++ax) {
      if (t_next[ax] <= t1) {
        next_bound[ax] += step[ax];
        t_next[ax] = (next_bound[ax] - u0[ax]) / d[ax];
      }
    }
    t = t1;
  }
  return std::nullopt;
}

// Clip the parametric segment p + t*(q-p), t in [0,1], to the grid box.
bool clip_to_box(const VoxelGrid & grid, const Vec3 & u0, const Vec3 & u1, double & t0, double & t1)
{
  t0 = 0.0;
  t1 = 1.0;
  const Vec3 d = u1 - u0;
  for (int ax = 0; ax < 3; ++ax) {
    const double lo = 0.0;
    const double hi = grid.dims()[ax];
    if (d[ax] == 0.0) {
      if (u0[ax] < lo || u0[ax] > hi) {
        return false;
      }
      continue;
    }
    double ta = (lo - u0[ax]) / d[ax];
    double tb = (hi - u0[ax]) / d[ax];
    if (ta > tb) {
      std::swap(ta, tb);
    }
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  return t0 <= t1;
}

void require_in_bounds(const VoxelGrid & grid, const Vec3 & p, const char * what)
{
  if (!grid.contains(p)) {
    throw DomainError(std::string(what) + " is outside the grid");
  }
}

void require_free(const VoxelGrid & grid, const Vec3 & p, const char * what)
{
  require_in_bounds(grid, p, what);
  if (grid.occupied(grid.cell_of(p))) {
    throw DomainError(std::string(what) + " is inside an obstacle");
  }
}

}  // namespace

std::ostream & operator<<(std::ostream & os, const Cell & c)
{
  return os << '(' << c.x << ',' << c.y << ',' << c.z << ')';
}

VoxelGrid::VoxelGrid(const Eigen::Vector3i & dims, double resolution, const Vec3 & origin)
: dims_(dims), resolution_(resolution), origin_(origin)
{
  if ((dims.array() < 1).any()) {
    throw DomainError("grid dimensions must be >= 1");
  }
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw DomainError("grid resolution must be > 0");
  }
  if (!origin.allFinite()) {
    throw DomainError("grid origin must be finite");
  }
  occupancy_.assign(
    static_cast<std::size_t>(dims.x()) * static_cast<std::size_t>(dims.y()) *
      static_cast<std::size_t>(dims.z()),
    0);
}

bool VoxelGrid::contains(const Vec3 & p) const
{
  const Vec3 u = to_lattice(p);
  for (int ax = 0; ax < 3; ++ax) {
    if (!(u[ax] >= -kLatticeTol && u[ax] <= dims_[ax] + kLatticeTol)) {
      return false;
    }
  }
  return true;
}

Cell VoxelGrid::cell_at(std::size_t idx) const
{
  const auto nx = static_cast<std::size_t>(dims_.x());
  const auto ny = static_cast<std::size_t>(dims_.y());
  return {static_cast<int>(idx % nx), static_cast<int>((idx / nx) % ny),
          static_cast<int>(idx / (nx * ny))};
}

void VoxelGrid::set_occupied(const Cell & c, bool value)
{
  if (!in_bounds(c)) {
    throw DomainError("cell out of bounds");
  }
  occupancy_[index(c)] = value ? 1 : 0;
}

void VoxelGrid::fill_box(const Vec3 & lo, const Vec3 & hi, bool value)
{
  for (std::size_t i = 0; i < occupancy_.size(); ++i) {
    const Vec3 c = center(cell_at(i));
    if ((c.array() >= lo.array()).all() && (c.array() <= hi.array()).all()) {
      occupancy_[i] = value ? 1 : 0;
    }
  }
}

Cell VoxelGrid::cell_of(const Vec3 & p) const
{
  if (!contains(p)) {
    throw DomainError("point is outside the grid");
  }
  const Vec3 u = to_lattice(p);
  Cell c{static_cast<int>(std::floor(u.x())), static_cast<int>(std::floor(u.y())),
         static_cast<int>(std::floor(u.z()))};
  c.x = std::clamp(c.x, 0, dims_.x() - 1);
  c.y = std::clamp(c.y, 0, dims_.y() - 1);
  c.z = std::clamp(c.z, 0, dims_.z() - 1);
  return c;
}

std::size_t VoxelGrid::occupied_count() const
{
  return static_cast<std::size_t>(
    std::count_if(occupancy_.begin(), occupancy_.end(), [](std::uint8_t v) { return v != 0; }));
}

VoxelGrid inflate(const VoxelGrid & grid, double radius)
{
  if (!(radius >= 0.0)) {
    throw DomainError("inflation radius must be >= 0");
  }
  VoxelGrid out = grid;
  out.set_inflation_radius(grid.inflation_radius() + radius);
  if (radius == 0.0) {
    return out;
  }
  const double reach = radius / grid.resolution();
  const int k = static_cast<int>(std::floor(reach + kLatticeTol));
  std::vector<Cell> offsets;
  for (int dz = -k; dz <= k; ++dz) {
    for (int dy = -k; dy <= k; ++dy) {
      for (int dx = -k; dx <= k; ++dx) {
        if (std::sqrt(double(dx * dx + dy * dy + dz * dz)) <= reach + kLatticeTol) {
          offsets.push_back({dx, dy, dz});
        }
      }
    }
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.data()[i] == 0) {
      continue;
    }
    const Cell c = grid.cell_at(i);
    for (const Cell & o : offsets) {
      const Cell n = c + o;
      if (out.in_bounds(n)) {
        out.set_occupied(n);
      }
    }
  }
  return out;
}

bool line_of_sight(const VoxelGrid & grid, const Vec3 & a, const Vec3 & b)
{
  require_in_bounds(grid, a, "segment start");
  require_in_bounds(grid, b, "segment end");
  return !first_blocked(grid, grid.to_lattice(a), grid.to_lattice(b)).has_value();
}

std::optional<double> cast_ray(
  const VoxelGrid & grid, const Vec3 & p, const Vec3 & dir, double max_range)
{
  const Vec3 u0 = grid.to_lattice(p);
  const Vec3 u1 = grid.to_lattice(p + dir * max_range);
  double t0 = 0.0;
  double t1 = 1.0;
  if (!clip_to_box(grid, u0, u1, t0, t1)) {
    return std::nullopt;
  }
  const Vec3 a = u0 + t0 * (u1 - u0);
  const Vec3 b = u0 + t1 * (u1 - u0);
  const auto hit = first_blocked(grid, a, b);
  if (!hit) {
    return std::nullopt;
  }
  return (t0 + *hit * (t1 - t0)) * max_range;
}

double distance_to_obstacle(const VoxelGrid & grid, const Vec3 & p, double max_range)
{
  require_free(grid, p, "query point");
  const Cell c0 = grid.cell_of(p);
  const Eigen::Vector3i & n = grid.dims();
  const int max_ring = n.maxCoeff();
  double best2 = std::numeric_limits<double>::infinity();

  auto consider = [&](int x, int y, int z) {
    const Cell c{x, y, z};
    if (grid.occupied(c)) {
      best2 = std::min(best2, (grid.center(c) - p).squaredNorm());
    }
  };

  for (int r = 0; r <= max_ring; ++r) {
    const double bound = (r - 0.5) * grid.resolution();
    if (bound > 0.0 && bound * bound > best2) {
      break;
    }
    const int x0 = std::max(c0.x - r, 0), x1 = std::min(c0.x + r, n.x() - 1);
    const int y0 = std::max(c0.y - r, 0), y1 = std::min(c0.y + r, n.y() - 1);
    const int z0 = std::max(c0.z - r, 0), z1 = std::min(c0.z + r, n.z() - 1);
    // Chebyshev shell at distance r, clipped to the grid.
    for (int z = z0; z <= z1; ++z) {
      for (int y = y0; y <= y1; ++y) {
        const bool face = std::abs(z - c0.z) == r || std::abs(y - c0.y) == r;
        if (face) {
          for (int x = x0; x <= x1; ++x) {
            consider(x, y, z);
          }
        } else {
          if (c0.x - r >= 0) {
            consider(c0.x - r, y, z);
          }
          if (r > 0 && c0.x + r < n.x()) {
            consider(c0.x + r, y, z);
          }
        }
      }
    }
  }
  if (!std::isfinite(best2)) {
    return max_range;
  }
  return std::sqrt(best2);
}

double distance_to_obstacle(const VoxelGrid & grid, const Vec3 & p)
{
  return distance_to_obstacle(grid, p, grid.diagonal());
}

std::vector<Vec3> sphere_directions(int n)
{
  if (n < 1) {
    throw DomainError("need at least one direction");
  }
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Vec3> dirs;
  dirs.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double y = 1.0 - 2.0 * (k + 0.5) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - y * y));
    const double phi = golden * k;
    dirs.emplace_back(r * std::sin(phi), y, r * std::cos(phi));
  }
  return dirs;
}

double isovist_visibility(const VoxelGrid & grid, const Vec3 & p, int n_rays, double max_range)
{
  if (n_rays < 1) {
    throw DomainError("n_rays must be >= 1");
  }
  require_free(grid, p, "isovist origin");
  if (max_range <= 0.0) {
    max_range = grid.diagonal();
  }
  double total = 0.0;
  for (const Vec3 & dir : sphere_directions(n_rays)) {
    total += cast_ray(grid, p, dir, max_range).value_or(max_range);
  }
  return total / n_rays;
}

const std::vector<Cell> & neighbor_offsets()
{
  static const std::vector<Cell> offsets = [] {
    std::vector<Cell> o;
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dz = -1; dz <= 1; ++dz) {
          if (dx != 0 || dy != 0 || dz != 0) {
            o.push_back({dx, dy, dz});
          }
        }
      }
    }
    return o;
  }();
  return offsets;
}

}  // namespace tva
