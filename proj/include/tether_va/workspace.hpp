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

#ifndef TETHER_VA__WORKSPACE_HPP_
#define TETHER_VA__WORKSPACE_HPP_

#include <Eigen/Core>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tva
{

using Vec3 = Eigen::Vector3d;

/// Integer voxel index. Ordered lexicographically (x, then y, then z).
struct Cell
{
  int x{0};
  int y{0};
  int z{0};

  auto operator<=>(const Cell &) const = default;

  Eigen::Vector3i vec() const { return {x, y, z}; }
  Cell operator+(const Cell & o) const { return {x + o.x, y + o.y, z + o.z}; }
  Cell operator-(const Cell & o) const { return {x - o.x, y - o.y, z - o.z}; }
};

std::ostream & operator<<(std::ostream & os, const Cell & c);

/// Dense 3-D occupancy grid. Axis y is vertical (up).
///
/// Cell (i, j, k) spans origin + [i, i+1) x [j, j+1) x [k, k+1) times the
/// resolution. Storage is x-fastest: index = x + nx * (y + ny * z).
class VoxelGrid
{
public:
  VoxelGrid(const Eigen::Vector3i & dims, double resolution, const Vec3 & origin = Vec3::Zero());

  const Eigen::Vector3i & dims() const { return dims_; }
  double resolution() const { return resolution_; }
  const Vec3 & origin() const { return origin_; }
  /// Radius of the inflation already applied to this grid (0 for raw maps).
  double inflation_radius() const { return inflation_radius_; }
  std::size_t size() const { return occupancy_.size(); }

  bool in_bounds(const Cell & c) const
  {
    return c.x >= 0 && c.y >= 0 && c.z >= 0 && c.x < dims_.x() && c.y < dims_.y() &&
           c.z < dims_.z();
  }
  /// Point lies in the closed bounding box of the grid.
  bool contains(const Vec3 & p) const;

  std::size_t index(const Cell & c) const
  {
    return static_cast<std::size_t>(c.x) +
           static_cast<std::size_t>(dims_.x()) *
             (static_cast<std::size_t>(c.y) + static_cast<std::size_t>(dims_.y()) * c.z);
  }
  Cell cell_at(std::size_t idx) const;

  /// Cells outside the grid read as free.
  bool occupied(const Cell & c) const { return in_bounds(c) && occupancy_[index(c)] != 0; }
  bool free(const Cell & c) const { return in_bounds(c) && occupancy_[index(c)] == 0; }
  void set_occupied(const Cell & c, bool value = true);
  /// Mark every cell whose center lies inside the axis-aligned world box [lo, hi].
  void fill_box(const Vec3 & lo, const Vec3 & hi, bool value = true);

  Vec3 center(const Cell & c) const
  {
    return origin_ + (c.vec().cast<double>().array() + 0.5).matrix() * resolution_;
  }
  /// World point of the cell corner with integer lattice coordinates v.
  Vec3 vertex(const Eigen::Vector3i & v) const { return origin_ + v.cast<double>() * resolution_; }
  /// Containing cell; points on the upper boundary map into the last cell.
  Cell cell_of(const Vec3 & p) const;
  /// Position in lattice units (cell edges at integers).
  Vec3 to_lattice(const Vec3 & p) const { return (p - origin_) / resolution_; }

  double diagonal() const { return (dims_.cast<double>() * resolution_).norm(); }
  std::size_t occupied_count() const;
  const std::vector<std::uint8_t> & data() const { return occupancy_; }

  void set_inflation_radius(double r) { inflation_radius_ = r; }

  bool operator==(const VoxelGrid & o) const
  {
    return dims_ == o.dims_ && resolution_ == o.resolution_ && origin_ == o.origin_ &&
           occupancy_ == o.occupancy_;
  }

private:
  Eigen::Vector3i dims_;
  double resolution_;
  Vec3 origin_;
  double inflation_radius_{0.0};
  std::vector<std::uint8_t> occupancy_;
};

/// Occupies every cell whose center is within `radius` of an occupied cell center.
VoxelGrid inflate(const VoxelGrid & grid, double radius);

/// True iff segment a-b never enters the interior of the occupied region.
///
/// Grazing a face, edge or corner of the obstacle set does not block sight, so
/// a taut tether may rest on an obstacle edge. Endpoints must be in bounds.
bool line_of_sight(const VoxelGrid & grid, const Vec3 & a, const Vec3 & b);

/// Distance along the ray from p in unit direction `dir` to the first occupied
/// cell, or nullopt if nothing is hit within `max_range`. Space beyond the
/// grid is free.
std::optional<double> cast_ray(
  const VoxelGrid & grid, const Vec3 & p, const Vec3 & dir, double max_range);

/// Euclidean distance from p to the nearest occupied cell center; `max_range`
/// when the grid has no obstacles.
double distance_to_obstacle(const VoxelGrid & grid, const Vec3 & p, double max_range);
double distance_to_obstacle(const VoxelGrid & grid, const Vec3 & p);

/// Mean isovist ray length from p over `n_rays` spiral directions, each capped
/// at `max_range` (grid diagonal when max_range <= 0).
double isovist_visibility(
  const VoxelGrid & grid, const Vec3 & p, int n_rays = 64, double max_range = 0.0);

/// n near-uniform unit directions on the sphere (Fibonacci spiral).
std::vector<Vec3> sphere_directions(int n);

/// The 26 neighbor offsets in lexicographic order.
const std::vector<Cell> & neighbor_offsets();

// Grid files ----------------------------------------------------------------

/// ASCII map: optional `resolution <m>` / `origin <x> <y> <z>` header lines,
/// then one block per z-slice separated by blank lines. Each block has ny rows
/// of nx characters ('#' occupied, '.' free); the first row is the top (y = ny-1).
VoxelGrid read_text_map(std::istream & in);
VoxelGrid load_text_map(const std::string & path);
void write_text_map(std::ostream & out, const VoxelGrid & grid);

/// Binary dump: "TPGRID01", nx ny nz (u32 LE), resolution, origin x y z
/// (f64 LE), then one byte per cell, x-fastest.
VoxelGrid read_binary_grid(std::istream & in);
VoxelGrid load_binary_grid(const std::string & path);
void write_binary_grid(std::ostream & out, const VoxelGrid & grid);

}  // namespace tva

#endif  // TETHER_VA__WORKSPACE_HPP_
