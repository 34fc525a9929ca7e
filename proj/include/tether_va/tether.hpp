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

#ifndef TETHER_VA__TETHER_HPP_
#define TETHER_VA__TETHER_HPP_

#include <string>
#include <vector>

#include "tether_va/kinematics.hpp"
#include "tether_va/workspace.hpp"

namespace tva
{

/// Taut tether as a chain of frozen contact points. contacts[0] is the reel.
struct TetherConfig
{
  std::vector<Vec3> contacts;
  Vec3 vehicle{Vec3::Zero()};

  /// Number of contacts besides the reel.
  std::size_t contact_count() const { return contacts.empty() ? 0 : contacts.size() - 1; }
  const Vec3 & last_contact() const { return contacts.back(); }
};

TetherConfig make_tether(const Vec3 & reel, const Vec3 & vehicle);

/// Wrapped length from the reel to the last contact.
double static_length(const TetherConfig & t);

/// Coordinates of the vehicle relative to the last contact.
TetherCoords effective_coords(const TetherConfig & t);

/// Final length/angle setpoints: effective angles with the full paid-out length.
TetherCoords commanded_coords(const TetherConfig & t);

struct ContactOptions
{
  /// When false any move that needs a new contact throws EntanglementError.
  bool allow_contacts{true};
  /// Internal sub-step as a fraction of the grid resolution.
  double substep{0.1};
};

/// Advance the chain to `new_vehicle`, relaxing contacts that became
/// unnecessary and planning new ones where sight of the last contact is lost.
/// `grid` is the obstacle map the tether interacts with.
TetherConfig update_contacts(
  const TetherConfig & t, const Vec3 & new_vehicle, const VoxelGrid & grid,
  const ContactOptions & opts = {});

/// True iff every consecutive chain segment (including the free one) is unobstructed.
bool chain_is_taut(const TetherConfig & t, const VoxelGrid & grid);

struct TetherTraceRecord
{
  std::size_t step{0};
  Vec3 vehicle{Vec3::Zero()};
  std::vector<Vec3> contacts;
  double static_length{0.0};
  TetherCoords effective;
};

TetherTraceRecord trace_record(std::size_t step, const TetherConfig & t);

/// One JSON object per line.
std::string format_trace_line(const TetherTraceRecord & r);

}  // namespace tva

#endif  // TETHER_VA__TETHER_HPP_
