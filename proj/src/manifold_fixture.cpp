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

// Reference viewpoint manifolds for the four affordances.
//
// Values, manifold counts and inconsistency cuts are fixed. There are no
// per-viewpoint measurements, so each viewpoint carries its manifold's
// value, and region shapes are given by anchor directions (elevation,
// azimuth in degrees; azimuth > 0 is the task's left).

#include <cmath>
#include <numbers>

#include "tether_va/errors.hpp"
#include "tether_va/viewpoint.hpp"

namespace tva
{

namespace
{

struct AnchorDeg
{
  double elevation;
  double azimuth;
};

struct ManifoldSpec
{
  double value;
  std::vector<AnchorDeg> anchors;
};

struct AffordanceSpec
{
  Affordance affordance;
  double threshold;
  std::vector<ManifoldSpec> manifolds;
};

Vec3 direction(const AnchorDeg & a)
{
  const double e = a.elevation * std::numbers::pi / 180.0;
  const double z = a.azimuth * std::numbers::pi / 180.0;
  return {std::cos(e) * std::sin(z), std::sin(e), std::cos(e) * std::cos(z)};
}

const std::vector<AffordanceSpec> & fixture()
{
  static const std::vector<AffordanceSpec> specs = {
    {Affordance::kReachability,
     1.15,
     {
       // Front and top.
       {-0.49, {{20, 0}, {50, 0}, {85, 0}, {55, 45}, {55, -45}, {80, 180}}},
       // Lower back.
       {-0.19, {{15, 180}, {15, 135}, {15, -135}, {40, 180}}},
       {0.49, {{20, 90}}},
       {0.6, {{20, -90}}},
     }},
    {Affordance::kPassability,
     1.15,
     {
       {-0.46, {{20, 0}, {20, 50}, {20, -50}}},
       {-0.42, {{20, 180}, {20, 130}, {20, -130}}},
       {-0.38, {{60, 0}, {60, 45}, {60, -45}}},
       {-0.3, {{60, 180}, {60, 135}, {60, -135}}},
       // Band perpendicular to the task orientation.
       {0.21, {{85, 90}, {50, 90}, {50, -90}}},
       {0.46, {{15, 90}, {15, -90}}},
     }},
    {Affordance::kManipulability,
     1.15,
     {
       // Top right.
       {-0.15, {{70, -60}, {85, -90}}},
       {-0.04, {{45, -100}, {50, -30}}},
       // Lower ring.
       {0.25, {{15, 0}, {15, -60}, {15, -120}}},
       {0.36, {{15, 180}, {15, 120}, {15, 60}}},
       // Top left and back.
       {0.49, {{65, 90}, {65, 160}, {85, 120}}},
       // Two disjoint patches.
       {2.00, {{40, 30}, {40, -160}}},
     }},
    {Affordance::kTraversability,
     1.14,
     {
       {-0.41, {{88, 0}}},
       {-0.32, {{60, 0}}},
       {-0.31, {{60, 90}}},
       {-0.27, {{60, -90}}},
       {-0.07, {{60, 180}}},
       // Lower front, left and right.
       {0.01, {{15, 0}, {15, 45}, {15, -45}}},
       {0.18, {{15, 90}, {15, -90}}},
       // Lower back.
       {1.04, {{15, 135}, {15, -135}}},
       {2.6, {{15, 180}}},
     }},
  };
  return specs;
}

}  // namespace

AffordanceModel default_manifolds()
{
  constexpr double kRadius = 1.5;
  const std::vector<HemisphereSample> viewpoints = sample_hemisphere(kRadius, 30);
  AffordanceModel model;
  for (const auto & spec : fixture()) {
    AffordanceManifolds am;
    am.affordance = spec.affordance;
    am.threshold = spec.threshold;
    am.radius = kRadius;
    am.viewpoints = viewpoints;
    for (std::size_t i = 0; i < spec.manifolds.size(); ++i) {
      Manifold m;
      m.value = spec.manifolds[i].value;
      m.rank = static_cast<int>(i) + 1;
      for (const auto & a : spec.manifolds[i].anchors) {
        m.anchors.push_back(direction(a));
      }
      am.manifolds.push_back(std::move(m));
    }
    for (std::size_t v = 0; v < viewpoints.size(); ++v) {
      const std::size_t m = am.manifold_at(viewpoints[v].position);
      am.manifolds[m].members.push_back(static_cast<int>(v));
      am.viewpoint_values.push_back(am.manifolds[m].value);
    }
    model.affordances.push_back(std::move(am));
  }
  return model;
}

}  // namespace tva
