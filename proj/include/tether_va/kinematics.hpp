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

#ifndef TETHER_VA__KINEMATICS_HPP_
#define TETHER_VA__KINEMATICS_HPP_

#include <Eigen/Core>

#include <algorithm>
#include <cmath>

#include "tether_va/errors.hpp"

namespace tva
{

/// Tether sensor reading: length, elevation above the horizontal plane and
/// azimuth about the vertical (y) axis, measured from +z toward +x.
template <typename Scalar>
struct TetherCoordsT
{
  Scalar L{0};
  Scalar theta{0};
  Scalar phi{0};
};

template <typename Scalar>
struct TetherRatesT
{
  Scalar L_dot{0};
  Scalar theta_dot{0};
  Scalar phi_dot{0};

  Eigen::Matrix<Scalar, 3, 1> vec() const { return {L_dot, theta_dot, phi_dot}; }
};

template <typename Scalar>
struct GimbalCommandT
{
  Scalar yaw{0};
  Scalar pitch{0};
  Scalar roll{0};  // level with gravity
};

using TetherCoords = TetherCoordsT<double>;
using TetherRates = TetherRatesT<double>;
using GimbalCommand = GimbalCommandT<double>;

struct SingularityThresholds
{
  double cos_theta{1e-6};
  double length{1e-6};
};

/// Straight-tether localization map (L, theta, phi) -> (x, y, z).
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> localize(const TetherCoordsT<Scalar> & c)
{
  using std::cos;
  using std::sin;
  const Scalar ct = cos(c.theta);
  return {c.L * ct * sin(c.phi), c.L * sin(c.theta), c.L * ct * cos(c.phi)};
}

/// Setpoints for the three tether loops that put the vehicle at p.
///
/// At the poles (x = z = 0) azimuth is undefined; phi is set to 0 and
/// `azimuth_degenerate`, when given, is raised.
template <typename Derived>
TetherCoordsT<typename Derived::Scalar> position_control(
  const Eigen::MatrixBase<Derived> & p, bool * azimuth_degenerate = nullptr)
{
  using Scalar = typename Derived::Scalar;
  using std::asin;
  using std::atan2;
  const Scalar L = p.norm();
  if (!(L > Scalar(0))) {
    throw DegenerateError("position_control: point coincides with the tether origin");
  }
  const bool polar = p.x() == Scalar(0) && p.z() == Scalar(0);
  if (azimuth_degenerate != nullptr) {
    *azimuth_degenerate = polar;
  }
  const Scalar s = std::clamp(p.y() / L, Scalar(-1), Scalar(1));
  return {L, asin(s), polar ? Scalar(0) : atan2(p.x(), p.z())};
}

/// d(x, y, z) / d(L, theta, phi): maps tether rates to Cartesian velocity.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> jacobian(const TetherCoordsT<Scalar> & c)
{
  using std::cos;
  using std::sin;
  const Scalar st = sin(c.theta), ct = cos(c.theta);
  const Scalar sp = sin(c.phi), cp = cos(c.phi);
  Eigen::Matrix<Scalar, 3, 3> J;
  J << ct * sp, -c.L * st * sp, c.L * ct * cp,
       st,       c.L * ct,      Scalar(0),
       ct * cp, -c.L * st * cp, -c.L * ct * sp;
  return J;
}

/// Tether rates realizing Cartesian velocity v at configuration c.
///
/// The Jacobian columns are orthogonal with norms (1, L, L cos(theta)), so the
/// inverse is a scaled transpose.
template <typename Scalar, typename Derived>
TetherRatesT<Scalar> velocity_control(
  const TetherCoordsT<Scalar> & c, const Eigen::MatrixBase<Derived> & v,
  const SingularityThresholds & eps = {})
{
  using std::abs;
  using std::cos;
  const Scalar ct = cos(c.theta);
  if (abs(ct) <= Scalar(eps.cos_theta)) {
    throw SingularityError("cos(theta)", static_cast<double>(ct));
  }
  if (c.L <= Scalar(eps.length)) {
    throw SingularityError("L", static_cast<double>(c.L));
  }
  const Eigen::Matrix<Scalar, 3, 3> J = jacobian(c);
  const Eigen::Matrix<Scalar, 3, 1> scale(Scalar(1), Scalar(1) / (c.L * c.L),
                                          Scalar(1) / (c.L * c.L * ct * ct));
  const Eigen::Matrix<Scalar, 3, 1> rates = scale.asDiagonal() * (J.transpose() * v);
  return {rates.x(), rates.y(), rates.z()};
}

/// Yaw/pitch that aim the camera at `poi` from `uav`; roll stays level.
template <typename DerivedA, typename DerivedB>
GimbalCommandT<typename DerivedA::Scalar> point_camera(
  const Eigen::MatrixBase<DerivedA> & uav, const Eigen::MatrixBase<DerivedB> & poi)
{
  using Scalar = typename DerivedA::Scalar;
  using std::asin;
  using std::atan2;
  const Eigen::Matrix<Scalar, 3, 1> d = poi - uav;
  const Scalar n = d.norm();
  if (!(n > Scalar(0))) {
    throw DegenerateError("point_camera: vehicle coincides with the point of interest");
  }
  return {atan2(d.x(), d.z()), asin(std::clamp(d.y() / n, Scalar(-1), Scalar(1))), Scalar(0)};
}

}  // namespace tva

#endif  // TETHER_VA__KINEMATICS_HPP_
