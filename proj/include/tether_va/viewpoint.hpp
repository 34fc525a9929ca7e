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

#ifndef TETHER_VA__VIEWPOINT_HPP_
#define TETHER_VA__VIEWPOINT_HPP_

#include <Eigen/Core>

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tether_va/workspace.hpp"

namespace tva
{

enum class Affordance : int {
  kReachability = 0,
  kPassability = 1,
  kManipulability = 2,
  kTraversability = 3,
};

const char * affordance_name(Affordance a);
/// Case-insensitive; throws ConfigError on unknown names.
Affordance parse_affordance(const std::string & name);

struct TrialRecord
{
  int subject{0};
  Affordance affordance{Affordance::kReachability};
  int viewpoint{0};
  double time_s{0.0};
  double errors{0.0};
};

/// Weighted z-scores 0.4 * z(time) + 0.6 * z(errors) for one subject's trials,
/// normalized over all of that subject's trials. Lower is better.
std::vector<double> performance_scores(std::span<const TrialRecord> subject_trials);

/// Drops trials whose time is more than three scaled MADs (1.4826 * MAD) from
/// the median of its affordance group. Groups need at least three trials.
std::vector<TrialRecord> reject_outliers(std::span<const TrialRecord> records);

/// Mean performance score per viewpoint for one affordance. Outliers are
/// rejected first and scores are normalized per subject.
std::vector<double> viewpoint_values(
  std::span<const TrialRecord> records, Affordance affordance, int n_viewpoints);

enum class HemisphereGroup { kFront, kLeft, kBack, kRight, kTop };
const char * group_name(HemisphereGroup g);

/// Viewpoint on the task hemisphere, expressed in the task frame: +z is the
/// task's facing direction, +y is up, so +x is the task's left.
struct HemisphereSample
{
  Vec3 position{Vec3::Zero()};
  double radius{0.0};
  double elevation{0.0};
  double azimuth{0.0};
  HemisphereGroup group{HemisphereGroup::kTop};
};

/// n spiral points on the upper hemisphere, split into five equal groups.
std::vector<HemisphereSample> sample_hemisphere(double radius, int n = 30);

/// (r, elevation, azimuth, value).
using SamplePoint = Eigen::Vector4d;

/// Per-dimension sample standard deviation over the dataset.
Eigen::Vector4d dimension_spread(std::span<const SamplePoint> samples);

/// sqrt((a - b)^T K^-1 (a - b)) with K = diag(Q^2).
double standardized_distance(const SamplePoint & a, const SamplePoint & b, const Eigen::Vector4d & Q);

/// Square dissimilarity matrix. Dimensions with zero spread are skipped and
/// reported in `dropped`.
Eigen::MatrixXd dissimilarity_matrix(
  std::span<const SamplePoint> samples, std::vector<int> * dropped = nullptr);

/// Merge record in the usual dendrogram encoding: leaves are 0..n-1, the
/// cluster created by link k gets id n + k.
struct Link
{
  int a{0};
  int b{0};
  double height{0.0};
  int size{0};
};

/// Average-linkage (UPGMA) merge tree over a square dissimilarity matrix.
std::vector<Link> upgma_linkage(const Eigen::MatrixXd & dissimilarity);

/// Mean dissimilarity between every member of `a` and every member of `b`.
double average_linkage(
  const Eigen::MatrixXd & dissimilarity, std::span<const int> a, std::span<const int> b);

/// Inconsistency coefficient of each link over links up to `depth` levels
/// down: (height - mean) / std, 0 when std is 0.
Eigen::VectorXd inconsistency(const std::vector<Link> & links, int n_leaves, int depth = 2);

/// Flat clusters: a subtree stays whole when no link in it has inconsistency
/// above `threshold`. Returns a label per leaf, labels numbered from 0 in
/// order of first appearance.
std::vector<int> cut_inconsistent(
  const std::vector<Link> & links, int n_leaves, double threshold, int depth = 2);

struct Manifold
{
  std::vector<int> members;
  double value{0.0};
  int rank{0};
  /// Unit directions (task frame) whose nearest-anchor region is this manifold.
  std::vector<Vec3> anchors;
};

struct ClusterResult
{
  std::vector<Manifold> manifolds;
  std::vector<Link> linkage;
  std::vector<int> dropped_dimensions;
};

/// Cluster samples into manifolds ranked by ascending value (rank 1 = best).
ClusterResult upgma_cluster(std::span<const SamplePoint> samples, double threshold);

struct AffordanceManifolds
{
  Affordance affordance{Affordance::kReachability};
  double threshold{1.15};
  double radius{1.5};
  std::vector<Manifold> manifolds;
  std::vector<HemisphereSample> viewpoints;
  std::vector<double> viewpoint_values;

  /// Index of the manifold whose region contains task-frame direction `dir`.
  std::size_t manifold_at(const Vec3 & dir) const;
  double best_value() const;
  double worst_value() const;
};

struct AffordanceModel
{
  std::vector<AffordanceManifolds> affordances;

  /// Throws ConfigError when the affordance is absent.
  const AffordanceManifolds & at(Affordance a) const;
};

/// Reference manifolds for the four affordances. Regions are given by anchor
/// directions; per-viewpoint values are the manifold values.
AffordanceModel default_manifolds();

/// Build manifolds from measured viewpoint values at the given viewpoints.
AffordanceManifolds fit_manifolds(
  Affordance affordance, std::span<const HemisphereSample> viewpoints,
  std::span<const double> values, double threshold);

struct TaskPose
{
  Vec3 position{Vec3::Zero()};
  /// Facing direction about +y, measured from +z toward +x.
  double yaw{0.0};
};

/// Task-frame direction of world point p.
Vec3 to_task_frame(const TaskPose & pose, const Vec3 & p);

/// Per-cell reward in [0, 1], indexed like the grid. Free cells within one
/// cell of the viewpoint hemisphere shell get (worst - M) / (worst - best)
/// for the manifold M containing them; everything else gets 0.
Eigen::VectorXd reward_field(
  const AffordanceModel & model, Affordance affordance, const TaskPose & pose,
  const VoxelGrid & grid);

// Files ---------------------------------------------------------------------

/// CSV with header `subject,affordance,viewpoint,time_s,errors`.
std::vector<TrialRecord> read_trial_records(std::istream & in);

/// Versioned JSON document ("schema": "tether_va.manifolds/1").
std::string manifolds_to_json(const AffordanceModel & model);
AffordanceModel manifolds_from_json(const std::string & text);

}  // namespace tva

#endif  // TETHER_VA__VIEWPOINT_HPP_
