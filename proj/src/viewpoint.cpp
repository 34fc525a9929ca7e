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

#include "tether_va/viewpoint.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "tether_va/errors.hpp"

namespace tva
{

namespace
{

double mean_of(std::span<const double> v)
{
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(std::span<const double> v, double mean)
{
  if (v.size() < 2) {
    return 0.0;
  }
  double ss = 0.0;
  for (double x : v) {
    ss += (x - mean) * (x - mean);
  }
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double median_of(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Weighted standardized distance; zero weights skip a dimension.
double weighted_distance(const SamplePoint & a, const SamplePoint & b, const Eigen::Vector4d & w)
{
  return std::sqrt(((a - b).array().square() * w.array()).sum());
}

}  // namespace

const char * affordance_name(Affordance a)
{
  switch (a) {
    case Affordance::kReachability:
      return "reachability";
    case Affordance::kPassability:
      return "passability";
    case Affordance::kManipulability:
      return "manipulability";
    case Affordance::kTraversability:
      return "traversability";
  }
  return "?";
}

Affordance parse_affordance(const std::string & name)
{
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  for (int i = 0; i < 4; ++i) {
    const auto a = static_cast<Affordance>(i);
    if (lower == affordance_name(a)) {
      return a;
    }
  }
  throw ConfigError("unknown affordance '" + name + "'");
}

const char * group_name(HemisphereGroup g)
{
  switch (g) {
    case HemisphereGroup::kFront:
      return "front";
    case HemisphereGroup::kLeft:
      return "left";
    case HemisphereGroup::kBack:
      return "back";
    case HemisphereGroup::kRight:
      return "right";
    case HemisphereGroup::kTop:
      return "top";
  }
  return "?";
}

std::vector<double> performance_scores(std::span<const TrialRecord> subject_trials)
{
  if (subject_trials.size() < 2) {
    throw DomainError("performance score needs at least two trials per subject");
  }
  std::vector<double> t, e;
  for (const auto & r : subject_trials) {
    t.push_back(r.time_s);
    e.push_back(r.errors);
  }
  const double mt = mean_of(t), me = mean_of(e);
  const double st = sample_std(t, mt), se = sample_std(e, me);
  if (!(st > 0.0)) {
    throw DegenerateError("performance score: completion time has zero spread");
  }
  if (!(se > 0.0)) {
    throw DegenerateError("performance score: error count has zero spread");
  }
  std::vector<double> scores(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    scores[i] = 0.4 * ((t[i] - mt) / st) + 0.6 * ((e[i] - me) / se);
  }
  return scores;
}

std::vector<TrialRecord> reject_outliers(std::span<const TrialRecord> records)
{
  std::map<Affordance, std::vector<double>> times;
  for (const auto & r : records) {
    times[r.affordance].push_back(r.time_s);
  }
  std::map<Affordance, std::pair<double, double>> limits;  // median, allowed deviation
  for (const auto & [a, ts] : times) {
    if (ts.size() < 3) {
      throw DomainError(
        std::string("outlier rejection needs at least three trials for ") + affordance_name(a));
    }
    const double med = median_of(ts);
    std::vector<double> dev;
    for (double x : ts) {
      dev.push_back(std::abs(x - med));
    }
    limits[a] = {med, 3.0 * 1.4826 * median_of(dev)};
  }
  std::vector<TrialRecord> kept;
  for (const auto & r : records) {
    const auto [med, allowed] = limits[r.affordance];
    if (std::abs(r.time_s - med) <= allowed) {
      kept.push_back(r);
    }
  }
  return kept;
}

std::vector<double> viewpoint_values(
  std::span<const TrialRecord> records, Affordance affordance, int n_viewpoints)
{
  const std::vector<TrialRecord> kept = reject_outliers(records);
  std::map<int, std::vector<std::size_t>> by_subject;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    by_subject[kept[i].subject].push_back(i);
  }
  std::vector<double> sum(static_cast<std::size_t>(n_viewpoints), 0.0);
  std::vector<int> count(static_cast<std::size_t>(n_viewpoints), 0);
  for (const auto & [subject, idx] : by_subject) {
    std::vector<TrialRecord> trials;
    for (std::size_t i : idx) {
      trials.push_back(kept[i]);
    }
    const std::vector<double> scores = performance_scores(trials);
    for (std::size_t k = 0; k < trials.size(); ++k) {
      const auto & r = trials[k];
      if (r.affordance != affordance) {
        continue;
      }
      if (r.viewpoint < 0 || r.viewpoint >= n_viewpoints) {
        throw DomainError("trial viewpoint index out of range");
      }
      sum[static_cast<std::size_t>(r.viewpoint)] += scores[k];
      count[static_cast<std::size_t>(r.viewpoint)] += 1;
    }
  }
  std::vector<double> values(sum.size());
  for (std::size_t i = 0; i < sum.size(); ++i) {
    if (count[i] == 0) {
      throw DomainError("viewpoint " + std::to_string(i) + " has no trials");
    }
    values[i] = sum[i] / count[i];
  }
  return values;
}

std::vector<HemisphereSample> sample_hemisphere(double radius, int n)
{
  if (n < 5) {
    throw DomainError("hemisphere sampling needs at least five viewpoints");
  }
  if (!(radius > 0.0)) {
    throw DomainError("hemisphere radius must be > 0");
  }
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<HemisphereSample> out(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    auto & s = out[static_cast<std::size_t>(k)];
    const double y = (k + 0.5) / n;
    const double rho = std::sqrt(1.0 - y * y);
    const double phi = golden * k;
    const Vec3 u(rho * std::sin(phi), y, rho * std::cos(phi));
    s.position = radius * u;
    s.radius = radius;
    s.elevation = std::asin(y);
    s.azimuth = std::atan2(u.x(), u.z());
  }

  // Highest fifth is "top"; the rest split into four equal azimuth sectors
  // starting at the front and sweeping toward +x (left).
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return out[a].elevation > out[b].elevation;
  });
  const int n_top = n / 5;
  for (int i = 0; i < n_top; ++i) {
    out[static_cast<std::size_t>(order[i])].group = HemisphereGroup::kTop;
  }
  std::vector<int> rest(order.begin() + n_top, order.end());
  auto sector_key = [&](int i) {
    double k = out[static_cast<std::size_t>(i)].azimuth + std::numbers::pi / 4.0;
    k = std::fmod(k + 2.0 * std::numbers::pi, 2.0 * std::numbers::pi);
    return k;
  };
  std::stable_sort(rest.begin(), rest.end(), [&](int a, int b) {
    return sector_key(a) < sector_key(b);
  });
  const HemisphereGroup sectors[4] = {
    HemisphereGroup::kFront, HemisphereGroup::kLeft, HemisphereGroup::kBack,
    HemisphereGroup::kRight};
  const int m = static_cast<int>(rest.size());
  for (int i = 0; i < m; ++i) {
    out[static_cast<std::size_t>(rest[i])].group = sectors[(i * 4) / m];
  }
  return out;
}

Eigen::Vector4d dimension_spread(std::span<const SamplePoint> samples)
{
  Eigen::Vector4d q = Eigen::Vector4d::Zero();
  if (samples.size() < 2) {
    return q;
  }
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  for (const auto & s : samples) {
    mean += s;
  }
  mean /= static_cast<double>(samples.size());
  for (const auto & s : samples) {
    q += (s - mean).array().square().matrix();
  }
  return (q / static_cast<double>(samples.size() - 1)).cwiseSqrt();
}

double standardized_distance(const SamplePoint & a, const SamplePoint & b, const Eigen::Vector4d & Q)
{
  for (int i = 0; i < 4; ++i) {
    if (!(Q[i] > 0.0)) {
      throw DegenerateError("standardized distance: dimension " + std::to_string(i) + " has zero spread");
    }
  }
  return weighted_distance(a, b, Q.array().square().inverse().matrix());
}

Eigen::MatrixXd dissimilarity_matrix(std::span<const SamplePoint> samples, std::vector<int> * dropped)
{
  const Eigen::Vector4d q = dimension_spread(samples);
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  for (const auto & s : samples) {
    mean += s / static_cast<double>(samples.size());
  }
  Eigen::Vector4d w = Eigen::Vector4d::Zero();
  for (int i = 0; i < 4; ++i) {
    if (q[i] > 1e-12 * std::max(1.0, std::abs(mean[i]))) {
      w[i] = 1.0 / (q[i] * q[i]);
    } else if (dropped != nullptr) {
      dropped->push_back(i);
    }
  }
  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      d(i, j) = d(j, i) = weighted_distance(samples[i], samples[j], w);
    }
  }
  return d;
}

double average_linkage(
  const Eigen::MatrixXd & dissimilarity, std::span<const int> a, std::span<const int> b)
{
  double total = 0.0;
  for (int i : a) {
    for (int j : b) {
      total += dissimilarity(i, j);
    }
  }
  return total / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

std::vector<Link> upgma_linkage(const Eigen::MatrixXd & dissimilarity)
{
  const int n = static_cast<int>(dissimilarity.rows());
  if (n < 1 || dissimilarity.cols() != n) {
    throw DomainError("linkage needs a non-empty square dissimilarity matrix");
  }
  // Active clusters: id and size; D holds current inter-cluster averages.
  std::vector<int> id(static_cast<std::size_t>(n));
  std::vector<int> size(static_cast<std::size_t>(n), 1);
  std::iota(id.begin(), id.end(), 0);
  Eigen::MatrixXd D = dissimilarity;
  std::vector<Link> links;
  links.reserve(static_cast<std::size_t>(std::max(0, n - 1)));

  for (int step = 0; step < n - 1; ++step) {
    const int m = static_cast<int>(id.size());
    int bi = 0, bj = 1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        if (D(i, j) < best) {
          best = D(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    const int si = size[bi], sj = size[bj];
    links.push_back({std::min(id[bi], id[bj]), std::max(id[bi], id[bj]), best, si + sj});
    // Lance-Williams update for the average: merged cluster replaces bi.
    for (int k = 0; k < m; ++k) {
      if (k == bi || k == bj) {
        continue;
      }
      const double v = (si * D(bi, k) + sj * D(bj, k)) / (si + sj);
      D(bi, k) = D(k, bi) = v;
    }
    id[bi] = n + step;
    size[bi] = si + sj;
    // Drop bj by swapping in the last active cluster.
    const int last = m - 1;
    if (bj != last) {
      D.row(bj).swap(D.row(last));
      D.col(bj).swap(D.col(last));
      std::swap(id[bj], id[last]);
      std::swap(size[bj], size[last]);
    }
    id.pop_back();
    size.pop_back();
    D.conservativeResize(last, last);
  }
  return links;
}

namespace
{

void collect_heights(
  const std::vector<Link> & links, int n, int node, int depth, std::vector<double> & out)
{
  if (node < n || depth <= 0) {
    return;
  }
  const Link & l = links[static_cast<std::size_t>(node - n)];
  out.push_back(l.height);
  collect_heights(links, n, l.a, depth - 1, out);
  collect_heights(links, n, l.b, depth - 1, out);
}

}  // namespace

Eigen::VectorXd inconsistency(const std::vector<Link> & links, int n_leaves, int depth)
{
  Eigen::VectorXd coef(static_cast<Eigen::Index>(links.size()));
  for (std::size_t k = 0; k < links.size(); ++k) {
    std::vector<double> h;
    collect_heights(links, n_leaves, n_leaves + static_cast<int>(k), depth, h);
    const double m = mean_of(h);
    const double s = sample_std(h, m);
    coef[static_cast<Eigen::Index>(k)] = s > 0.0 ? (links[k].height - m) / s : 0.0;
  }
  return coef;
}

std::vector<int> cut_inconsistent(
  const std::vector<Link> & links, int n_leaves, double threshold, int depth)
{
  const Eigen::VectorXd coef = inconsistency(links, n_leaves, depth);
  // Largest coefficient anywhere in each subtree; links are in merge order so
  // children precede parents.
  std::vector<double> subtree_max(links.size());
  for (std::size_t k = 0; k < links.size(); ++k) {
    double v = coef[static_cast<Eigen::Index>(k)];
    for (int c : {links[k].a, links[k].b}) {
      if (c >= n_leaves) {
        v = std::max(v, subtree_max[static_cast<std::size_t>(c - n_leaves)]);
      }
    }
    subtree_max[k] = v;
  }

  std::vector<int> raw(static_cast<std::size_t>(n_leaves), -1);
  int next = 0;
  auto mark_all = [&](auto && self, int node, int label) -> void {
    if (node < n_leaves) {
      raw[static_cast<std::size_t>(node)] = label;
      return;
    }
    const Link & l = links[static_cast<std::size_t>(node - n_leaves)];
    self(self, l.a, label);
    self(self, l.b, label);
  };
  auto split = [&](auto && self, int node) -> void {
    if (node < n_leaves) {
      raw[static_cast<std::size_t>(node)] = next++;
      return;
    }
    const std::size_t k = static_cast<std::size_t>(node - n_leaves);
    if (subtree_max[k] <= threshold) {
      mark_all(mark_all, node, next++);
      return;
    }
    self(self, links[k].a);
    self(self, links[k].b);
  };
  if (n_leaves == 1) {
    raw[0] = 0;
  } else {
    split(split, n_leaves + static_cast<int>(links.size()) - 1);
  }

  // Relabel in order of first appearance by leaf index.
  std::map<int, int> relabel;
  std::vector<int> labels(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto it = relabel.try_emplace(raw[i], static_cast<int>(relabel.size())).first;
    labels[i] = it->second;
  }
  return labels;
}

ClusterResult upgma_cluster(std::span<const SamplePoint> samples, double threshold)
{
  if (samples.empty()) {
    throw DomainError("clustering needs at least one sample");
  }
  if (!(threshold > 0.0)) {
    throw DomainError("inconsistency threshold must be > 0");
  }
  ClusterResult result;
  const int n = static_cast<int>(samples.size());
  const Eigen::MatrixXd d = dissimilarity_matrix(samples, &result.dropped_dimensions);
  result.linkage = upgma_linkage(d);
  const std::vector<int> labels = cut_inconsistent(result.linkage, n, threshold);
  const int n_clusters = *std::max_element(labels.begin(), labels.end()) + 1;
  result.manifolds.resize(static_cast<std::size_t>(n_clusters));
  for (int i = 0; i < n; ++i) {
    result.manifolds[static_cast<std::size_t>(labels[i])].members.push_back(i);
  }
  for (auto & m : result.manifolds) {
    double sum = 0.0;
    for (int i : m.members) {
      sum += samples[static_cast<std::size_t>(i)][3];
    }
    m.value = sum / static_cast<double>(m.members.size());
  }
  std::stable_sort(
    result.manifolds.begin(), result.manifolds.end(),
    [](const Manifold & a, const Manifold & b) { return a.value < b.value; });
  for (std::size_t i = 0; i < result.manifolds.size(); ++i) {
    result.manifolds[i].rank = static_cast<int>(i) + 1;
  }
  return result;
}

std::size_t AffordanceManifolds::manifold_at(const Vec3 & dir) const
{
  const Vec3 u = dir.normalized();
  std::size_t best = 0;
  double best_dot = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < manifolds.size(); ++m) {
    for (const Vec3 & a : manifolds[m].anchors) {
      const double d = u.dot(a);
      if (d > best_dot) {
        best_dot = d;
        best = m;
      }
    }
  }
  return best;
}

double AffordanceManifolds::best_value() const
{
  double v = std::numeric_limits<double>::infinity();
  for (const auto & m : manifolds) {
    v = std::min(v, m.value);
  }
  return v;
}

double AffordanceManifolds::worst_value() const
{
  double v = -std::numeric_limits<double>::infinity();
  for (const auto & m : manifolds) {
    v = std::max(v, m.value);
  }
  return v;
}

const AffordanceManifolds & AffordanceModel::at(Affordance a) const
{
  for (const auto & am : affordances) {
    if (am.affordance == a) {
      return am;
    }
  }
  throw ConfigError(std::string("manifold model has no entry for ") + affordance_name(a));
}

AffordanceManifolds fit_manifolds(
  Affordance affordance, std::span<const HemisphereSample> viewpoints,
  std::span<const double> values, double threshold)
{
  if (viewpoints.size() != values.size()) {
    throw DomainError("viewpoint and value counts differ");
  }
  std::vector<SamplePoint> samples;
  for (std::size_t i = 0; i < viewpoints.size(); ++i) {
    const auto & v = viewpoints[i];
    samples.emplace_back(v.radius, v.elevation, v.azimuth, values[i]);
  }
  ClusterResult cr = upgma_cluster(samples, threshold);
  AffordanceManifolds out;
  out.affordance = affordance;
  out.threshold = threshold;
  out.radius = viewpoints.empty() ? 1.5 : viewpoints.front().radius;
  out.viewpoints.assign(viewpoints.begin(), viewpoints.end());
  out.viewpoint_values.assign(values.begin(), values.end());
  for (auto & m : cr.manifolds) {
    for (int i : m.members) {
      m.anchors.push_back(viewpoints[static_cast<std::size_t>(i)].position.normalized());
    }
  }
  out.manifolds = std::move(cr.manifolds);
  return out;
}

Vec3 to_task_frame(const TaskPose & pose, const Vec3 & p)
{
  const Vec3 d = p - pose.position;
  const double c = std::cos(pose.yaw), s = std::sin(pose.yaw);
  return {d.x() * c - d.z() * s, d.y(), d.x() * s + d.z() * c};
}

Eigen::VectorXd reward_field(
  const AffordanceModel & model, Affordance affordance, const TaskPose & pose,
  const VoxelGrid & grid)
{
  const AffordanceManifolds & am = model.at(affordance);
  if (!grid.contains(pose.position)) {
    throw DomainError("task position is outside the grid");
  }
  const double best = am.best_value();
  const double worst = am.worst_value();
  const double span = worst - best;
  Eigen::VectorXd reward = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.data()[i] != 0) {
      continue;
    }
    const Vec3 rel = to_task_frame(pose, grid.center(grid.cell_at(i)));
    const double r = rel.norm();
    if (rel.y() < 0.0 || r == 0.0 || std::abs(r - am.radius) > grid.resolution()) {
      continue;
    }
    const double v = am.manifolds[am.manifold_at(rel)].value;
    reward[static_cast<Eigen::Index>(i)] = span > 0.0 ? (worst - v) / span : 1.0;
  }
  return reward;
}

std::vector<TrialRecord> read_trial_records(std::istream & in)
{
  std::vector<TrialRecord> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty() || (line_no == 1 && line.rfind("subject", 0) == 0)) {
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      f.push_back(cell);
    }
    if (f.size() != 5) {
      throw ConfigError("trial records line " + std::to_string(line_no) + ": expected 5 fields");
    }
    try {
      TrialRecord r;
      r.subject = std::stoi(f[0]);
      r.affordance = parse_affordance(f[1]);
      r.viewpoint = std::stoi(f[2]);
      r.time_s = std::stod(f[3]);
      r.errors = std::stod(f[4]);
      if (!(r.time_s > 0.0) || r.errors < 0.0) {
        throw ConfigError("time must be > 0 and errors >= 0");
      }
      out.push_back(r);
    } catch (const std::exception & e) {
      throw ConfigError("trial records line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

namespace
{

constexpr const char * kManifoldSchema = "tether_va.manifolds/1";

nlohmann::ordered_json vec_json(const Vec3 & v) { return {v.x(), v.y(), v.z()}; }

Vec3 json_vec(const nlohmann::json & j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

}  // namespace

std::string manifolds_to_json(const AffordanceModel & model)
{
  nlohmann::ordered_json doc;
  doc["schema"] = kManifoldSchema;
  auto affs = nlohmann::ordered_json::array();
  for (const auto & am : model.affordances) {
    nlohmann::ordered_json a;
    a["affordance"] = affordance_name(am.affordance);
    a["threshold"] = am.threshold;
    a["radius"] = am.radius;
    auto ms = nlohmann::ordered_json::array();
    for (const auto & m : am.manifolds) {
      nlohmann::ordered_json mj;
      mj["rank"] = m.rank;
      mj["value"] = m.value;
      mj["members"] = m.members;
      auto anchors = nlohmann::ordered_json::array();
      for (const auto & v : m.anchors) {
        anchors.push_back(vec_json(v));
      }
      mj["anchors"] = anchors;
      ms.push_back(mj);
    }
    a["manifolds"] = ms;
    auto vps = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < am.viewpoints.size(); ++i) {
      const auto & v = am.viewpoints[i];
      nlohmann::ordered_json vj;
      vj["position"] = vec_json(v.position);
      vj["group"] = group_name(v.group);
      vj["value"] = i < am.viewpoint_values.size() ? am.viewpoint_values[i] : 0.0;
      vps.push_back(vj);
    }
    a["viewpoints"] = vps;
    affs.push_back(a);
  }
  doc["affordances"] = affs;
  return doc.dump(2) + "\n";
}

AffordanceModel manifolds_from_json(const std::string & text)
{
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.value("schema", "") != kManifoldSchema) {
      throw ConfigError(std::string("manifold document: expected schema ") + kManifoldSchema);
    }
    AffordanceModel model;
    for (const auto & a : doc.at("affordances")) {
      AffordanceManifolds am;
      am.affordance = parse_affordance(a.at("affordance").get<std::string>());
      am.threshold = a.at("threshold").get<double>();
      am.radius = a.at("radius").get<double>();
      for (const auto & mj : a.at("manifolds")) {
        Manifold m;
        m.rank = mj.at("rank").get<int>();
        m.value = mj.at("value").get<double>();
        m.members = mj.at("members").get<std::vector<int>>();
        for (const auto & v : mj.at("anchors")) {
          const Vec3 a = json_vec(v);
          // Leave unit vectors bit-exact so documents round-trip.
          m.anchors.push_back(std::abs(a.norm() - 1.0) > 1e-12 ? a.normalized() : a);
        }
        if (m.anchors.empty()) {
          throw ConfigError("manifold document: manifold without anchors");
        }
        am.manifolds.push_back(std::move(m));
      }
      for (const auto & vj : a.at("viewpoints")) {
        HemisphereSample s;
        s.position = json_vec(vj.at("position"));
        s.radius = s.position.norm();
        s.elevation = s.radius > 0.0 ? std::asin(std::clamp(s.position.y() / s.radius, -1.0, 1.0)) : 0.0;
        s.azimuth = std::atan2(s.position.x(), s.position.z());
        const std::string g = vj.at("group").get<std::string>();
        for (auto cand : {HemisphereGroup::kFront, HemisphereGroup::kLeft, HemisphereGroup::kBack,
                          HemisphereGroup::kRight, HemisphereGroup::kTop}) {
          if (g == group_name(cand)) {
            s.group = cand;
          }
        }
        am.viewpoints.push_back(s);
        am.viewpoint_values.push_back(vj.at("value").get<double>());
      }
      if (am.manifolds.empty()) {
        throw ConfigError("manifold document: affordance without manifolds");
      }
      model.affordances.push_back(std::move(am));
    }
    return model;
  } catch (const nlohmann::json::exception & e) {
    throw ConfigError(std::string("manifold document: ") + e.what());
  }
}

}  // namespace tva
