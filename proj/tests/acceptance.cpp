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


// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "tether_va/errors.hpp"
#include "tether_va/kinematics.hpp"
#include "tether_va/planner.hpp"
#include "tether_va/risk.hpp"
#include "tether_va/scenario.hpp"
#include "tether_va/viewpoint.hpp"

using namespace tva;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace
{

struct Outcome
{
  bool pass{false};
  std::string detail;
};

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v)
{
  std::ostringstream s;
  s << v;
  return s.str();
}

double angle_diff(double a, double b)
{
  return std::abs(std::remainder(a - b, 2.0 * std::numbers::pi));
}

Outcome kinematics_round_trip()
{
  std::mt19937 rng(1001);
  std::uniform_real_distribution<double> L(0.05, 50.0);
  std::uniform_real_distribution<double> theta(-std::numbers::pi / 2 + 1e-3, std::numbers::pi / 2 - 1e-3);
  std::uniform_real_distribution<double> phi(-std::numbers::pi, std::numbers::pi);
  std::vector<TetherCoords> cs(10000);
  for (auto & c : cs) c = {L(rng), theta(rng), phi(rng)};
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (const auto & c : cs) {
    const TetherCoords r = position_control(localize(c));
    worst = std::max({worst, std::abs(r.L - c.L), angle_diff(r.theta, c.theta), angle_diff(r.phi, c.phi)});
  }
  const double dt = seconds_since(t0);
  return {worst <= 1e-9 && dt < 1.0, "max error " + fmt(worst) + ", " + fmt(dt) + " s"};
}

Outcome jacobian_matches_differences()
{
  std::mt19937 rng(1002);
  std::uniform_real_distribution<double> L(0.1, 20.0);
  std::uniform_real_distribution<double> theta(-1.5, 1.5), phi(-std::numbers::pi, std::numbers::pi);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const TetherCoords c{L(rng), theta(rng), phi(rng)};
    const Eigen::Matrix3d J = jacobian(c);
    Eigen::Matrix3d fd;
    const double h[3] = {1e-6 * c.L, 1e-6, 1e-6};
    for (int k = 0; k < 3; ++k) {
      TetherCoords p = c, m = c;
      (k == 0 ? p.L : k == 1 ? p.theta : p.phi) += h[k];
      (k == 0 ? m.L : k == 1 ? m.theta : m.phi) -= h[k];
      fd.col(k) = (localize(p) - localize(m)) / (2.0 * h[k]);
    }
    worst = std::max(worst, (J - fd).norm() / J.norm());
  }
  return {worst < 1e-5, "max relative error " + fmt(worst)};
}

Outcome aggregation_oracle()
{
  std::mt19937 rng(1003);
  std::uniform_int_distribution<int> rows(1, 10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int n = rows(rng);
    Eigen::MatrixXd m(n, 6);
    for (Eigen::Index k = 0; k < m.size(); ++k) m(k) = u(rng) * u(rng);
    long double s = 1.0L;
    for (Eigen::Index k = 0; k < m.size(); ++k) s *= 1.0L - m(k);
    const double total = aggregate(m);
    worst = std::max(worst, std::abs(total - static_cast<double>(1.0L - s)));
    const int cut = std::uniform_int_distribution<int>(0, n)(rng);
    const double a = aggregate(m.topRows(cut)), b = aggregate(m.bottomRows(n - cut));
    worst = std::max(worst, std::abs(total - (1.0 - (1.0 - a) * (1.0 - b))));
  }
  return {worst <= 1e-12, "max deviation " + fmt(worst)};
}

Outcome planner_optimality()
{
  std::mt19937 rng(1004);
  std::uniform_int_distribution<int> side(2, 5), height(1, 3);
  PlannerConfig cfg;
  cfg.risk.isovist_rays = 16;
  int grids = 0, mismatches = 0, unreachable = 0;
  const auto t0 = Clock::now();
  while (grids < 50) {
    VoxelGrid g = oracle::random_grid(rng, {side(rng), height(rng), side(rng)}, 0.2, 0.5);
    std::vector<Cell> free_cells;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (g.free(g.cell_at(i))) free_cells.push_back(g.cell_at(i));
    if (free_cells.size() < 2) continue;
    std::uniform_int_distribution<std::size_t> pick(0, free_cells.size() - 1);
    const Cell s = free_cells[pick(rng)];
    Cell goal = s;
    while (goal == s) goal = free_cells[pick(rng)];
    ++grids;
    const auto ref = oracle::exhaustive_best_path(g, s, goal, cfg.risk, 12);
    try {
      const PlanResult r = min_risk_search(g, s, goal, cfg);
      if (!ref || r.path != ref->path || r.search_cost != ref->cost) ++mismatches;
    } catch (const NoPathError &) {
      ++unreachable;
      if (ref) ++mismatches;
    }
  }
  const double dt = seconds_since(t0);
  return {mismatches == 0 && dt < 60.0,
          std::to_string(grids) + " grids, " + std::to_string(mismatches) + " mismatches, " +
            std::to_string(unreachable) + " unreachable, " + fmt(dt) + " s"};
}

Outcome manifold_fixture()
{
  const AffordanceModel m = default_manifolds();
  const std::vector<std::tuple<Affordance, std::vector<double>, double>> expected = {
    {Affordance::kReachability, {-0.49, -0.19, 0.49, 0.6}, 1.15},
    {Affordance::kPassability, {-0.46, -0.42, -0.38, -0.3, 0.21, 0.46}, 1.15},
    {Affordance::kManipulability, {-0.15, -0.04, 0.25, 0.36, 0.49, 2.00}, 1.15},
    {Affordance::kTraversability, {-0.41, -0.32, -0.31, -0.27, -0.07, 0.01, 0.18, 1.04, 2.6}, 1.14},
  };
  bool ok = m.affordances.size() == 4;
  std::string counts;
  for (const auto & [a, values, th] : expected) {
    const auto & am = m.at(a);
    std::vector<double> got;
    for (const auto & man : am.manifolds) got.push_back(man.value);
    ok = ok && got == values && am.threshold == th;
    counts += std::string(counts.empty() ? "" : "/") + std::to_string(got.size());
  }
  return {ok, "manifold counts " + counts};
}

Outcome clustering_validity()
{
  std::mt19937 rng(1006);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 6 + trial % 25;
    std::vector<SamplePoint> pts(static_cast<std::size_t>(n));
    for (auto & p : pts) p = SamplePoint(u(rng), u(rng), u(rng), u(rng));
    const Eigen::MatrixXd D = dissimilarity_matrix(pts);
    const auto links = upgma_linkage(D);
    // Leaves under each node, rebuilt from the merge list.
    std::vector<std::vector<int>> members(static_cast<std::size_t>(n + n - 1));
    for (int i = 0; i < n; ++i) members[static_cast<std::size_t>(i)] = {i};
    for (std::size_t k = 0; k < links.size(); ++k) {
      const auto & a = members[static_cast<std::size_t>(links[k].a)];
      const auto & b = members[static_cast<std::size_t>(links[k].b)];
      double s = 0.0;
      for (int i : a)
        for (int j : b) s += D(i, j);
      worst = std::max(worst, std::abs(links[k].height - s / (a.size() * b.size())));
      auto & merged = members[static_cast<std::size_t>(n) + k];
      merged = a;
      merged.insert(merged.end(), b.begin(), b.end());
    }
  }

  // Two groups of 15 in 4-D, 20 apart on every axis, spread 0.05.
  int exact = 0, mixed = 0;
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937 g(static_cast<unsigned>(seed));
    std::normal_distribution<double> jitter(0.0, 0.05);
    std::uniform_real_distribution<double> c(-1.0, 1.0);
    const SamplePoint c0(c(g), c(g), c(g), c(g));
    SamplePoint c1 = c0;
    for (int k = 0; k < 4; ++k) c1[k] += c(g) < 0.0 ? -20.0 : 20.0;
    std::vector<SamplePoint> pts;
    for (int grp = 0; grp < 2; ++grp)
      for (int i = 0; i < 15; ++i)
        pts.push_back((grp == 0 ? c0 : c1) + SamplePoint(jitter(g), jitter(g), jitter(g), jitter(g)));
    const ClusterResult r = upgma_cluster(pts, 1.15);
    exact += r.manifolds.size() == 2 ? 1 : 0;
    for (const auto & m : r.manifolds) {
      const bool first = m.members.front() < 15;
      for (int i : m.members) mixed += (i < 15) != first ? 1 : 0;
    }
  }
  return {worst <= 1e-12 && exact == 100,
          "linkage deviation " + fmt(worst) + "; two groups recovered exactly in " + std::to_string(exact) +
            "/100 seeds, mixed members " + std::to_string(mixed)};
}

bool chain_visible(const VoxelGrid & g, const std::vector<Vec3> & contacts, const Vec3 & vehicle)
{
  for (std::size_t i = 1; i < contacts.size(); ++i)
    if (!line_of_sight(g, contacts[i - 1], contacts[i])) return false;
  return line_of_sight(g, contacts.back(), vehicle);
}

Outcome tether_replay()
{
  const Scenario s = load_scenario(fs::path(TVA_SCENARIO_DIR) / "indoor.json");
  const RunArtifacts art = run_scenario(s);
  const PlanResult & plan = art.plan;
  bool los = true;
  for (const auto & rec : plan.trace) los = los && chain_visible(s.grid, rec.contacts, rec.vehicle);
  const std::size_t at_goal = plan.tether.contact_count();

  std::vector<Cell> back(plan.path.rbegin(), plan.path.rend());
  const std::vector<Vec3> pts = densify(s.grid, back, 0.25 * s.grid.resolution());
  TetherConfig t = plan.tether;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    t = update_contacts(t, pts[i], s.grid);
    los = los && chain_visible(s.grid, t.contacts, t.vehicle);
  }
  return {at_goal == 2 && t.contact_count() == 0 && los,
          std::to_string(at_goal) + " contacts at goal, " + std::to_string(t.contact_count()) +
            " after reversal, chain visible at every step: " + (los ? "yes" : "no")};
}

Outcome scoring()
{
  const double t[] = {2, 3, 3, 1, 1, 1, 3};
  const double e[] = {2, 2, 3, 0, 3, 2, 2};
  std::vector<TrialRecord> base;
  for (int i = 0; i < 7; ++i) base.push_back({1, Affordance::kReachability, i, t[i], e[i]});
  const auto s = performance_scores(base);
  const bool readout = s[0] == 0.0 && s[1] == 0.4 && s[2] == 1.0;

  std::mt19937 rng(1008);
  std::uniform_real_distribution<double> time(5.0, 90.0), a(0.01, 100.0), b(-100.0, 100.0);
  std::uniform_int_distribution<int> errs(0, 8);
  double worst = 0.0;
  for (int subject = 0; subject < 100; ++subject) {
    std::vector<TrialRecord> r;
    for (int i = 0; i < 20; ++i) r.push_back({subject, static_cast<Affordance>(i % 4), i, time(rng), double(errs(rng))});
    r[0].errors = 0;
    r[1].errors = 8;
    std::vector<TrialRecord> scaled = r;
    const double sa = a(rng), sb = b(rng);
    for (auto & x : scaled) x.time_s = sa * x.time_s + sb;
    const auto s0 = performance_scores(r), s1 = performance_scores(scaled);
    for (std::size_t i = 0; i < s0.size(); ++i) worst = std::max(worst, std::abs(s0[i] - s1[i]));
  }
  return {readout && worst <= 1e-9,
          std::string("readout ") + (readout ? "exact" : "wrong") + ", max affine deviation " + fmt(worst)};
}

std::string slurp(const fs::path & p)
{
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism()
{
  const fs::path root = fs::temp_directory_path() / "tva_acceptance";
  fs::remove_all(root);
  std::vector<fs::path> scenarios;
  for (const auto & e : fs::directory_iterator(TVA_SCENARIO_DIR))
    if (e.path().extension() == ".json") scenarios.push_back(e.path());
  std::sort(scenarios.begin(), scenarios.end());
  bool ok = !scenarios.empty();
  std::string codes;
  for (const auto & sc : scenarios) {
    int rc[2];
    for (int run = 0; run < 2; ++run) {
      const fs::path out = root / sc.stem() / std::to_string(run);
      const std::string cmd =
        std::string(TVA_CLI_PATH) + " run " + sc.string() + " --out " + out.string() + " > /dev/null 2>&1";
      const int status = std::system(cmd.c_str());
      rc[run] = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }
    ok = ok && rc[0] == rc[1];
    const fs::path a = root / sc.stem() / "0", b = root / sc.stem() / "1";
    for (const char * f : {"plan.json", "risk.csv", "tether.jsonl", "geometry.txt", "scenario.resolved.json"}) {
      if (fs::exists(a / f) != fs::exists(b / f) || (fs::exists(a / f) && slurp(a / f) != slurp(b / f))) ok = false;
    }
    codes += (codes.empty() ? "" : ", ") + sc.stem().string() + "=" + std::to_string(rc[0]);
  }
  fs::remove_all(root);
  return {ok, std::to_string(scenarios.size()) + " scenarios, exit codes " + codes};
}

}  // namespace

int main()
{
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
    {"kinematics round trip", kinematics_round_trip},
    {"jacobian vs finite differences", jacobian_matches_differences},
    {"risk aggregation oracle", aggregation_oracle},
    {"planner optimality at depth 2", planner_optimality},
    {"manifold fixture values", manifold_fixture},
    {"clustering validity", clustering_validity},
    {"tether contact replay (indoor)", tether_replay},
    {"performance scoring", scoring},
    {"determinism of CLI artifacts", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception & e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << ' ' << (i + 1) << ' ' << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
