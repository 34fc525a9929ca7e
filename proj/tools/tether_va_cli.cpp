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

// Command-line front end: plan a scenario, or export/fit manifold models.

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include "CLI11.hpp"
#include "tether_va/errors.hpp"
#include "tether_va/scenario.hpp"
#include "tether_va/viewpoint.hpp"

namespace
{

int report(tva::ErrorCategory c, const std::string & msg)
{
  std::cerr << "error: " << tva::category_name(c) << ": " << msg << '\n';
  return static_cast<int>(c);
}

int cmd_run(
  const std::string & scenario_path, const std::string & out_dir, const tva::RunOptions & opts)
{
  const tva::Scenario s = tva::load_scenario(scenario_path);
  const tva::RunArtifacts art = tva::run_scenario(s, opts);
  tva::write_artifacts(art, out_dir);
  std::cout << "goal " << art.plan.path.back() << " states " << art.plan.path.size() << " contacts "
            << art.plan.tether.contact_count() << " risk " << art.plan.exact_risk << " utility "
            << art.plan.utility << '\n';
  return 0;
}

int cmd_manifolds(const std::string & out_path, const std::string & trials_path, double threshold)
{
  tva::AffordanceModel model;
  if (trials_path.empty()) {
    model = tva::default_manifolds();
  } else {
    std::ifstream in(trials_path);
    if (!in) {
      throw tva::ConfigError("cannot read trials '" + trials_path + "'");
    }
    const auto records = tva::read_trial_records(in);
    std::set<tva::Affordance> present;
    for (const auto & r : records) {
      present.insert(r.affordance);
    }
    const auto viewpoints = tva::sample_hemisphere(1.5, 30);
    for (const tva::Affordance a : present) {
      const auto values = tva::viewpoint_values(records, a, static_cast<int>(viewpoints.size()));
      model.affordances.push_back(tva::fit_manifolds(a, viewpoints, values, threshold));
    }
  }
  const std::string text = tva::manifolds_to_json(model);
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    out << text;
    if (!out) {
      throw tva::ConfigError("cannot write '" + out_path + "'");
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Risk-aware viewpoint planning for a tethered aerial visual assistant"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = "out";
  tva::RunOptions opts;
  std::optional<int> rays;
  std::string reward_mode;
  auto * run = app.add_subcommand("run", "Plan a scenario and write artifacts");
  run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_option("--seed", opts.seed, "Reserved; recorded but unused");
  run->add_option("--rays", rays, "Isovist rays per cell (overrides the scenario)");
  run->add_flag("--no-inflate", opts.no_inflate, "Plan on the raw occupancy grid");
  run->add_option("--reward-mode", reward_mode, "terminal or integrated")
    ->check(CLI::IsMember({"terminal", "integrated"}));
  run->add_flag("--timestamps", opts.timestamps, "Add wall-clock time to plan.json");

  std::string manifold_out;
  std::string trials;
  double threshold = 1.15;
  auto * man = app.add_subcommand("manifolds", "Export built-in manifolds or fit them from trials");
  man->add_option("--out", manifold_out, "Output file (stdout if omitted)");
  man->add_option("--trials", trials, "Trial CSV: subject,affordance,viewpoint,time_s,errors");
  man->add_option("--threshold", threshold, "Inconsistency cut for fitting")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(tva::ErrorCategory::kConfig);
  }

  try {
    if (*run) {
      opts.rays = rays;
      if (!reward_mode.empty()) {
        opts.reward_mode = tva::parse_reward_mode(reward_mode);
      }
      return cmd_run(scenario_path, out_dir, opts);
    }
    return cmd_manifolds(manifold_out, trials, threshold);
  } catch (const tva::Error & e) {
    return report(e.category(), e.what());
  } catch (const std::exception & e) {
    return report(tva::ErrorCategory::kConfig, e.what());
  }
}
