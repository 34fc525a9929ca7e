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

#include "tether_va/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "tether_va/errors.hpp"
#include "tether_va/risk.hpp"

namespace tva
{

namespace
{

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void field_error(const std::string & field, const std::string & msg)
{
  throw ConfigError("scenario field '" + field + "': " + msg);
}

void reject_unknown(const json & obj, const std::string & where, const std::set<std::string> & allowed)
{
  for (const auto & [key, _] : obj.items()) {
    if (!allowed.count(key)) {
      field_error(where.empty() ? key : where + "." + key, "unknown key");
    }
  }
}

const json & require(const json & obj, const std::string & key, const std::string & field)
{
  if (!obj.contains(key)) {
    field_error(field, "missing required field");
  }
  return obj.at(key);
}

double get_number(const json & j, const std::string & field)
{
  if (!j.is_number()) {
    field_error(field, "expected a number");
  }
  const double v = j.get<double>();
  if (!std::isfinite(v)) {
    field_error(field, "must be finite");
  }
  return v;
}

int get_int(const json & j, const std::string & field)
{
  if (!j.is_number_integer()) {
    field_error(field, "expected an integer");
  }
  return j.get<int>();
}

Vec3 get_vec(const json & j, const std::string & field)
{
  if (!j.is_array() || j.size() != 3) {
    field_error(field, "expected [x, y, z]");
  }
  return {get_number(j[0], field), get_number(j[1], field), get_number(j[2], field)};
}

Cell get_cell(const json & j, const std::string & field)
{
  if (!j.is_array() || j.size() != 3) {
    field_error(field, "expected [i, j, k]");
  }
  return {get_int(j[0], field), get_int(j[1], field), get_int(j[2], field)};
}

std::string get_string(const json & j, const std::string & field)
{
  if (!j.is_string()) {
    field_error(field, "expected a string");
  }
  return j.get<std::string>();
}

ojson vec_json(const Vec3 & v) { return {v.x(), v.y(), v.z()}; }
ojson cell_json(const Cell & c) { return {c.x, c.y, c.z}; }

std::string slurp(const std::filesystem::path & p, const std::string & what)
{
  std::ifstream in(p, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot read " + what + " '" + p.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void apply_risk(const json & r, RiskConfig & cfg)
{
  if (!r.is_object()) {
    field_error("risk", "expected an object");
  }
  reject_unknown(
    r, "risk",
    {"r_max", "d0", "v0", "c_a", "c_t", "c_L", "L_budget", "c_cp", "eps", "isovist_rays",
     "isovist_range", "distance_range"});
  auto & n = cfg.normalizers;
  const std::pair<const char *, double *> fields[] = {
    {"r_max", &n.r_max}, {"d0", &n.d0},   {"v0", &n.v0},         {"c_a", &n.c_a},
    {"c_t", &n.c_t},     {"c_L", &n.c_L}, {"L_budget", &n.L_budget}, {"c_cp", &n.c_cp},
    {"eps", &n.eps},     {"isovist_range", &cfg.isovist_range},
    {"distance_range", &cfg.distance_range}};
  for (const auto & [key, dst] : fields) {
    if (r.contains(key)) {
      *dst = get_number(r.at(key), std::string("risk.") + key);
    }
  }
  if (r.contains("isovist_rays")) {
    cfg.isovist_rays = get_int(r.at("isovist_rays"), "risk.isovist_rays");
  }
  if (!(n.r_max >= 0.0 && n.r_max < 1.0)) field_error("risk.r_max", "must lie in [0, 1)");
  if (!(n.d0 > 0.0)) field_error("risk.d0", "must be > 0");
  if (!(n.v0 > 0.0)) field_error("risk.v0", "must be > 0");
  if (!(n.L_budget > 0.0)) field_error("risk.L_budget", "must be > 0");
  if (!(n.eps > 0.0 && n.eps < 1.0)) field_error("risk.eps", "must lie in (0, 1)");
  for (const auto & [key, v] : {std::pair{"c_a", n.c_a}, {"c_t", n.c_t}, {"c_L", n.c_L}, {"c_cp", n.c_cp}}) {
    if (!(v >= 0.0)) field_error(std::string("risk.") + key, "must be >= 0");
  }
  if (cfg.isovist_rays < 1) field_error("risk.isovist_rays", "must be >= 1");
}

}  // namespace

RewardMode parse_reward_mode(const std::string & name)
{
  if (name == "terminal") return RewardMode::kTerminal;
  if (name == "integrated") return RewardMode::kIntegrated;
  throw ConfigError("unknown reward mode '" + name + "' (expected terminal or integrated)");
}

const char * reward_mode_name(RewardMode m)
{
  return m == RewardMode::kTerminal ? "terminal" : "integrated";
}

Scenario parse_scenario(const std::string & text, const std::filesystem::path & base_dir)
{
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error & e) {
    // Translate the byte offset into line and column.
    const std::size_t pos = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < pos; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(
      "scenario parse error at line " + std::to_string(line) + ", column " + std::to_string(col) +
      ": " + e.what());
  }
  if (!doc.is_object()) {
    throw ConfigError("scenario must be a JSON object");
  }
  reject_unknown(
    doc, "",
    {"schema", "map", "reel", "start", "task", "affordance", "candidates", "risk", "allow_contacts",
     "inflation_radius", "reward_mode", "manifolds"});

  Scenario s;
  s.base_dir = base_dir;
  if (get_string(require(doc, "schema", "schema"), "schema") != kScenarioSchema) {
    field_error("schema", std::string("expected \"") + kScenarioSchema + "\"");
  }

  const json & map = require(doc, "map", "map");
  if (!map.is_object() || map.size() != 1) {
    field_error("map", "expected exactly one of {\"text\": path} or {\"binary\": path}");
  }
  reject_unknown(map, "map", {"text", "binary"});
  s.map_format = map.begin().key();
  s.map_path = get_string(map.begin().value(), "map." + s.map_format);
  const auto map_file = base_dir / s.map_path;
  if (!std::filesystem::exists(map_file)) {
    field_error("map." + s.map_format, "file not found: " + map_file.string());
  }
  try {
    s.grid = s.map_format == "text" ? load_text_map(map_file.string())
                                    : load_binary_grid(map_file.string());
  } catch (const ConfigError & e) {
    field_error("map." + s.map_format, e.what());
  }

  s.reel = get_vec(require(doc, "reel", "reel"), "reel");
  if (!s.grid.contains(s.reel)) {
    field_error("reel", "position is outside the map");
  }
  if (s.grid.occupied(s.grid.cell_of(s.reel))) {
    field_error("reel", "position is inside an obstacle");
  }

  s.start = get_cell(require(doc, "start", "start"), "start");
  if (!s.grid.in_bounds(s.start)) {
    field_error("start", "cell is outside the map");
  }
  if (s.grid.occupied(s.start)) {
    field_error("start", "cell is occupied");
  }

  const json & task = require(doc, "task", "task");
  if (!task.is_object()) {
    field_error("task", "expected an object");
  }
  reject_unknown(task, "task", {"position", "yaw"});
  s.task.position = get_vec(require(task, "position", "task.position"), "task.position");
  if (task.contains("yaw")) {
    s.task.yaw = get_number(task.at("yaw"), "task.yaw");
  }
  if (!s.grid.contains(s.task.position)) {
    field_error("task.position", "position is outside the map");
  }

  try {
    s.affordance = parse_affordance(get_string(require(doc, "affordance", "affordance"), "affordance"));
  } catch (const ConfigError & e) {
    field_error("affordance", e.what());
  }

  if (doc.contains("candidates")) {
    const json & c = doc.at("candidates");
    if (c.is_string()) {
      if (c.get<std::string>() != "auto") {
        field_error("candidates", "expected \"auto\" or a list of cells");
      }
    } else if (c.is_array()) {
      if (c.empty()) {
        field_error("candidates", "list is empty");
      }
      std::vector<Cell> cells;
      for (std::size_t i = 0; i < c.size(); ++i) {
        const std::string f = "candidates[" + std::to_string(i) + "]";
        cells.push_back(get_cell(c[i], f));
        if (!s.grid.in_bounds(cells.back())) {
          field_error(f, "cell is outside the map");
        }
      }
      s.candidates = std::move(cells);
    } else {
      field_error("candidates", "expected \"auto\" or a list of cells");
    }
  }

  if (doc.contains("risk")) {
    apply_risk(doc.at("risk"), s.risk);
  }
  if (doc.contains("allow_contacts")) {
    if (!doc.at("allow_contacts").is_boolean()) {
      field_error("allow_contacts", "expected a boolean");
    }
    s.allow_contacts = doc.at("allow_contacts").get<bool>();
  }
  if (doc.contains("inflation_radius")) {
    s.inflation_radius = get_number(doc.at("inflation_radius"), "inflation_radius");
    if (s.inflation_radius < 0.0) {
      field_error("inflation_radius", "must be >= 0");
    }
  }
  if (doc.contains("reward_mode")) {
    try {
      s.reward_mode = parse_reward_mode(get_string(doc.at("reward_mode"), "reward_mode"));
    } catch (const ConfigError & e) {
      field_error("reward_mode", e.what());
    }
  }
  if (doc.contains("manifolds")) {
    s.manifolds_path = get_string(doc.at("manifolds"), "manifolds");
    if (!std::filesystem::exists(base_dir / s.manifolds_path)) {
      field_error("manifolds", "file not found: " + (base_dir / s.manifolds_path).string());
    }
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path & path)
{
  const std::string text = slurp(path, "scenario");
  return parse_scenario(text, path.parent_path());
}

std::string scenario_to_json(const Scenario & s)
{
  ojson doc;
  doc["schema"] = kScenarioSchema;
  doc["map"] = {{s.map_format, s.map_path}};
  doc["grid"] = {
    {"dims", {s.grid.dims().x(), s.grid.dims().y(), s.grid.dims().z()}},
    {"resolution", s.grid.resolution()},
    {"origin", vec_json(s.grid.origin())}};
  doc["reel"] = vec_json(s.reel);
  doc["start"] = cell_json(s.start);
  doc["task"] = {{"position", vec_json(s.task.position)}, {"yaw", s.task.yaw}};
  doc["affordance"] = affordance_name(s.affordance);
  if (s.candidates) {
    auto c = ojson::array();
    for (const Cell & cell : *s.candidates) {
      c.push_back(cell_json(cell));
    }
    doc["candidates"] = c;
  } else {
    doc["candidates"] = "auto";
  }
  const auto & n = s.risk.normalizers;
  doc["risk"] = {
    {"r_max", n.r_max},
    {"d0", n.d0},
    {"v0", n.v0},
    {"c_a", n.c_a},
    {"c_t", n.c_t},
    {"c_L", n.c_L},
    {"L_budget", n.L_budget},
    {"c_cp", n.c_cp},
    {"eps", n.eps},
    {"isovist_rays", s.risk.isovist_rays},
    {"isovist_range", s.risk.isovist_range},
    {"distance_range", s.risk.distance_range}};
  doc["allow_contacts"] = s.allow_contacts;
  doc["inflation_radius"] = s.inflation_radius;
  doc["reward_mode"] = reward_mode_name(s.reward_mode);
  doc["manifolds"] = s.manifolds_path.empty() ? ojson("builtin") : ojson(s.manifolds_path);
  return doc.dump(2) + "\n";
}

std::string format_geometry(
  const VoxelGrid & raw, const VoxelGrid & flight, const PlanResult & plan, const Vec3 & reel)
{
  std::ostringstream out;
  const auto put = [&out](const char * type, std::initializer_list<Vec3> pts) {
    out << type;
    for (const Vec3 & p : pts) {
      out << ' ' << format_number(p.x()) << ' ' << format_number(p.y()) << ' ' << format_number(p.z());
    }
    out << '\n';
  };
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const Cell c = raw.cell_at(i);
    if (raw.occupied(c)) {
      put("obstacle", {raw.center(c)});
    } else if (flight.occupied(c)) {
      put("inflated", {raw.center(c)});
    }
  }
  for (const Vec3 & w : plan.waypoints) {
    put("waypoint", {w});
  }
  const auto & chain = plan.tether.contacts;
  for (std::size_t i = 1; i < chain.size(); ++i) {
    put("contact", {chain[i]});
  }
  Vec3 prev = chain.empty() ? reel : chain.front();
  for (std::size_t i = 1; i < chain.size(); ++i) {
    put("tether_segment", {prev, chain[i]});
    prev = chain[i];
  }
  put("tether_segment", {prev, plan.tether.vehicle});
  return out.str();
}

RunArtifacts run_scenario(Scenario s, const RunOptions & options)
{
  if (options.rays) {
    if (*options.rays < 1) {
      throw ConfigError("--rays must be >= 1");
    }
    s.risk.isovist_rays = *options.rays;
  }
  if (options.reward_mode) {
    s.reward_mode = *options.reward_mode;
  }
  if (options.no_inflate) {
    s.inflation_radius = 0.0;
  }

  const VoxelGrid & raw = s.grid;
  const VoxelGrid flight = s.inflation_radius > 0.0 ? inflate(raw, s.inflation_radius) : raw;
  if (flight.occupied(s.start)) {
    field_error("start", "cell lies inside the inflated obstacle margin");
  }

  const AffordanceModel model =
    s.manifolds_path.empty()
      ? default_manifolds()
      : manifolds_from_json(slurp(s.base_dir / s.manifolds_path, "manifold document"));
  const Eigen::VectorXd reward = reward_field(model, s.affordance, s.task, flight);

  PlannerConfig cfg;
  cfg.risk = s.risk;
  cfg.reward_mode = s.reward_mode;
  cfg.allow_contacts = s.allow_contacts;
  const RiskAwarePlanner planner(flight, raw, s.reel, cfg);
  RunArtifacts art;
  art.plan = planner.select_viewpoint(s.start, reward, s.candidates.value_or(std::vector<Cell>{}));
  const PlanResult & plan = art.plan;

  ojson doc;
  doc["schema"] = kPlanSchema;
  if (options.timestamps) {
    const auto now = std::chrono::system_clock::now();
    doc["generated_at_unix_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count();
  }
  doc["affordance"] = affordance_name(s.affordance);
  doc["reward_mode"] = reward_mode_name(s.reward_mode);
  doc["chosen_candidate"] = cell_json(plan.path.back());
  doc["reward"] = plan.reward;
  doc["exact_risk"] = plan.exact_risk;
  doc["utility"] = plan.utility;
  doc["search_cost"] = plan.search_cost;
  auto path = ojson::array();
  auto waypoints = ojson::array();
  for (std::size_t i = 0; i < plan.path.size(); ++i) {
    path.push_back(cell_json(plan.path[i]));
    waypoints.push_back(vec_json(plan.waypoints[i]));
  }
  doc["path"] = path;
  doc["waypoints"] = waypoints;

  auto table = ojson::array();
  double survival = 1.0;
  for (Eigen::Index i = 0; i < plan.profile.values.rows(); ++i) {
    ojson row;
    row["state"] = i;
    row["cell"] = cell_json(plan.path[static_cast<std::size_t>(i)]);
    for (int k = 0; k < kNumRiskElements; ++k) {
      const double r = plan.profile.values(i, k);
      row[element_name(static_cast<RiskElement>(k))] = r;
      survival *= 1.0 - r;
    }
    row["survival"] = survival;
    row["risk"] = 1.0 - survival;
    table.push_back(row);
  }
  doc["risk_table"] = table;

  ojson tether;
  auto contacts = ojson::array();
  for (std::size_t i = 1; i < plan.tether.contacts.size(); ++i) {
    contacts.push_back(vec_json(plan.tether.contacts[i]));
  }
  tether["reel"] = vec_json(s.reel);
  tether["contacts"] = contacts;
  tether["contact_count"] = plan.tether.contact_count();
  tether["static_length"] = static_length(plan.tether);
  std::ostringstream trace;
  auto trace_doc = ojson::array();
  for (const auto & rec : plan.trace) {
    const std::string line = format_trace_line(rec);
    trace << line << '\n';
    trace_doc.push_back(ojson::parse(line));
  }
  tether["trace"] = trace_doc;
  doc["tether"] = tether;

  art.plan_json = doc.dump(2) + "\n";
  art.risk_csv = format_risk_report(plan.path, plan.profile);
  art.tether_jsonl = trace.str();
  art.geometry = format_geometry(raw, flight, plan, s.reel);

  ojson resolved = ojson::parse(scenario_to_json(s));
  resolved["run"] = {
    {"seed", options.seed}, {"no_inflate", options.no_inflate}, {"timestamps", options.timestamps}};
  art.resolved_json = resolved.dump(2) + "\n";
  return art;
}

void write_artifacts(const RunArtifacts & a, const std::filesystem::path & out_dir)
{
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw ConfigError("cannot create output directory '" + out_dir.string() + "': " + ec.message());
  }
  const std::pair<const char *, const std::string *> files[] = {
    {"plan.json", &a.plan_json},
    {"risk.csv", &a.risk_csv},
    {"tether.jsonl", &a.tether_jsonl},
    {"geometry.txt", &a.geometry},
    {"scenario.resolved.json", &a.resolved_json}};
  for (const auto & [name, content] : files) {
    std::ofstream out(out_dir / name, std::ios::binary);
    out << *content;
    if (!out) {
      throw ConfigError("cannot write '" + (out_dir / name).string() + "'");
    }
  }
}

}  // namespace tva
