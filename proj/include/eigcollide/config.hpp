#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "eigcollide/io.hpp"

namespace eigcollide {

struct SWindow {
  double start = 0.0;
  double end = 0.1;
  double step = 0.01;
};

/// Everything one CLI invocation needs. Unset walk fields follow n.
struct RunConfig {
  ModelSpec spec;
  GridConfig grid;
  std::optional<int> steps_per_unit;
  int max_refinement_depth = WalkOptions{}.max_refinement_depth;
  NeighborPruning pruning = NeighborPruning::BruteForce;
  SWindow s_window;
  int t_steps = 1000;
  SeedRange seeds{0, 1};
  std::string out_dir = ".";
  std::string report_path;  // prior report for collision marks
  bool frames = false;

  WalkOptions walk() const {
    WalkOptions w = WalkOptions::defaults(spec.n);
    if (steps_per_unit) w.steps_per_unit = *steps_per_unit;
    w.max_refinement_depth = max_refinement_depth;
    w.pruning = pruning;
    return w;
  }

  /// s values of the track window, inclusive of both ends.
  std::vector<double> s_values() const {
    std::vector<double> out;
    const int k = static_cast<int>(std::floor((s_window.end - s_window.start) / s_window.step + 1e-9));
    for (int i = 0; i <= k; ++i) out.push_back(std::min(s_window.end, s_window.start + i * s_window.step));
    return out;
  }
};

inline void validate(const RunConfig& c) {
  validate(c.spec);
  validate(c.grid);
  validate(c.walk(), c.spec.n);
  const auto& w = c.s_window;
  if (!(w.start >= 0.0 && w.end <= 1.0 && w.start < w.end))
    throw ConfigError("s_window: need 0 <= start < end <= 1");
  if (!(w.step > 0.0)) throw ConfigError("s_window: step must be positive");
  if (c.t_steps < 1) throw ConfigError("t_steps: must be positive");
  if (c.seeds.count == 0) throw ConfigError("seeds: seed range is empty");
}

inline constexpr const char* kOutDirEnv = "EIGCOLLIDE_OUT_DIR";

inline RunConfig default_run_config() {
  RunConfig c;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) c.out_dir = env;
  return c;
}

/// Applies a JSON config document on top of `c`.
inline void apply_config_json(const json& j, RunConfig& c) {
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  if (j.contains("spec")) from_json_into(j.at("spec"), c.spec);
  if (j.contains("grid")) from_json_into(j.at("grid"), c.grid);
  if (j.contains("walk")) {
    WalkOptions w = c.walk();
    from_json_into(j.at("walk"), w);
    if (j.at("walk").contains("steps_per_unit")) c.steps_per_unit = w.steps_per_unit;
    c.max_refinement_depth = w.max_refinement_depth;
    c.pruning = w.pruning;
  }
  if (j.contains("s_window")) {
    const auto& w = j.at("s_window");
    detail::read_field(w, "start", c.s_window.start);
    detail::read_field(w, "end", c.s_window.end);
    detail::read_field(w, "step", c.s_window.step);
  }
  detail::read_field(j, "t_steps", c.t_steps);
  if (j.contains("seeds")) {
    detail::read_field(j.at("seeds"), "first", c.seeds.first);
    detail::read_field(j.at("seeds"), "count", c.seeds.count);
  } else if (j.contains("spec") && j.at("spec").contains("seed")) {
    c.seeds = {c.spec.seed, 1};
  }
  detail::read_field(j, "out_dir", c.out_dir);
  detail::read_field(j, "report", c.report_path);
  detail::read_field(j, "frames", c.frames);
}

inline RunConfig load_run_config(const std::string& path) {
  RunConfig c = default_run_config();
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + std::string(e.what()));
  }
  apply_config_json(j, c);
  return c;
}

inline json to_json(const RunConfig& c) {
  return {{"spec", to_json(c.spec)},
          {"grid", to_json(c.grid)},
          {"walk", to_json(c.walk())},
          {"s_window", {{"start", c.s_window.start}, {"end", c.s_window.end}, {"step", c.s_window.step}}},
          {"t_steps", c.t_steps},
          {"seeds", {{"first", c.seeds.first}, {"count", c.seeds.count}}},
          {"out_dir", c.out_dir},
          {"frames", c.frames}};
}

}  // namespace eigcollide
