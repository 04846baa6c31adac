// eigcollide: collision search, trajectory plots and multi-seed statistics.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "eigcollide/config.hpp"
#include "eigcollide/svg.hpp"

namespace fs = std::filesystem;
using namespace eigcollide;

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kNumerical = 3, kIo = 4 };

struct Flags {
  std::string config;
  std::optional<int> n, m, steps_per_unit, t_steps, parallelism, subdivision_depth;
  std::optional<std::string> ensemble, curve, init, seeds, s_window, out_dir, report;
  std::optional<std::uint64_t> seed;
  bool frames = false;
};

SeedRange parse_seeds(const std::string& text) {
  const auto dash = text.find('-');
  try {
    if (dash == std::string::npos) return {std::stoull(text), 1};
    const auto a = std::stoull(text.substr(0, dash)), b = std::stoull(text.substr(dash + 1));
    if (b < a) throw ConfigError("seeds: range '" + text + "' is empty");
    return {a, b - a + 1};
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const ConfigError*>(&e)) throw;
    throw ConfigError("seeds: expected FIRST-LAST, got '" + text + "'");
  }
}

SWindow parse_window(const std::string& text) {
  SWindow w;
  char extra = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &w.start, &w.end, &w.step, &extra) != 3)
    throw ConfigError("s_window: expected START:END:STEP, got '" + text + "'");
  return w;
}

RunConfig resolve(const Flags& f) {
  RunConfig c = f.config.empty() ? default_run_config() : load_run_config(f.config);
  if (f.n) c.spec.n = *f.n;
  if (f.ensemble) c.spec.ensemble = parse_ensemble(*f.ensemble);
  if (f.curve) {
    try {
      c.spec.curve = parse_curve(*f.curve);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("curve: ") + e.what());
    }
  }
  if (f.init) c.spec.init = parse_init(*f.init);
  if (f.seed) c.seeds = {*f.seed, 1};
  if (f.seeds) c.seeds = parse_seeds(*f.seeds);
  c.spec.seed = c.seeds.first;
  if (f.m) c.grid.m = *f.m;
  if (f.subdivision_depth) c.grid.subdivision_depth = *f.subdivision_depth;
  if (f.parallelism) c.grid.parallelism = *f.parallelism;
  if (f.steps_per_unit) c.steps_per_unit = *f.steps_per_unit;
  if (f.t_steps) c.t_steps = *f.t_steps;
  if (f.s_window) c.s_window = parse_window(*f.s_window);
  if (f.out_dir) c.out_dir = *f.out_dir;
  if (f.report) c.report_path = *f.report;
  if (f.frames) c.frames = true;
  validate(c);
  return c;
}

std::string stem(const RunConfig& c, const char* kind) {
  std::ostringstream os;
  os << kind << '_' << to_string(c.spec.curve) << "_n" << c.spec.n << '_' << to_string(c.spec.ensemble);
  if (c.spec.init != InitKind::PlainGinibre) os << '_' << to_string(c.spec.init);
  return os.str();
}

fs::path prepare_out_dir(const RunConfig& c) {
  std::error_code ec;
  fs::create_directories(c.out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + c.out_dir + "': " + ec.message());
  return fs::path(c.out_dir);
}

int cmd_collide(const RunConfig& c) {
  const auto dir = prepare_out_dir(c);
  for (std::uint64_t seed = c.seeds.first; seed < c.seeds.end(); ++seed) {
    ModelSpec spec = c.spec;
    spec.seed = seed;
    const auto report = grid_search(spec, base_matrix(spec), c.grid, c.walk());
    const std::string base = stem(c, "collide") + "_seed" + std::to_string(seed);
    write_text_file((dir / (base + ".json")).string(), to_json(report).dump(2) + "\n");
    std::ostringstream csv;
    write_record_csv(csv, report);
    write_text_file((dir / (base + ".csv")).string(), csv.str());
    std::cout << "seed " << seed << ": " << report.total_localized << " localized, " << report.total_lower_bound
              << " lower bound, " << report.unresolved.size() << " unresolved -> " << (dir / base).string()
              << ".{json,csv}\n";
  }
  return kOk;
}

int cmd_tracks(const RunConfig& c) {
  const auto dir = prepare_out_dir(c);
  const ModelSpec spec = c.spec;
  const auto base = base_matrix(spec);
  Tracker tracker(spec, base, c.walk());
  std::vector<TrackSet> sets;
  for (double s : c.s_values()) sets.push_back(compute_tracks(tracker, s, c.t_steps));

  std::vector<CollisionRecord> marks;
  if (!c.report_path.empty()) {
    try {
      const auto report = report_records_from_json(json::parse(read_text_file(c.report_path)));
      for (const auto& r : report.records)
        if (r.s >= c.s_window.start && r.s <= c.s_window.end) marks.push_back(r);
    } catch (const std::exception& e) {
      std::cerr << "warning: collision marks skipped: " << e.what() << '\n';
    }
  }

  const std::string name = stem(c, "tracks") + "_seed" + std::to_string(spec.seed);
  write_text_file((dir / (name + ".svg")).string(), tracks_svg(sets, spec.curve, marks));
  std::vector<TrackRow> rows;
  for (const auto& ts : sets)
    for (std::size_t k = 0; k < ts.samples.size(); ++k)
      for (std::size_t i = 0; i < ts.n(); ++i) rows.push_back({ts.s, ts.t[k], static_cast<int>(i), ts.samples[k][i]});
  std::ostringstream csv;
  write_track_csv(csv, rows);
  write_text_file((dir / (name + ".csv")).string(), csv.str());
  json meta = to_json(c);
  json perms = json::array();
  for (const auto& ts : sets) {
    std::ostringstream p;
    p << ts.sigma;
    perms.push_back({{"s", ts.s}, {"sigma", p.str()}, {"coloring", cycle_coloring(ts.sigma)}});
  }
  meta["stripes"] = perms;
  meta["marks"] = marks.size();
  write_text_file((dir / (name + ".json")).string(), meta.dump(2) + "\n");

  if (c.frames) {
    const auto fdir = dir / (name + "_frames");
    std::error_code ec;
    fs::create_directories(fdir, ec);
    if (ec) throw IoError("cannot create frame directory '" + fdir.string() + "'");
    for (int k = 0; k <= c.t_steps; ++k) {
      char fname[32];
      std::snprintf(fname, sizeof fname, "frame_%05d.svg", k);
      write_text_file((fdir / fname).string(), frame_svg(sets, spec.curve, static_cast<std::size_t>(k)));
    }
  }
  std::cout << sets.size() << " s-values, " << marks.size() << " marks -> " << (dir / name).string()
            << ".{svg,csv,json}\n";
  return kOk;
}

int cmd_stats(const RunConfig& c) {
  const auto dir = prepare_out_dir(c);
  const auto summaries = run_trials(c.spec, c.seeds, c.grid, c.grid.parallelism, c.walk());
  const std::string name = stem(c, "stats") + "_seeds" + std::to_string(c.seeds.first) + "-" +
                           std::to_string(c.seeds.end() - 1);
  std::ostringstream lines;
  int failed = 0, degenerate = 0;
  for (const auto& s : summaries) {
    lines << to_json(s).dump() << '\n';
    failed += !s.ok();
    degenerate += s.degenerate_start;
  }
  write_text_file((dir / (name + ".jsonl")).string(), lines.str());
  const auto h = histogram(summaries);
  std::ostringstream csv;
  write_histogram_csv(csv, h);
  write_text_file((dir / (name + "_histogram.csv")).string(), csv.str());
  json stats = to_json(h);
  stats["failed"] = failed;
  stats["degenerate_start"] = degenerate;
  write_text_file((dir / (name + "_histogram.json")).string(), stats.dump(2) + "\n");
  write_text_file((dir / (name + "_histogram.svg")).string(),
                  histogram_svg(h, std::string(to_string(c.spec.curve)) + ", n=" + std::to_string(c.spec.n)));
  std::printf("%zu trials (%d failed, %d degenerate start): mean %.3f, variance %.3f -> %s\n", summaries.size(),
              failed, degenerate, h.mean, h.variance, (dir / name).string().c_str());
  return kOk;
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON config file; flags override its fields");
  sub->add_option("--n", f.n, "matrix dimension");
  sub->add_option("--ensemble", f.ensemble,
                  "complex_gaussian | symmetric_bernoulli | traceless_bernoulli | traceless_complex_gaussian");
  sub->add_option("--curve", f.curve, "circle | circuit | crossing");
  sub->add_option("--init", f.init, "plain_ginibre | meander_rotated | sectors_rotated");
  sub->add_option("--seed", f.seed, "single seed");
  sub->add_option("--seeds", f.seeds, "seed range FIRST-LAST (inclusive)");
  sub->add_option("--m", f.m, "grid multiplier (m*n squares per side)");
  sub->add_option("--subdivision-depth", f.subdivision_depth, "levels of subdivision for unresolved squares");
  sub->add_option("--steps-per-unit", f.steps_per_unit, "tracking steps per unit parameter length (default 16n)");
  sub->add_option("--t-steps", f.t_steps, "t samples per track");
  sub->add_option("--s-window", f.s_window, "START:END:STEP for trajectory rendering");
  sub->add_option("--out-dir", f.out_dir, std::string("output directory (default $") + kOutDirEnv + " or .)");
  sub->add_option("--report", f.report, "collision report JSON for X marks");
  sub->add_flag("--frames", f.frames, "also emit one SVG per t sample");
  sub->add_option("--parallelism", f.parallelism, "worker threads");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eigenvalue collisions of alpha(s) C + beta(s) U(t)"};
  app.require_subcommand(1);
  Flags flags;
  auto* collide = app.add_subcommand("collide", "grid search for collisions; writes report JSON and CSV");
  auto* tracks = app.add_subcommand("tracks", "eigenvalue trajectories over an s window; writes SVG and CSV");
  auto* stats = app.add_subcommand("stats", "collision counts over a seed range; writes summaries and histogram");
  for (auto* sub : {collide, tracks, stats}) add_common(sub, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    const RunConfig config = resolve(flags);
    if (collide->parsed()) return cmd_collide(config);
    if (tracks->parsed()) return cmd_tracks(config);
    return cmd_stats(config);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
}
