#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "eigcollide/collisions.hpp"
#include "eigcollide/parallel.hpp"

namespace eigcollide {

struct SeedRange {
  std::uint64_t first = 0;
  std::uint64_t count = 0;

  std::uint64_t end() const { return first + count; }
};

struct TrialSummary {
  std::uint64_t seed = 0;
  ModelSpec spec;
  int collision_count = 0;    // localized plus lower bounds of unresolved squares
  int localized_count = 0;
  int unresolved_count = 0;
  bool degenerate_start = false;
  double wall_seconds = 0.0;
  std::string error;          // non-empty when the trial failed

  bool ok() const { return error.empty(); }
};

inline TrialSummary summarize(const CollisionReport& r, double wall_seconds) {
  TrialSummary s;
  s.seed = r.spec.seed;
  s.spec = r.spec;
  s.collision_count = r.total_lower_bound;
  s.localized_count = r.total_localized;
  s.unresolved_count = static_cast<int>(r.unresolved.size());
  s.degenerate_start = r.degenerate_start;
  s.wall_seconds = wall_seconds;
  return s;
}

/// One grid search per seed; summaries in seed order. A failing trial is
/// recorded with its error and does not stop the batch.
inline std::vector<TrialSummary> run_trials(const ModelSpec& tmpl, SeedRange seeds, const GridConfig& grid,
                                            int parallelism, std::optional<WalkOptions> walk = std::nullopt) {
  if (seeds.count == 0) throw ConfigError("seeds: seed range is empty");
  if (parallelism < 1) throw ConfigError("parallelism: must be at least 1");
  validate(tmpl);
  validate(grid);
  const WalkOptions wo = walk.value_or(WalkOptions::defaults(tmpl.n));
  validate(wo, tmpl.n);

  // Parallelism goes across seeds; each trial runs its own grid serially.
  GridConfig per_trial = grid;
  per_trial.parallelism = 1;
  std::vector<TrialSummary> out(seeds.count);
  parallel_for(seeds.count, parallelism, [&](int, std::size_t k) {
    ModelSpec spec = tmpl;
    spec.seed = seeds.first + k;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const auto report = grid_search(spec, base_matrix(spec), per_trial, wo);
      out[k] = summarize(report, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    } catch (const std::exception& e) {
      TrialSummary s;
      s.seed = spec.seed;
      s.spec = spec;
      s.error = e.what();
      s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      out[k] = s;
    }
  });
  return out;
}

struct Histogram {
  std::vector<double> bin_edges;  // counts.size() + 1 edges
  std::vector<int> counts;
  double mean = 0.0;
  double variance = 0.0;          // population variance
  int trials = 0;
};

/// Integer-aligned histogram of collision counts over successful trials.
inline Histogram histogram(const std::vector<TrialSummary>& summaries, int bin_width = 1) {
  if (bin_width < 1) throw ConfigError("bin_width: must be a positive integer");
  std::vector<int> values;
  for (const auto& s : summaries)
    if (s.ok()) values.push_back(s.collision_count);
  if (values.empty()) throw ConfigError("histogram: no successful trials");

  Histogram h;
  h.trials = static_cast<int>(values.size());
  long double sum = 0;
  for (int v : values) sum += v;
  h.mean = static_cast<double>(sum / values.size());
  long double sq = 0;
  for (int v : values) sq += (v - static_cast<long double>(h.mean)) * (v - static_cast<long double>(h.mean));
  h.variance = static_cast<double>(sq / values.size());

  auto floor_div = [bin_width](int v) { return v >= 0 ? v / bin_width : -((-v + bin_width - 1) / bin_width); };
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const int first = floor_div(*lo), last = floor_div(*hi);
  h.counts.assign(static_cast<std::size_t>(last - first + 1), 0);
  for (int b = first; b <= last + 1; ++b) h.bin_edges.push_back(static_cast<double>(b) * bin_width);
  for (int v : values) ++h.counts[static_cast<std::size_t>(floor_div(v) - first)];
  return h;
}

/// Ramp index per eigenvalue: the rank of its cycle length among the distinct
/// cycle lengths present (1 = shortest).
inline std::vector<int> cycle_coloring(const Permutation& sigma) {
  std::vector<int> length(sigma.size());
  std::vector<int> distinct;
  for (const auto& c : sigma.cycles()) {
    for (int x : c) length[x] = static_cast<int>(c.size());
    distinct.push_back(static_cast<int>(c.size()));
  }
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<int> out(sigma.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = 1 + static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), length[i]) - distinct.begin());
  return out;
}

}  // namespace eigcollide
