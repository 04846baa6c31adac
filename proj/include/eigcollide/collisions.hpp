#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "eigcollide/parallel.hpp"
#include "eigcollide/tracking.hpp"

namespace eigcollide {

struct GridConfig {
  int m = 20;                  // grid multiplier: (m n)^2 squares
  int subdivision_depth = 6;   // 0 disables subdivision of unresolved squares
  double start_offset = 0.001; // first s column when the s=0 spectrum is degenerate
  int parallelism = 1;

  int squares_per_side(int n) const { return m * n; }
};

inline void validate(const GridConfig& g) {
  if (g.m < 1) throw ConfigError("m: grid multiplier must be positive");
  if (g.subdivision_depth < 0) throw ConfigError("subdivision_depth: must be non-negative");
  if (!(g.start_offset > 0.0 && g.start_offset < 1.0)) throw ConfigError("start_offset: must lie in (0,1)");
  if (g.parallelism < 1) throw ConfigError("parallelism: must be at least 1");
}

enum class LoopClass { Identity, DisjointTranspositions, Complex };

inline std::string_view to_string(LoopClass c) {
  switch (c) {
    case LoopClass::Identity: return "identity";
    case LoopClass::DisjointTranspositions: return "disjoint_transpositions";
    case LoopClass::Complex: return "complex";
  }
  return "?";
}

using IndexPair = std::pair<int, int>;

struct LoopPermutation {
  Permutation sigma;
  std::vector<std::vector<int>> cycles;  // non-trivial cycles only
  LoopClass kind = LoopClass::Identity;
  std::vector<IndexPair> transpositions; // filled for DisjointTranspositions
  int collision_lower_bound = 0;         // sum of (cycle length - 1)
};

inline LoopPermutation classify(const Permutation& sigma) {
  LoopPermutation out;
  out.sigma = sigma;
  bool all_pairs = true;
  for (auto& c : sigma.cycles()) {
    if (c.size() < 2) continue;
    out.collision_lower_bound += static_cast<int>(c.size()) - 1;
    if (c.size() == 2)
      out.transpositions.emplace_back(c[0], c[1]);
    else
      all_pairs = false;
    out.cycles.push_back(std::move(c));
  }
  if (out.cycles.empty())
    out.kind = LoopClass::Identity;
  else if (all_pairs)
    out.kind = LoopClass::DisjointTranspositions;
  else {
    out.kind = LoopClass::Complex;
    out.transpositions.clear();
  }
  return out;
}

enum class LocalizationMethod { SideMinima, Subdivision };

inline std::string_view to_string(LocalizationMethod m) {
  return m == LocalizationMethod::SideMinima ? "side_minima" : "subdivision";
}

struct GridSquare {
  int i = 0;  // s index
  int j = 0;  // t index
  friend bool operator==(const GridSquare&, const GridSquare&) = default;
};

struct CollisionRecord {
  double s = 0.0;
  double t = 0.0;
  Complex lambda;
  IndexPair pair;           // raw eigenvalue labels at the reporting cell's (s0,t0) corner
  GridSquare square;
  ParamRect cell{};         // reporting cell (a sub-square when subdivided)
  int depth = 0;            // subdivision level of the cell
  LocalizationMethod method = LocalizationMethod::SideMinima;
  double residual_gap = 0.0;
};

struct UnresolvedSquare {
  GridSquare square;
  ParamRect cell{};
  int depth = 0;
  LoopClass kind = LoopClass::Complex;
  int lower_bound = 0;
  std::string reason;       // "depth_exhausted", "subdivision_disabled" or a tracking error
};

struct SquareSummary {
  GridSquare square;
  LoopClass kind;
  int lower_bound;
  std::vector<std::vector<int>> cycles;
};

struct CollisionReport {
  ModelSpec spec;
  GridConfig grid;
  WalkOptions walk;
  double s_start = 0.0;
  bool degenerate_start = false;
  std::vector<CollisionRecord> records;
  std::vector<UnresolvedSquare> unresolved;
  std::vector<SquareSummary> nonidentity_squares;
  int total_localized = 0;
  int total_lower_bound = 0;
  long solves = 0;
  long refinements = 0;
};

// ---------------------------------------------------------------------------
// Localization

/// A recorded side of a loop together with the labels the colliding pair
/// carries in that trace.
struct SideTrace {
  const std::vector<TraceSample>* samples = nullptr;
  int a = -1;
  int b = -1;
};

namespace detail {

/// Gap of the tracked pair (a, b) at (s, t), walking from a recorded corner
/// sample first along s, then along t.
inline double pair_gap_at(Tracker& tracker, const TraceSample& corner, int a, int b, double s, double t) {
  TrackState st = tracker.start_from_raw(corner.s, corner.t, corner.eigenvalues);
  if (s != st.s) st = tracker.walk(st, s, st.t);
  if (t != st.t) st = tracker.walk(st, st.s, t);
  return std::abs(st.eigenvalues[a] - st.eigenvalues[b]);
}

/// Compass search on the pair gap, confined to the cell, until the gap drops
/// below `target`. Updates (s, t) and returns the gap there.
inline double descend_pair_gap(Tracker& tracker, const TraceSample& corner, int a, int b, const ParamRect& cell,
                               double target, double& s, double& t) {
  const double lo_s = std::min(cell.s0, cell.s1), hi_s = std::max(cell.s0, cell.s1);
  const double lo_t = std::min(cell.t0, cell.t1), hi_t = std::max(cell.t0, cell.t1);
  double best = pair_gap_at(tracker, corner, a, b, s, t);
  double hs = 0.25 * (hi_s - lo_s), ht = 0.25 * (hi_t - lo_t);
  for (int iter = 0; iter < 60 && best >= target && hs > 1e-9 * (hi_s - lo_s); ++iter) {
    bool moved = false;
    for (auto [ds, dt] : {std::pair{hs, 0.0}, {-hs, 0.0}, {0.0, ht}, {0.0, -ht}}) {
      const double cs = std::clamp(s + ds, lo_s, hi_s), ct = std::clamp(t + dt, lo_t, hi_t);
      const double g = pair_gap_at(tracker, corner, a, b, cs, ct);
      if (g < best) {
        best = g;
        s = cs;
        t = ct;
        moved = true;
        break;
      }
    }
    if (!moved) {
      hs *= 0.5;
      ht *= 0.5;
    }
  }
  return best;
}

}  // namespace detail

/// Estimate (s, t, lambda) of the collision of one pair inside `cell` from the
/// pair's distance minima along the four sides, weighted by 1/distance.
inline CollisionRecord localize_pair(Tracker& tracker, const ParamRect& cell, IndexPair pair,
                                     std::span<const SideTrace, 4> sides,
                                     LocalizationMethod method = LocalizationMethod::SideMinima) {
  constexpr double kUnderflow = 1e-14;
  struct SideMin {
    double s, t, d;
    Complex mid;
  };
  std::array<SideMin, 4> mins{};
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& side = sides[k];
    if (!side.samples || side.samples->empty())
      throw std::logic_error("localize_pair: side trace " + std::to_string(k) + " is missing");
    SideMin best{0, 0, std::numeric_limits<double>::infinity(), {}};
    for (const auto& smp : *side.samples) {
      const int n = static_cast<int>(smp.eigenvalues.size());
      if (side.a < 0 || side.b < 0 || side.a >= n || side.b >= n || side.a == side.b)
        throw std::logic_error("localize_pair: side trace does not carry the pair indices");
      const double d = std::abs(smp.eigenvalues[side.a] - smp.eigenvalues[side.b]);
      if (d < best.d) best = {smp.s, smp.t, d, 0.5 * (smp.eigenvalues[side.a] + smp.eigenvalues[side.b])};
    }
    mins[k] = best;
  }

  CollisionRecord rec;
  rec.pair = {std::min(pair.first, pair.second), std::max(pair.first, pair.second)};
  rec.cell = cell;
  rec.method = method;

  const auto global = std::min_element(mins.begin(), mins.end(), [](auto& x, auto& y) { return x.d < y.d; });
  rec.lambda = global->mid;
  if (global->d < kUnderflow) {
    rec.s = global->s;
    rec.t = global->t;
  } else {
    double wsum = 0, s = 0, t = 0;
    for (const auto& m : mins) {
      const double w = 1.0 / m.d;
      wsum += w;
      s += w * m.s;
      t += w * m.t;
    }
    rec.s = std::clamp(s / wsum, std::min(cell.s0, cell.s1), std::max(cell.s0, cell.s1));
    rec.t = std::clamp(t / wsum, std::min(cell.t0, cell.t1), std::max(cell.t0, cell.t1));
  }
  const TraceSample& corner = sides[0].samples->front();
  rec.residual_gap = detail::pair_gap_at(tracker, corner, sides[0].a, sides[0].b, rec.s, rec.t);
  if (rec.residual_gap >= global->d) {
    // Strongly anisotropic gap: the combination lands off the valley. Start
    // from the best side sample and descend on the pair gap inside the cell.
    rec.s = global->s;
    rec.t = global->t;
    rec.residual_gap = detail::descend_pair_gap(tracker, corner, sides[0].a, sides[0].b, cell, 0.5 * global->d,
                                                rec.s, rec.t);
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Square loops and subdivision

/// Loop permutation of one cell, tracked directly from its (s0,t0) corner.
inline LoopPermutation square_loop(Tracker& tracker, const ParamRect& cell) {
  const TrackState corner = tracker.start(cell.s0, cell.t0);
  return classify(tracker.track_loop(corner, cell).sigma);
}

inline LoopPermutation square_loop(const ModelSpec& spec, const ComplexMatrix& base, const ParamRect& cell,
                                   const WalkOptions& opts) {
  Tracker tr(spec, base, opts);
  return square_loop(tr, cell);
}

struct ResolveResult {
  std::vector<CollisionRecord> records;
  std::vector<UnresolvedSquare> unresolved;
};

inline std::array<ParamRect, 4> quarter(const ParamRect& c) {
  const double sm = 0.5 * (c.s0 + c.s1), tm = 0.5 * (c.t0 + c.t1);
  return {ParamRect{c.s0, sm, c.t0, tm}, ParamRect{sm, c.s1, c.t0, tm}, ParamRect{sm, c.s1, tm, c.t1},
          ParamRect{c.s0, sm, tm, c.t1}};
}

/// Localize every transposition of a loop tracked with side traces.
inline std::vector<CollisionRecord> localize_loop(Tracker& tracker, const ParamRect& cell, const LoopPermutation& lp,
                                                  const Tracker::LoopResult& loop, GridSquare sq, int depth,
                                                  LocalizationMethod method) {
  std::vector<CollisionRecord> out;
  for (const auto& [a, b] : lp.transpositions) {
    std::array<SideTrace, 4> sides;
    for (std::size_t k = 0; k < 4; ++k) sides[k] = {&loop.sides[k], a, b};
    auto rec = localize_pair(tracker, cell, {a, b}, sides, method);
    rec.square = sq;
    rec.depth = depth;
    out.push_back(rec);
  }
  return out;
}

/// Splits a cell whose loop is not a product of disjoint transpositions into
/// quarters, recursively, until every piece can be localized or the depth
/// budget runs out.
inline ResolveResult subdivide_and_resolve(Tracker& tracker, const ParamRect& cell, const LoopPermutation& parent,
                                           int depth_remaining, GridSquare sq = {}, int level = 0) {
  ResolveResult out;
  if (depth_remaining <= 0) {
    out.unresolved.push_back({sq, cell, level, parent.kind, parent.collision_lower_bound,
                              level == 0 ? "subdivision_disabled" : "depth_exhausted"});
    return out;
  }
  for (const auto& child : quarter(cell)) {
    try {
      const TrackState corner = tracker.start(child.s0, child.t0);
      const auto loop = tracker.track_loop(corner, child, true);
      const auto lp = classify(loop.sigma);
      if (lp.kind == LoopClass::Identity) continue;
      if (lp.kind == LoopClass::DisjointTranspositions) {
        auto recs = localize_loop(tracker, child, lp, loop, sq, level + 1, LocalizationMethod::Subdivision);
        out.records.insert(out.records.end(), recs.begin(), recs.end());
        continue;
      }
      if (depth_remaining - 1 <= 0) {
        out.unresolved.push_back({sq, child, level + 1, lp.kind, lp.collision_lower_bound, "depth_exhausted"});
        continue;
      }
      auto sub = subdivide_and_resolve(tracker, child, lp, depth_remaining - 1, sq, level + 1);
      out.records.insert(out.records.end(), sub.records.begin(), sub.records.end());
      out.unresolved.insert(out.unresolved.end(), sub.unresolved.begin(), sub.unresolved.end());
    } catch (const NumericalError& e) {
      out.unresolved.push_back({sq, child, level + 1, LoopClass::Complex, 0, e.what()});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stripes

/// sigma(s): loop permutation of t: 0 -> 1 at fixed s, in the raw labels of (s, 0).
inline Permutation stripe_permutation(Tracker& tracker, double s) {
  const TrackState st = tracker.start(s, 0.0);
  const Spectrum raw0 = st.eigenvalues;
  const TrackState end = tracker.walk(st, s, 1.0, tracker.steps_for(1.0), nullptr, &raw0);
  return end.raw_index;
}

inline Permutation stripe_permutation(const ModelSpec& spec, const ComplexMatrix& base, double s,
                                      const WalkOptions& opts) {
  Tracker tr(spec, base, opts);
  return stripe_permutation(tr, s);
}

// ---------------------------------------------------------------------------
// Grid search

/// Grid lattice: node spectra and the transport of every grid edge, each edge
/// tracked once in increasing s or t. Square loops are compositions of edge
/// transports, so neighbouring squares always agree on shared edges.
class GridLattice {
 public:
  GridLattice(int n, const GridConfig& grid, double s_start) : k_(grid.squares_per_side(n)), s_start_(s_start) {}

  int side() const noexcept { return k_; }

  double s_at(int i) const { return i == k_ ? 1.0 : s_start_ + (1.0 - s_start_) * i / k_; }
  double t_at(int j) const { return j == k_ ? 1.0 : static_cast<double>(j) / k_; }

  ParamRect cell(int i, int j) const { return {s_at(i), s_at(i + 1), t_at(j), t_at(j + 1)}; }

  const Spectrum& node(int i, int j) const { return nodes_[idx_node(i, j % k_)]; }

  /// Forward transport of the s-edge (i,j)->(i+1,j); nullopt when tracking failed.
  const std::optional<Permutation>& h_edge(int i, int j) const { return h_[idx_h(i, j % k_)]; }
  /// Forward transport of the t-edge (i,j)->(i,j+1).
  const std::optional<Permutation>& v_edge(int i, int j) const { return v_[idx_v(i, j % k_)]; }
  const std::string& h_error(int i, int j) const { return h_err_[idx_h(i, j % k_)]; }
  const std::string& v_error(int i, int j) const { return v_err_[idx_v(i, j % k_)]; }

  void build(std::vector<Tracker>& workers) {
    const int k = k_;
    nodes_.assign(static_cast<std::size_t>((k + 1) * k), {});
    h_.assign(static_cast<std::size_t>(k * k), std::nullopt);
    v_.assign(static_cast<std::size_t>((k + 1) * k), std::nullopt);
    h_err_.assign(h_.size(), {});
    v_err_.assign(v_.size(), {});
    const int nw = static_cast<int>(workers.size());

    parallel_for(static_cast<std::size_t>(k + 1), nw, [&](int w, std::size_t i) {
      for (int j = 0; j < k; ++j) nodes_[idx_node(static_cast<int>(i), j)] = workers[w].solve(s_at(i), t_at(j));
    });
    parallel_for(static_cast<std::size_t>(k + 1), nw, [&](int w, std::size_t ii) {
      const int i = static_cast<int>(ii);
      for (int j = 0; j < k; ++j) {
        if (i < k) track_edge(workers[w], i, j, true);
        track_edge(workers[w], i, j, false);
      }
    });
  }

  /// Re-walk one edge with a trace. Bitwise identical to the cached walk.
  Permutation trace_edge(Tracker& tr, int i, int j, bool along_s, std::vector<TraceSample>* trace) const {
    const int i1 = along_s ? i + 1 : i, j1 = along_s ? j : j + 1;
    const TrackState from = tr.start_from_raw(s_at(i), t_at(j), node(i, j));
    const double to_s = s_at(i1), to_t = t_at(j1);
    const int steps = tr.steps_for(along_s ? to_s - s_at(i) : to_t - t_at(j));
    const Spectrum& end = node(i1, j1);
    return tr.walk(from, to_s, to_t, steps, trace, &end).raw_index;
  }

 private:
  std::size_t idx_node(int i, int j) const { return static_cast<std::size_t>(i * k_ + j); }
  std::size_t idx_h(int i, int j) const { return static_cast<std::size_t>(i * k_ + j); }
  std::size_t idx_v(int i, int j) const { return static_cast<std::size_t>(i * k_ + j); }

  void track_edge(Tracker& tr, int i, int j, bool along_s) {
    auto& slot = along_s ? h_[idx_h(i, j)] : v_[idx_v(i, j)];
    try {
      slot = trace_edge(tr, i, j, along_s, nullptr);
    } catch (const NumericalError& e) {
      (along_s ? h_err_[idx_h(i, j)] : v_err_[idx_v(i, j)]) = e.what();
    }
  }

  int k_;
  double s_start_;
  std::vector<Spectrum> nodes_;
  std::vector<std::optional<Permutation>> h_, v_;
  std::vector<std::string> h_err_, v_err_;
};

namespace detail {

struct SquareOutcome {
  std::optional<SquareSummary> summary;
  std::vector<CollisionRecord> records;
  std::vector<UnresolvedSquare> unresolved;
};

inline SquareOutcome process_square(const GridLattice& lat, Tracker& tr, const GridConfig& grid, int i, int j) {
  SquareOutcome out;
  const GridSquare sq{i, j};
  const ParamRect cell = lat.cell(i, j);
  const auto& bottom = lat.h_edge(i, j);
  const auto& right = lat.v_edge(i + 1, j);
  const auto& top = lat.h_edge(i, j + 1);
  const auto& left = lat.v_edge(i, j);
  if (!bottom || !right || !top || !left) {
    std::string why = !bottom ? lat.h_error(i, j)
                      : !right ? lat.v_error(i + 1, j)
                      : !top   ? lat.h_error(i, j + 1)
                               : lat.v_error(i, j);
    out.unresolved.push_back({sq, cell, 0, LoopClass::Complex, 0, "tracking_failure: " + why});
    return out;
  }
  const Permutation sigma = bottom->then(*right).then(top->inverse()).then(left->inverse());
  const LoopPermutation lp = classify(sigma);
  if (lp.kind == LoopClass::Identity) return out;
  out.summary = SquareSummary{sq, lp.kind, lp.collision_lower_bound, lp.cycles};

  if (lp.kind == LoopClass::DisjointTranspositions) {
    // Canonical forward traces of the four edges, labelled from each edge's start node.
    std::array<std::vector<TraceSample>, 4> traces;
    lat.trace_edge(tr, i, j, true, &traces[0]);
    lat.trace_edge(tr, i + 1, j, false, &traces[1]);
    lat.trace_edge(tr, i, j + 1, true, &traces[2]);
    lat.trace_edge(tr, i, j, false, &traces[3]);
    const Permutation top_inv = top->inverse();
    for (const auto& [a, b] : lp.transpositions) {
      const std::array<SideTrace, 4> sides = {
          SideTrace{&traces[0], a, b},
          SideTrace{&traces[1], (*bottom)[a], (*bottom)[b]},
          SideTrace{&traces[2], top_inv[(*right)[(*bottom)[a]]], top_inv[(*right)[(*bottom)[b]]]},
          SideTrace{&traces[3], a, b}};
      auto rec = localize_pair(tr, cell, {a, b}, sides, LocalizationMethod::SideMinima);
      rec.square = sq;
      out.records.push_back(rec);
    }
    return out;
  }

  auto res = subdivide_and_resolve(tr, cell, lp, grid.subdivision_depth, sq, 0);
  out.records = std::move(res.records);
  out.unresolved = std::move(res.unresolved);
  return out;
}

inline bool adjacent(const GridSquare& a, const GridSquare& b, int k) {
  const int di = std::abs(a.i - b.i);
  int dj = std::abs(a.j - b.j);
  dj = std::min(dj, k - dj);
  return di + dj == 1 || (di == 1 && dj == 1);
}

/// Drops duplicates of a collision sitting on a shared square boundary.
inline void deduplicate(std::vector<CollisionRecord>& recs, int k) {
  constexpr double kTol = 1e-6;
  std::vector<char> drop(recs.size(), 0);
  for (std::size_t x = 0; x < recs.size(); ++x)
    for (std::size_t y = x + 1; y < recs.size(); ++y) {
      if (drop[x] || drop[y]) continue;
      const auto& a = recs[x];
      const auto& b = recs[y];
      if (!adjacent(a.square, b.square, k)) continue;
      double dt = std::abs(a.t - b.t);
      dt = std::min(dt, 1.0 - dt);
      if (std::abs(a.s - b.s) < kTol && dt < kTol && std::abs(a.lambda - b.lambda) < kTol)
        drop[a.residual_gap <= b.residual_gap ? y : x] = 1;
    }
  std::size_t w = 0;
  for (std::size_t x = 0; x < recs.size(); ++x)
    if (!drop[x]) recs[w++] = recs[x];
  recs.resize(w);
}

}  // namespace detail

inline bool record_less(const CollisionRecord& a, const CollisionRecord& b) {
  return std::tie(a.s, a.t, a.pair) < std::tie(b.s, b.t, b.pair);
}

/// Counts and localizes all eigenvalue collisions on an (m n) x (m n) grid.
inline CollisionReport grid_search(const ModelSpec& spec, const ComplexMatrix& base, const GridConfig& grid,
                                   const WalkOptions& walk) {
  validate(spec);
  validate(grid);
  validate(walk, spec.n);

  CollisionReport report;
  report.spec = spec;
  report.grid = grid;
  report.walk = walk;
  report.degenerate_start = has_repeated_eigenvalue(base);
  report.s_start = report.degenerate_start ? grid.start_offset : 0.0;

  std::vector<Tracker> workers;
  for (int w = 0; w < grid.parallelism; ++w) workers.emplace_back(spec, base, walk);

  GridLattice lat(spec.n, grid, report.s_start);
  lat.build(workers);

  const int k = lat.side();
  std::vector<detail::SquareOutcome> outcomes(static_cast<std::size_t>(k * k));
  parallel_for(outcomes.size(), grid.parallelism, [&](int w, std::size_t idx) {
    const int i = static_cast<int>(idx) / k, j = static_cast<int>(idx) % k;
    outcomes[idx] = detail::process_square(lat, workers[w], grid, i, j);
  });

  for (auto& o : outcomes) {
    if (o.summary) report.nonidentity_squares.push_back(std::move(*o.summary));
    report.records.insert(report.records.end(), o.records.begin(), o.records.end());
    report.unresolved.insert(report.unresolved.end(), o.unresolved.begin(), o.unresolved.end());
  }
  detail::deduplicate(report.records, k);
  std::sort(report.records.begin(), report.records.end(), record_less);

  report.total_localized = static_cast<int>(report.records.size());
  report.total_lower_bound = report.total_localized;
  for (const auto& u : report.unresolved) report.total_lower_bound += u.lower_bound;
  for (const auto& w : workers) {
    report.solves += w.counters().solves;
    report.refinements += w.counters().refinements;
  }
  return report;
}

inline CollisionReport grid_search(const ModelSpec& spec, const GridConfig& grid) {
  return grid_search(spec, base_matrix(spec), grid, WalkOptions::defaults(spec.n));
}

}  // namespace eigcollide
