#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "eigcollide/delaunay.hpp"
#include "eigcollide/eigensolve.hpp"
#include "eigcollide/matching.hpp"
#include "eigcollide/model.hpp"
#include "eigcollide/permutation.hpp"

namespace eigcollide {

enum class NeighborPruning { BruteForce, Delaunay };

struct WalkOptions {
  int steps_per_unit = 160;        // minimum subdivisions of a unit parameter interval
  int min_steps_per_edge = 4;
  int max_refinement_depth = 40;   // bisection levels before giving up
  NeighborPruning pruning = NeighborPruning::BruteForce;

  /// 16n steps per unit.
  static WalkOptions defaults(int n) {
    WalkOptions o;
    o.steps_per_unit = 16 * n;
    return o;
  }
};

inline void validate(const WalkOptions& o, int n) {
  if (o.steps_per_unit < 2 * n)
    throw ConfigError("steps_per_unit: must be at least 2n = " + std::to_string(2 * n) + ", got " +
                      std::to_string(o.steps_per_unit));
  if (o.min_steps_per_edge < 1) throw ConfigError("min_steps_per_edge: must be positive");
  if (o.max_refinement_depth < 1) throw ConfigError("max_refinement_depth: must be positive");
}

/// Eigenvalues in tracked order at (s,t). raw_index[i] is the position of
/// eigenvalues[i] in the solver's output at this point.
struct TrackState {
  double s = 0.0;
  double t = 0.0;
  Spectrum eigenvalues;
  Permutation raw_index;

  /// The solver output this state was reordered from.
  Spectrum raw() const {
    Spectrum r(eigenvalues.size());
    for (std::size_t i = 0; i < eigenvalues.size(); ++i) r[raw_index[i]] = eigenvalues[i];
    return r;
  }
};

/// One accepted point along a walk, eigenvalues in tracked order.
struct TraceSample {
  double s;
  double t;
  Spectrum eigenvalues;
};

struct WalkCounters {
  long solves = 0;
  long refinements = 0;
};

/// Axis-aligned parameter rectangle [s0,s1] x [t0,t1].
struct ParamRect {
  double s0, s1, t0, t1;
};

/// Continuous eigenvalue tracking for one model realization.
///
/// Not thread safe (owns solver workspace); use one Tracker per worker.
class Tracker {
 public:
  Tracker(ModelSpec spec, const ComplexMatrix& base, WalkOptions opts)
      : spec_(spec), base_(base), opts_(opts), solver_(spec.n) {
    validate(opts_, spec_.n);
    if (base_.rows() != spec_.n || base_.cols() != spec_.n)
      throw ConfigError("Tracker: base matrix dimension does not match spec.n");
  }

  const ModelSpec& spec() const noexcept { return spec_; }
  const ComplexMatrix& base() const noexcept { return base_; }
  const WalkOptions& options() const noexcept { return opts_; }
  const WalkCounters& counters() const noexcept { return counters_; }
  void reset_counters() noexcept { counters_ = {}; }

  /// Raw eigenvalues of R(s,t).
  Spectrum solve(double s, double t) {
    ++counters_.solves;
    try {
      return solver_(assemble(spec_, base_, s, t));
    } catch (const NumericalError& e) {
      std::ostringstream os;
      os << e.what() << " at s=" << s << " t=" << t;
      throw NumericalError(os.str());
    }
  }

  /// Tracking state at (s,t) in raw order.
  TrackState start(double s, double t) {
    Spectrum ev = solve(s, t);
    const std::size_t n = ev.size();
    return TrackState{s, t, std::move(ev), Permutation::identity(n)};
  }

  TrackState start_from_raw(double s, double t, Spectrum raw) const {
    const std::size_t n = raw.size();
    return TrackState{s, t, std::move(raw), Permutation::identity(n)};
  }

  MatchResult match(std::span<const Complex> a, std::span<const Complex> b) const {
    return opts_.pruning == NeighborPruning::Delaunay ? greedy_match_delaunay(a, b) : greedy_match(a, b);
  }

  /// One step to (to_s, to_t), bisecting on matching failure. `target_raw`
  /// may supply the already known spectrum at the target.
  TrackState track_segment(const TrackState& from, double to_s, double to_t,
                           std::vector<TraceSample>* trace = nullptr, const Spectrum* target_raw = nullptr) {
    Spectrum target = target_raw ? *target_raw : solve(to_s, to_t);
    return step(from, to_s, to_t, target, 0, trace);
  }

  /// Number of steps for a walk of parameter length `len`.
  int steps_for(double len) const {
    const double raw = std::ceil(opts_.steps_per_unit * std::abs(len) - 1e-9);
    return std::max(opts_.min_steps_per_edge, static_cast<int>(raw));
  }

  /// Walk in `steps` equal steps. Endpoints are hit exactly. When a trace is
  /// requested the starting point is recorded too.
  TrackState walk(const TrackState& from, double to_s, double to_t, int steps,
                  std::vector<TraceSample>* trace = nullptr, const Spectrum* end_raw = nullptr) {
    if (from.s != to_s && from.t != to_t)
      throw std::invalid_argument("walk: steps must be axis aligned (s or t fixed)");
    if (trace) trace->push_back({from.s, from.t, from.eigenvalues});
    TrackState cur = from;
    for (int k = 1; k <= steps; ++k) {
      const double f = static_cast<double>(k) / steps;
      const double s = k == steps ? to_s : from.s + (to_s - from.s) * f;
      const double t = k == steps ? to_t : from.t + (to_t - from.t) * f;
      cur = track_segment(cur, s, t, trace, k == steps ? end_raw : nullptr);
    }
    return cur;
  }

  TrackState walk(const TrackState& from, double to_s, double to_t, std::vector<TraceSample>* trace = nullptr,
                  const Spectrum* end_raw = nullptr) {
    const double len = std::abs(to_s - from.s) + std::abs(to_t - from.t);
    return walk(from, to_s, to_t, steps_for(len), trace, end_raw);
  }

  struct LoopResult {
    TrackState final_state;
    Permutation sigma;  // in the raw labels of the starting corner
    std::array<std::vector<TraceSample>, 4> sides;
  };

  /// Counterclockwise loop (s0,t0) -> (s1,t0) -> (s1,t1) -> (s0,t1) -> (s0,t0).
  LoopResult track_loop(const TrackState& corner, const ParamRect& r, bool keep_traces = false) {
    if (corner.s != r.s0 || corner.t != r.t0) throw std::invalid_argument("track_loop: corner must be (s0,t0)");
    LoopResult out;
    const Spectrum corner_raw = corner.raw();
    const int hs = steps_for(r.s1 - r.s0), vs = steps_for(r.t1 - r.t0);
    auto side = [&](int k) { return keep_traces ? &out.sides[k] : nullptr; };
    TrackState st = walk(corner, r.s1, r.t0, hs, side(0));
    st = walk(st, r.s1, r.t1, vs, side(1));
    st = walk(st, r.s0, r.t1, hs, side(2));
    st = walk(st, r.s0, r.t0, vs, side(3), &corner_raw);
    out.sigma = corner.raw_index.inverse().then(st.raw_index);
    out.final_state = std::move(st);
    return out;
  }

 private:
  TrackState step(const TrackState& from, double to_s, double to_t, const Spectrum& target, int depth,
                  std::vector<TraceSample>* trace) {
    MatchResult m = match(from.eigenvalues, target);
    if (auto* ok = std::get_if<Matched>(&m)) {
      TrackState next{to_s, to_t, Spectrum(target.size()), ok->transport};
      for (std::size_t i = 0; i < target.size(); ++i) next.eigenvalues[i] = target[ok->transport[i]];
      if (trace) trace->push_back({to_s, to_t, next.eigenvalues});
      return next;
    }
    if (depth >= opts_.max_refinement_depth) {
      const auto& c = std::get<Conflict>(m);
      std::vector<int> contested = c.contested_b;
      contested.insert(contested.end(), c.contested_a.begin(), c.contested_a.end());
      std::ostringstream os;
      os << "tracking failed after " << depth << " refinements between (s,t)=(" << from.s << "," << from.t
         << ") and (" << to_s << "," << to_t << ")";
      throw TrackingError(os.str(), to_s, to_t, std::move(contested));
    }
    ++counters_.refinements;
    const double ms = 0.5 * (from.s + to_s), mt = 0.5 * (from.t + to_t);
    const Spectrum mid_raw = solve(ms, mt);
    const TrackState mid = step(from, ms, mt, mid_raw, depth + 1, trace);
    return step(mid, to_s, to_t, target, depth + 1, trace);
  }

  ModelSpec spec_;
  ComplexMatrix base_;
  WalkOptions opts_;
  EigenvalueSolver solver_;
  WalkCounters counters_;
};

// Free-function forms.

inline TrackState track_segment(const ModelSpec& spec, const ComplexMatrix& base, const TrackState& from,
                                double to_s, double to_t, const WalkOptions& opts) {
  Tracker tr(spec, base, opts);
  return tr.track_segment(from, to_s, to_t);
}

inline std::pair<TrackState, Permutation> track_loop(const ModelSpec& spec, const ComplexMatrix& base,
                                                     const TrackState& corner, const ParamRect& square,
                                                     const WalkOptions& opts) {
  Tracker tr(spec, base, opts);
  auto r = tr.track_loop(corner, square);
  return {std::move(r.final_state), std::move(r.sigma)};
}

/// Optional step-trace dump: one "s,t,index,re,im" row per tracked eigenvalue
/// per sample.
inline void write_trace_csv(std::ostream& os, const std::vector<TraceSample>& trace, bool header = true) {
  if (header) os << "s,t,index,re,im\n";
  char buf[160];
  for (const auto& smp : trace)
    for (std::size_t i = 0; i < smp.eigenvalues.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%zu,%.17g,%.17g\n", smp.s, smp.t, i, smp.eigenvalues[i].real(),
                    smp.eigenvalues[i].imag());
      os << buf;
    }
}

}  // namespace eigcollide
