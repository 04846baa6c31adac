#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "eigcollide/collisions.hpp"
#include "oracles.hpp"

using namespace eigcollide;

namespace {

ModelSpec circle_spec(int n, std::uint64_t seed) {
  ModelSpec spec;
  spec.n = n;
  spec.seed = seed;
  return spec;
}

GridConfig grid_of(int m, int depth = 6, int parallelism = 1) {
  GridConfig g;
  g.m = m;
  g.subdivision_depth = depth;
  g.parallelism = parallelism;
  return g;
}

Permutation conj(const Permutation& path, const Permutation& loop) { return path.then(loop).then(path.inverse()); }

std::vector<std::vector<int>> nontrivial(const Permutation& p) {
  std::vector<std::vector<int>> out;
  for (auto& c : p.cycles())
    if (c.size() > 1) out.push_back(c);
  return out;
}

}  // namespace

TEST(Classify, TenThousandRandomPermutations) {
  std::mt19937_64 rng(21);
  int kinds[3] = {0, 0, 0};
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 1 + trial % 15;
    std::vector<int> img(static_cast<std::size_t>(n));
    std::iota(img.begin(), img.end(), 0);
    if (trial % 3 == 0) {
      std::shuffle(img.begin(), img.end(), rng);
    } else {
      // A few random transpositions, so sparse loops are well represented.
      std::uniform_int_distribution<int> pick(0, n - 1);
      for (int k = trial % 3; k > 0; --k) std::swap(img[pick(rng)], img[pick(rng)]);
    }
    const auto lp = classify(Permutation(img));
    const auto lengths = oracle::cycle_lengths(img);
    int bound = 0, pairs = 0, longer = 0;
    for (int len : lengths) {
      bound += len - 1;
      pairs += len == 2;
      longer += len > 2;
    }
    ASSERT_EQ(lp.collision_lower_bound, bound);
    const LoopClass want = bound == 0 ? LoopClass::Identity
                           : longer == 0 ? LoopClass::DisjointTranspositions
                                         : LoopClass::Complex;
    ASSERT_EQ(lp.kind, want);
    if (want == LoopClass::DisjointTranspositions) ASSERT_EQ(static_cast<int>(lp.transpositions.size()), pairs);
    ++kinds[static_cast<int>(lp.kind)];
  }
  for (int k : kinds) EXPECT_GT(k, 500);
}

TEST(Classify, Examples) {
  EXPECT_EQ(classify(Permutation::identity(4)).kind, LoopClass::Identity);
  const auto t = classify(Permutation::from_cycles(5, {{1, 3}}));
  EXPECT_EQ(t.kind, LoopClass::DisjointTranspositions);
  EXPECT_EQ(t.transpositions, (std::vector<IndexPair>{{1, 3}}));
  const auto two = classify(Permutation::from_cycles(5, {{0, 4}, {1, 2}}));
  EXPECT_EQ(two.collision_lower_bound, 2);
  const auto c = classify(Permutation::from_cycles(5, {{0, 1, 2}}));
  EXPECT_EQ(c.kind, LoopClass::Complex);
  EXPECT_EQ(c.collision_lower_bound, 2);
  EXPECT_TRUE(c.transpositions.empty());
}

TEST(GridSearch, ChildLoopsComposeToParent) {
  const auto spec = circle_spec(10, 2);
  const auto base = base_matrix(spec);
  const auto report = grid_search(spec, base, grid_of(6), WalkOptions::defaults(10));
  const GridLattice lat(spec.n, report.grid, report.s_start);
  Tracker tr(spec, base, WalkOptions::defaults(10));
  auto path = [&](double s0, double t0, double s1, double t1) {
    const Spectrum end = tr.solve(s1, t1);
    return tr.walk(tr.start(s0, t0), s1, t1, tr.steps_for(std::abs(s1 - s0) + std::abs(t1 - t0)), nullptr, &end)
        .raw_index;
  };
  auto loop_at = [&](const ParamRect& r) { return tr.track_loop(tr.start(r.s0, r.t0), r).sigma; };

  int checked = 0, complex_checked = 0;
  for (const auto& sq : report.nonidentity_squares) {
    if (checked >= 6 && complex_checked > 0) break;
    const ParamRect cell = lat.cell(sq.square.i, sq.square.j);
    const double sm = 0.5 * (cell.s0 + cell.s1), tm = 0.5 * (cell.t0 + cell.t1);
    const auto q = quarter(cell);  // Q00, Q10, Q11, Q01
    const Permutation b1 = path(cell.s0, cell.t0, sm, cell.t0);
    const Permutation l1 = path(cell.s0, cell.t0, cell.s0, tm);
    const Permutation hm1 = path(cell.s0, tm, sm, tm);
    const Permutation composed =
        conj(b1, loop_at(q[1])).then(loop_at(q[0])).then(conj(l1.then(hm1), loop_at(q[2]))).then(conj(l1, loop_at(q[3])));
    EXPECT_EQ(composed, loop_at(cell)) << "square " << sq.square.i << "," << sq.square.j;
    ++checked;
    complex_checked += sq.kind == LoopClass::Complex;
  }
  EXPECT_GT(complex_checked, 0);
}

TEST(GridSearch, CachedLoopsMatchDirectLoops) {
  const auto spec = circle_spec(8, 5);
  const auto base = base_matrix(spec);
  const auto report = grid_search(spec, base, grid_of(5), WalkOptions::defaults(8));
  const GridLattice lat(spec.n, report.grid, report.s_start);
  Tracker tr(spec, base, WalkOptions::defaults(8));
  for (const auto& sq : report.nonidentity_squares)
    EXPECT_EQ(nontrivial(square_loop(tr, lat.cell(sq.square.i, sq.square.j)).sigma), sq.cycles);

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> pick(0, lat.side() - 1);
  int identity_checked = 0;
  while (identity_checked < 60) {
    const GridSquare g{pick(rng), pick(rng)};
    const bool listed = std::any_of(report.nonidentity_squares.begin(), report.nonidentity_squares.end(),
                                    [&](const auto& s) { return s.square == g; });
    if (listed) continue;
    EXPECT_EQ(square_loop(tr, lat.cell(g.i, g.j)).kind, LoopClass::Identity) << g.i << "," << g.j;
    ++identity_checked;
  }
}

TEST(GridSearch, ParallelismDoesNotChangeResults) {
  const auto spec = circle_spec(5, 9);
  const auto base = base_matrix(spec);
  const auto a = grid_search(spec, base, grid_of(4, 6, 1), WalkOptions::defaults(5));
  const auto b = grid_search(spec, base, grid_of(4, 6, 8), WalkOptions::defaults(5));
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    EXPECT_EQ(a.records[k].s, b.records[k].s);
    EXPECT_EQ(a.records[k].t, b.records[k].t);
    EXPECT_EQ(a.records[k].lambda, b.records[k].lambda);
    EXPECT_EQ(a.records[k].pair, b.records[k].pair);
    EXPECT_EQ(a.records[k].residual_gap, b.records[k].residual_gap);
  }
  EXPECT_EQ(a.total_lower_bound, b.total_lower_bound);
  EXPECT_EQ(a.solves, b.solves);
}

TEST(GridSearch, TwoByTwoMatchesDiscriminantZeros) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto spec = circle_spec(2, seed);
    const auto base = base_matrix(spec);
    const auto report = grid_search(spec, base, GridConfig{}, WalkOptions::defaults(2));
    const auto zeros = oracle::discriminant_zeros(spec, base, 400);
    EXPECT_EQ(report.total_localized, 2);
    EXPECT_EQ(report.total_localized, static_cast<int>(zeros.size()));
    const double diag = std::sqrt(2.0) / GridConfig{}.squares_per_side(2);
    for (const auto& r : report.records) {
      double best = 1e9;
      for (const auto& z : zeros) {
        const double dt = std::min(std::abs(z.t - r.t), 1 - std::abs(z.t - r.t));
        best = std::min(best, std::hypot(z.s - r.s, dt));
      }
      EXPECT_LT(best, 2 * diag);
    }
  }
}

TEST(GridSearch, RecordInvariants) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto spec = circle_spec(6, seed);
    const auto base = base_matrix(spec);
    const auto report = grid_search(spec, base, grid_of(6), WalkOptions::defaults(6));
    EXPECT_GE(report.total_lower_bound, report.total_localized);
    EXPECT_TRUE(std::is_sorted(report.records.begin(), report.records.end(), record_less));
    Tracker tr(spec, base, WalkOptions::defaults(6));
    for (const auto& r : report.records) {
      EXPECT_LT(r.pair.first, r.pair.second);
      EXPECT_GE(r.s, r.cell.s0);
      EXPECT_LE(r.s, r.cell.s1);
      EXPECT_GE(r.t, r.cell.t0);
      EXPECT_LE(r.t, r.cell.t1);
      const TraceSample corner{r.cell.s0, r.cell.t0, tr.solve(r.cell.s0, r.cell.t0)};
      std::vector<double> nn;
      for (auto [s, t] : {std::pair{r.cell.s0, r.cell.t0}, {r.cell.s1, r.cell.t0}, {r.cell.s1, r.cell.t1},
                          {r.cell.s0, r.cell.t1}}) {
        EXPECT_LT(r.residual_gap, detail::pair_gap_at(tr, corner, r.pair.first, r.pair.second, s, t));
        const auto g = nearest_neighbor_gaps(tr.solve(s, t));
        nn.insert(nn.end(), g.begin(), g.end());
      }
      std::nth_element(nn.begin(), nn.begin() + nn.size() / 2, nn.end());
      EXPECT_LT(r.residual_gap, nn[nn.size() / 2]);
    }
  }
}

TEST(GridSearch, QuadraticCountSmallN) {
  for (int n : {3, 4})
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto r = grid_search(circle_spec(n, seed), grid_of(8));
      EXPECT_EQ(r.total_localized, n * (n - 1)) << "n " << n << " seed " << seed;
    }
}

TEST(Subdivision, SplitsComplexSquares) {
  const auto spec = circle_spec(10, 1);
  const auto base = base_matrix(spec);
  const auto coarse = grid_search(spec, base, grid_of(1, 0), WalkOptions::defaults(10));
  ASSERT_FALSE(coarse.unresolved.empty());
  for (const auto& u : coarse.unresolved) EXPECT_EQ(u.reason, "subdivision_disabled");
  Tracker tr(spec, base, WalkOptions::defaults(10));
  int split_in_one = 0;
  for (const auto& u : coarse.unresolved) {
    const auto lp = square_loop(tr, u.cell);
    EXPECT_EQ(lp.collision_lower_bound, u.lower_bound);
    const auto one = subdivide_and_resolve(tr, u.cell, lp, 1, u.square);
    if (u.lower_bound == 2 && one.unresolved.empty() && one.records.size() == 2) ++split_in_one;
    const auto deep = subdivide_and_resolve(tr, u.cell, lp, 10, u.square);
    int covered = static_cast<int>(deep.records.size());
    for (const auto& d : deep.unresolved) covered += d.lower_bound;
    EXPECT_GE(covered, u.lower_bound);
    for (const auto& r : deep.records) {
      EXPECT_EQ(r.method, LocalizationMethod::Subdivision);
      EXPECT_GE(r.depth, 1);
    }
  }
  EXPECT_GT(split_in_one, 0);
}

TEST(Subdivision, ZeroDepthReportsUnresolved) {
  const auto spec = circle_spec(4, 0);
  Tracker tr(spec, base_matrix(spec), WalkOptions::defaults(4));
  const auto lp = classify(Permutation::from_cycles(4, {{0, 1, 2}}));
  const auto res = subdivide_and_resolve(tr, {0.1, 0.2, 0.1, 0.2}, lp, 0);
  ASSERT_EQ(res.unresolved.size(), 1u);
  EXPECT_EQ(res.unresolved[0].lower_bound, 2);
  EXPECT_TRUE(res.records.empty());
}

TEST(GridSearch, DegenerateStartShiftsFirstColumn) {
  ModelSpec spec;
  spec.n = 4;
  Eigen::VectorXcd d(4);
  d << 0.3, 0.3, Complex(0, 0.6), -0.5;
  const ComplexMatrix base = d.asDiagonal();
  const auto r = grid_search(spec, base, grid_of(4), WalkOptions::defaults(4));
  EXPECT_TRUE(r.degenerate_start);
  EXPECT_EQ(r.s_start, GridConfig{}.start_offset);
  for (const auto& rec : r.records) EXPECT_GE(rec.s, r.s_start);
  const auto plain = grid_search(spec, base_matrix(spec), grid_of(4), WalkOptions::defaults(4));
  EXPECT_FALSE(plain.degenerate_start);
  EXPECT_EQ(plain.s_start, 0.0);
}

TEST(Dedup, KeepsSmallerResidualAcrossNeighbours) {
  CollisionRecord a, b, c;
  a.s = b.s = 0.5;
  a.t = b.t = 0.25;
  a.lambda = b.lambda = {0.1, 0.2};
  a.square = {3, 4};
  b.square = {3, 5};
  a.residual_gap = 0.02;
  b.residual_gap = 0.01;
  c = a;
  c.square = {9, 9};
  c.s = 0.9;
  std::vector<CollisionRecord> recs{a, b, c};
  detail::deduplicate(recs, 20);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].residual_gap, 0.01);
  // Same position but far-apart squares are not merged.
  CollisionRecord far = b;
  far.square = {12, 5};
  std::vector<CollisionRecord> keep{a, far};
  detail::deduplicate(keep, 20);
  EXPECT_EQ(keep.size(), 2u);
}

TEST(GridConfig, Validation) {
  GridConfig g;
  EXPECT_NO_THROW(validate(g));
  g.m = 0;
  EXPECT_THROW(validate(g), ConfigError);
  g = {};
  g.subdivision_depth = -1;
  EXPECT_THROW(validate(g), ConfigError);
  g = {};
  g.start_offset = 0;
  EXPECT_THROW(validate(g), ConfigError);
  EXPECT_EQ(GridConfig{}.squares_per_side(10), 200);
}
