#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "eigcollide/matching.hpp"

namespace eigcollide {

/// Delaunay adjacency. `valid` is false for degenerate input (fewer than three
/// points, duplicates, all collinear); callers then fall back to brute force.
struct DelaunayGraph {
  std::vector<std::vector<int>> adjacency;
  bool valid = false;

  std::size_t edge_count() const {
    std::size_t deg = 0;
    for (const auto& a : adjacency) deg += a.size();
    return deg / 2;
  }
};

namespace detail {

inline double orient(Complex a, Complex b, Complex c) {
  return (b.real() - a.real()) * (c.imag() - a.imag()) - (b.imag() - a.imag()) * (c.real() - a.real());
}

/// > 0 when d is inside the circumcircle of the counterclockwise triangle abc.
inline double incircle(Complex a, Complex b, Complex c, Complex d) {
  const double adx = a.real() - d.real(), ady = a.imag() - d.imag();
  const double bdx = b.real() - d.real(), bdy = b.imag() - d.imag();
  const double cdx = c.real() - d.real(), cdy = c.imag() - d.imag();
  const double ad = adx * adx + ady * ady, bd = bdx * bdx + bdy * bdy, cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

inline bool degenerate_input(std::span<const Complex> pts) {
  if (pts.size() < 3) return true;
  double scale = 0.0;
  for (auto p : pts) scale = std::max(scale, std::abs(p - pts[0]));
  if (scale == 0.0) return true;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if (std::abs(pts[i] - pts[j]) <= 1e-14 * scale) return true;
  std::size_t far = 1;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (std::abs(pts[i] - pts[0]) > std::abs(pts[far] - pts[0])) far = i;
  for (auto p : pts)
    if (std::abs(orient(pts[0], pts[far], p)) > 1e-12 * scale * scale) return false;
  return true;
}

}  // namespace detail

/// Bowyer-Watson triangulation; returns each point's Delaunay neighbours.
inline DelaunayGraph delaunay_neighbors(std::span<const Complex> pts) {
  DelaunayGraph g;
  const std::size_t n = pts.size();
  g.adjacency.assign(n, {});
  if (detail::degenerate_input(pts)) return g;

  double xmin = pts[0].real(), xmax = xmin, ymin = pts[0].imag(), ymax = ymin;
  for (auto p : pts) {
    xmin = std::min(xmin, p.real());
    xmax = std::max(xmax, p.real());
    ymin = std::min(ymin, p.imag());
    ymax = std::max(ymax, p.imag());
  }
  const Complex mid{(xmin + xmax) / 2, (ymin + ymax) / 2};
  const double span = std::max(xmax - xmin, ymax - ymin);
  const double big = 1e5 * span;
  std::vector<Complex> v(pts.begin(), pts.end());
  v.push_back(mid + Complex(-big, -big));
  v.push_back(mid + Complex(big, -big));
  v.push_back(mid + Complex(0.0, big));

  using Tri = std::array<int, 3>;
  std::vector<Tri> tris{{static_cast<int>(n), static_cast<int>(n + 1), static_cast<int>(n + 2)}};
  for (std::size_t p = 0; p < n; ++p) {
    std::vector<Tri> keep;
    std::vector<std::array<int, 2>> edges;
    for (const auto& t : tris) {
      if (detail::incircle(v[t[0]], v[t[1]], v[t[2]], v[p]) > 0) {
        edges.push_back({t[0], t[1]});
        edges.push_back({t[1], t[2]});
        edges.push_back({t[2], t[0]});
      } else {
        keep.push_back(t);
      }
    }
    // Cavity boundary: edges seen once.
    for (std::size_t i = 0; i < edges.size(); ++i) {
      bool shared = false;
      for (std::size_t j = 0; j < edges.size() && !shared; ++j)
        shared = i != j && edges[i][0] == edges[j][1] && edges[i][1] == edges[j][0];
      if (!shared) keep.push_back({edges[i][0], edges[i][1], static_cast<int>(p)});
    }
    tris = std::move(keep);
  }

  const int ni = static_cast<int>(n);
  auto link = [&](int a, int b) {
    if (a >= ni || b >= ni) return;
    if (std::find(g.adjacency[a].begin(), g.adjacency[a].end(), b) == g.adjacency[a].end()) {
      g.adjacency[a].push_back(b);
      g.adjacency[b].push_back(a);
    }
  };
  for (const auto& t : tris) {
    link(t[0], t[1]);
    link(t[1], t[2]);
    link(t[2], t[0]);
  }
  for (auto& a : g.adjacency) std::sort(a.begin(), a.end());
  g.valid = true;
  return g;
}

namespace detail {

/// Greedy descent on a Delaunay graph; ends at the site nearest to q.
/// Returns -1 when the final site ties with a neighbour, so the caller can
/// apply the brute-force tie rule.
inline int nearest_by_walk(const DelaunayGraph& g, std::span<const Complex> pts, Complex q, int start) {
  int cur = start;
  double cd = std::norm(pts[cur] - q);
  for (;;) {
    int best = cur;
    double bd = cd;
    for (int nb : g.adjacency[cur]) {
      const double d = std::norm(pts[nb] - q);
      if (d < bd) {
        bd = d;
        best = nb;
      }
    }
    if (best == cur) break;
    cur = best;
    cd = bd;
  }
  for (int nb : g.adjacency[cur])
    if (std::norm(pts[nb] - q) == cd) return -1;
  return cur;
}

inline std::vector<int> nearest_all(std::span<const Complex> from, std::span<const Complex> to) {
  const DelaunayGraph g = delaunay_neighbors(to);
  std::vector<int> out(from.size());
  int hint = 0;
  for (std::size_t i = 0; i < from.size(); ++i) {
    int r = g.valid ? nearest_by_walk(g, to, from[i], hint) : -1;
    if (r < 0) r = nearest_index(to, from[i]);
    out[i] = r;
    hint = r;
  }
  return out;
}

}  // namespace detail

/// Same contract as greedy_match, with nearest-neighbour queries answered by
/// walking the Delaunay graph of the other list.
inline MatchResult greedy_match_delaunay(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) throw std::invalid_argument("greedy_match: lists differ in length");
  if (a.size() < 3) return greedy_match(a, b);
  return detail::match_from_nearest(detail::nearest_all(a, b), detail::nearest_all(b, a));
}

}  // namespace eigcollide
