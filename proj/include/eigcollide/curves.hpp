#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace eigcollide {

using Complex = std::complex<double>;

enum class CurveKind { Circle, Circuit, Crossing };

inline std::string_view to_string(CurveKind c) {
  switch (c) {
    case CurveKind::Circle: return "circle";
    case CurveKind::Circuit: return "circuit";
    case CurveKind::Crossing: return "crossing";
  }
  return "?";
}

inline CurveKind parse_curve(std::string_view name) {
  if (name == "circle") return CurveKind::Circle;
  if (name == "circuit") return CurveKind::Circuit;
  if (name == "crossing") return CurveKind::Crossing;
  throw std::invalid_argument("unknown curve '" + std::string(name) + "' (expected circle, circuit or crossing)");
}

/// Circular arc from angle `from` to angle `to` (radians, signed sweep).
struct ArcSegment {
  Complex center;
  double radius;
  double from;
  double to;

  double length() const { return radius * std::abs(to - from); }
  Complex at(double frac) const { return center + std::polar(radius, from + frac * (to - from)); }
  Complex start() const { return at(0.0); }
  Complex end() const { return at(1.0); }
};

struct LineSegment {
  Complex a;
  Complex b;

  double length() const { return std::abs(b - a); }
  Complex at(double frac) const { return a + frac * (b - a); }
  Complex start() const { return a; }
  Complex end() const { return b; }
};

using Segment = std::variant<ArcSegment, LineSegment>;

struct CurveGeometry {
  std::vector<Segment> segments;
  std::vector<double> cumulative;  // arc length at the start of each segment, plus total at the back
  double total_length = 0.0;
  double area_fraction = 1.0;      // enclosed area / pi
};

namespace detail {

inline CurveGeometry make_geometry(std::vector<Segment> segs, double area_fraction) {
  CurveGeometry g;
  g.segments = std::move(segs);
  g.area_fraction = area_fraction;
  g.cumulative.reserve(g.segments.size() + 1);
  double acc = 0.0;
  for (const auto& s : g.segments) {
    g.cumulative.push_back(acc);
    acc += std::visit([](const auto& x) { return x.length(); }, s);
  }
  g.cumulative.push_back(acc);
  g.total_length = acc;
  return g;
}

inline CurveGeometry build_geometry(CurveKind c) {
  using std::numbers::pi;
  switch (c) {
    case CurveKind::Circle:
      return make_geometry({ArcSegment{0.0, 1.0, 0.0, 2 * pi}}, 1.0);
    case CurveKind::Circuit:
      // Upper unit semicircle, then back along three radius-1/3 half circles:
      // below the axis, above it, below it.
      return make_geometry({ArcSegment{0.0, 1.0, 0.0, pi},
                            ArcSegment{{-2.0 / 3.0, 0.0}, 1.0 / 3.0, pi, 2 * pi},
                            ArcSegment{0.0, 1.0 / 3.0, pi, 0.0},
                            ArcSegment{{2.0 / 3.0, 0.0}, 1.0 / 3.0, pi, 2 * pi}},
                           5.0 / 9.0);
    case CurveKind::Crossing: {
      const Complex ne = std::polar(1.0, pi / 4), sw = std::polar(1.0, 5 * pi / 4);
      const Complex nw = std::polar(1.0, 3 * pi / 4), se = std::polar(1.0, -pi / 4);
      return make_geometry({ArcSegment{0.0, 1.0, -pi / 4, pi / 4}, LineSegment{ne, 0.0}, LineSegment{0.0, sw},
                            ArcSegment{0.0, 1.0, 5 * pi / 4, 3 * pi / 4}, LineSegment{nw, 0.0},
                            LineSegment{0.0, se}},
                           0.5);
    }
  }
  throw std::invalid_argument("unknown curve kind");
}

inline double distance_to_segment(const Segment& seg, Complex z) {
  if (const auto* arc = std::get_if<ArcSegment>(&seg)) {
    const Complex d = z - arc->center;
    const double lo = std::min(arc->from, arc->to), hi = std::max(arc->from, arc->to);
    double ang = std::arg(d);
    // Shift into [lo, lo + 2pi).
    while (ang < lo) ang += 2 * std::numbers::pi;
    while (ang >= lo + 2 * std::numbers::pi) ang -= 2 * std::numbers::pi;
    if (ang <= hi) return std::abs(std::abs(d) - arc->radius);
    return std::min(std::abs(z - arc->start()), std::abs(z - arc->end()));
  }
  const auto& line = std::get<LineSegment>(seg);
  const Complex ab = line.b - line.a;
  const double len2 = std::norm(ab);
  double u = len2 > 0 ? std::real((z - line.a) * std::conj(ab)) / len2 : 0.0;
  u = std::clamp(u, 0.0, 1.0);
  return std::abs(z - (line.a + u * ab));
}

}  // namespace detail

/// Segment table, total length and enclosed area fraction of a curve.
inline const CurveGeometry& curve_geometry(CurveKind c) {
  static const std::array<CurveGeometry, 3> table = {detail::build_geometry(CurveKind::Circle),
                                                     detail::build_geometry(CurveKind::Circuit),
                                                     detail::build_geometry(CurveKind::Crossing)};
  return table[static_cast<std::size_t>(c)];
}

/// Point at arc-length fraction u of the curve. u is reduced mod 1, so
/// curve_point(c, 1) == curve_point(c, 0) bitwise.
inline Complex curve_point(CurveKind c, double u) {
  if (c == CurveKind::Circle) {
    u -= std::floor(u);
    return std::polar(1.0, 2 * std::numbers::pi * u);
  }
  const auto& g = curve_geometry(c);
  u -= std::floor(u);
  const double len = u * g.total_length;
  auto it = std::upper_bound(g.cumulative.begin(), g.cumulative.end() - 1, len);
  const std::size_t k = static_cast<std::size_t>(std::distance(g.cumulative.begin(), it)) - 1;
  const double seg_len = g.cumulative[k + 1] - g.cumulative[k];
  const double frac = seg_len > 0 ? (len - g.cumulative[k]) / seg_len : 0.0;
  return std::visit([frac](const auto& s) { return s.at(frac); }, g.segments[k]);
}

/// Euclidean distance from z to the curve trace.
inline double distance_to_curve(CurveKind c, Complex z) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : curve_geometry(c).segments) best = std::min(best, detail::distance_to_segment(s, z));
  return best;
}

/// Strict interior test. Points within 1e-12 of the curve are outside.
inline bool contains(CurveKind c, Complex z) {
  constexpr double kBoundaryTol = 1e-12;
  if (distance_to_curve(c, z) <= kBoundaryTol) return false;
  const double r = std::abs(z);
  switch (c) {
    case CurveKind::Circle:
      return r < 1.0;
    case CurveKind::Circuit:
      if (z.imag() > 0) return r < 1.0 && r > 1.0 / 3.0;
      return std::abs(z + 2.0 / 3.0) < 1.0 / 3.0 || std::abs(z - 2.0 / 3.0) < 1.0 / 3.0;
    case CurveKind::Crossing: {
      if (r >= 1.0) return false;
      const double a = std::abs(std::arg(z));  // in [0, pi]
      return a < std::numbers::pi / 4 || a > 3 * std::numbers::pi / 4;
    }
  }
  return false;
}

/// k points at equal arc-length spacing, starting at the anchor point.
inline std::vector<Complex> polyline(CurveKind c, int k) {
  if (k < 3) throw std::invalid_argument("polyline: need at least 3 points");
  std::vector<Complex> pts(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) pts[j] = curve_point(c, static_cast<double>(j) / k);
  return pts;
}

}  // namespace eigcollide
