#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "eigcollide/collisions.hpp"
#include "eigcollide/io.hpp"
#include "eigcollide/stats.hpp"

namespace eigcollide {

/// Eigenvalue tracks at fixed s over one full turn t: 0 -> 1.
struct TrackSet {
  double s = 0.0;
  std::vector<double> t;                 // t_steps + 1 samples
  std::vector<Spectrum> samples;         // tracked order, one per t sample
  Permutation sigma;                     // stripe permutation at this s

  std::size_t n() const { return samples.empty() ? 0 : samples.front().size(); }
};

inline TrackSet compute_tracks(Tracker& tracker, double s, int t_steps) {
  if (t_steps < 1) throw ConfigError("t_steps: must be positive");
  const TrackState st = tracker.start(s, 0.0);
  const Spectrum raw0 = st.eigenvalues;
  TrackSet out;
  out.s = s;
  out.t.reserve(static_cast<std::size_t>(t_steps) + 1);
  out.samples.reserve(static_cast<std::size_t>(t_steps) + 1);
  out.t.push_back(0.0);
  out.samples.push_back(st.eigenvalues);
  TrackState cur = st;
  for (int k = 1; k <= t_steps; ++k) {
    const double t = k == t_steps ? 1.0 : static_cast<double>(k) / t_steps;
    cur = tracker.track_segment(cur, s, t, nullptr, k == t_steps ? &raw0 : nullptr);
    out.t.push_back(t);
    out.samples.push_back(cur.eigenvalues);
  }
  out.sigma = cur.raw_index;
  return out;
}

// Yellow to purple.
inline constexpr std::array<const char*, 8> kCycleRamp = {"#fde725", "#a0da39", "#4ac16d", "#1fa187",
                                                          "#277f8e", "#365c8d", "#46327e", "#440154"};

/// Ramp colour for ramp index r in 1..k.
inline const char* ramp_color(int r, int k) {
  if (k <= 1) return kCycleRamp.front();
  const int stop = static_cast<int>(std::lround(7.0 * (r - 1) / (k - 1)));
  return kCycleRamp[static_cast<std::size_t>(std::clamp(stop, 0, 7))];
}

namespace detail {

struct PlaneView {
  double lo_x, hi_x, lo_y, hi_y;
  double size;

  double x(double re) const { return (re - lo_x) / (hi_x - lo_x) * size; }
  double y(double im) const { return (hi_y - im) / (hi_y - lo_y) * size; }
};

inline PlaneView plane_view(const std::vector<TrackSet>& tracks, double size) {
  double r = 1.1;
  for (const auto& ts : tracks)
    for (const auto& sp : ts.samples)
      for (auto z : sp) r = std::max({r, std::abs(z.real()) * 1.05, std::abs(z.imag()) * 1.05});
  return {-r, r, -r, r, size};
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::string svg_open(double w, double h) {
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
     << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return os.str();
}

inline void draw_curve(std::ostream& os, CurveKind curve, const PlaneView& v) {
  os << "<polyline class=\"curve\" fill=\"none\" stroke=\"#bbbbbb\" stroke-width=\"1\" points=\"";
  const auto pts = polyline(curve, 400);
  for (std::size_t k = 0; k <= pts.size(); ++k) {
    const Complex z = pts[k % pts.size()];
    os << num(v.x(z.real())) << ',' << num(v.y(z.imag())) << ' ';
  }
  os << "\"/>\n";
}

inline void draw_marks(std::ostream& os, const std::vector<CollisionRecord>& marks, const PlaneView& v) {
  for (const auto& m : marks) {
    const double x = v.x(m.lambda.real()), y = v.y(m.lambda.imag()), h = 5.0;
    os << "<g class=\"collision\"><title>s=" << format_double(m.s) << " t=" << format_double(m.t) << "</title>"
       << "<path d=\"M" << num(x - h) << ',' << num(y - h) << " L" << num(x + h) << ',' << num(y + h) << " M"
       << num(x - h) << ',' << num(y + h) << " L" << num(x + h) << ',' << num(y - h)
       << "\" stroke=\"#d62728\" stroke-width=\"1.5\"/></g>\n";
  }
}

}  // namespace detail

/// Tracks coloured by cycle length of each window's stripe permutation, one
/// polyline per eigenvalue per s, with optional collision marks.
inline std::string tracks_svg(const std::vector<TrackSet>& tracks, CurveKind curve,
                              const std::vector<CollisionRecord>& marks = {}, double size = 600.0) {
  const auto v = detail::plane_view(tracks, size);
  std::ostringstream os;
  os << detail::svg_open(size, size);
  detail::draw_curve(os, curve, v);
  for (const auto& ts : tracks) {
    const auto colors = cycle_coloring(ts.sigma);
    const int k = colors.empty() ? 1 : *std::max_element(colors.begin(), colors.end());
    for (std::size_t i = 0; i < ts.n(); ++i) {
      os << "<polyline class=\"track\" data-s=\"" << format_double(ts.s) << "\" data-index=\"" << i
         << "\" fill=\"none\" stroke=\"" << ramp_color(colors[i], k) << "\" stroke-width=\"1\" points=\"";
      for (const auto& sp : ts.samples) os << detail::num(v.x(sp[i].real())) << ',' << detail::num(v.y(sp[i].imag())) << ' ';
      os << "\"/>\n";
    }
  }
  detail::draw_marks(os, marks, v);
  os << "</svg>\n";
  return os.str();
}

/// Snapshot at t-sample `frame`: one dot per eigenvalue per s.
inline std::string frame_svg(const std::vector<TrackSet>& tracks, CurveKind curve, std::size_t frame,
                             double size = 600.0) {
  const auto v = detail::plane_view(tracks, size);
  std::ostringstream os;
  os << detail::svg_open(size, size);
  detail::draw_curve(os, curve, v);
  for (const auto& ts : tracks) {
    const auto colors = cycle_coloring(ts.sigma);
    const int k = colors.empty() ? 1 : *std::max_element(colors.begin(), colors.end());
    const std::size_t f = std::min(frame, ts.samples.size() - 1);
    for (std::size_t i = 0; i < ts.n(); ++i) {
      const Complex z = ts.samples[f][i];
      os << "<circle cx=\"" << detail::num(v.x(z.real())) << "\" cy=\"" << detail::num(v.y(z.imag()))
         << "\" r=\"3\" fill=\"" << ramp_color(colors[i], k) << "\"/>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

/// Bar chart of collision counts.
inline std::string histogram_svg(const Histogram& h, const std::string& title = "collision counts") {
  const double w = 640, ht = 400, pad = 50;
  const int max_count = h.counts.empty() ? 1 : std::max(1, *std::max_element(h.counts.begin(), h.counts.end()));
  const double bw = (w - 2 * pad) / std::max<std::size_t>(1, h.counts.size());
  std::ostringstream os;
  os << detail::svg_open(w, ht);
  os << "<text x=\"" << detail::num(w / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"14\">"
     << title << " (mean " << detail::num(h.mean) << ", variance " << detail::num(h.variance) << ")</text>\n";
  os << "<line x1=\"" << pad << "\" y1=\"" << ht - pad << "\" x2=\"" << w - pad << "\" y2=\"" << ht - pad
     << "\" stroke=\"black\"/>\n";
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    const double bh = (ht - 2 * pad) * h.counts[k] / max_count;
    const double x = pad + k * bw;
    os << "<rect class=\"bar\" x=\"" << detail::num(x) << "\" y=\"" << detail::num(ht - pad - bh) << "\" width=\""
       << detail::num(std::max(1.0, bw - 1)) << "\" height=\"" << detail::num(bh)
       << "\" fill=\"#365c8d\"><title>" << format_double(h.bin_edges[k]) << ": " << h.counts[k]
       << "</title></rect>\n";
  }
  const std::size_t label_every = std::max<std::size_t>(1, h.counts.size() / 10);
  for (std::size_t k = 0; k < h.counts.size(); k += label_every)
    os << "<text x=\"" << detail::num(pad + (k + 0.5) * bw) << "\" y=\"" << ht - pad + 16
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << format_double(h.bin_edges[k])
       << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace eigcollide
