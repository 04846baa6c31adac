#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "eigcollide/collisions.hpp"
#include "eigcollide/stats.hpp"

namespace eigcollide {

using nlohmann::json;

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// JSON -----------------------------------------------------------------------

inline json to_json(const ModelSpec& s) {
  return {{"n", s.n},
          {"ensemble", std::string(to_string(s.ensemble))},
          {"curve", std::string(to_string(s.curve))},
          {"seed", s.seed},
          {"init", std::string(to_string(s.init))}};
}

inline json to_json(const GridConfig& g) {
  return {{"m", g.m}, {"subdivision_depth", g.subdivision_depth}, {"start_offset", g.start_offset},
          {"parallelism", g.parallelism}};
}

inline json to_json(const WalkOptions& w) {
  return {{"steps_per_unit", w.steps_per_unit},
          {"min_steps_per_edge", w.min_steps_per_edge},
          {"max_refinement_depth", w.max_refinement_depth},
          {"neighbor_pruning", w.pruning == NeighborPruning::Delaunay ? "delaunay" : "brute_force"}};
}

inline json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const ParamRect& r) { return {{"s0", r.s0}, {"s1", r.s1}, {"t0", r.t0}, {"t1", r.t1}}; }

inline json to_json(const CollisionRecord& r) {
  return {{"s", r.s},
          {"t", r.t},
          {"lambda", to_json(r.lambda)},
          {"pair", {r.pair.first, r.pair.second}},
          {"square", {r.square.i, r.square.j}},
          {"cell", to_json(r.cell)},
          {"depth", r.depth},
          {"method", std::string(to_string(r.method))},
          {"residual_gap", r.residual_gap}};
}

inline json to_json(const CollisionReport& r) {
  json records = json::array(), unresolved = json::array(), squares = json::array();
  for (const auto& c : r.records) records.push_back(to_json(c));
  for (const auto& u : r.unresolved)
    unresolved.push_back({{"square", {u.square.i, u.square.j}},
                          {"cell", to_json(u.cell)},
                          {"depth", u.depth},
                          {"classification", std::string(to_string(u.kind))},
                          {"lower_bound", u.lower_bound},
                          {"reason", u.reason}});
  for (const auto& q : r.nonidentity_squares)
    squares.push_back({{"square", {q.square.i, q.square.j}},
                       {"classification", std::string(to_string(q.kind))},
                       {"lower_bound", q.lower_bound},
                       {"cycles", q.cycles}});
  return {{"spec", to_json(r.spec)},
          {"grid", to_json(r.grid)},
          {"walk", to_json(r.walk)},
          {"s_start", r.s_start},
          {"degenerate_start", r.degenerate_start},
          {"total_localized", r.total_localized},
          {"total_lower_bound", r.total_lower_bound},
          {"records", records},
          {"unresolved_squares", unresolved},
          {"nonidentity_squares", squares},
          {"solves", r.solves},
          {"refinements", r.refinements}};
}

inline json to_json(const TrialSummary& s) {
  json j = {{"seed", s.seed},
            {"spec", to_json(s.spec)},
            {"collision_count", s.collision_count},
            {"localized_count", s.localized_count},
            {"unresolved_count", s.unresolved_count},
            {"degenerate_start", s.degenerate_start},
            {"wall_seconds", s.wall_seconds}};
  if (!s.ok()) j["error"] = s.error;
  return j;
}

inline json to_json(const Histogram& h) {
  return {{"bin_edges", h.bin_edges}, {"counts", h.counts}, {"mean", h.mean}, {"variance", h.variance},
          {"trials", h.trials}};
}

namespace detail {

template <class T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string(key) + ": " + e.what());
  }
}

}  // namespace detail

/// Reads the fields present in `j` over `s`.
inline void from_json_into(const json& j, ModelSpec& s) {
  detail::read_field(j, "n", s.n);
  detail::read_field(j, "seed", s.seed);
  if (j.contains("ensemble")) s.ensemble = parse_ensemble(j.at("ensemble").get<std::string>());
  if (j.contains("init")) s.init = parse_init(j.at("init").get<std::string>());
  if (j.contains("curve")) {
    try {
      s.curve = parse_curve(j.at("curve").get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("curve: ") + e.what());
    }
  }
}

inline void from_json_into(const json& j, GridConfig& g) {
  detail::read_field(j, "m", g.m);
  detail::read_field(j, "subdivision_depth", g.subdivision_depth);
  detail::read_field(j, "start_offset", g.start_offset);
  detail::read_field(j, "parallelism", g.parallelism);
}

inline void from_json_into(const json& j, WalkOptions& w) {
  detail::read_field(j, "steps_per_unit", w.steps_per_unit);
  detail::read_field(j, "min_steps_per_edge", w.min_steps_per_edge);
  detail::read_field(j, "max_refinement_depth", w.max_refinement_depth);
  if (j.contains("neighbor_pruning")) {
    const auto p = j.at("neighbor_pruning").get<std::string>();
    if (p == "delaunay")
      w.pruning = NeighborPruning::Delaunay;
    else if (p == "brute_force")
      w.pruning = NeighborPruning::BruteForce;
    else
      throw ConfigError("neighbor_pruning: unknown value '" + p + "'");
  }
}

// CSV ------------------------------------------------------------------------

inline constexpr const char* kRecordCsvHeader = "seed,n,curve,ensemble,s,t,re,im,i,j,residual_gap,method";

struct RecordRow {
  std::uint64_t seed = 0;
  int n = 0;
  std::string curve;
  std::string ensemble;
  double s = 0, t = 0, re = 0, im = 0;
  int i = 0, j = 0;
  double residual_gap = 0;
  std::string method;

  friend bool operator==(const RecordRow&, const RecordRow&) = default;
};

inline std::vector<RecordRow> record_rows(const CollisionReport& r) {
  std::vector<RecordRow> rows;
  for (const auto& c : r.records)
    rows.push_back({r.spec.seed, r.spec.n, std::string(to_string(r.spec.curve)), std::string(to_string(r.spec.ensemble)),
                    c.s, c.t, c.lambda.real(), c.lambda.imag(), c.pair.first, c.pair.second, c.residual_gap,
                    std::string(to_string(c.method))});
  return rows;
}

inline void write_record_csv(std::ostream& os, const std::vector<RecordRow>& rows) {
  os << kRecordCsvHeader << '\n';
  for (const auto& r : rows)
    os << r.seed << ',' << r.n << ',' << r.curve << ',' << r.ensemble << ',' << format_double(r.s) << ','
       << format_double(r.t) << ',' << format_double(r.re) << ',' << format_double(r.im) << ',' << r.i << ',' << r.j
       << ',' << format_double(r.residual_gap) << ',' << r.method << '\n';
}

inline void write_record_csv(std::ostream& os, const CollisionReport& r) { write_record_csv(os, record_rows(r)); }

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& s, int line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw IoError("csv line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

inline long long parse_int(const std::string& s, int line) {
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0') throw IoError("csv line " + std::to_string(line) + ": bad integer '" + s + "'");
  return v;
}

}  // namespace detail

inline std::vector<RecordRow> read_record_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kRecordCsvHeader) throw IoError("csv: missing or unexpected header");
  std::vector<RecordRow> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 12) throw IoError("csv line " + std::to_string(lineno) + ": expected 12 fields");
    RecordRow r;
    r.seed = std::strtoull(f[0].c_str(), nullptr, 10);
    r.n = static_cast<int>(detail::parse_int(f[1], lineno));
    r.curve = f[2];
    r.ensemble = f[3];
    r.s = detail::parse_double(f[4], lineno);
    r.t = detail::parse_double(f[5], lineno);
    r.re = detail::parse_double(f[6], lineno);
    r.im = detail::parse_double(f[7], lineno);
    r.i = static_cast<int>(detail::parse_int(f[8], lineno));
    r.j = static_cast<int>(detail::parse_int(f[9], lineno));
    r.residual_gap = detail::parse_double(f[10], lineno);
    r.method = f[11];
    rows.push_back(std::move(r));
  }
  return rows;
}

inline void write_histogram_csv(std::ostream& os, const Histogram& h) {
  os << "bin_low,bin_high,count\n";
  for (std::size_t k = 0; k < h.counts.size(); ++k)
    os << format_double(h.bin_edges[k]) << ',' << format_double(h.bin_edges[k + 1]) << ',' << h.counts[k] << '\n';
}

/// Track samples: one row per eigenvalue per t-sample of each s-value.
struct TrackRow {
  double s, t;
  int index;
  Complex z;
};

inline void write_track_csv(std::ostream& os, const std::vector<TrackRow>& rows) {
  os << "s,t,index,re,im\n";
  for (const auto& r : rows)
    os << format_double(r.s) << ',' << format_double(r.t) << ',' << r.index << ',' << format_double(r.z.real()) << ','
       << format_double(r.z.imag()) << '\n';
}

// Files ----------------------------------------------------------------------

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw IoError("write to '" + path + "' failed");
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline CollisionReport report_records_from_json(const json& j) {
  CollisionReport r;
  try {
    from_json_into(j.at("spec"), r.spec);
    for (const auto& c : j.at("records")) {
      CollisionRecord rec;
      rec.s = c.at("s").get<double>();
      rec.t = c.at("t").get<double>();
      rec.lambda = {c.at("lambda")[0].get<double>(), c.at("lambda")[1].get<double>()};
      rec.pair = {c.at("pair")[0].get<int>(), c.at("pair")[1].get<int>()};
      rec.square = {c.at("square")[0].get<int>(), c.at("square")[1].get<int>()};
      rec.residual_gap = c.at("residual_gap").get<double>();
      rec.method = c.at("method").get<std::string>() == "subdivision" ? LocalizationMethod::Subdivision
                                                                      : LocalizationMethod::SideMinima;
      r.records.push_back(rec);
    }
  } catch (const json::exception& e) {
    throw IoError(std::string("report: ") + e.what());
  }
  r.total_localized = static_cast<int>(r.records.size());
  return r;
}

}  // namespace eigcollide
