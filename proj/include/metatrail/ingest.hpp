#pragma once

// Trail and POI ingestion, snapping of trail points to POIs, and visit
// frequency counting.
//
// Wire formats:
//   trails  one JSON object per line:
//           {"trail_id": str, "points": [{"lat": num, "lon": num, "ts": int_ms, "app": str}]}
//   POIs    CSV `poi_id,name,lat,lon` with header
//   visits  one JSON object per line:
//           {"trail_id": str, "visits": [{"poi_id": str, "enter": int, "exit": int, "app": str}]}

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "metatrail/core.hpp"
#include "metatrail/text.hpp"

namespace metatrail {

inline constexpr double kEarthRadiusM = 6'371'000.0;

// Great-circle distance in meters on a sphere of mean Earth radius.
inline double haversine_m(const GeoPoint& a, const GeoPoint& b) {
  constexpr double deg = std::numbers::pi / 180.0;
  const double dlat = (b.lat - a.lat) * deg;
  const double dlon = (b.lon - a.lon) * deg;
  const double s = std::sin(dlat / 2.0);
  const double t = std::sin(dlon / 2.0);
  const double h = s * s + std::cos(a.lat * deg) * std::cos(b.lat * deg) * t * t;
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

struct SnapConfig {
  double radius_m = 50.0;
  std::int64_t min_dwell_ms = 0;

  void validate() const {
    if (!(radius_m > 0.0) || !std::isfinite(radius_m))
      throw ValidationError("radius_m must be a positive number of meters");
    if (min_dwell_ms < 0) throw ValidationError("min_dwell_ms must be >= 0");
  }
};

struct LineDiagnostic {
  std::size_t line = 0;
  std::string message;
};

struct TrailParseReport {
  std::vector<Metatrail> trails;
  std::vector<LineDiagnostic> errors;
  std::vector<LineDiagnostic> warnings;
};

namespace detail {

inline std::optional<std::string> parse_trail_object(const nlohmann::json& obj, Metatrail& out) {
  if (!obj.is_object()) return "record is not a JSON object";
  auto id = obj.find("trail_id");
  if (id == obj.end() || !id->is_string()) return "missing string field 'trail_id'";
  auto pts = obj.find("points");
  if (pts == obj.end() || !pts->is_array()) return "missing array field 'points'";
  if (pts->empty()) return "'points' is empty";
  out.trail_id = id->get<std::string>();
  out.points.clear();
  std::size_t k = 0;
  for (const auto& p : *pts) {
    const std::string where = "point " + std::to_string(k++) + ": ";
    if (!p.is_object()) return where + "not an object";
    auto lat = p.find("lat");
    auto lon = p.find("lon");
    auto ts = p.find("ts");
    if (lat == p.end() || !lat->is_number()) return where + "missing numeric 'lat'";
    if (lon == p.end() || !lon->is_number()) return where + "missing numeric 'lon'";
    if (ts == p.end() || !(ts->is_number_integer() || ts->is_number_unsigned()))
      return where + "missing integer 'ts'";
    TrailPoint tp;
    tp.position = {lat->get<double>(), lon->get<double>()};
    if (!tp.position.valid()) return where + "coordinates out of range";
    if (ts->is_number_unsigned()) {
      auto u = ts->get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(INT64_MAX)) return where + "'ts' out of range";
      tp.timestamp = static_cast<std::int64_t>(u);
    } else {
      tp.timestamp = ts->get<std::int64_t>();
    }
    if (tp.timestamp < 0) return where + "'ts' is negative";
    if (auto app = p.find("app"); app != p.end()) {
      if (!app->is_string()) return where + "'app' is not a string";
      tp.app_label = app->get<std::string>();
    }
    out.points.push_back(std::move(tp));
  }
  return std::nullopt;
}

}  // namespace detail

// Parses line-delimited trail records. Malformed lines are reported, not
// fatal; out-of-order points are stably re-sorted with a warning. Blank
// lines are ignored.
inline TrailParseReport parse_trails_report(std::istream& in) {
  TrailParseReport report;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto obj = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (obj.is_discarded()) {
      report.errors.push_back({lineno, "invalid JSON"});
      continue;
    }
    Metatrail trail;
    if (auto err = detail::parse_trail_object(obj, trail)) {
      report.errors.push_back({lineno, *err});
      continue;
    }
    auto by_ts = [](const TrailPoint& a, const TrailPoint& b) { return a.timestamp < b.timestamp; };
    if (!std::is_sorted(trail.points.begin(), trail.points.end(), by_ts)) {
      std::stable_sort(trail.points.begin(), trail.points.end(), by_ts);
      report.warnings.push_back(
          {lineno, "trail '" + trail.trail_id + "': points re-sorted by timestamp"});
    }
    report.trails.push_back(std::move(trail));
  }
  return report;
}

// As parse_trails_report, but throws when no valid trail was read.
inline std::vector<Metatrail> parse_trails(std::istream& in) {
  auto report = parse_trails_report(in);
  if (report.trails.empty()) {
    std::string msg = "no valid trails";
    if (!report.errors.empty())
      msg += " (line " + std::to_string(report.errors.front().line) + ": " +
             report.errors.front().message + ")";
    throw ValidationError(msg);
  }
  return std::move(report.trails);
}

inline std::vector<Poi> parse_poi_csv(std::istream& in) {
  std::vector<Poi> pois;
  std::set<PoiId> ids;
  for (auto& row : text::read_csv(in, {"poi_id", "name", "lat", "lon"}, "POI catalog")) {
    const std::string ctx = "POI catalog line " + std::to_string(row.line);
    Poi p;
    p.poi_id = row.fields[0];
    p.name = row.fields[1];
    if (p.poi_id.empty()) throw ValidationError(ctx + ": empty poi_id");
    if (!ids.insert(p.poi_id).second)
      throw ValidationError(ctx + ": duplicate poi_id '" + p.poi_id + "'");
    p.position = {text::parse_double(row.fields[2], ctx), text::parse_double(row.fields[3], ctx)};
    if (!p.position.valid()) throw ValidationError(ctx + ": coordinates out of range");
    pois.push_back(std::move(p));
  }
  return pois;
}

// Index of the nearest POI within radius_m; equal distances go to the
// lexicographically smaller poi_id.
inline std::optional<std::size_t> nearest_poi(const GeoPoint& pt, std::span<const Poi> pois,
                                              double radius_m) {
  std::optional<std::size_t> best;
  double best_d = 0.0;
  for (std::size_t i = 0; i < pois.size(); ++i) {
    const double d = haversine_m(pt, pois[i].position);
    if (d > radius_m) continue;
    if (!best || d < best_d || (d == best_d && pois[i].poi_id < pois[*best].poi_id)) {
      best = i;
      best_d = d;
    }
  }
  return best;
}

// Maps each point to its nearest POI within the radius (others are dropped)
// and collapses runs of consecutive snapped points at the same POI into one
// visit. A visit's label is the most frequent app label in its run, ties to
// the smallest label. Visits shorter than min_dwell_ms are removed, and any
// neighbours left at the same POI are merged.
inline VisitSequence snap_trail(const Metatrail& trail, std::span<const Poi> pois,
                                const SnapConfig& cfg = {}) {
  cfg.validate();
  if (pois.empty()) throw ValidationError("POI catalog is empty");

  struct Run {
    std::size_t poi;
    std::int64_t enter;
    std::int64_t exit;
    std::map<std::string, std::size_t> labels;
  };
  std::vector<Run> runs;
  for (const auto& pt : trail.points) {
    auto idx = nearest_poi(pt.position, pois, cfg.radius_m);
    if (!idx) continue;
    if (!runs.empty() && runs.back().poi == *idx) {
      runs.back().exit = std::max(runs.back().exit, pt.timestamp);
      ++runs.back().labels[pt.app_label];
    } else {
      runs.push_back({*idx, pt.timestamp, pt.timestamp, {{pt.app_label, 1}}});
    }
  }

  std::vector<Run> kept;
  for (auto& r : runs) {
    if (r.exit - r.enter < cfg.min_dwell_ms) continue;
    if (!kept.empty() && kept.back().poi == r.poi) {
      kept.back().exit = r.exit;
      for (const auto& [label, n] : r.labels) kept.back().labels[label] += n;
    } else {
      kept.push_back(std::move(r));
    }
  }

  VisitSequence seq;
  seq.trail_id = trail.trail_id;
  for (const auto& r : kept) {
    // std::map iterates labels in ascending order, so strict > keeps the
    // smallest label among equally frequent ones.
    const std::string* label = nullptr;
    std::size_t count = 0;
    for (const auto& [l, n] : r.labels)
      if (n > count) {
        label = &l;
        count = n;
      }
    seq.visits.push_back({pois[r.poi].poi_id, r.enter, r.exit, label ? *label : std::string{}});
  }
  return seq;
}

// Number of visits (not trails) per POI.
inline std::map<PoiId, std::size_t> visit_frequency(std::span<const VisitSequence> seqs) {
  std::map<PoiId, std::size_t> freq;
  for (const auto& s : seqs)
    for (const auto& v : s.visits) ++freq[v.poi_id];
  return freq;
}

// --- visit sequence files ---------------------------------------------------

inline nlohmann::ordered_json to_json(const VisitSequence& seq) {
  auto visits = nlohmann::ordered_json::array();
  for (const auto& v : seq.visits)
    visits.push_back(
        {{"poi_id", v.poi_id}, {"enter", v.enter}, {"exit", v.exit}, {"app", v.app_label}});
  return {{"trail_id", seq.trail_id}, {"visits", std::move(visits)}};
}

inline void write_visit_sequences(std::ostream& out, std::span<const VisitSequence> seqs) {
  for (const auto& s : seqs) out << to_json(s).dump() << '\n';
}

inline std::vector<VisitSequence> read_visit_sequences(std::istream& in) {
  std::vector<VisitSequence> seqs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string ctx = "visits line " + std::to_string(lineno) + ": ";
    auto obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) throw ValidationError(ctx + "invalid JSON object");
    VisitSequence seq;
    try {
      seq.trail_id = obj.at("trail_id").get<std::string>();
      for (const auto& v : obj.at("visits")) {
        Visit visit;
        visit.poi_id = v.at("poi_id").get<std::string>();
        visit.enter = v.at("enter").get<std::int64_t>();
        visit.exit = v.at("exit").get<std::int64_t>();
        if (auto app = v.find("app"); app != v.end()) visit.app_label = app->get<std::string>();
        seq.visits.push_back(std::move(visit));
      }
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(ctx + e.what());
    }
    try {
      validate(seq);
    } catch (const ValidationError& e) {
      throw ValidationError(ctx + e.what());
    }
    seqs.push_back(std::move(seq));
  }
  return seqs;
}

}  // namespace metatrail
