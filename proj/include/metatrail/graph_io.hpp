#pragma once

// Graph and matrix serialization: edge-list CSV with a frequency sidecar,
// transition matrix CSV, DOT and GeoJSON exports.

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "metatrail/core.hpp"
#include "metatrail/text.hpp"

namespace metatrail::io {

inline void write_edge_csv(std::ostream& out, const HotspotGraph& g) {
  out << "src,dst,weight\n";
  for (const auto& [key, w] : g.edges())
    out << text::quote_csv(key.first) << ',' << text::quote_csv(key.second) << ','
        << text::format_double(w) << '\n';
}

inline void write_frequency_csv(std::ostream& out, const HotspotGraph& g) {
  out << "poi_id,frequency\n";
  for (const auto& [id, f] : g.vertices())
    out << text::quote_csv(id) << ',' << text::format_double(f) << '\n';
}

// Reads an edge list and, when given, a frequency sidecar. Sidecar ids that
// have no edges become isolated vertices; vertices absent from the sidecar
// get frequency 0.
inline HotspotGraph read_graph_csv(std::istream& edges_in, std::istream* freq_in = nullptr) {
  std::vector<WeightedEdge> edges;
  for (auto& row : text::read_csv(edges_in, {"src", "dst", "weight"}, "edge list")) {
    const std::string ctx = "edge list line " + std::to_string(row.line);
    double w = text::parse_double(row.fields[2], ctx);
    if (w < 0.0)
      throw ValidationError(ctx + ": negative weight on edge " + row.fields[0] + "->" +
                            row.fields[1]);
    edges.push_back({row.fields[0], row.fields[1], w});
  }
  HotspotGraph g = graph_from_edge_list(std::span<const WeightedEdge>(edges));
  if (!freq_in) return g;

  auto freqs = g.vertices();
  std::set<PoiId> seen;
  for (auto& row : text::read_csv(*freq_in, {"poi_id", "frequency"}, "frequency file")) {
    const std::string ctx = "frequency file line " + std::to_string(row.line);
    if (row.fields[0].empty()) throw ValidationError(ctx + ": empty poi_id");
    if (!seen.insert(row.fields[0]).second)
      throw ValidationError(ctx + ": duplicate poi_id '" + row.fields[0] + "'");
    double f = text::parse_double(row.fields[1], ctx);
    if (f < 0.0) throw ValidationError(ctx + ": negative frequency");
    freqs[row.fields[0]] = f;
  }
  return HotspotGraph(std::move(freqs), g.edges());
}

// Header row and first column carry poi_ids; cell (row j, column i) holds
// the probability of moving from column vertex i to row vertex j.
inline void write_matrix_csv(std::ostream& out, const TransitionMatrix& m) {
  out << "to/from";
  for (const auto& id : m.order) out << ',' << text::quote_csv(id);
  out << '\n';
  for (std::size_t j = 0; j < m.size(); ++j) {
    out << text::quote_csv(m.order[j]);
    for (std::size_t i = 0; i < m.size(); ++i)
      out << ','
          << text::format_double(
                 m.entries(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)));
    out << '\n';
  }
}

inline TransitionMatrix read_matrix_csv(std::istream& in) {
  std::string line;
  TransitionMatrix m;
  if (!std::getline(in, line)) throw ValidationError("matrix file: missing header");
  auto header = text::split_csv(line);
  if (header.empty() || header[0] != "to/from")
    throw ValidationError("matrix file: expected 'to/from' corner cell");
  m.order.assign(header.begin() + 1, header.end());
  const auto n = static_cast<Eigen::Index>(m.order.size());
  m.entries = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!std::getline(in, line)) throw ValidationError("matrix file: too few rows");
    auto fields = text::split_csv(line);
    if (static_cast<Eigen::Index>(fields.size()) != n + 1 ||
        fields[0] != m.order[static_cast<std::size_t>(j)])
      throw ValidationError("matrix file: malformed row " + std::to_string(j + 2));
    for (Eigen::Index i = 0; i < n; ++i)
      m.entries(j, i) = text::parse_double(fields[static_cast<std::size_t>(i + 1)], "matrix file");
  }
  return m;
}

namespace detail {
inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}
}  // namespace detail

inline void write_dot(std::ostream& out, const HotspotGraph& g,
                      const std::string& name = "hotspots") {
  out << "digraph \"" << detail::dot_escape(name) << "\" {\n";
  for (const auto& [id, f] : g.vertices())
    out << "  \"" << detail::dot_escape(id) << "\" [frequency=\"" << text::format_double(f)
        << "\"];\n";
  for (const auto& [key, w] : g.edges())
    out << "  \"" << detail::dot_escape(key.first) << "\" -> \"" << detail::dot_escape(key.second)
        << "\" [label=\"" << text::format_double(w) << "\"];\n";
  out << "}\n";
}

// GeoJSON FeatureCollection: one Point per vertex (properties poi_id, name,
// frequency) followed by one LineString per edge (properties src, dst,
// weight). Every vertex must have a catalog position.
inline nlohmann::ordered_json to_geojson(const HotspotGraph& g,
                                         const std::map<PoiId, Poi>& catalog) {
  auto position = [&](const PoiId& id) -> const Poi& {
    auto it = catalog.find(id);
    if (it == catalog.end()) throw LookupError("no catalog position for vertex '" + id + "'");
    return it->second;
  };
  auto features = nlohmann::ordered_json::array();
  for (const auto& [id, f] : g.vertices()) {
    const Poi& p = position(id);
    features.push_back({{"type", "Feature"},
                        {"geometry",
                         {{"type", "Point"}, {"coordinates", {p.position.lon, p.position.lat}}}},
                        {"properties", {{"poi_id", id}, {"name", p.name}, {"frequency", f}}}});
  }
  for (const auto& [key, w] : g.edges()) {
    const Poi& a = position(key.first);
    const Poi& b = position(key.second);
    features.push_back(
        {{"type", "Feature"},
         {"geometry",
          {{"type", "LineString"},
           {"coordinates",
            {{a.position.lon, a.position.lat}, {b.position.lon, b.position.lat}}}}},
         {"properties", {{"src", key.first}, {"dst", key.second}, {"weight", w}}}});
  }
  return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

}  // namespace metatrail::io
