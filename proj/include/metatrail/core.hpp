#pragma once

// Domain types shared by every analysis stage: trail points, POIs, visit
// sequences, the weighted hotspot graph, and the column-stochastic
// transition matrix.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "metatrail/errors.hpp"

namespace metatrail {

using PoiId = std::string;

struct GeoPoint {
  double lat = 0.0;  // degrees, [-90, 90]
  double lon = 0.0;  // degrees, [-180, 180]

  bool valid() const {
    return std::isfinite(lat) && std::isfinite(lon) && lat >= -90.0 && lat <= 90.0 &&
           lon >= -180.0 && lon <= 180.0;
  }

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

struct TrailPoint {
  GeoPoint position;
  std::int64_t timestamp = 0;  // ms since Unix epoch
  std::string app_label;

  friend bool operator==(const TrailPoint&, const TrailPoint&) = default;
};

struct Metatrail {
  std::string trail_id;
  std::vector<TrailPoint> points;  // nonempty, timestamps nondecreasing
};

struct Poi {
  PoiId poi_id;
  std::string name;
  GeoPoint position;
};

struct Visit {
  PoiId poi_id;
  std::int64_t enter = 0;
  std::int64_t exit = 0;
  std::string app_label;

  friend bool operator==(const Visit&, const Visit&) = default;
};

struct VisitSequence {
  std::string trail_id;
  std::vector<Visit> visits;

  friend bool operator==(const VisitSequence&, const VisitSequence&) = default;
};

// Throws ValidationError if the sequence repeats a POI back to back, has a
// visit with enter > exit, or is not ordered by enter timestamp.
inline void validate(const VisitSequence& seq) {
  for (std::size_t i = 0; i < seq.visits.size(); ++i) {
    const Visit& v = seq.visits[i];
    if (v.poi_id.empty())
      throw ValidationError("trail '" + seq.trail_id + "': visit with empty poi_id");
    if (v.enter > v.exit)
      throw ValidationError("trail '" + seq.trail_id + "': visit to '" + v.poi_id +
                            "' has enter > exit");
    if (i > 0) {
      const Visit& prev = seq.visits[i - 1];
      if (prev.poi_id == v.poi_id)
        throw ValidationError("trail '" + seq.trail_id + "': consecutive visits to '" +
                              v.poi_id + "'");
      if (prev.enter > v.enter)
        throw ValidationError("trail '" + seq.trail_id + "': visits not ordered by enter time");
    }
  }
}

using EdgeKey = std::pair<PoiId, PoiId>;

struct WeightedEdge {
  PoiId src;
  PoiId dst;
  double weight = 0.0;
};

// Edge expressed by positions in HotspotGraph::ids().
struct IndexedEdge {
  std::size_t src = 0;
  std::size_t dst = 0;
  double weight = 0.0;
};

// Directed weighted graph keyed by poi_id. Immutable once constructed; the
// ordered containers make every traversal deterministic.
class HotspotGraph {
 public:
  HotspotGraph() = default;

  HotspotGraph(std::map<PoiId, double> frequencies, std::map<EdgeKey, double> edges)
      : frequencies_(std::move(frequencies)), edges_(std::move(edges)) {
    for (const auto& [id, f] : frequencies_) {
      if (id.empty()) throw ValidationError("vertex with empty poi_id");
      if (!(f >= 0.0) || !std::isfinite(f))
        throw ValidationError("vertex '" + id + "' has invalid frequency");
      Adjacency a;
      a.index = ids_.size();
      adjacency_.emplace_hint(adjacency_.end(), id, std::move(a));
      ids_.push_back(id);
    }
    indexed_.reserve(edges_.size());
    for (const auto& [key, w] : edges_) {
      const auto& [src, dst] = key;
      if (!(w >= 0.0) || !std::isfinite(w))
        throw ValidationError("edge " + src + "->" + dst + " has invalid weight");
      auto s = adjacency_.find(src);
      auto d = adjacency_.find(dst);
      if (s == adjacency_.end() || d == adjacency_.end())
        throw ValidationError("edge " + src + "->" + dst + " references an unknown vertex");
      indexed_.push_back({s->second.index, d->second.index, w});
      s->second.out_weight += w;
      s->second.out.push_back(dst);
      d->second.in_weight += w;
      d->second.in.push_back(src);
    }
  }

  const std::map<PoiId, double>& vertices() const { return frequencies_; }
  const std::map<EdgeKey, double>& edges() const { return edges_; }

  // Vertex ids in ascending order; positions are the indices used by
  // indexed_edges() and by matrices built from this graph.
  const std::vector<PoiId>& ids() const { return ids_; }
  // Edges in (src, dst) order with endpoints as positions in ids().
  const std::vector<IndexedEdge>& indexed_edges() const { return indexed_; }
  std::size_t index_of(const PoiId& v) const { return at(v).index; }

  std::size_t vertex_count() const { return frequencies_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return frequencies_.empty(); }
  bool contains(const PoiId& v) const { return frequencies_.count(v) != 0; }

  double frequency(const PoiId& v) const {
    auto it = frequencies_.find(v);
    if (it == frequencies_.end()) throw LookupError("unknown vertex '" + v + "'");
    return it->second;
  }

  std::optional<double> weight(const PoiId& src, const PoiId& dst) const {
    auto it = edges_.find(EdgeKey{src, dst});
    if (it == edges_.end()) return std::nullopt;
    return it->second;
  }

  double out_weight(const PoiId& v) const { return at(v).out_weight; }
  double in_weight(const PoiId& v) const { return at(v).in_weight; }

  // Targets of edges leaving v, sorted.
  const std::vector<PoiId>& out_neighbors(const PoiId& v) const { return at(v).out; }
  // Sources of edges entering v, sorted.
  const std::vector<PoiId>& in_neighbors(const PoiId& v) const { return at(v).in; }

  double total_weight() const {
    double sum = 0.0;
    for (const auto& [_, w] : edges_) sum += w;
    return sum;
  }

  // Subgraph induced by `keep`; ids outside the graph are ignored.
  HotspotGraph induced(const std::set<PoiId>& keep) const {
    std::map<PoiId, double> f;
    for (const auto& id : keep) {
      auto it = frequencies_.find(id);
      if (it != frequencies_.end()) f.emplace(*it);
    }
    std::map<EdgeKey, double> e;
    for (const auto& [key, w] : edges_)
      if (f.count(key.first) && f.count(key.second)) e.emplace(key, w);
    return HotspotGraph(std::move(f), std::move(e));
  }

  friend bool operator==(const HotspotGraph& a, const HotspotGraph& b) {
    return a.frequencies_ == b.frequencies_ && a.edges_ == b.edges_;
  }

 private:
  struct Adjacency {
    std::size_t index = 0;
    double out_weight = 0.0;
    double in_weight = 0.0;
    std::vector<PoiId> out;
    std::vector<PoiId> in;
  };

  const Adjacency& at(const PoiId& v) const {
    auto it = adjacency_.find(v);
    if (it == adjacency_.end()) throw LookupError("unknown vertex '" + v + "'");
    return it->second;
  }

  std::map<PoiId, double> frequencies_;
  std::map<EdgeKey, double> edges_;
  std::map<PoiId, Adjacency> adjacency_;
  std::vector<PoiId> ids_;
  std::vector<IndexedEdge> indexed_;
};

// Builds a graph whose vertex set is the union of edge endpoints (all with
// frequency 0). Duplicate (src, dst) pairs are merged by summing; the
// summands are sorted first so the result does not depend on input order.
inline HotspotGraph graph_from_edge_list(std::span<const WeightedEdge> edges) {
  std::map<EdgeKey, std::vector<double>> parts;
  std::map<PoiId, double> vertices;
  for (const auto& e : edges) {
    if (e.src.empty() || e.dst.empty()) throw ValidationError("edge with empty vertex id");
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight))
      throw ValidationError("edge " + e.src + "->" + e.dst + " has negative or invalid weight " +
                            std::to_string(e.weight));
    parts[EdgeKey{e.src, e.dst}].push_back(e.weight);
    vertices.emplace(e.src, 0.0);
    vertices.emplace(e.dst, 0.0);
  }
  std::map<EdgeKey, double> merged;
  for (auto& [key, ws] : parts) {
    std::sort(ws.begin(), ws.end());
    double sum = 0.0;
    for (double w : ws) sum += w;
    merged.emplace(key, sum);
  }
  return HotspotGraph(std::move(vertices), std::move(merged));
}

inline HotspotGraph graph_from_edge_list(std::initializer_list<WeightedEdge> edges) {
  return graph_from_edge_list(std::span<const WeightedEdge>(edges.begin(), edges.size()));
}

inline double out_weight(const HotspotGraph& g, const PoiId& v) { return g.out_weight(v); }
inline double in_weight(const HotspotGraph& g, const PoiId& v) { return g.in_weight(v); }

// Same graph with every frequency replaced by `freq` (ids missing from the
// map keep their current value).
inline HotspotGraph with_frequencies(const HotspotGraph& g, const std::map<PoiId, double>& freq) {
  auto f = g.vertices();
  for (auto& [id, value] : f) {
    auto it = freq.find(id);
    if (it != freq.end()) value = it->second;
  }
  return HotspotGraph(std::move(f), g.edges());
}

// Weakly connected components, each sorted; components ordered by their
// smallest member.
inline std::vector<std::vector<PoiId>> weak_components(const HotspotGraph& g) {
  std::vector<std::vector<PoiId>> out;
  std::set<PoiId> seen;
  for (const auto& [start, _] : g.vertices()) {
    if (seen.count(start)) continue;
    std::vector<PoiId> comp;
    std::vector<PoiId> stack{start};
    seen.insert(start);
    while (!stack.empty()) {
      PoiId v = std::move(stack.back());
      stack.pop_back();
      for (const auto* nbrs : {&g.out_neighbors(v), &g.in_neighbors(v)})
        for (const auto& u : *nbrs)
          if (seen.insert(u).second) stack.push_back(u);
      comp.push_back(std::move(v));
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

// Column-stochastic matrix over `order`: entries(j, i) is the probability of
// moving from order[i] to order[j]. Columns of vertices without outgoing
// weight are zero.
struct TransitionMatrix {
  std::vector<PoiId> order;
  Eigen::MatrixXd entries;

  std::size_t size() const { return order.size(); }

  std::size_t index_of(const PoiId& v) const {
    auto it = std::lower_bound(order.begin(), order.end(), v);
    if (it == order.end() || *it != v) {
      // order is sorted for matrices built here, but tolerate arbitrary order
      auto lin = std::find(order.begin(), order.end(), v);
      if (lin == order.end()) throw LookupError("unknown vertex '" + v + "'");
      return static_cast<std::size_t>(lin - order.begin());
    }
    return static_cast<std::size_t>(it - order.begin());
  }

  double probability(const PoiId& from, const PoiId& to) const {
    return entries(static_cast<Eigen::Index>(index_of(to)),
                   static_cast<Eigen::Index>(index_of(from)));
  }
};

}  // namespace metatrail
