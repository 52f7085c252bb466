#pragma once

// Hotspot network construction: transition counting over visit sequences,
// seeded neighbourhood tracing with frequency pruning, frontier closure, and
// the transition-probability matrix.

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "metatrail/core.hpp"

namespace metatrail {

// Counts transitions between consecutive distinct visits. With an app
// filter, only visits carrying that label take part. Vertex frequency is
// the number of (retained) visits.
inline HotspotGraph transition_graph(std::span<const VisitSequence> seqs,
                                     const std::optional<std::string>& app_filter = std::nullopt) {
  std::map<PoiId, double> freq;
  std::map<EdgeKey, double> edges;
  for (const auto& seq : seqs) {
    const Visit* prev = nullptr;
    for (const auto& v : seq.visits) {
      if (app_filter && v.app_label != *app_filter) continue;
      freq[v.poi_id] += 1.0;
      if (prev && prev->poi_id != v.poi_id) edges[EdgeKey{prev->poi_id, v.poi_id}] += 1.0;
      prev = &v;
    }
  }
  return HotspotGraph(std::move(freq), std::move(edges));
}

// The seed plus every distance-one neighbour (either direction) whose
// frequency reaches the threshold.
inline std::set<PoiId> trace_tree(const HotspotGraph& g, const PoiId& root, double threshold) {
  if (g.frequency(root) < threshold)
    throw ValidationError("seed '" + root + "' is below the frequency threshold");
  std::set<PoiId> tree{root};
  for (const auto* nbrs : {&g.out_neighbors(root), &g.in_neighbors(root)})
    for (const auto& u : *nbrs)
      if (g.frequency(u) >= threshold) tree.insert(u);
  return tree;
}

// Repeats trace_tree from every retained vertex until nothing new is added
// and returns the induced subgraph on the retained set.
inline HotspotGraph build_hotspot_network(const HotspotGraph& g, std::span<const PoiId> seeds,
                                          double threshold) {
  if (seeds.empty()) throw ValidationError("no seed vertices given");
  std::set<PoiId> retained;
  std::deque<PoiId> frontier;
  for (const auto& s : seeds) {
    if (!g.contains(s)) throw LookupError("seed '" + s + "' is not a vertex of the graph");
    if (g.frequency(s) < threshold)
      throw ValidationError("seed '" + s + "' is below the frequency threshold");
    if (retained.insert(s).second) frontier.push_back(s);
  }
  while (!frontier.empty()) {
    PoiId v = std::move(frontier.front());
    frontier.pop_front();
    for (const auto& u : trace_tree(g, v, threshold))
      if (retained.insert(u).second) frontier.push_back(u);
  }
  return g.induced(retained);
}

// Nearest-rank percentile of the vertex frequencies (p in [0, 100]); the
// smallest value such that at least p% of vertices are at or below it.
inline double frequency_percentile(const HotspotGraph& g, double p) {
  if (g.empty()) throw ValidationError("percentile of an empty graph");
  if (!(p >= 0.0 && p <= 100.0)) throw ValidationError("percentile must lie in [0, 100]");
  std::vector<double> f;
  f.reserve(g.vertex_count());
  for (const auto& [_, v] : g.vertices()) f.push_back(v);
  std::sort(f.begin(), f.end());
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(f.size())));
  return f[rank == 0 ? 0 : rank - 1];
}

inline std::vector<PoiId> default_seeds(const HotspotGraph& g, double threshold) {
  std::vector<PoiId> seeds;
  for (const auto& [id, f] : g.vertices())
    if (f >= threshold) seeds.push_back(id);
  return seeds;
}

// entries(j, i) = weight(i -> j) / out_weight(i), zero column for sinks.
// Vertex order is ascending poi_id.
inline TransitionMatrix build_transition_matrix(const HotspotGraph& g) {
  TransitionMatrix m;
  m.order = g.ids();
  const auto n = static_cast<Eigen::Index>(m.order.size());
  m.entries = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> total(m.order.size(), 0.0);
  for (const auto& e : g.indexed_edges()) total[e.src] += e.weight;
  for (const auto& e : g.indexed_edges())
    if (total[e.src] > 0.0)
      m.entries(static_cast<Eigen::Index>(e.dst), static_cast<Eigen::Index>(e.src)) =
          e.weight / total[e.src];
  return m;
}

}  // namespace metatrail
