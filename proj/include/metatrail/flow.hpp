#pragma once

// Flow directions (in/out weight balance) and flow capacities (maximum
// flow / minimum cut with observed weights as capacities).

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "metatrail/core.hpp"
#include "metatrail/text.hpp"

namespace metatrail {

struct FlowResult {
  PoiId source;
  PoiId sink;
  double max_flow = 0.0;
  std::vector<EdgeKey> min_cut_edges;   // sorted
  std::vector<EdgeKey> saturated;       // sorted; flow == capacity > 0
  std::map<EdgeKey, double> edge_flows;  // every non-loop edge of the graph
  std::set<PoiId> source_side;          // residual-reachable from source
};

// Edmonds-Karp: breadth-first shortest augmenting paths on the residual
// network. Residual capacities are updated by subtraction so the bottleneck
// arc drops to exactly zero on every augmentation.
inline FlowResult max_flow(const HotspotGraph& g, const PoiId& source, const PoiId& sink) {
  if (!g.contains(source)) throw LookupError("unknown source vertex '" + source + "'");
  if (!g.contains(sink)) throw LookupError("unknown sink vertex '" + sink + "'");
  if (source == sink) throw ValidationError("source and sink must differ");

  std::vector<PoiId> ids;
  std::map<PoiId, std::size_t> index;
  for (const auto& [id, _] : g.vertices()) {
    index.emplace(id, ids.size());
    ids.push_back(id);
  }
  const std::size_t n = ids.size();

  struct Arc {
    std::size_t to;
    double residual;
  };
  std::vector<Arc> arcs;  // arcs[e ^ 1] is the reverse of arcs[e]
  std::vector<std::vector<std::size_t>> adj(n);
  std::vector<std::pair<EdgeKey, double>> forward;  // by even arc index / 2
  for (const auto& [key, w] : g.edges()) {
    if (key.first == key.second) continue;
    const auto u = index.at(key.first);
    const auto v = index.at(key.second);
    adj[u].push_back(arcs.size());
    arcs.push_back({v, w});
    adj[v].push_back(arcs.size());
    arcs.push_back({u, 0.0});
    forward.emplace_back(key, w);
  }

  const std::size_t s = index.at(source);
  const std::size_t t = index.at(sink);
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> via(n);

  auto bfs = [&]() {
    std::fill(via.begin(), via.end(), none);
    std::vector<bool> seen(n, false);
    seen[s] = true;
    std::deque<std::size_t> q{s};
    while (!q.empty()) {
      const auto u = q.front();
      q.pop_front();
      for (auto e : adj[u]) {
        const auto v = arcs[e].to;
        if (seen[v] || !(arcs[e].residual > 0.0)) continue;
        seen[v] = true;
        via[v] = e;
        if (v == t) return seen;
        q.push_back(v);
      }
    }
    return seen;
  };

  FlowResult result;
  result.source = source;
  result.sink = sink;
  double total = 0.0;
  std::vector<bool> reach;
  for (;;) {
    reach = bfs();
    if (!reach[t]) break;
    double bottleneck = std::numeric_limits<double>::infinity();
    for (auto v = t; v != s; v = arcs[via[v] ^ 1].to)
      bottleneck = std::min(bottleneck, arcs[via[v]].residual);
    for (auto v = t; v != s; v = arcs[via[v] ^ 1].to) {
      const auto e = via[v];
      if (arcs[e].residual == bottleneck)
        arcs[e].residual = 0.0;
      else
        arcs[e].residual -= bottleneck;
      arcs[e ^ 1].residual += bottleneck;
    }
    total += bottleneck;
  }
  result.max_flow = total;

  for (std::size_t i = 0; i < n; ++i)
    if (reach[i]) result.source_side.insert(ids[i]);
  for (std::size_t k = 0; k < forward.size(); ++k) {
    const auto& [key, cap] = forward[k];
    const double f = std::clamp(cap - arcs[2 * k].residual, 0.0, cap);
    result.edge_flows.emplace(key, f);
    if (cap > 0.0 && arcs[2 * k].residual == 0.0) result.saturated.push_back(key);
    if (cap > 0.0 && result.source_side.count(key.first) && !result.source_side.count(key.second))
      result.min_cut_edges.push_back(key);
  }
  return result;
}

enum class BoundStatus { kUnderflow, kWithin, kOverflow };

inline const char* to_string(BoundStatus s) {
  switch (s) {
    case BoundStatus::kUnderflow:
      return "underflow";
    case BoundStatus::kWithin:
      return "within";
    case BoundStatus::kOverflow:
      return "overflow";
  }
  return "?";
}

// Inclusive bounds on the computed maximum flow.
inline BoundStatus check_capacity_bounds(const FlowResult& f, double lower, double upper) {
  if (!(lower >= 0.0)) throw ValidationError("lower bound must be >= 0");
  if (!(lower <= upper)) throw ValidationError("lower bound exceeds upper bound");
  if (f.max_flow < lower) return BoundStatus::kUnderflow;
  if (f.max_flow > upper) return BoundStatus::kOverflow;
  return BoundStatus::kWithin;
}

struct PairDirection {
  PoiId u;  // u < v
  PoiId v;
  double forward = 0.0;   // w(u -> v)
  double backward = 0.0;  // w(v -> u)

  double imbalance() const { return forward - backward; }
  bool balanced() const { return forward == backward; }
};

struct DirectionReport {
  std::map<PoiId, double> net_flow;  // out_weight - in_weight
  std::vector<PairDirection> pairs;  // sorted by (u, v)
};

inline DirectionReport direction_report(const HotspotGraph& g) {
  DirectionReport r;
  for (const auto& [id, _] : g.vertices()) r.net_flow.emplace(id, g.out_weight(id) - g.in_weight(id));
  std::map<EdgeKey, PairDirection> pairs;
  for (const auto& [key, w] : g.edges()) {
    const auto& [a, b] = key;
    if (a == b) continue;
    const bool fwd = a < b;
    auto& p = pairs[fwd ? key : EdgeKey{b, a}];
    p.u = fwd ? a : b;
    p.v = fwd ? b : a;
    (fwd ? p.forward : p.backward) += w;
  }
  for (auto& [_, p] : pairs) r.pairs.push_back(std::move(p));
  return r;
}

// "u->v", "v->u" as ids, or "balanced".
inline std::string dominant_direction(const PairDirection& p) {
  if (p.balanced()) return "balanced";
  return p.imbalance() > 0 ? p.u + "->" + p.v : p.v + "->" + p.u;
}

inline void write_direction_csv(std::ostream& out, const DirectionReport& r) {
  out << "u,v,forward_weight,backward_weight,imbalance\n";
  for (const auto& p : r.pairs)
    out << text::quote_csv(p.u) << ',' << text::quote_csv(p.v) << ','
        << text::format_double(p.forward) << ',' << text::format_double(p.backward) << ','
        << text::format_double(p.imbalance()) << '\n';
}

inline nlohmann::ordered_json to_json(const FlowResult& f, const HotspotGraph& g) {
  auto cut = nlohmann::ordered_json::array();
  for (const auto& e : f.min_cut_edges)
    cut.push_back({{"src", e.first}, {"dst", e.second}, {"capacity", *g.weight(e.first, e.second)}});
  auto sat = nlohmann::ordered_json::array();
  for (const auto& e : f.saturated) sat.push_back({{"src", e.first}, {"dst", e.second}});
  auto flows = nlohmann::ordered_json::array();
  for (const auto& [e, v] : f.edge_flows)
    flows.push_back({{"src", e.first},
                     {"dst", e.second},
                     {"flow", v},
                     {"capacity", *g.weight(e.first, e.second)}});
  return {{"source", f.source},       {"sink", f.sink},      {"max_flow", f.max_flow},
          {"min_cut_edges", cut},     {"saturated", sat},    {"edge_flows", flows},
          {"source_side", f.source_side}};
}

}  // namespace metatrail
