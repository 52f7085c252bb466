#pragma once

// Sequential visiting patterns inside one affinity subnetwork and between
// subnetworks. A trail contributes one candidate order: its visits to the
// units of interest, each unit placed at its latest enter timestamp.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "metatrail/clustering.hpp"
#include "metatrail/core.hpp"

namespace metatrail {

struct SequentialPattern {
  std::vector<std::string> sequence;
  std::size_t support = 0;

  friend bool operator==(const SequentialPattern&, const SequentialPattern&) = default;
};

using TimedUnit = std::pair<std::string, std::int64_t>;

namespace detail {

// Keeps the latest timestamp per unit and sorts ascending by it (ties by id).
inline std::vector<TimedUnit> latest_order(const std::vector<TimedUnit>& units) {
  std::map<std::string, std::int64_t> latest;
  for (const auto& [id, ts] : units) {
    auto [it, fresh] = latest.emplace(id, ts);
    if (!fresh && ts >= it->second) it->second = ts;
  }
  std::vector<TimedUnit> out(latest.begin(), latest.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second < b.second; });
  return out;
}

inline std::vector<SequentialPattern> aggregate(const std::vector<std::vector<TimedUnit>>& orders,
                                                std::size_t min_support) {
  std::map<std::vector<std::string>, std::size_t> counts;
  for (const auto& o : orders) {
    if (o.size() < 2) continue;
    std::vector<std::string> seq;
    seq.reserve(o.size());
    for (const auto& [id, _] : o) seq.push_back(id);
    ++counts[seq];
  }
  std::vector<SequentialPattern> out;
  for (auto& [seq, n] : counts)
    if (n >= min_support) out.push_back({seq, n});
  // counts is ordered by sequence, so a stable sort on support keeps the
  // lexicographic tie-break.
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.support > b.support; });
  return out;
}

}  // namespace detail

// Visits to `members`, one per POI at its latest enter timestamp, in
// ascending time order.
inline std::vector<TimedUnit> project_trail(const VisitSequence& seq,
                                            const std::set<PoiId>& members) {
  std::vector<TimedUnit> units;
  for (const auto& v : seq.visits)
    if (members.count(v.poi_id)) units.emplace_back(v.poi_id, v.enter);
  return detail::latest_order(units);
}

inline std::vector<SequentialPattern> mine_intra_patterns(std::span<const VisitSequence> seqs,
                                                          const AffinitySubnetwork& sub,
                                                          std::size_t min_support = 2) {
  if (min_support < 1) throw ValidationError("min_support must be >= 1");
  const std::set<PoiId> members(sub.members.begin(), sub.members.end());
  std::vector<std::vector<TimedUnit>> orders;
  orders.reserve(seqs.size());
  for (const auto& s : seqs) orders.push_back(project_trail(s, members));
  return detail::aggregate(orders, min_support);
}

// Relabels visits by their subnetwork ("cluster:<hub>"), collapses
// consecutive repeats, then applies the latest-timestamp rule. Visits to
// POIs outside the clustering are skipped.
inline std::vector<SequentialPattern> mine_inter_patterns(std::span<const VisitSequence> seqs,
                                                          const Clustering& c,
                                                          std::size_t min_support = 2) {
  if (min_support < 1) throw ValidationError("min_support must be >= 1");
  std::map<PoiId, std::string> owner;
  for (const auto& sub : c.subnetworks)
    for (const auto& m : sub.members)
      if (!owner.emplace(m, cluster_vertex_id(sub)).second)
        throw ValidationError("vertex '" + m + "' appears in more than one subnetwork");

  std::vector<std::vector<TimedUnit>> orders;
  orders.reserve(seqs.size());
  for (const auto& s : seqs) {
    std::vector<TimedUnit> units;
    for (const auto& v : s.visits) {
      auto it = owner.find(v.poi_id);
      if (it == owner.end()) continue;
      if (!units.empty() && units.back().first == it->second) continue;
      units.emplace_back(it->second, v.enter);
    }
    orders.push_back(detail::latest_order(units));
  }
  return detail::aggregate(orders, min_support);
}

inline nlohmann::ordered_json patterns_to_json(const std::string& scope,
                                               const std::optional<std::string>& subnetwork,
                                               const std::vector<SequentialPattern>& patterns) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& p : patterns) arr.push_back({{"sequence", p.sequence}, {"support", p.support}});
  nlohmann::ordered_json doc;
  doc["scope"] = scope;
  doc["subnetwork"] = subnetwork ? nlohmann::ordered_json(*subnetwork) : nullptr;
  doc["patterns"] = std::move(arr);
  return doc;
}

}  // namespace metatrail
