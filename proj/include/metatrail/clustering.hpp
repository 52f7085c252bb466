#pragma once

// Affinity subnetworks: Markov clustering (expansion = matrix power,
// inflation = entrywise power + column renormalisation), a Lloyd K-means
// baseline over transition-matrix columns, hub detection and cluster
// contraction.

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <json.hpp>

#include "metatrail/core.hpp"
#include "metatrail/hotspot.hpp"

namespace metatrail {

inline constexpr double kMclPruneThreshold = 1e-12;

struct MclParams {
  int expansion_power = 2;
  double inflation_power = 2.0;
  int max_iterations = 500;
  double convergence_eps = 1e-9;
  double self_loop_weight = 1.0;

  void validate() const {
    if (expansion_power < 2) throw ValidationError("expansion power must be an integer >= 2");
    if (!(inflation_power > 1.0) || !std::isfinite(inflation_power))
      throw ValidationError("inflation power must be > 1");
    if (max_iterations < 1) throw ValidationError("max_iterations must be >= 1");
    if (!(convergence_eps >= 0.0)) throw ValidationError("convergence_eps must be >= 0");
    if (!(self_loop_weight >= 0.0) || !std::isfinite(self_loop_weight))
      throw ValidationError("self-loop weight must be >= 0");
  }
};

struct AffinitySubnetwork {
  std::vector<PoiId> members;  // sorted
  PoiId hub;

  // Subgraph of g induced by the members.
  HotspotGraph induced(const HotspotGraph& g) const {
    return g.induced(std::set<PoiId>(members.begin(), members.end()));
  }

  friend bool operator==(const AffinitySubnetwork&, const AffinitySubnetwork&) = default;
};

struct Clustering {
  std::vector<AffinitySubnetwork> subnetworks;
  bool converged = true;
  int iterations = 0;
};

// Uniform starting distribution, 1/n per vertex.
inline Eigen::VectorXd initial_distribution(const HotspotGraph& g) {
  if (g.empty()) throw ValidationError("initial distribution of an empty graph");
  const auto n = static_cast<Eigen::Index>(g.vertex_count());
  return Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
}

namespace detail {

inline std::size_t uf_find(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) x = parent[x] = parent[parent[x]];
  return x;
}

// Groups vertices (positions in g.ids()) by label into subnetworks ordered
// by smallest member. The hub of each group is the member with the most
// incident non-loop edges inside the group, ties to the smallest poi_id.
inline std::vector<AffinitySubnetwork> subnetworks_from_labels(
    const HotspotGraph& g, const std::vector<std::size_t>& label) {
  const auto& ids = g.ids();
  std::vector<std::size_t> degree(ids.size(), 0);
  for (const auto& e : g.indexed_edges())
    if (e.src != e.dst && label[e.src] == label[e.dst]) {
      ++degree[e.src];
      ++degree[e.dst];
    }
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < ids.size(); ++i) groups[label[i]].push_back(i);
  std::vector<AffinitySubnetwork> subs;
  subs.reserve(groups.size());
  for (const auto& [_, members] : groups) {
    // members are ascending positions, hence ascending ids
    AffinitySubnetwork sub;
    std::size_t hub = members.front();
    for (auto m : members) {
      sub.members.push_back(ids[m]);
      if (degree[m] > degree[hub]) hub = m;
    }
    sub.hub = ids[hub];
    subs.push_back(std::move(sub));
  }
  std::sort(subs.begin(), subs.end(),
            [](const auto& a, const auto& b) { return a.members.front() < b.members.front(); });
  return subs;
}

inline void normalize_columns(Eigen::MatrixXd& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const double s = m.col(c).sum();
    if (s > 0.0) m.col(c) /= s;
  }
}

// Below this fraction of nonzeros the expansion uses a sparse left factor.
inline constexpr double kSparseExpansionDensity = 0.15;

}  // namespace detail

// Member of `members` with the most non-loop edges of g inside the group;
// ties go to the smallest poi_id.
inline PoiId find_hub(const HotspotGraph& g, const std::vector<PoiId>& members) {
  if (members.empty()) throw ValidationError("hub of an empty subnetwork");
  std::vector<std::size_t> label(g.vertex_count(), 0);
  for (const auto& m : members) label[g.index_of(m)] = 1;
  std::vector<std::size_t> in_group(label.size());
  for (std::size_t i = 0; i < label.size(); ++i) in_group[i] = label[i] ? 0 : i + 1;
  for (const auto& sub : detail::subnetworks_from_labels(g, in_group))
    if (label[g.index_of(sub.members.front())]) return sub.hub;
  return members.front();
}

inline AffinitySubnetwork make_subnetwork(const HotspotGraph& g, std::vector<PoiId> members) {
  std::sort(members.begin(), members.end());
  AffinitySubnetwork sub;
  sub.hub = find_hub(g, members);
  sub.members = std::move(members);
  return sub;
}

// One expansion + inflation round. Parameters are used as given, so
// expansion 1 with inflation 1 is the identity on stochastic input.
inline Eigen::MatrixXd mcl_step(const Eigen::MatrixXd& m, const MclParams& p) {
  if (p.expansion_power < 1) throw ValidationError("expansion power must be >= 1");
  if (!(p.inflation_power > 0.0)) throw ValidationError("inflation power must be positive");

  Eigen::MatrixXd out = m;
  if (p.expansion_power > 1) {
    const double density =
        m.size() ? static_cast<double>((m.array() != 0.0).count()) / static_cast<double>(m.size())
                 : 1.0;
    Eigen::MatrixXd next(m.rows(), m.cols());
    if (density < detail::kSparseExpansionDensity) {
      const Eigen::SparseMatrix<double> sm = m.sparseView();
      for (int e = 1; e < p.expansion_power; ++e) {
        next.noalias() = sm * out;
        out.swap(next);
      }
    } else {
      for (int e = 1; e < p.expansion_power; ++e) {
        next.noalias() = m * out;
        out.swap(next);
      }
    }
  }
  if (p.inflation_power == 2.0)
    out = out.array().square().matrix();
  else if (p.inflation_power != 1.0)
    out = out.array().pow(p.inflation_power).matrix();
  out = (out.array() < kMclPruneThreshold).select(0.0, out);
  detail::normalize_columns(out);
  return out;
}

inline TransitionMatrix mcl_step(const TransitionMatrix& m, const MclParams& p) {
  return {m.order, mcl_step(m.entries, p)};
}

// Column-stochastic matrix of g with self_loop_weight added on the diagonal.
inline TransitionMatrix mcl_input_matrix(const HotspotGraph& g, double self_loop_weight) {
  TransitionMatrix m;
  m.order = g.ids();
  const auto n = static_cast<Eigen::Index>(m.order.size());
  m.entries = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : g.indexed_edges())
    m.entries(static_cast<Eigen::Index>(e.dst), static_cast<Eigen::Index>(e.src)) += e.weight;
  m.entries.diagonal().array() += self_loop_weight;
  detail::normalize_columns(m.entries);
  return m;
}

// Partition read off an (ideally converged) MCL matrix: every vertex is
// linked to the row holding the largest share of its column mass (ties to
// the smaller index, i.e. smaller poi_id); clusters are the connected
// components of those links. A zero column keeps its vertex on its own.
inline std::vector<std::size_t> mcl_attractor_labels(const Eigen::MatrixXd& m) {
  const auto n = static_cast<std::size_t>(m.cols());
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  for (std::size_t i = 0; i < n; ++i) {
    const auto col = m.col(static_cast<Eigen::Index>(i));
    std::size_t best = i;
    double mass = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = col(static_cast<Eigen::Index>(j));
      if (v > mass) {
        mass = v;
        best = j;
      }
    }
    auto a = detail::uf_find(parent, i);
    auto b = detail::uf_find(parent, best);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::size_t> label(n);
  for (std::size_t i = 0; i < n; ++i) label[i] = detail::uf_find(parent, i);
  return label;
}

using MclObserver = std::function<void(int iteration, const TransitionMatrix&)>;

// Iterates mcl_step from the self-looped stochastic matrix until the largest
// entry change drops below convergence_eps or max_iterations is reached.
// `observer`, if set, sees the matrix after every step.
inline Clustering markov_cluster(const HotspotGraph& g, const MclParams& p = {},
                                 const MclObserver& observer = {}) {
  p.validate();
  Clustering result;
  if (g.empty()) throw ValidationError("cannot cluster an empty graph");
  TransitionMatrix cur = mcl_input_matrix(g, p.self_loop_weight);
  result.converged = false;
  for (int it = 1; it <= p.max_iterations; ++it) {
    Eigen::MatrixXd next = mcl_step(cur.entries, p);
    const double change = (next - cur.entries).cwiseAbs().maxCoeff();
    cur.entries.swap(next);
    result.iterations = it;
    if (observer) observer(it, cur);
    if (change < p.convergence_eps) {
      result.converged = true;
      break;
    }
  }
  result.subnetworks =
      detail::subnetworks_from_labels(g, mcl_attractor_labels(cur.entries));
  return result;
}

// Lloyd's algorithm on the columns of the transition matrix (Euclidean
// distance) for exactly `iters` rounds. Initial centroids are k distinct
// vertices drawn with the seeded generator; a cluster that empties takes
// over the point farthest from its own centroid among clusters with at
// least two points. `converged` reports whether the final round changed no
// assignment.
inline Clustering kmeans_cluster(const HotspotGraph& g, int k, int iters, std::uint64_t seed) {
  if (k < 1) throw ValidationError("k must be >= 1");
  if (iters < 1) throw ValidationError("iterations must be >= 1");
  if (static_cast<std::size_t>(k) > g.vertex_count())
    throw ValidationError("k (" + std::to_string(k) + ") exceeds the vertex count (" +
                          std::to_string(g.vertex_count()) + ")");

  const TransitionMatrix tm = build_transition_matrix(g);
  const Eigen::MatrixXd& x = tm.entries;  // column i = features of vertex i
  const auto n = static_cast<std::size_t>(x.cols());
  const auto kk = static_cast<std::size_t>(k);

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> pick(n);
  std::iota(pick.begin(), pick.end(), std::size_t{0});
  for (std::size_t i = 0; i < kk; ++i) {
    std::uniform_int_distribution<std::size_t> dist(i, n - 1);
    std::swap(pick[i], pick[dist(rng)]);
  }
  Eigen::MatrixXd centroids(x.rows(), k);
  for (std::size_t c = 0; c < kk; ++c)
    centroids.col(static_cast<Eigen::Index>(c)) = x.col(static_cast<Eigen::Index>(pick[c]));

  std::vector<std::size_t> assign(n, kk), previous;
  std::vector<double> dist2(n);
  std::vector<std::size_t> size(kk);
  Clustering result;
  for (int it = 0; it < iters; ++it) {
    previous = assign;
    std::fill(size.begin(), size.end(), std::size_t{0});
    for (std::size_t i = 0; i < n; ++i) {
      const auto xi = x.col(static_cast<Eigen::Index>(i));
      std::size_t best = 0;
      double best_d = (xi - centroids.col(0)).squaredNorm();
      for (std::size_t c = 1; c < kk; ++c) {
        const double d = (xi - centroids.col(static_cast<Eigen::Index>(c))).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      assign[i] = best;
      dist2[i] = best_d;
      ++size[best];
    }
    for (std::size_t c = 0; c < kk; ++c) {
      if (size[c] != 0) continue;
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i)
        if (size[assign[i]] >= 2 && (far == n || dist2[i] > dist2[far])) far = i;
      --size[assign[far]];
      assign[far] = c;
      dist2[far] = 0.0;
      size[c] = 1;
      centroids.col(static_cast<Eigen::Index>(c)) = x.col(static_cast<Eigen::Index>(far));
    }
    centroids.setZero();
    for (std::size_t i = 0; i < n; ++i)
      centroids.col(static_cast<Eigen::Index>(assign[i])) += x.col(static_cast<Eigen::Index>(i));
    for (std::size_t c = 0; c < kk; ++c)
      centroids.col(static_cast<Eigen::Index>(c)) /= static_cast<double>(size[c]);
    result.converged = (assign == previous);
  }
  result.iterations = iters;
  result.subnetworks = detail::subnetworks_from_labels(g, assign);
  return result;
}

// Throws ValidationError unless the member sets are nonempty, disjoint,
// drawn from g and together cover every vertex of g.
inline void validate_partition(const HotspotGraph& g, const Clustering& c) {
  std::set<PoiId> seen;
  for (const auto& sub : c.subnetworks) {
    if (sub.members.empty()) throw ValidationError("clustering has an empty subnetwork");
    if (std::find(sub.members.begin(), sub.members.end(), sub.hub) == sub.members.end())
      throw ValidationError("hub '" + sub.hub + "' is not a member of its subnetwork");
    for (const auto& m : sub.members) {
      if (!g.contains(m)) throw ValidationError("clustered vertex '" + m + "' is not in the graph");
      if (!seen.insert(m).second)
        throw ValidationError("vertex '" + m + "' appears in more than one subnetwork");
    }
  }
  if (seen.size() != g.vertex_count())
    throw ValidationError("clustering does not cover every vertex of the graph");
}

inline std::string cluster_vertex_id(const AffinitySubnetwork& sub) { return "cluster:" + sub.hub; }

// One vertex per subnetwork ("cluster:<hub>"), frequency = sum of member
// frequencies, edge weight = total weight between members of the two
// clusters. Intra-cluster weight is dropped.
inline HotspotGraph contract(const HotspotGraph& g, const Clustering& c) {
  validate_partition(g, c);
  std::map<PoiId, PoiId> owner;
  std::map<PoiId, double> freq;
  for (const auto& sub : c.subnetworks) {
    const auto id = cluster_vertex_id(sub);
    double f = 0.0;
    for (const auto& m : sub.members) {
      owner.emplace(m, id);
      f += g.frequency(m);
    }
    freq.emplace(id, f);
  }
  std::map<EdgeKey, double> edges;
  for (const auto& [key, w] : g.edges()) {
    const auto& a = owner.at(key.first);
    const auto& b = owner.at(key.second);
    if (a != b) edges[EdgeKey{a, b}] += w;
  }
  return HotspotGraph(std::move(freq), std::move(edges));
}

// --- clustering files -------------------------------------------------------

inline nlohmann::ordered_json to_json(const Clustering& c) {
  auto subs = nlohmann::ordered_json::array();
  for (const auto& s : c.subnetworks) subs.push_back({{"hub", s.hub}, {"members", s.members}});
  return {{"subnetworks", std::move(subs)},
          {"converged", c.converged},
          {"iterations", c.iterations}};
}

inline Clustering read_clustering_json(std::istream& in) {
  Clustering c;
  try {
    auto j = nlohmann::json::parse(in);
    for (const auto& s : j.at("subnetworks")) {
      AffinitySubnetwork sub;
      sub.hub = s.at("hub").get<std::string>();
      sub.members = s.at("members").get<std::vector<std::string>>();
      std::sort(sub.members.begin(), sub.members.end());
      if (sub.members.empty()) throw ValidationError("clustering file: empty subnetwork");
      c.subnetworks.push_back(std::move(sub));
    }
    c.converged = j.value("converged", true);
    c.iterations = j.value("iterations", 0);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("clustering file: ") + e.what());
  }
  return c;
}

}  // namespace metatrail
