#pragma once

// Synthetic graphs (uniform random digraphs, planted partitions) and the
// MCL vs K-means clustering-speed benchmark.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "metatrail/clustering.hpp"
#include "metatrail/core.hpp"
#include "metatrail/text.hpp"

namespace metatrail {

// Zero-padded vertex ids so lexicographic order matches numeric order.
inline std::string synth_vertex_id(std::size_t i, std::size_t n) {
  const std::size_t width = std::to_string(n > 0 ? n - 1 : 0).size();
  std::string digits = std::to_string(i);
  return "v" + std::string(width - std::min(width, digits.size()), '0') + digits;
}

struct SynthSpec {
  std::size_t n = 500;
  double sparse_ratio = 0.1;  // fraction of the n(n-1) possible arcs present
  double weight_low = 0.0;    // weights drawn from (low, high]
  double weight_high = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (n < 1) throw ValidationError("n must be >= 1");
    if (!(sparse_ratio > 0.0 && sparse_ratio <= 1.0))
      throw ValidationError("sparse ratio must lie in (0, 1]");
    if (!(weight_low < weight_high) || !std::isfinite(weight_low) || !std::isfinite(weight_high))
      throw ValidationError("weight range must satisfy low < high");
    if (weight_low < 0.0) throw ValidationError("weights must be non-negative");
  }

  std::size_t edge_count() const {
    return static_cast<std::size_t>(
        std::llround(sparse_ratio * static_cast<double>(n) * static_cast<double>(n - 1)));
  }
};

// Exactly round(ratio * n(n-1)) distinct non-loop arcs sampled without
// replacement; frequency = weighted degree (in + out).
inline HotspotGraph synth_graph(const SynthSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n;
  const std::size_t slots = n * (n - 1);
  const std::size_t m = std::min(spec.edge_count(), slots);

  std::mt19937_64 rng(spec.seed);
  std::vector<std::size_t> pool(slots);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < m; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, slots - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  std::sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(m));

  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = synth_vertex_id(i, n);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::map<EdgeKey, double> edges;
  std::vector<double> degree(n, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t u = pool[k] / (n - 1);
    const std::size_t r = pool[k] % (n - 1);
    const std::size_t v = r < u ? r : r + 1;
    // unit() is in [0, 1), so this lands in (low, high].
    const double w = spec.weight_high - unit(rng) * (spec.weight_high - spec.weight_low);
    edges.emplace_hint(edges.end(), EdgeKey{ids[u], ids[v]}, w);
    degree[u] += w;
    degree[v] += w;
  }
  std::map<PoiId, double> freq;
  for (std::size_t i = 0; i < n; ++i) freq.emplace(ids[i], degree[i]);
  return HotspotGraph(std::move(freq), std::move(edges));
}

struct PlantedGraph {
  HotspotGraph graph;
  std::map<PoiId, std::size_t> labels;  // block index per vertex
};

// Arc (u, v), u != v, present with probability p_in inside a block and
// p_out across blocks; weight 1, frequency = degree.
inline PlantedGraph planted_partition(const std::vector<std::size_t>& blocks, double p_in,
                                      double p_out, std::uint64_t seed) {
  if (!(0.0 <= p_out && p_out < p_in && p_in <= 1.0))
    throw ValidationError("planted partition needs 0 <= p_out < p_in <= 1");
  const std::size_t n = std::accumulate(blocks.begin(), blocks.end(), std::size_t{0});
  std::vector<std::size_t> block_of;
  for (std::size_t b = 0; b < blocks.size(); ++b) block_of.insert(block_of.end(), blocks[b], b);

  PlantedGraph out;
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    ids[i] = synth_vertex_id(i, n);
    out.labels.emplace(ids[i], block_of[i]);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::map<EdgeKey, double> edges;
  std::vector<double> degree(n, 0.0);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) {
      if (u == v) continue;
      const double p = block_of[u] == block_of[v] ? p_in : p_out;
      if (unit(rng) < p) {
        edges.emplace(EdgeKey{ids[u], ids[v]}, 1.0);
        degree[u] += 1.0;
        degree[v] += 1.0;
      }
    }
  std::map<PoiId, double> freq;
  for (std::size_t i = 0; i < n; ++i) freq.emplace(ids[i], degree[i]);
  out.graph = HotspotGraph(std::move(freq), std::move(edges));
  return out;
}

// True when the clustering groups vertices exactly as `labels` does (up to
// renaming of the groups).
inline bool matches_labels(const Clustering& c, const std::map<PoiId, std::size_t>& labels) {
  std::map<std::size_t, std::size_t> block_to_cluster;
  std::set<std::size_t> used_blocks;
  std::size_t covered = 0;
  for (std::size_t ci = 0; ci < c.subnetworks.size(); ++ci) {
    const auto& members = c.subnetworks[ci].members;
    auto first = labels.find(members.front());
    if (first == labels.end()) return false;
    const std::size_t block = first->second;
    if (!used_blocks.insert(block).second) return false;
    for (const auto& m : members) {
      auto it = labels.find(m);
      if (it == labels.end() || it->second != block) return false;
    }
    covered += members.size();
  }
  return covered == labels.size();
}

struct BenchRecord {
  std::string algorithm;  // "mcl" or "kmeans"
  double ratio = 0.0;
  int trial = 0;
  double seconds = 0.0;
  int iterations = 0;
  std::size_t clusters = 0;
  std::vector<std::vector<PoiId>> membership;  // for determinism checks
};

struct BenchResult {
  std::vector<BenchRecord> records;

  double mean_seconds(const std::string& algorithm) const {
    double sum = 0.0;
    std::size_t k = 0;
    for (const auto& r : records)
      if (r.algorithm == algorithm) {
        sum += r.seconds;
        ++k;
      }
    return k ? sum / static_cast<double>(k) : 0.0;
  }

  double mean_seconds(const std::string& algorithm, double ratio) const {
    double sum = 0.0;
    std::size_t k = 0;
    for (const auto& r : records)
      if (r.algorithm == algorithm && r.ratio == ratio) {
        sum += r.seconds;
        ++k;
      }
    return k ? sum / static_cast<double>(k) : 0.0;
  }

  std::vector<double> ratios() const {
    std::vector<double> out;
    for (const auto& r : records)
      if (std::find(out.begin(), out.end(), r.ratio) == out.end()) out.push_back(r.ratio);
    return out;
  }

  // Mean over ratios of the per-ratio means.
  double mean_of_ratio_means(const std::string& algorithm) const {
    const auto rs = ratios();
    if (rs.empty()) return 0.0;
    double sum = 0.0;
    for (double r : rs) sum += mean_seconds(algorithm, r);
    return sum / static_cast<double>(rs.size());
  }
};

struct BenchConfig {
  std::size_t n = 500;
  std::vector<double> ratios{0.1, 0.3, 0.5, 0.7, 0.9};
  int trials = 1;
  MclParams mcl{};
  int k = 10;
  std::uint64_t seed = 0;
  bool ratio_counts_absent = false;  // interpret ratio as the fraction of arcs absent
};

// Times markov_cluster and kmeans_cluster (same iteration cap) on one
// synthesized graph per (ratio, trial); trial t uses seed + t. Only the
// clustering call is inside the timed region. Runs sequentially.
inline BenchResult run_benchmark(const BenchConfig& cfg) {
  if (cfg.trials < 1) throw ValidationError("trials must be >= 1");
  if (cfg.ratios.empty()) throw ValidationError("no sparse ratios given");
  cfg.mcl.validate();
  using clock = std::chrono::steady_clock;
  auto members_of = [](const Clustering& c) {
    std::vector<std::vector<PoiId>> m;
    for (const auto& s : c.subnetworks) m.push_back(s.members);
    return m;
  };

  BenchResult out;
  for (double ratio : cfg.ratios) {
    for (int t = 0; t < cfg.trials; ++t) {
      SynthSpec spec;
      spec.n = cfg.n;
      spec.sparse_ratio = cfg.ratio_counts_absent ? 1.0 - ratio : ratio;
      spec.seed = cfg.seed + static_cast<std::uint64_t>(t);
      const HotspotGraph g = synth_graph(spec);

      auto t0 = clock::now();
      Clustering mcl = markov_cluster(g, cfg.mcl);
      auto t1 = clock::now();
      out.records.push_back({"mcl", ratio, t, std::chrono::duration<double>(t1 - t0).count(),
                             mcl.iterations, mcl.subnetworks.size(), members_of(mcl)});

      t0 = clock::now();
      Clustering km = kmeans_cluster(g, cfg.k, cfg.mcl.max_iterations, spec.seed);
      t1 = clock::now();
      out.records.push_back({"kmeans", ratio, t, std::chrono::duration<double>(t1 - t0).count(),
                             km.iterations, km.subnetworks.size(), members_of(km)});
    }
  }
  return out;
}

inline void write_bench_csv(std::ostream& out, const BenchResult& r) {
  out << "algorithm,ratio,trial,seconds,clusters\n";
  for (const auto& rec : r.records)
    out << rec.algorithm << ',' << text::format_double(rec.ratio) << ',' << rec.trial << ','
        << text::format_double(rec.seconds) << ',' << rec.clusters << '\n';
}

inline nlohmann::ordered_json bench_summary_json(const BenchResult& r, const BenchConfig& cfg) {
  nlohmann::ordered_json per_ratio = nlohmann::ordered_json::array();
  for (double ratio : r.ratios()) {
    per_ratio.push_back({{"ratio", ratio},
                         {"mcl_mean_seconds", r.mean_seconds("mcl", ratio)},
                         {"kmeans_mean_seconds", r.mean_seconds("kmeans", ratio)}});
  }
  return {{"n", cfg.n},
          {"trials", cfg.trials},
          {"k", cfg.k},
          {"max_iterations", cfg.mcl.max_iterations},
          {"inflation_power", cfg.mcl.inflation_power},
          {"expansion_power", cfg.mcl.expansion_power},
          {"seed", cfg.seed},
          {"ratio_meaning", cfg.ratio_counts_absent ? "absent" : "present"},
          {"per_ratio", per_ratio},
          {"overall",
           {{"mcl_mean_seconds", r.mean_seconds("mcl")},
            {"kmeans_mean_seconds", r.mean_seconds("kmeans")},
            {"mcl_mean_of_ratio_means", r.mean_of_ratio_means("mcl")},
            {"kmeans_mean_of_ratio_means", r.mean_of_ratio_means("kmeans")}}}};
}

// Columns: ratio, MCL mean seconds, K-means mean seconds (gnuplot
// `plot ... using 2:xtic(1)` style).
inline void write_bench_gnuplot(std::ostream& out, const BenchResult& r) {
  out << "# ratio mcl_seconds kmeans_seconds\n";
  for (double ratio : r.ratios())
    out << text::format_double(ratio) << ' ' << text::format_double(r.mean_seconds("mcl", ratio))
        << ' ' << text::format_double(r.mean_seconds("kmeans", ratio)) << '\n';
}

}  // namespace metatrail
