#pragma once

// Command-line front end: snap, hotspot, cluster, patterns, flow, bench.
//
// Exit codes: 0 success, 2 validation error (bad flags, malformed input,
// unknown ids), 1 internal error. Diagnostics go to the error stream; data
// goes to files or the output stream.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "metatrail/clustering.hpp"
#include "metatrail/core.hpp"
#include "metatrail/flow.hpp"
#include "metatrail/graph_io.hpp"
#include "metatrail/hotspot.hpp"
#include "metatrail/ingest.hpp"
#include "metatrail/patterns.hpp"
#include "metatrail/synth.hpp"

namespace metatrail::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitValidation = 2;

inline constexpr const char* kSeedEnv = "METATRAIL_SEED";

namespace detail {

inline bool is_stdout(const std::string& path) { return path.empty() || path == "-"; }

inline std::ifstream open_input(const std::string& path, const std::string& what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + what + " '" + path + "'");
  return in;
}

// Writes `content` to path, or to `out` for "-".
inline void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (is_stdout(path)) {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << content;
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

template <typename Fn>
std::string render(Fn&& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

inline std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

// net.csv -> net.freq.csv; anything else gets ".freq.csv" appended.
inline std::string sidecar_path(const std::string& graph_path) {
  const std::string ext = ".csv";
  if (graph_path.size() > ext.size() &&
      graph_path.compare(graph_path.size() - ext.size(), ext.size(), ext) == 0)
    return graph_path.substr(0, graph_path.size() - ext.size()) + ".freq.csv";
  return graph_path + ".freq.csv";
}

// Edge list plus the explicit or derived frequency sidecar, when present.
inline HotspotGraph load_graph(const std::string& path, const std::string& freq_path) {
  auto edges = open_input(path, "graph file");
  std::string sidecar = freq_path;
  if (sidecar.empty()) {
    sidecar = sidecar_path(path);
    if (!std::filesystem::exists(sidecar)) sidecar.clear();
  }
  if (sidecar.empty()) return io::read_graph_csv(edges);
  auto freq = open_input(sidecar, "frequency file");
  return io::read_graph_csv(edges, &freq);
}

inline void write_graph_csv(const HotspotGraph& g, const std::string& path,
                            const std::string& freq_path, std::ostream& out) {
  emit(path, render([&](std::ostream& os) { io::write_edge_csv(os, g); }), out);
  std::string sidecar = freq_path;
  if (sidecar.empty() && !is_stdout(path)) sidecar = sidecar_path(path);
  if (!sidecar.empty())
    emit(sidecar, render([&](std::ostream& os) { io::write_frequency_csv(os, g); }), out);
}

inline std::vector<VisitSequence> load_visits(const std::string& path) {
  auto in = open_input(path, "visits file");
  return read_visit_sequences(in);
}

struct SnapOptions {
  std::string trails, pois, out = "-";
  double radius_m = 50.0;
  std::int64_t min_dwell_ms = 0;
  bool skip_invalid = false;
};

inline int run_snap(const SnapOptions& o, std::ostream& out, std::ostream& err) {
  SnapConfig cfg{o.radius_m, o.min_dwell_ms};
  cfg.validate();
  auto trails_in = open_input(o.trails, "trails file");
  auto report = parse_trails_report(trails_in);
  for (const auto& w : report.warnings)
    err << "warning: " << o.trails << ":" << w.line << ": " << w.message << "\n";
  for (const auto& e : report.errors)
    err << "error: " << o.trails << ":" << e.line << ": " << e.message << "\n";
  if (report.trails.empty()) {
    err << "error: no valid trails\n";
    return kExitValidation;
  }
  if (!report.errors.empty() && !o.skip_invalid) {
    err << "error: " << report.errors.size()
        << " malformed trail record(s); pass --skip-invalid to ignore them\n";
    return kExitValidation;
  }
  auto pois_in = open_input(o.pois, "POI catalog");
  const auto pois = parse_poi_csv(pois_in);
  if (pois.empty()) throw ValidationError("POI catalog is empty");

  std::vector<VisitSequence> seqs;
  std::size_t points = 0, dropped = 0, visits = 0;
  for (const auto& t : report.trails) {
    for (const auto& p : t.points) {
      ++points;
      if (!nearest_poi(p.position, pois, cfg.radius_m)) ++dropped;
    }
    seqs.push_back(snap_trail(t, pois, cfg));
    visits += seqs.back().visits.size();
  }
  emit(o.out, render([&](std::ostream& os) { write_visit_sequences(os, seqs); }), out);
  std::ostream& summary = is_stdout(o.out) ? err : out;
  summary << "trails read: " << report.trails.size() << "\n"
          << "points read: " << points << "\n"
          << "points dropped: " << dropped << "\n"
          << "visits emitted: " << visits << "\n";
  return kExitOk;
}

struct HotspotOptions {
  std::string visits;
  std::optional<double> threshold;
  double percentile = 90.0;
  std::string app;
  std::vector<std::string> seeds;
  std::string out_graph = "-", out_freq, out_matrix, format = "csv", pois;
};

inline int run_hotspot(const HotspotOptions& o, std::ostream& out, std::ostream& err) {
  const auto seqs = load_visits(o.visits);
  std::optional<std::string> filter;
  if (!o.app.empty()) filter = o.app;
  const HotspotGraph full = transition_graph(seqs, filter);

  HotspotGraph network;
  double threshold = 0.0;
  if (full.empty()) {
    err << "warning: empty network (no visits" << (filter ? " with app '" + *filter + "'" : "")
        << ")\n";
  } else {
    threshold = o.threshold ? *o.threshold : frequency_percentile(full, o.percentile);
    std::vector<PoiId> seeds = o.seeds;
    for (const auto& s : seeds)
      if (!full.contains(s)) throw ValidationError("seed '" + s + "' does not occur in the visits");
    if (seeds.empty()) seeds = default_seeds(full, threshold);
    network = build_hotspot_network(full, seeds, threshold);
  }

  if (o.format == "csv") {
    write_graph_csv(network, o.out_graph, o.out_freq, out);
  } else if (o.format == "dot") {
    emit(o.out_graph, render([&](std::ostream& os) { io::write_dot(os, network); }), out);
  } else {
    if (o.pois.empty()) throw ValidationError("--format geojson needs --pois");
    auto pin = open_input(o.pois, "POI catalog");
    std::map<PoiId, Poi> catalog;
    for (auto& p : parse_poi_csv(pin)) catalog.emplace(p.poi_id, std::move(p));
    emit(o.out_graph, dump(io::to_geojson(network, catalog)), out);
  }
  if (!o.out_matrix.empty()) {
    const auto m = build_transition_matrix(network);
    emit(o.out_matrix, render([&](std::ostream& os) { io::write_matrix_csv(os, m); }), out);
  }
  err << "hotspot network: " << network.vertex_count() << " vertices, " << network.edge_count()
      << " edges (threshold " << text::format_double(threshold) << ")\n";
  return kExitOk;
}

struct ClusterOptions {
  std::string graph, freq, algo = "mcl", out = "-", contract_out, contract_format = "csv";
  MclParams mcl;
  int k = 10;
  std::uint64_t seed = 0;
};

inline int run_cluster(const ClusterOptions& o, std::ostream& out, std::ostream& err) {
  const HotspotGraph g = load_graph(o.graph, o.freq);
  if (g.empty()) throw ValidationError("graph '" + o.graph + "' has no vertices");
  Clustering c;
  if (o.algo == "mcl") {
    c = markov_cluster(g, o.mcl);
    if (!c.converged)
      err << "warning: MCL did not converge within " << o.mcl.max_iterations << " iterations\n";
  } else {
    c = kmeans_cluster(g, o.k, o.mcl.max_iterations, o.seed);
  }
  emit(o.out, dump(to_json(c)), out);
  if (!o.contract_out.empty()) {
    const HotspotGraph q = contract(g, c);
    if (o.contract_format == "dot")
      emit(o.contract_out, render([&](std::ostream& os) { io::write_dot(os, q, "contracted"); }),
           out);
    else
      write_graph_csv(q, o.contract_out, "", out);
  }
  err << o.algo << ": " << c.subnetworks.size() << " subnetwork(s), " << c.iterations
      << " iteration(s)\n";
  return kExitOk;
}

struct PatternOptions {
  std::string visits, clustering, scope = "intra", out = "-";
  std::size_t min_support = 2;
};

inline int run_patterns(const PatternOptions& o, std::ostream& out, std::ostream&) {
  const auto seqs = load_visits(o.visits);
  auto cin = open_input(o.clustering, "clustering file");
  const Clustering c = read_clustering_json(cin);

  std::set<PoiId> visited;
  for (const auto& s : seqs)
    for (const auto& v : s.visits) visited.insert(v.poi_id);
  std::set<PoiId> seen;
  for (const auto& sub : c.subnetworks) {
    for (const auto& m : sub.members) {
      if (!seen.insert(m).second)
        throw ValidationError("clustering lists '" + m + "' in more than one subnetwork");
      if (!visited.count(m))
        throw ValidationError("clustering does not match visits: '" + m + "' is never visited");
    }
    if (std::find(sub.members.begin(), sub.members.end(), sub.hub) == sub.members.end())
      throw ValidationError("hub '" + sub.hub + "' is not a member of its subnetwork");
  }

  auto docs = nlohmann::ordered_json::array();
  if (o.scope == "intra") {
    for (const auto& sub : c.subnetworks)
      docs.push_back(patterns_to_json("intra", sub.hub, mine_intra_patterns(seqs, sub, o.min_support)));
  } else {
    docs.push_back(patterns_to_json("inter", std::nullopt, mine_inter_patterns(seqs, c, o.min_support)));
  }
  emit(o.out, dump(docs), out);
  return kExitOk;
}

struct FlowOptions {
  std::string graph, freq, source, sink, out = "-", directions_out;
  std::optional<double> lower, upper;
};

inline int run_flow(const FlowOptions& o, std::ostream& out, std::ostream& err) {
  if (o.lower.has_value() != o.upper.has_value())
    throw ValidationError("--lower and --upper must be given together");
  if (o.source == o.sink) throw ValidationError("source and sink must differ");
  const HotspotGraph g = load_graph(o.graph, o.freq);
  const FlowResult f = max_flow(g, o.source, o.sink);
  const DirectionReport d = direction_report(g);

  nlohmann::ordered_json doc = to_json(f, g);
  std::optional<BoundStatus> status;
  if (o.lower) {
    status = check_capacity_bounds(f, *o.lower, *o.upper);
    doc["bounds"] = {{"lower", *o.lower}, {"upper", *o.upper}, {"status", to_string(*status)}};
  }
  nlohmann::ordered_json net = nlohmann::ordered_json::object();
  for (const auto& [id, v] : d.net_flow) net[id] = v;
  doc["net_flow"] = std::move(net);
  auto pairs = nlohmann::ordered_json::array();
  for (const auto& p : d.pairs)
    pairs.push_back({{"u", p.u},
                     {"v", p.v},
                     {"forward_weight", p.forward},
                     {"backward_weight", p.backward},
                     {"imbalance", p.imbalance()},
                     {"dominant", dominant_direction(p)}});
  doc["directions"] = std::move(pairs);
  emit(o.out, dump(doc), out);
  if (!o.directions_out.empty())
    emit(o.directions_out, render([&](std::ostream& os) { write_direction_csv(os, d); }), out);

  err << "max flow " << o.source << " -> " << o.sink << ": " << text::format_double(f.max_flow);
  if (status) err << " (" << to_string(*status) << ")";
  err << "\n";
  return kExitOk;
}

struct BenchOptions {
  BenchConfig cfg;
  int iters = 500;
  std::string out, summary, gnuplot, ratio_meaning = "present";
};

inline int run_bench(BenchOptions o, std::ostream& out, std::ostream& err) {
  o.cfg.mcl.max_iterations = o.iters;
  o.cfg.ratio_counts_absent = o.ratio_meaning == "absent";
  for (double r : o.cfg.ratios) {
    const double present = o.cfg.ratio_counts_absent ? 1.0 - r : r;
    if (!(present > 0.0 && present <= 1.0))
      throw ValidationError("sparse ratio " + text::format_double(r) + " is out of range");
  }
  if (o.cfg.k < 1 || static_cast<std::size_t>(o.cfg.k) > o.cfg.n)
    throw ValidationError("--k must lie in [1, n]");
  err << "benchmarking n=" << o.cfg.n << ", " << o.cfg.ratios.size() << " ratio(s), "
      << o.cfg.trials << " trial(s)\n";
  const BenchResult r = run_benchmark(o.cfg);
  if (!o.out.empty()) emit(o.out, render([&](std::ostream& os) { write_bench_csv(os, r); }), out);
  if (!o.summary.empty()) emit(o.summary, dump(bench_summary_json(r, o.cfg)), out);
  if (!o.gnuplot.empty())
    emit(o.gnuplot, render([&](std::ostream& os) { write_bench_gnuplot(os, r); }), out);

  out << "ratio\tmcl_mean_s\tkmeans_mean_s\n";
  for (double ratio : r.ratios())
    out << text::format_double(ratio) << '\t' << r.mean_seconds("mcl", ratio) << '\t'
        << r.mean_seconds("kmeans", ratio) << '\n';
  out << "all\t" << r.mean_seconds("mcl") << '\t' << r.mean_seconds("kmeans") << '\n';
  return kExitOk;
}

}  // namespace detail

// Parses argv and runs one subcommand.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Graph analytics for app-labelled location trails"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value configuration file (flags override it)");

  detail::SnapOptions snap;
  auto* snap_cmd = app.add_subcommand("snap", "Snap trails to POIs and write visit sequences");
  snap_cmd->add_option("trails", snap.trails, "Line-delimited JSON trails")->required();
  snap_cmd->add_option("pois", snap.pois, "POI catalog CSV (poi_id,name,lat,lon)")->required();
  snap_cmd->add_option("--radius-m", snap.radius_m, "Snapping radius in meters")
      ->capture_default_str();
  snap_cmd->add_option("--min-dwell-ms", snap.min_dwell_ms, "Drop shorter visits")
      ->capture_default_str();
  snap_cmd->add_option("--out", snap.out, "Output visits file ('-' for stdout)");
  snap_cmd->add_flag("--skip-invalid", snap.skip_invalid, "Ignore malformed trail records");

  detail::HotspotOptions hot;
  double threshold = 0.0;
  auto* hot_cmd = app.add_subcommand("hotspot", "Build the hotspot network and transition matrix");
  hot_cmd->add_option("visits", hot.visits, "Visit sequences file")->required();
  auto* thr = hot_cmd->add_option("--threshold", threshold, "Absolute frequency threshold");
  hot_cmd
      ->add_option("--threshold-percentile", hot.percentile,
                   "Threshold as a percentile of vertex frequencies")
      ->check(CLI::Range(0.0, 100.0))
      ->excludes(thr)
      ->capture_default_str();
  hot_cmd->add_option("--app", hot.app, "Only use visits with this app label");
  hot_cmd->add_option("--seeds", hot.seeds, "Comma-separated seed poi_ids")->delimiter(',');
  hot_cmd->add_option("--out-graph", hot.out_graph, "Network output ('-' for stdout)");
  hot_cmd->add_option("--out-freq", hot.out_freq, "Frequency sidecar (csv format)");
  hot_cmd->add_option("--out-matrix", hot.out_matrix, "Transition matrix CSV");
  hot_cmd->add_option("--format", hot.format, "Network format")
      ->check(CLI::IsMember({"csv", "dot", "geojson"}))
      ->capture_default_str();
  hot_cmd->add_option("--pois", hot.pois, "POI catalog (positions for geojson)");

  detail::ClusterOptions clu;
  auto* clu_cmd = app.add_subcommand("cluster", "Partition a graph into affinity subnetworks");
  clu_cmd->add_option("graph", clu.graph, "Edge-list CSV (src,dst,weight)")->required();
  clu_cmd->add_option("--freq", clu.freq, "Frequency sidecar CSV");
  clu_cmd->add_option("--algo", clu.algo, "mcl or kmeans")
      ->check(CLI::IsMember({"mcl", "kmeans"}))
      ->capture_default_str();
  clu_cmd->add_option("--inflation", clu.mcl.inflation_power, "MCL inflation (Hadamard) power")
      ->capture_default_str();
  clu_cmd->add_option("--expansion", clu.mcl.expansion_power, "MCL expansion power")
      ->capture_default_str();
  clu_cmd->add_option("--self-loop", clu.mcl.self_loop_weight, "MCL self-loop weight")
      ->capture_default_str();
  clu_cmd->add_option("--eps", clu.mcl.convergence_eps, "MCL convergence threshold")
      ->capture_default_str();
  clu_cmd->add_option("--k", clu.k, "K-means cluster count")->capture_default_str();
  clu_cmd->add_option("--iters", clu.mcl.max_iterations, "Iteration cap (both algorithms)")
      ->capture_default_str();
  clu_cmd->add_option("--seed", clu.seed, "K-means seed")->envname(kSeedEnv);
  clu_cmd->add_option("--out", clu.out, "Clustering JSON ('-' for stdout)");
  clu_cmd->add_option("--contract-out", clu.contract_out, "Contracted graph output");
  clu_cmd->add_option("--contract-format", clu.contract_format, "csv or dot")
      ->check(CLI::IsMember({"csv", "dot"}));

  detail::PatternOptions pat;
  auto* pat_cmd = app.add_subcommand("patterns", "Mine sequential visiting patterns");
  pat_cmd->add_option("visits", pat.visits, "Visit sequences file")->required();
  pat_cmd->add_option("clustering", pat.clustering, "Clustering JSON")->required();
  pat_cmd->add_option("--scope", pat.scope, "intra or inter")
      ->check(CLI::IsMember({"intra", "inter"}))
      ->capture_default_str();
  pat_cmd->add_option("--min-support", pat.min_support, "Minimum trail support")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  pat_cmd->add_option("--out", pat.out, "Patterns JSON ('-' for stdout)");

  detail::FlowOptions flo;
  double lower = 0.0, upper = 0.0;
  auto* flo_cmd = app.add_subcommand("flow", "Flow directions and maximum flow between hotspots");
  flo_cmd->add_option("graph", flo.graph, "Edge-list CSV (src,dst,weight)")->required();
  flo_cmd->add_option("--freq", flo.freq, "Frequency sidecar CSV");
  flo_cmd->add_option("--source", flo.source, "Source poi_id")->required();
  flo_cmd->add_option("--sink", flo.sink, "Sink poi_id")->required();
  auto* lo = flo_cmd->add_option("--lower", lower, "Lower capacity bound");
  auto* hi = flo_cmd->add_option("--upper", upper, "Upper capacity bound");
  flo_cmd->add_option("--out", flo.out, "Flow report JSON ('-' for stdout)");
  flo_cmd->add_option("--directions-out", flo.directions_out, "Direction report CSV");

  detail::BenchOptions ben;
  ben.cfg.trials = 3;
  auto* ben_cmd = app.add_subcommand("bench", "Time MCL against K-means on random graphs");
  ben_cmd->add_option("--n", ben.cfg.n, "Vertices per graph")->check(CLI::PositiveNumber)
      ->capture_default_str();
  ben_cmd->add_option("--ratios", ben.cfg.ratios, "Comma-separated sparse ratios")
      ->delimiter(',');
  ben_cmd->add_option("--trials", ben.cfg.trials, "Graphs per ratio")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ben_cmd->add_option("--k", ben.cfg.k, "K-means cluster count")->capture_default_str();
  ben_cmd->add_option("--iters", ben.iters, "Iterations (both algorithms)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ben_cmd->add_option("--inflation", ben.cfg.mcl.inflation_power, "MCL inflation power")
      ->capture_default_str();
  ben_cmd->add_option("--expansion", ben.cfg.mcl.expansion_power, "MCL expansion power")
      ->capture_default_str();
  ben_cmd->add_option("--seed", ben.cfg.seed, "Base seed")->envname(kSeedEnv);
  ben_cmd->add_option("--out", ben.out, "Per-run CSV");
  ben_cmd->add_option("--summary", ben.summary, "Summary JSON");
  ben_cmd->add_option("--gnuplot", ben.gnuplot, "Gnuplot data file");
  ben_cmd->add_option("--ratio-meaning", ben.ratio_meaning,
                      "Whether a ratio counts arcs present or absent")
      ->check(CLI::IsMember({"present", "absent"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*snap_cmd) return detail::run_snap(snap, out, err);
    if (*hot_cmd) {
      if (*thr) hot.threshold = threshold;
      return detail::run_hotspot(hot, out, err);
    }
    if (*clu_cmd) {
      clu.mcl.validate();
      return detail::run_cluster(clu, out, err);
    }
    if (*pat_cmd) return detail::run_patterns(pat, out, err);
    if (*flo_cmd) {
      if (*lo) flo.lower = lower;
      if (*hi) flo.upper = upper;
      return detail::run_flow(flo, out, err);
    }
    if (*ben_cmd) return detail::run_bench(ben, out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const LookupError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  std::vector<const char*> argv{"metatrail"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace metatrail::cli
