#include <sstream>

#include <gtest/gtest.h>

#include "metatrail/synth.hpp"

using namespace metatrail;

TEST(SynthVertexId, ZeroPaddedAndOrdered) {
  EXPECT_EQ(synth_vertex_id(7, 500), "v007");
  EXPECT_EQ(synth_vertex_id(499, 500), "v499");
  EXPECT_EQ(synth_vertex_id(0, 1), "v0");
  EXPECT_LT(synth_vertex_id(9, 100), synth_vertex_id(10, 100));
}

TEST(SynthGraph, ExactEdgeCount) {
  SynthSpec spec;
  spec.n = 500;
  spec.sparse_ratio = 0.1;
  EXPECT_EQ(spec.edge_count(), 24950u);
  const auto g = synth_graph(spec);
  EXPECT_EQ(g.vertex_count(), 500u);
  EXPECT_EQ(g.edge_count(), 24950u);
  spec.n = 20;
  spec.sparse_ratio = 1.0;
  EXPECT_EQ(synth_graph(spec).edge_count(), 380u);
}

TEST(SynthGraph, DeterministicPerSeedAndWeightsInRange) {
  SynthSpec spec;
  spec.n = 60;
  spec.sparse_ratio = 0.3;
  spec.weight_low = 2.0;
  spec.weight_high = 3.0;
  spec.seed = 5;
  const auto a = synth_graph(spec);
  EXPECT_TRUE(a == synth_graph(spec));
  spec.seed = 6;
  EXPECT_FALSE(a == synth_graph(spec));
  for (const auto& [key, w] : a.edges()) {
    EXPECT_NE(key.first, key.second);
    EXPECT_GT(w, 2.0);
    EXPECT_LE(w, 3.0);
  }
  for (const auto& [v, f] : a.vertices()) EXPECT_NEAR(f, a.out_weight(v) + a.in_weight(v), 1e-9);
}

TEST(SynthGraph, RejectsBadSpecs) {
  SynthSpec spec;
  spec.sparse_ratio = 0.0;
  EXPECT_THROW(synth_graph(spec), ValidationError);
  spec = {};
  spec.sparse_ratio = 1.5;
  EXPECT_THROW(synth_graph(spec), ValidationError);
  spec = {};
  spec.weight_low = 1.0;
  spec.weight_high = 1.0;
  EXPECT_THROW(synth_graph(spec), ValidationError);
  spec = {};
  spec.n = 0;
  EXPECT_THROW(synth_graph(spec), ValidationError);
}

TEST(PlantedPartition, NoCrossEdgesWhenPOutIsZero) {
  const auto p = planted_partition({4, 5, 6}, 1.0, 0.0, 1);
  EXPECT_EQ(p.graph.vertex_count(), 15u);
  EXPECT_EQ(p.graph.edge_count(), 4u * 3 + 5u * 4 + 6u * 5);
  const auto comps = weak_components(p.graph);
  ASSERT_EQ(comps.size(), 3u);
  for (const auto& comp : comps)
    for (const auto& v : comp) EXPECT_EQ(p.labels.at(v), p.labels.at(comp.front()));
  EXPECT_THROW(planted_partition({2, 2}, 0.1, 0.5, 1), ValidationError);
}

TEST(MatchesLabels, UpToRenaming) {
  const std::map<PoiId, std::size_t> labels{{"a", 0}, {"b", 0}, {"c", 1}};
  Clustering c;
  c.subnetworks = {{{"c"}, "c"}, {{"a", "b"}, "a"}};
  EXPECT_TRUE(matches_labels(c, labels));
  c.subnetworks = {{{"a"}, "a"}, {{"b"}, "b"}, {{"c"}, "c"}};
  EXPECT_FALSE(matches_labels(c, labels));
  c.subnetworks = {{{"a", "b", "c"}, "a"}};
  EXPECT_FALSE(matches_labels(c, labels));
}

TEST(Benchmark, RecordsAndDeterministicMembership) {
  BenchConfig cfg;
  cfg.n = 40;
  cfg.ratios = {0.1, 0.5};
  cfg.trials = 2;
  cfg.k = 4;
  cfg.mcl.max_iterations = 50;
  const auto a = run_benchmark(cfg);
  ASSERT_EQ(a.records.size(), 8u);
  const auto b = run_benchmark(cfg);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].algorithm, b.records[i].algorithm);
    EXPECT_EQ(a.records[i].membership, b.records[i].membership);
    EXPECT_GE(a.records[i].seconds, 0.0);
  }
  EXPECT_EQ(a.ratios(), (std::vector<double>{0.1, 0.5}));
  for (const auto& r : a.records)
    if (r.algorithm == "kmeans") {
      EXPECT_EQ(r.iterations, 50);
      EXPECT_EQ(r.clusters, 4u);
    }

  std::stringstream csv, plot;
  write_bench_csv(csv, a);
  write_bench_gnuplot(plot, a);
  EXPECT_EQ(csv.str().rfind("algorithm,ratio,trial,seconds,clusters\nmcl,0.1,0,", 0), 0u);
  EXPECT_EQ(plot.str().rfind("# ratio mcl_seconds kmeans_seconds\n0.1 ", 0), 0u);
  const auto j = bench_summary_json(a, cfg);
  EXPECT_EQ(j["per_ratio"].size(), 2u);
  EXPECT_EQ(j["ratio_meaning"], "present");
}

TEST(Benchmark, AbsentRatioMeaning) {
  BenchConfig cfg;
  cfg.n = 20;
  cfg.ratios = {0.9};
  cfg.k = 2;
  cfg.mcl.max_iterations = 5;
  cfg.ratio_counts_absent = true;
  const auto r = run_benchmark(cfg);
  EXPECT_EQ(r.records.size(), 2u);
  cfg.trials = 0;
  EXPECT_THROW(run_benchmark(cfg), ValidationError);
}
