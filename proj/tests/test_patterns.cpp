#include <random>

#include <gtest/gtest.h>

#include "metatrail/patterns.hpp"

using namespace metatrail;

namespace {

VisitSequence trail(std::string id, std::vector<std::pair<std::string, std::int64_t>> visits) {
  VisitSequence s{std::move(id), {}};
  for (auto& [p, t] : visits) s.visits.push_back({p, t, t + 1, ""});
  return s;
}

AffinitySubnetwork sub(std::vector<PoiId> members) {
  AffinitySubnetwork s;
  s.hub = members.front();
  s.members = std::move(members);
  return s;
}

std::string strip_cluster_prefix(const std::string& id) {
  const std::string prefix = "cluster:";
  return id.rfind(prefix, 0) == 0 ? id.substr(prefix.size()) : id;
}

}  // namespace

TEST(IntraPatterns, CountsIdenticalOrders) {
  std::vector<VisitSequence> seqs{trail("t1", {{"A", 0}, {"B", 10}, {"C", 20}}),
                                  trail("t2", {{"A", 0}, {"X", 5}, {"B", 10}, {"C", 20}}),
                                  trail("t3", {{"B", 0}, {"A", 10}})};
  const auto p = mine_intra_patterns(seqs, sub({"A", "B", "C"}), 1);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0], (SequentialPattern{{"A", "B", "C"}, 2}));
  EXPECT_EQ(p[1], (SequentialPattern{{"B", "A"}, 1}));
  const auto p2 = mine_intra_patterns(seqs, sub({"A", "B", "C"}));
  ASSERT_EQ(p2.size(), 1u);
  EXPECT_EQ(p2[0].support, 2u);
}

TEST(IntraPatterns, RevisitUsesLatestTimestamp) {
  // A, B, A: A's latest visit comes after B.
  std::vector<VisitSequence> seqs{trail("t1", {{"A", 0}, {"B", 10}, {"A", 20}}),
                                  trail("t2", {{"B", 5}, {"A", 6}})};
  const auto p = mine_intra_patterns(seqs, sub({"A", "B"}));
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0], (SequentialPattern{{"B", "A"}, 2}));
}

TEST(IntraPatterns, TiesByLexicographicOrderAndSingletonsIgnored) {
  std::vector<VisitSequence> seqs{trail("t1", {{"B", 0}, {"A", 1}}), trail("t2", {{"A", 0}, {"B", 1}}),
                                  trail("t3", {{"A", 0}})};
  const auto p = mine_intra_patterns(seqs, sub({"A", "B"}), 1);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0].sequence, (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(p[1].sequence, (std::vector<std::string>{"B", "A"}));
  EXPECT_THROW(mine_intra_patterns(seqs, sub({"A"}), 0), ValidationError);
}

TEST(InterPatterns, RelabelsCollapsesAndSkipsUnclustered) {
  Clustering c;
  c.subnetworks = {sub({"a1", "a2"}), sub({"b1", "b2"})};
  std::vector<VisitSequence> seqs{
      trail("t1", {{"a1", 0}, {"a2", 10}, {"zz", 15}, {"b1", 20}, {"b2", 30}}),
      trail("t2", {{"a2", 0}, {"b2", 10}}),
      trail("t3", {{"b1", 0}, {"a1", 10}, {"b2", 20}})};
  const auto p = mine_inter_patterns(seqs, c, 1);
  // t3 is b, a, b: the latest b comes after a, so all three trails agree.
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0], (SequentialPattern{{"cluster:a1", "cluster:b1"}, 3}));
}

TEST(InterPatterns, OverlappingClusteringRejected) {
  Clustering c;
  c.subnetworks = {sub({"a", "b"}), sub({"b", "c"})};
  std::vector<VisitSequence> seqs;
  EXPECT_THROW(mine_inter_patterns(seqs, c), ValidationError);
}

TEST(PatternsProperty, InterOverSingletonsEqualsIntraOverEverything) {
  std::mt19937_64 rng(51);
  std::uniform_int_distribution<int> poi(0, 4), len(0, 7), gap(1, 5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<VisitSequence> seqs;
    for (int t = 0; t < 1 + trial % 12; ++t) {
      VisitSequence s{"t" + std::to_string(t), {}};
      std::int64_t ts = 0;
      const int n = len(rng);
      for (int i = 0; i < n; ++i) {
        std::string p = "p" + std::to_string(poi(rng));
        if (!s.visits.empty() && s.visits.back().poi_id == p) continue;
        ts += gap(rng);
        s.visits.push_back({p, ts, ts, ""});
      }
      seqs.push_back(std::move(s));
    }
    Clustering singles;
    std::vector<PoiId> all;
    for (int i = 0; i <= 4; ++i) {
      all.push_back("p" + std::to_string(i));
      singles.subnetworks.push_back(sub({all.back()}));
    }
    const std::size_t min_support = 1 + trial % 3;
    auto inter = mine_inter_patterns(seqs, singles, min_support);
    for (auto& p : inter)
      for (auto& u : p.sequence) u = strip_cluster_prefix(u);
    ASSERT_EQ(inter, mine_intra_patterns(seqs, sub(all), min_support)) << "trial " << trial;
  }
}

TEST(PatternsProperty, SupportsSumToQualifyingTrails) {
  std::mt19937_64 rng(52);
  std::uniform_int_distribution<int> poi(0, 3), len(0, 6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<VisitSequence> seqs;
    std::size_t qualifying = 0;
    const std::set<PoiId> members{"p0", "p1", "p2"};
    for (int t = 0; t < 1 + trial % 10; ++t) {
      VisitSequence s{"t", {}};
      std::int64_t ts = 0;
      const int n = len(rng);
      for (int i = 0; i < n; ++i) {
        std::string p = "p" + std::to_string(poi(rng));
        if (!s.visits.empty() && s.visits.back().poi_id == p) continue;
        s.visits.push_back({p, ++ts, ts, ""});
      }
      std::set<PoiId> distinct;
      for (const auto& v : s.visits)
        if (members.count(v.poi_id)) distinct.insert(v.poi_id);
      qualifying += distinct.size() >= 2;
      seqs.push_back(std::move(s));
    }
    const auto p = mine_intra_patterns(seqs, sub({"p0", "p1", "p2"}), 1);
    std::size_t total = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      total += p[i].support;
      if (i) {
        ASSERT_GE(p[i - 1].support, p[i].support);
      }
      std::set<std::string> uniq(p[i].sequence.begin(), p[i].sequence.end());
      ASSERT_EQ(uniq.size(), p[i].sequence.size());
    }
    ASSERT_EQ(total, qualifying) << "trial " << trial;
  }
}

TEST(PatternsJson, Shape) {
  const auto j = patterns_to_json("intra", std::string("a"), {{{"a", "b"}, 3}});
  EXPECT_EQ(j.dump(), R"({"scope":"intra","subnetwork":"a","patterns":[{"sequence":["a","b"],"support":3}]})");
  EXPECT_TRUE(patterns_to_json("inter", std::nullopt, {})["subnetwork"].is_null());
}
