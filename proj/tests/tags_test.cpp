#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "hubex/condense.hpp"
#include "hubex/generator.hpp"
#include "hubex/reachability.hpp"
#include "hubex/tags.hpp"
#include "oracles.hpp"

using namespace hubex;

namespace {

struct Tagged {
  CondensedGraph cg;
  std::vector<Index> hubs;  // graph indices
  std::vector<Tag> per_super;

  const Tag& of(Index v) const { return per_super[cg.super_of(v)]; }
};

Tagged tag_graph(const AttributedGraph& g, std::vector<Index> hubs, bool indexed = true) {
  Tagged t{condense_scc(g), std::move(hubs), {}};
  std::vector<Index> supers;
  for (auto h : t.hubs) supers.push_back(t.cg.super_of(h));
  if (indexed)
    t.per_super = compute_tags_indexed(t.cg, supers, TransitiveClosure::build(t.cg));
  else
    t.per_super = compute_tags_propagation(t.cg, supers);
  return t;
}

std::vector<Index> indices(const AttributedGraph& g, std::vector<VertexId> vids) {
  std::vector<Index> out;
  for (auto v : vids) out.push_back(*g.index_of(v));
  return out;
}

Tag make(std::size_t k, std::vector<std::size_t> s, std::vector<std::size_t> r) {
  Tag t(k);
  for (auto i : s) t.S.set(i);
  for (auto i : r) t.R.set(i);
  return t;
}

const std::vector<std::string> kHubNames = {"1", "2", "3", "4", "5"};

}  // namespace

TEST(Tags, NoHubsGivesEmptyTags) {
  auto g = fixture::five_hubs();
  auto t = tag_graph(g, {});
  for (const auto& tag : t.per_super) EXPECT_EQ(tag.cardinality(), 0u);
}

TEST(Tags, FiveHubVertexTags) {
  auto g = fixture::five_hubs();
  for (bool indexed : {true, false}) {
    auto t = tag_graph(g, indices(g, fixture::five_hub_ids()), indexed);
    const auto& a1 = t.of(*g.find_by_label("A1"));
    EXPECT_EQ(a1.to_string(kHubNames), "<1><2,3,4,5>");
    EXPECT_EQ(a1.cardinality(), 4u);
    for (auto name : {"C1", "C2", "C3"}) {
      const auto& c = t.of(*g.find_by_label(name));
      EXPECT_EQ(c.to_string(kHubNames), "<1,2,3><4,5>") << name;
      EXPECT_EQ(c.cardinality(), 6u);
    }
  }
}

TEST(Tags, FiveHubHubOneReachesA1) {
  auto g = fixture::five_hubs();
  auto cg = condense_scc(g);
  auto tc = TransitiveClosure::build(cg);
  EXPECT_TRUE(tc.reaches(cg.super_of(*g.index_of(1)), cg.super_of(*g.find_by_label("A1"))));
}

TEST(Tags, FiveHubEdgeTag) {
  auto g = fixture::five_hubs();
  auto t = tag_graph(g, indices(g, fixture::five_hub_ids()));
  auto c1 = t.cg.super_of(*g.find_by_label("C1")), c3 = t.cg.super_of(*g.find_by_label("C3"));
  auto e = edge_tag(t.per_super, c1, c3);
  EXPECT_EQ(e.to_string(kHubNames), "<1,2,3><4,5>");
  EXPECT_EQ(e.cardinality(), 6u);
}

TEST(Tags, EdgeFromUnreachedSourceIsEmpty) {
  AttributedGraph g({{0, 0, 0, ""}, {1, 0, 0, ""}, {2, 0, 0, ""}}, {{1, 0, 0, 0, ""}, {0, 2, 0, 0, ""}},
                    false, false);
  auto t = tag_graph(g, {0, 2});
  auto e = edge_tag(t.per_super, t.cg.super_of(1), t.cg.super_of(0));
  EXPECT_TRUE(e.S.none());
  EXPECT_EQ(e.cardinality(), 0u);
}

TEST(Tags, HubIsInItsOwnSets) {
  auto g = generate({.n = 80, .degree = 2, .cardinality = 1, .cycle_fraction = 0, .seed = 4});
  auto t = tag_graph(g, {3, 10, 20}, false);
  for (std::size_t i = 0; i < t.hubs.size(); ++i) {
    EXPECT_TRUE(t.of(t.hubs[i]).S.test(i));
    EXPECT_TRUE(t.of(t.hubs[i]).R.test(i));
  }
}

TEST(Tags, ChainMiddleVertex) {
  AttributedGraph g({{1, 0, 0, ""}, {2, 0, 0, ""}, {3, 0, 0, ""}}, {{1, 2, 0, 0, ""}, {2, 3, 0, 0, ""}},
                    false, false);
  auto t = tag_graph(g, {0, 2}, false);
  EXPECT_EQ(t.of(1).to_string(), "<0><1>");
}

TEST(Tags, CardinalityExcludesSelfPairs) {
  auto t = make(4, {0, 1, 2}, {1, 2, 3});
  EXPECT_EQ(t.cardinality(), 3u * 3u - 2u);
  std::size_t pairs = 0;
  t.for_each_pair([&](std::size_t x, std::size_t y) {
    EXPECT_NE(x, y);
    ++pairs;
  });
  EXPECT_EQ(pairs, t.cardinality());
}

TEST(Tags, IndexedEqualsPropagationOnRandomDags) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto g = generate({.n = 60 + seed % 140, .degree = 1.0 + static_cast<double>(seed % 4), .cardinality = 1,
                       .cycle_fraction = 0, .seed = seed});
    std::vector<Index> hubs;
    for (Index i = 0; i < std::min<std::size_t>(8, g.num_vertices()); ++i) hubs.push_back(i * 7 % g.num_vertices());
    std::sort(hubs.begin(), hubs.end());
    hubs.erase(std::unique(hubs.begin(), hubs.end()), hubs.end());
    auto a = tag_graph(g, hubs, true), b = tag_graph(g, hubs, false);
    ASSERT_EQ(a.per_super, b.per_super) << "seed " << seed;
  }
}

TEST(Tags, MatchBfsMembershipOracle) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    auto g = generate({.n = 40 + seed * 4, .degree = 2, .cardinality = 1,
                       .cycle_fraction = seed % 2 ? 0.2 : 0.0, .seed = seed});
    std::vector<Index> hubs{0, 5, 9, 17, 30};
    auto t = tag_graph(g, hubs, seed % 3 != 0);
    auto m = oracle::betweenness(oracle::all_pairs(g), hubs);
    for (std::size_t x = 0; x < hubs.size(); ++x)
      for (std::size_t y = 0; y < hubs.size(); ++y)
        for (Index v = 0; v < g.num_vertices(); ++v) ASSERT_EQ(t.of(v).contains(x, y), m[x][y][v]);
    // Edge tags: (S of source, R of target) equals both endpoints being members.
    for (const auto& e : g.edges()) {
      Tag et{t.of(e.src).S, t.of(e.tgt).R};
      for (std::size_t x = 0; x < hubs.size(); ++x)
        for (std::size_t y = 0; y < hubs.size(); ++y)
          ASSERT_EQ(et.contains(x, y), m[x][y][e.src] && m[x][y][e.tgt]);
    }
  }
}

TEST(Tags, HubOutsideGraph) {
  auto cg = condense_scc(fixture::five_hubs());
  std::vector<Index> hubs{99};
  EXPECT_THROW(compute_tags_propagation(cg, hubs), std::out_of_range);
}

TEST(BoundedTags, LargeBudgetEqualsUnbounded) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto g = generate({.n = 100, .degree = 2, .cardinality = 1, .cycle_fraction = 0.1, .seed = seed});
    std::vector<Index> hubs{1, 2, 3, 50};
    auto t = tag_graph(g, hubs);
    auto masks = compute_tags_bounded(g, hubs, static_cast<std::uint32_t>(2 * g.num_vertices()));
    for (Index v = 0; v < g.num_vertices(); ++v) ASSERT_EQ(masks[v], to_pair_mask(t.of(v)));
  }
}

TEST(BoundedTags, ChainBudgetTwo) {
  AttributedGraph g({{0, 0, 0, ""}, {1, 0, 0, ""}, {2, 0, 0, ""}, {3, 0, 0, ""}},
                    {{0, 1, 0, 0, ""}, {1, 2, 0, 0, ""}, {2, 3, 0, 0, ""}}, false, false);
  std::vector<Index> hubs{0, 3};
  auto masks = compute_tags_bounded(g, hubs, 2);
  EXPECT_FALSE(masks[1].contains(0, 1));
  EXPECT_FALSE(masks[2].contains(0, 1));
  auto wide = compute_tags_bounded(g, hubs, 3);
  EXPECT_TRUE(wide[1].contains(0, 1));
  EXPECT_TRUE(wide[2].contains(0, 1));
}

TEST(BoundedTags, MatchDistanceOracle) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    auto g = generate({.n = 120, .degree = 2.5, .cardinality = 1, .cycle_fraction = 0.25, .seed = seed});
    std::vector<Index> hubs{0, 11, 22, 33, 44};
    auto d = oracle::all_pairs(g);
    for (std::uint32_t h : {1u, 2u, 4u, 7u}) {
      for (auto mode : {HopBound::Total, HopBound::PerSide}) {
        auto masks = compute_tags_bounded(g, hubs, h, mode);
        auto m = oracle::bounded(d, hubs, h, mode == HopBound::PerSide);
        for (std::size_t x = 0; x < hubs.size(); ++x)
          for (std::size_t y = 0; y < hubs.size(); ++y)
            for (Index v = 0; v < g.num_vertices(); ++v) ASSERT_EQ(masks[v].contains(x, y), m[x][y][v]);
      }
    }
  }
}

TEST(TagTable, TabulatedEdgesFollowEndpoints) {
  auto g = generate({.n = 200, .degree = 3, .cardinality = 1, .cycle_fraction = 0.2, .seed = 9});
  auto t = tag_graph(g, {0, 1, 2, 3, 4, 5});
  auto bt = tabulate_tags(g, t.cg, t.per_super);
  auto inter = t.cg.inter_edges();
  ASSERT_EQ(bt.edges.of.size(), inter.size() + t.cg.num_vertices());
  for (std::size_t i = 0; i < inter.size(); ++i) {
    const auto& e = g.edge(inter[i]);
    EXPECT_EQ(bt.edges.tags[bt.edges.of[i]], edge_tag(t.per_super, t.cg.super_of(e.src), t.cg.super_of(e.tgt)));
  }
  for (Index s = 0; s < t.cg.num_vertices(); ++s) {
    EXPECT_EQ(bt.vertices.tags[bt.vertices.of[s]], t.per_super[s]);
    EXPECT_EQ(bt.edges.tags[bt.edges.of[inter.size() + s]], t.per_super[s]);
  }
  // Distinct entries only.
  std::unordered_set<Tag, TagHash> seen(bt.vertices.tags.begin(), bt.vertices.tags.end());
  EXPECT_EQ(seen.size(), bt.vertices.tags.size());
}
