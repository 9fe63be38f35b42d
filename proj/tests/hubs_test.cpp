#include <gtest/gtest.h>

#include "hubex/generator.hpp"
#include "hubex/hubs.hpp"
#include "hubex/view.hpp"
#include "oracles.hpp"

using namespace hubex;

namespace {

AttributedGraph star() {
  // 0 -> {1,2,3}, 4 -> 0, 1 -> 2
  return AttributedGraph({{0, 1, 5, "a"}, {1, 2, 9, "b"}, {2, 1, 1, "c"}, {3, 3, 7, "d"}, {4, 2, 2, "e"}},
                         {{0, 1, 0, 1, ""}, {0, 2, 0, 1, ""}, {0, 3, 0, 1, ""}, {4, 0, 0, 1, ""}, {1, 2, 0, 1, ""}},
                         true, false);
}

}  // namespace

TEST(TopMaxDegree, PicksLargestTotalDegree) {
  auto g = star();
  EXPECT_EQ(top_max_degree(g, 1), std::vector<Index>{0});
  // 1 and 2 both have total degree 2; the smaller vid wins.
  EXPECT_EQ(top_max_degree(g, 2), (std::vector<Index>{0, 1}));
  EXPECT_EQ(top_max_degree(g, 2, DegreeMode::Out), (std::vector<Index>{0, 1}));
}

TEST(TopMaxDegree, KLargerThanGraph) {
  auto g = star();
  EXPECT_EQ(top_max_degree(g, 50).size(), 5u);
  EXPECT_TRUE(top_max_degree(g, 0).empty());
}

TEST(TopMaxDegree, MatchesSortedDegrees) {
  auto g = generate({.n = 300, .degree = 4, .cardinality = 1, .cycle_fraction = 0.1, .seed = 5});
  auto top = top_max_degree(g, 10);
  std::vector<std::pair<std::size_t, Index>> all;
  for (Index v = 0; v < g.num_vertices(); ++v)
    all.emplace_back(g.in_degree(v) + g.out_degree(v), v);
  std::sort(all.begin(), all.end(), [](auto a, auto b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(top[i], all[i].second);
}

TEST(Closeness, ExactRatioAgainstBfs) {
  auto g = generate({.n = 120, .degree = 2, .cardinality = 1, .cycle_fraction = 0.2, .seed = 8});
  auto d = oracle::all_pairs(g);
  for (Index v = 0; v < g.num_vertices(); ++v) {
    std::uint64_t reach = 0, sum = 0;
    for (Index w = 0; w < g.num_vertices(); ++w)
      if (w != v && d[v][w] != oracle::kInf) {
        ++reach;
        sum += d[v][w];
      }
    auto c = closeness_of(g, v);
    EXPECT_EQ(c.reach, reach);
    EXPECT_EQ(c.distance_sum, sum);
  }
}

TEST(Closeness, IsolatedVertexIsZero) {
  AttributedGraph g({{0, 0, 0, ""}}, {}, false, false);
  EXPECT_EQ(closeness_of(g, 0).value(), 0.0);
  EXPECT_EQ(top_closeness_dynamic(g, 3), std::vector<Index>{0});
}

TEST(Closeness, StaticIndexAgreesWithDynamicOnRoot) {
  auto g = generate({.n = 200, .degree = 3, .cardinality = 1, .cycle_fraction = 0.1, .seed = 2});
  StaticClosenessIndex idx(g);
  auto keep_all = [](Index) { return true; };
  EXPECT_EQ(idx.top(7, keep_all), top_closeness_dynamic(g, 7));
}

TEST(Closeness, StaticTopRestrictedToSubset) {
  auto g = generate({.n = 200, .degree = 3, .cardinality = 1, .cycle_fraction = 0.1, .seed = 2});
  StaticClosenessIndex idx(g);
  auto top = idx.top(5, [](Index v) { return v % 2 == 1; });
  ASSERT_EQ(top.size(), 5u);
  for (std::size_t i = 0; i < top.size(); ++i) {
    EXPECT_EQ(top[i] % 2, 1u);
    if (i > 0) EXPECT_FALSE(idx.value(top[i - 1]) < idx.value(top[i]));
  }
}

TEST(HubSet, AnchorsDeduplicated) {
  HubSet h;
  h.add(3, HubOrigin::Anchor);
  h.add(5, HubOrigin::Selected);
  h.add(3, HubOrigin::Selected);
  h.add(5, HubOrigin::Anchor);
  EXPECT_EQ(h.hubs, (std::vector<Index>{3, 5}));
  EXPECT_EQ(h.origin[0], HubOrigin::Anchor);
  EXPECT_EQ(h.origin[1], HubOrigin::Anchor);
}

TEST(SelectByAttribute, NumericAndNames) {
  auto g = star();
  EXPECT_EQ(select_by_attribute(g, "v_grp", Compare::Equal, "2"), (std::vector<Index>{1, 4}));
  EXPECT_EQ(select_by_attribute(g, "v_mr", Compare::Above, "5"), (std::vector<Index>{1, 3}));
  EXPECT_EQ(select_by_attribute(g, "name", Compare::Equal, "d"), std::vector<Index>{3});
  EXPECT_EQ(select_by_attribute(g, "vid", Compare::Above, "3"), std::vector<Index>{4});
  EXPECT_THROW(select_by_attribute(g, "colour", Compare::Equal, "1"), UnknownAttribute);
  EXPECT_THROW(select_by_attribute(g, "v_mr", Compare::Equal, "high"), std::invalid_argument);
}
