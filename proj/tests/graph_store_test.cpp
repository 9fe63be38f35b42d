#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include <unistd.h>

#include <gtest/gtest.h>

#include "hubex/condense.hpp"
#include "hubex/generator.hpp"
#include "hubex/graph.hpp"
#include "oracles.hpp"

using namespace hubex;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("hubex_" + name + "_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

AttributedGraph small(std::vector<Vertex> vs, std::vector<EdgeRecord> es) {
  return AttributedGraph(std::move(vs), std::move(es), false, false);
}

}  // namespace

TEST(LoadGraph, EmptyTables) {
  auto dir = scratch_dir("empty");
  write(dir / "v.tsv", "vid\tv_grp\tv_mr\n");
  write(dir / "e.tsv", "src_vid\ttgt_vid\te_grp\te_mr\n");
  auto g = load_graph((dir / "v.tsv").string(), (dir / "e.tsv").string());
  EXPECT_EQ(g.num_vertices(), 0u);
  EXPECT_EQ(g.num_edges(), 0u);
}

TEST(LoadGraph, CountsAndDegree) {
  auto dir = scratch_dir("counts");
  write(dir / "v.tsv", "vid\tv_grp\tv_mr\n0\t1\t5\n1\t1\t7\n2\t2\t3\n");
  write(dir / "e.tsv", "src_vid\ttgt_vid\te_grp\te_mr\n0\t1\t1\t2\n1\t2\t1\t4\n");
  auto g = load_graph((dir / "v.tsv").string(), (dir / "e.tsv").string());
  EXPECT_EQ(g.num_vertices(), 3u);
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(g.out_degree(*g.index_of(0)), 1u);
  EXPECT_EQ(g.vertex(*g.index_of(1)).mr, 7);
}

TEST(LoadGraph, OptionalLabelsAndDelimiter) {
  auto dir = scratch_dir("labels");
  write(dir / "v.csv", "vid,v_grp,v_mr,label\n10,0,1,kristy\n20,0,1,bingfish\n");
  write(dir / "e.csv", "src_vid,tgt_vid,e_grp,e_mr,label\n10,20,0,3,friend\n");
  auto g = load_graph((dir / "v.csv").string(), (dir / "e.csv").string(), ',');
  EXPECT_TRUE(g.has_vertex_labels());
  EXPECT_EQ(*g.find_by_label("bingfish"), *g.index_of(20));
  EXPECT_EQ(g.edge(0).label, "friend");
}

TEST(LoadGraph, DuplicateVidNamesLine) {
  auto dir = scratch_dir("dup");
  write(dir / "v.tsv", "vid\tv_grp\tv_mr\n1\t0\t0\n2\t0\t0\n1\t0\t0\n");
  write(dir / "e.tsv", "src_vid\ttgt_vid\te_grp\te_mr\n");
  try {
    load_graph((dir / "v.tsv").string(), (dir / "e.tsv").string());
    FAIL() << "expected LoadError";
  } catch (const LoadError& e) {
    EXPECT_EQ(e.line(), 4u);
    EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
  }
}

TEST(LoadGraph, DanglingEndpointNamesLine) {
  auto dir = scratch_dir("dangling");
  write(dir / "v.tsv", "vid\tv_grp\tv_mr\n1\t0\t0\n");
  write(dir / "e.tsv", "src_vid\ttgt_vid\te_grp\te_mr\n1\t1\t0\t0\n1\t9\t0\t0\n");
  try {
    load_graph((dir / "v.tsv").string(), (dir / "e.tsv").string());
    FAIL() << "expected LoadError";
  } catch (const LoadError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(LoadGraph, MalformedFieldAndHeader) {
  auto dir = scratch_dir("malformed");
  write(dir / "v.tsv", "vid\tv_grp\tv_mr\n1\tx\t0\n");
  write(dir / "e.tsv", "src_vid\ttgt_vid\te_grp\te_mr\n");
  EXPECT_THROW(load_graph((dir / "v.tsv").string(), (dir / "e.tsv").string()), LoadError);
  write(dir / "v.tsv", "vid\tgroup\tv_mr\n");
  EXPECT_THROW(load_graph((dir / "v.tsv").string(), (dir / "e.tsv").string()), LoadError);
  write(dir / "v.tsv", "vid\tv_grp\tv_mr\n1\t0\n");
  EXPECT_THROW(load_graph((dir / "v.tsv").string(), (dir / "e.tsv").string()), LoadError);
  EXPECT_THROW(load_graph((dir / "missing.tsv").string(), (dir / "e.tsv").string()), LoadError);
}

TEST(LoadGraph, GeneratedGraphRoundTrips) {
  auto dir = scratch_dir("roundtrip");
  auto g = generate({.n = 500, .degree = 4, .cardinality = 50, .cycle_fraction = 0.1, .seed = 7});
  save_graph(g, (dir / "v.tsv").string(), (dir / "e.tsv").string());
  auto back = load_graph((dir / "v.tsv").string(), (dir / "e.tsv").string());
  EXPECT_EQ(back, g);
}

TEST(Graph, AdjacencyMatchesEdgeTable) {
  auto g = generate({.n = 300, .degree = 5, .cardinality = 10, .cycle_fraction = 0.2, .seed = 3});
  std::multiset<std::pair<Index, Index>> table, adj, radj;
  for (const auto& e : g.edges()) table.emplace(e.src, e.tgt);
  for (Index v = 0; v < g.num_vertices(); ++v) {
    for (auto w : g.successors(v)) adj.emplace(v, w);
    for (auto u : g.predecessors(v)) radj.emplace(u, v);
  }
  EXPECT_EQ(table, adj);
  EXPECT_EQ(table, radj);
}

TEST(Condense, DagIsIdentity) {
  auto g = small({{0, 0, 4, ""}, {1, 0, 5, ""}, {2, 0, 6, ""}}, {{0, 1, 0, 1, ""}, {1, 2, 0, 1, ""}});
  std::vector<AggFunction> fns{vertex_function("s", Combine::Sum, GroupBy::None)};
  auto c = condense_scc(g, fns);
  ASSERT_EQ(c.num_vertices(), 3u);
  for (Index s = 0; s < 3; ++s) {
    ASSERT_EQ(c.members(s).size(), 1u);
    EXPECT_EQ(c.preaggregate(0, s).front().second.value, g.vertex(c.members(s)[0]).mr);
  }
}

TEST(Condense, ThreeCycleSums) {
  auto g = small({{0, 0, 1, ""}, {1, 0, 2, ""}, {2, 0, 3, ""}},
                 {{0, 1, 0, 1, ""}, {1, 2, 0, 1, ""}, {2, 0, 0, 1, ""}});
  std::vector<AggFunction> fns{vertex_function("s", Combine::Sum, GroupBy::None),
                               edge_function("c", Combine::Count, GroupBy::None)};
  auto c = condense_scc(g, fns);
  ASSERT_EQ(c.num_vertices(), 1u);
  EXPECT_EQ(c.preaggregate(0, 0).front().second.value, 6);
  EXPECT_EQ(c.preaggregate(1, 0).front().second.value, 3);
  EXPECT_TRUE(c.inter_edges().empty());
}

TEST(Condense, ParallelInterEdgesKept) {
  auto g = small({{0, 0, 1, ""}, {1, 0, 2, ""}}, {{0, 1, 0, 1, ""}, {0, 1, 1, 2, ""}});
  auto c = condense_scc(g);
  EXPECT_EQ(c.inter_edges().size(), 2u);
  EXPECT_EQ(c.successors(c.super_of(0)).size(), 2u);
}

TEST(Condense, SoundnessAgainstBfs) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto g = generate({.n = 120, .degree = 2.5, .cardinality = 4, .cycle_fraction = 0.3, .seed = seed});
    auto c = condense_scc(g);
    auto d = oracle::all_pairs(g);
    auto tc = TransitiveClosure::build(c);
    for (Index u = 0; u < g.num_vertices(); ++u)
      for (Index v = 0; v < g.num_vertices(); ++v)
        ASSERT_EQ(d[u][v] != oracle::kInf, tc.reaches(c.super_of(u), c.super_of(v))) << seed;
    // Members partition the vertex set; no super-vertex has a self-loop.
    std::vector<int> seen(g.num_vertices(), 0);
    for (Index s = 0; s < c.num_vertices(); ++s)
      for (auto v : c.members(s)) ++seen[v];
    EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](int x) { return x == 1; }));
    for (Index s = 0; s < c.num_vertices(); ++s)
      for (auto t : c.successors(s)) EXPECT_NE(s, t);
  }
}

TEST(Condense, PreaggregatesMatchMembers) {
  auto g = generate({.n = 150, .degree = 3, .cardinality = 9, .cycle_fraction = 0.4, .seed = 11});
  for (auto op : {Combine::Sum, Combine::Count, Combine::Min, Combine::Max}) {
    std::vector<AggFunction> fns{vertex_function("v", op, GroupBy::VGrp)};
    auto c = condense_scc(g, fns);
    for (Index s = 0; s < c.num_vertices(); ++s) {
      std::vector<bool> member(g.num_vertices(), false);
      for (auto v : c.members(s)) member[v] = true;
      auto want = oracle::aggregate(g, member, fns[0]);
      oracle::Table got;
      for (const auto& [k, p] : c.preaggregate(0, s)) got.emplace(k.packed, p);
      EXPECT_EQ(got, want);
    }
  }
}

TEST(Condense, Deterministic) {
  auto g = generate({.n = 400, .degree = 3, .cardinality = 16, .cycle_fraction = 0.2, .seed = 5});
  EXPECT_EQ(condense_scc(g), condense_scc(g));
}

TEST(TopologicalOrder, SingleAndChain) {
  auto one = condense_scc(small({{0, 0, 0, ""}}, {}));
  EXPECT_EQ(topological_order(one), std::vector<Index>{0});
  auto chain = condense_scc(small({{0, 0, 0, ""}, {1, 0, 0, ""}, {2, 0, 0, ""}},
                                  {{0, 1, 0, 0, ""}, {1, 2, 0, 0, ""}}));
  EXPECT_EQ(topological_order(chain), (std::vector<Index>{0, 1, 2}));
}

TEST(TopologicalOrder, RespectsEdges) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto g = generate({.n = 500, .degree = 4, .cardinality = 4, .cycle_fraction = 0.1, .seed = seed});
    auto c = condense_scc(g);
    auto order = topological_order(c);
    std::vector<std::size_t> pos(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    for (Index s = 0; s < c.num_vertices(); ++s)
      for (auto t : c.successors(s)) ASSERT_LT(pos[s], pos[t]);
  }
}

TEST(TopologicalOrder, CycleIsAnInvariantViolation) {
  auto g = small({{0, 0, 0, ""}, {1, 0, 0, ""}}, {{0, 1, 0, 0, ""}, {1, 0, 0, 0, ""}});
  EXPECT_THROW(topological_order(g), CycleError);
}
