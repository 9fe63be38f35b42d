#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

#include "hubex/condense.hpp"
#include "hubex/generator.hpp"

using namespace hubex;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("hubex_gen_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(SplitCardinality, SquareRootSplit) {
  EXPECT_EQ(split_cardinality(1), (std::pair<Group, Group>{1, 1}));
  EXPECT_EQ(split_cardinality(4), (std::pair<Group, Group>{2, 2}));
  EXPECT_EQ(split_cardinality(10), (std::pair<Group, Group>{4, 3}));
  EXPECT_EQ(split_cardinality(100), (std::pair<Group, Group>{10, 10}));
  EXPECT_EQ(split_cardinality(10000), (std::pair<Group, Group>{100, 100}));
  for (std::uint64_t c : {2u, 3u, 7u, 16u, 99u, 1000u, 100000u}) {
    auto [cv, ce] = split_cardinality(c);
    EXPECT_GE(std::uint64_t{cv} * ce, c);
    EXPECT_LT(std::uint64_t{cv} * (ce - 1), c);
  }
  EXPECT_THROW(split_cardinality(0), std::invalid_argument);
}

TEST(Generate, DegreeWithinFivePercent) {
  for (double degree : {2.0, 8.0, 40.0}) {
    auto g = generate({.n = 1000, .degree = degree, .cardinality = 100, .seed = 7});
    EXPECT_EQ(g.num_vertices(), 1000u);
    double avg = static_cast<double>(g.num_edges()) / 1000.0;
    EXPECT_NEAR(avg, degree, degree * 0.05);
  }
}

TEST(Generate, DistinctKeysNearTarget) {
  auto g = generate({.n = 1000, .degree = 8, .cardinality = 100, .seed = 11});
  std::set<std::pair<Group, Group>> keys;
  for (const auto& e : g.edges()) keys.emplace(g.vertex(e.src).grp, e.grp);
  EXPECT_GE(keys.size(), 90u);
  EXPECT_LE(keys.size(), 110u);
}

TEST(Generate, MeasuresAndGroupsInRange) {
  auto g = generate({.n = 500, .degree = 4, .cardinality = 10, .seed = 2});
  auto [cv, ce] = split_cardinality(10);
  for (const auto& v : g.vertices()) {
    EXPECT_LT(v.grp, cv);
    EXPECT_GE(v.mr, 1);
    EXPECT_LE(v.mr, 100);
  }
  for (const auto& e : g.edges()) {
    EXPECT_NE(e.src, e.tgt);
    EXPECT_LT(e.grp, ce);
    EXPECT_GE(e.mr, 1);
    EXPECT_LE(e.mr, 100);
  }
}

TEST(Generate, NoCyclesMeansDag) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto g = generate({.n = 400, .degree = 6, .cardinality = 4, .cycle_fraction = 0, .seed = seed});
    EXPECT_EQ(condense_scc(g).num_vertices(), g.num_vertices());
  }
  auto cyclic = generate({.n = 400, .degree = 6, .cardinality = 4, .cycle_fraction = 0.2, .seed = 1});
  EXPECT_LT(condense_scc(cyclic).num_vertices(), cyclic.num_vertices());
}

TEST(Generate, SameSeedSameBytes) {
  GenConfig cfg{.n = 300, .degree = 5, .cardinality = 16, .cycle_fraction = 0.1, .seed = 42};
  auto dir = scratch("det");
  save_graph(generate(cfg), (dir / "a.v").string(), (dir / "a.e").string());
  save_graph(generate(cfg), (dir / "b.v").string(), (dir / "b.e").string());
  EXPECT_EQ(slurp(dir / "a.v"), slurp(dir / "b.v"));
  EXPECT_EQ(slurp(dir / "a.e"), slurp(dir / "b.e"));
  cfg.seed = 43;
  save_graph(generate(cfg), (dir / "c.v").string(), (dir / "c.e").string());
  EXPECT_NE(slurp(dir / "a.e"), slurp(dir / "c.e"));
  auto back = load_graph((dir / "a.v").string(), (dir / "a.e").string());
  EXPECT_EQ(back.num_edges(), generate(cfg).num_edges());
  std::filesystem::remove_all(dir);
}

TEST(Generate, DegenerateConfigs) {
  EXPECT_EQ(generate({.n = 0, .degree = 3}).num_vertices(), 0u);
  EXPECT_EQ(generate({.n = 1, .degree = 3}).num_edges(), 0u);
  EXPECT_EQ(generate({.n = 50, .degree = 0}).num_edges(), 0u);
  EXPECT_THROW(generate({.degree = -1}), std::invalid_argument);
  EXPECT_THROW(generate({.cycle_fraction = 1.5}), std::invalid_argument);
  EXPECT_THROW(generate({.cardinality = 0}), std::invalid_argument);
}
