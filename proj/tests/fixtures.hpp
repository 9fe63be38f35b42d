// Small hand-built graphs shared by the unit tests and the acceptance run.
#pragma once

#include <string>
#include <vector>

#include "hubex/graph.hpp"

namespace fixture {

/// Hubs 1..5 with middle vertices A1, B1, B2 and C1..C3:
///   1 -> A1 -> {2, 3};  2 -> B1 -> 3;  2 -> B2 -> 3;  {2, 3} -> C1 -> C2 -> C3;
///   C1 -> C3;  C3 -> {4, 5}
/// Vids: hubs 1..5, A1 = 11, B1 = 21, B2 = 22, C1 = 31, C2 = 32, C3 = 33.
inline hubex::AttributedGraph five_hubs() {
  using hubex::EdgeRecord;
  using hubex::Vertex;
  std::vector<Vertex> vs;
  auto add = [&](hubex::VertexId vid, std::string name, hubex::Group grp, hubex::Measure mr) {
    vs.push_back({vid, grp, mr, std::move(name)});
  };
  for (hubex::VertexId h = 1; h <= 5; ++h) add(h, std::to_string(h), 0, 10 * static_cast<hubex::Measure>(h));
  add(11, "A1", 1, 3);
  add(21, "B1", 1, 4);
  add(22, "B2", 2, 5);
  add(31, "C1", 2, 6);
  add(32, "C2", 1, 7);
  add(33, "C3", 2, 8);
  std::vector<std::pair<hubex::VertexId, hubex::VertexId>> pairs = {
      {1, 11}, {11, 2}, {11, 3}, {2, 21}, {21, 3}, {2, 22}, {22, 3},
      {2, 31}, {3, 31}, {31, 32}, {32, 33}, {31, 33}, {33, 4}, {33, 5}};
  std::vector<EdgeRecord> es;
  hubex::Measure m = 1;
  for (auto [s, t] : pairs) es.push_back({s, t, static_cast<hubex::Group>(m % 3), m++, "e"});
  return hubex::AttributedGraph(std::move(vs), std::move(es), true, true);
}

/// Hub vids of five_hubs() in hub order 1..5.
inline std::vector<hubex::VertexId> five_hub_ids() { return {1, 2, 3, 4, 5}; }

}  // namespace fixture
