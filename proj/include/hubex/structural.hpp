#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hubex/graph.hpp"
#include "hubex/reachability.hpp"

namespace hubex {

/// One shortest path between two vertices: hop distance, edge labels and
/// the vids along it. distance == kUnreachable when there is no path.
struct PathSummary {
  std::uint32_t distance = kUnreachable;
  std::vector<std::string> labels;
  std::vector<VertexId> vids;

  bool reachable() const noexcept { return distance != kUnreachable; }
  /// Labels joined by '.', e.g. "friend.friend.friend".
  std::string text() const {
    std::string out;
    for (const auto& l : labels) {
      if (!out.empty()) out += '.';
      out += l;
    }
    return out;
  }
  friend bool operator==(const PathSummary&, const PathSummary&) = default;
};

/// Shortest x -> y path with the lexicographically smallest vid sequence.
/// `to_y` holds reverse BFS distances to y. Among parallel edges the
/// smallest label is reported.
inline PathSummary shortest_path_summary(const AttributedGraph& g, Index x, Index y,
                                         const std::vector<std::uint32_t>& to_y) {
  PathSummary out;
  if (to_y[x] == kUnreachable) return out;
  out.distance = to_y[x];
  out.vids.push_back(g.vertex(x).vid);
  Index at = x;
  while (at != y) {
    Index next = kNoIndex;
    const std::string* label = nullptr;
    for (auto e : g.out_edges(at)) {
      const auto& ed = g.edge(e);
      if (to_y[ed.tgt] + 1 != to_y[at]) continue;
      // Indices are vid-ordered, so the smallest index is the smallest vid.
      if (next == kNoIndex || ed.tgt < next || (ed.tgt == next && ed.label < *label)) {
        next = ed.tgt;
        label = &ed.label;
      }
    }
    out.labels.push_back(*label);
    out.vids.push_back(g.vertex(next).vid);
    at = next;
  }
  return out;
}

inline PathSummary shortest_path_summary(const AttributedGraph& g, Index x, Index y) {
  return shortest_path_summary(g, x, y, bfs_distances(g, y, Direction::Reverse));
}

/// Strength proxy: edges of G'(x, y) per hop of the shortest x -> y path.
/// Zero when y is unreachable or x == y.
struct Strength {
  std::uint64_t edges = 0;
  std::uint32_t distance = kUnreachable;

  double value() const {
    if (distance == kUnreachable || distance == 0) return 0.0;
    return static_cast<double>(edges) / static_cast<double>(distance);
  }
};

/// Min-max normalizes values into integer widths 1..5; all equal gives 3.
inline std::vector<int> width_bands(const std::vector<double>& values) {
  std::vector<int> out(values.size(), 3);
  if (values.empty()) return out;
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*hi - *lo <= 0) return out;
  for (std::size_t i = 0; i < values.size(); ++i)
    out[i] = 1 + static_cast<int>(std::lround((values[i] - *lo) / (*hi - *lo) * 4.0));
  return out;
}

}  // namespace hubex
