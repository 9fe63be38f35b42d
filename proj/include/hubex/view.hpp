#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "hubex/graph.hpp"
#include "hubex/reachability.hpp"

namespace hubex {

/// A vertex and edge subset of a root graph, both sorted by index.
struct SubgraphView {
  std::vector<Index> vertices;
  std::vector<EdgeIndex> edges;

  bool contains_vertex(Index v) const {
    return std::binary_search(vertices.begin(), vertices.end(), v);
  }
  friend bool operator==(const SubgraphView&, const SubgraphView&) = default;
};

inline SubgraphView whole_view(const AttributedGraph& g) {
  SubgraphView v;
  v.vertices.resize(g.num_vertices());
  std::iota(v.vertices.begin(), v.vertices.end(), Index{0});
  v.edges.resize(g.num_edges());
  std::iota(v.edges.begin(), v.edges.end(), EdgeIndex{0});
  return v;
}

/// View holding the given vertices and every edge of `g` between them.
inline SubgraphView induced_view(const AttributedGraph& g, std::vector<Index> vertices) {
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  std::vector<bool> in(g.num_vertices(), false);
  for (auto v : vertices) in.at(v) = true;
  SubgraphView out;
  for (auto v : vertices)
    for (auto e : g.out_edges(v))
      if (in[g.edge(e).tgt]) out.edges.push_back(e);
  std::sort(out.edges.begin(), out.edges.end());
  out.vertices = std::move(vertices);
  return out;
}

/// Union of views over the same root.
inline SubgraphView unite(const std::vector<const SubgraphView*>& views) {
  SubgraphView out;
  for (const auto* v : views) {
    out.vertices.insert(out.vertices.end(), v->vertices.begin(), v->vertices.end());
    out.edges.insert(out.edges.end(), v->edges.begin(), v->edges.end());
  }
  for (auto* list : {&out.vertices, &out.edges}) {
    std::sort(list->begin(), list->end());
    list->erase(std::unique(list->begin(), list->end()), list->end());
  }
  return out;
}

/// A view as a standalone graph. Vids, attributes and labels are preserved;
/// local index i corresponds to view.vertices[i] and local edge j to view.edges[j]
/// (both orders agree with the root's, which is sorted by vid and (src, tgt)).
inline AttributedGraph materialize(const AttributedGraph& g, const SubgraphView& view) {
  std::vector<Vertex> vs;
  vs.reserve(view.vertices.size());
  for (auto v : view.vertices) vs.push_back(g.vertex(v));
  std::vector<EdgeRecord> es;
  es.reserve(view.edges.size());
  for (auto e : view.edges) {
    const auto& ed = g.edge(e);
    es.push_back({g.vertex(ed.src).vid, g.vertex(ed.tgt).vid, ed.grp, ed.mr, ed.label});
  }
  return AttributedGraph(std::move(vs), std::move(es), g.has_vertex_labels(), g.has_edge_labels());
}

/// Maps a view of a materialized graph back onto the root the graph came from.
inline SubgraphView lift_view(const SubgraphView& root_view, const SubgraphView& local) {
  SubgraphView out;
  out.vertices.reserve(local.vertices.size());
  for (auto v : local.vertices) out.vertices.push_back(root_view.vertices.at(v));
  out.edges.reserve(local.edges.size());
  for (auto e : local.edges) out.edges.push_back(root_view.edges.at(e));
  return out;
}

/// Vertices on a path from a to b of at most h hops: dist(a,v) + dist(v,b) <= h.
/// If b is farther than h, the budget widens to dist(a,b) so the shortest
/// paths are kept; if b is unreachable only a and b remain. An edge (u,v) is
/// kept when it lies on such a path: dist(a,u) + 1 + dist(v,b) <= budget.
inline SubgraphView extract_path_subgraph(const AttributedGraph& g, Index a, Index b,
                                          std::uint32_t h) {
  if (a >= g.num_vertices() || b >= g.num_vertices())
    throw std::out_of_range("path anchor is not in the graph");
  auto from = bfs_distances(g, a, Direction::Forward);
  auto to = bfs_distances(g, b, Direction::Reverse);
  SubgraphView out;
  if (from[b] == kUnreachable) {
    out.vertices = {std::min(a, b), std::max(a, b)};
    if (a == b) out.vertices.pop_back();
    return out;
  }
  const std::uint64_t budget = std::max<std::uint64_t>(h, from[b]);
  for (Index v = 0; v < g.num_vertices(); ++v) {
    if (from[v] == kUnreachable || to[v] == kUnreachable) continue;
    if (std::uint64_t{from[v]} + to[v] <= budget) out.vertices.push_back(v);
  }
  for (EdgeIndex e = 0; e < g.num_edges(); ++e) {
    const auto& ed = g.edge(e);
    if (from[ed.src] == kUnreachable || to[ed.tgt] == kUnreachable) continue;
    if (std::uint64_t{from[ed.src]} + 1 + to[ed.tgt] <= budget) out.edges.push_back(e);
  }
  return out;
}

}  // namespace hubex
