#pragma once

#include <concepts>
#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "hubex/condense.hpp"
#include "hubex/graph.hpp"

namespace hubex {

using Bits = boost::dynamic_bitset<std::uint64_t>;

inline constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

/// Anything that answers "does u reach v" over dense vertex ids.
template <class I>
concept ReachabilityIndex = requires(const I& idx, Index u, Index v) {
  { idx.reaches(u, v) } -> std::same_as<bool>;
  { idx.size() } -> std::convertible_to<std::size_t>;
};

/// Any directed graph with dense ids and neighbor spans.
template <class G>
concept DirectedGraph = requires(const G& g, Index v) {
  { g.num_vertices() } -> std::convertible_to<std::size_t>;
  { g.successors(v) } -> std::convertible_to<std::span<const Index>>;
  { g.predecessors(v) } -> std::convertible_to<std::span<const Index>>;
};

class IndexTooLarge : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Reflexive transitive closure as one bitset row per vertex.
class TransitiveClosure {
 public:
  static constexpr std::size_t kDefaultCap = 100'000;

  /// Rows are filled in reverse topological order: row(v) = {v} | rows of successors.
  template <DirectedGraph G>
  static TransitiveClosure build(const G& dag, std::size_t cap = kDefaultCap) {
    const auto n = dag.num_vertices();
    if (n > cap) {
      throw IndexTooLarge("transitive closure over " + std::to_string(n) +
                          " vertices exceeds cap " + std::to_string(cap));
    }
    TransitiveClosure tc;
    tc.rows_.assign(n, Bits(n));
    auto order = topological_order(dag);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      auto& row = tc.rows_[*it];
      row.set(*it);
      for (auto w : dag.successors(*it)) row |= tc.rows_[w];
    }
    return tc;
  }

  bool reaches(Index u, Index v) const {
    if (u >= rows_.size() || v >= rows_.size()) throw std::out_of_range("reaches: id out of range");
    return rows_[u].test(v);
  }
  std::size_t size() const noexcept { return rows_.size(); }
  const Bits& row(Index u) const { return rows_.at(u); }

 private:
  std::vector<Bits> rows_;
};

enum class Direction { Forward, Reverse };

/// Hop distances from `source`, kUnreachable beyond `limit` hops.
template <DirectedGraph G>
std::vector<std::uint32_t> bfs_distances(const G& g, Index source, Direction dir,
                                         std::uint32_t limit = kUnreachable) {
  std::vector<std::uint32_t> dist(g.num_vertices(), kUnreachable);
  if (source >= g.num_vertices()) return dist;
  std::vector<Index> frontier{source}, next;
  dist[source] = 0;
  for (std::uint32_t d = 0; !frontier.empty() && d < limit; ++d) {
    next.clear();
    for (auto v : frontier) {
      auto nbrs = dir == Direction::Forward ? g.successors(v) : g.predecessors(v);
      for (auto w : nbrs) {
        if (dist[w] == kUnreachable) {
          dist[w] = d + 1;
          next.push_back(w);
        }
      }
    }
    frontier.swap(next);
  }
  return dist;
}

/// BFS distances truncated at `hops`; the source maps to 0.
template <DirectedGraph G>
std::map<Index, std::uint32_t> bounded_distances(const G& g, Index source, std::uint32_t hops,
                                                 Direction dir) {
  auto dist = bfs_distances(g, source, dir, hops);
  std::map<Index, std::uint32_t> out;
  for (Index v = 0; v < dist.size(); ++v)
    if (dist[v] != kUnreachable) out.emplace(v, dist[v]);
  return out;
}

/// Index-free reachability: one BFS per probe. Holds a reference to the graph.
template <DirectedGraph G>
class BfsReachability {
 public:
  explicit BfsReachability(const G& g) : g_(&g) {}

  bool reaches(Index u, Index v) const {
    if (u >= size() || v >= size()) throw std::out_of_range("reaches: id out of range");
    return bfs_distances(*g_, u, Direction::Forward)[v] != kUnreachable;
  }
  std::size_t size() const { return g_->num_vertices(); }

 private:
  const G* g_;
};

}  // namespace hubex
