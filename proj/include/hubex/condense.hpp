#pragma once

#include <algorithm>
#include <functional>
#include <queue>
#include <span>
#include <stdexcept>
#include <vector>

#include "hubex/aggregate_function.hpp"
#include "hubex/graph.hpp"

namespace hubex {

/// DAG of strongly connected components. Super-vertex ids are assigned in
/// order of each component's smallest member vid. Parallel edges between
/// components are kept; edges inside a component are listed per component.
class CondensedGraph {
 public:
  std::size_t num_vertices() const noexcept { return members_.size(); }
  std::size_t num_original_vertices() const noexcept { return super_of_.size(); }

  Index super_of(Index original) const { return super_of_[original]; }
  std::span<const Index> super_map() const noexcept { return super_of_; }
  std::span<const Index> members(Index s) const { return members_[s]; }
  std::span<const EdgeIndex> intra_edges(Index s) const { return intra_[s]; }
  std::span<const EdgeIndex> inter_edges() const noexcept { return inter_; }

  std::span<const Index> successors(Index s) const { return out_.neighbors_of(s); }
  std::span<const Index> predecessors(Index s) const { return in_.neighbors_of(s); }
  /// Original edge ids leaving super-vertex s towards other components.
  std::span<const EdgeIndex> out_edges(Index s) const { return out_.edges_of(s); }

  /// Functions whose pre-aggregates were computed at condensation time.
  std::span<const AggFunction> functions() const noexcept { return functions_; }

  /// Pre-aggregate of registered function `f` for super-vertex `s`: members'
  /// values for vertex functions, intra-component edges for edge functions.
  const PartialTable& preaggregate(std::size_t f, Index s) const { return preagg_[f][s]; }

  /// Copy of this condensation with pre-aggregates for `aggs`; `g` must be
  /// the graph it was built from.
  CondensedGraph with_functions(const AttributedGraph& g, std::span<const AggFunction> aggs) const {
    CondensedGraph c = *this;
    c.functions_.assign(aggs.begin(), aggs.end());
    c.preagg_.assign(aggs.size(), {});
    for (std::size_t f = 0; f < aggs.size(); ++f) {
      const auto& fn = aggs[f];
      auto& tables = c.preagg_[f];
      tables.resize(num_vertices());
      std::vector<std::pair<GroupKey, Partial>> items;
      for (Index s = 0; s < num_vertices(); ++s) {
        items.clear();
        if (fn.kind == ElementKind::Vertex) {
          for (auto v : members_[s]) items.emplace_back(fn.vertex_key(g.vertex(v)), fn.vertex_value(g.vertex(v)));
        } else {
          for (auto e : intra_[s]) items.emplace_back(fn.edge_key(g, g.edge(e)), fn.edge_value(g.edge(e)));
        }
        tables[s] = fold_table(fn.op, items);
      }
    }
    return c;
  }

  friend CondensedGraph condense_scc(const AttributedGraph& g, std::span<const AggFunction> aggs);

  friend bool operator==(const CondensedGraph& a, const CondensedGraph& b) {
    return a.super_of_ == b.super_of_ && a.members_ == b.members_ && a.inter_ == b.inter_ &&
           a.intra_ == b.intra_ && a.preagg_ == b.preagg_;
  }

 private:
  std::vector<Index> super_of_;
  std::vector<std::vector<Index>> members_;
  std::vector<std::vector<EdgeIndex>> intra_;
  std::vector<EdgeIndex> inter_;
  detail::Csr out_;
  detail::Csr in_;
  std::vector<AggFunction> functions_;
  std::vector<std::vector<PartialTable>> preagg_;
};

namespace detail {

// Iterative Tarjan. Returns component id per vertex (ids in completion order).
inline std::vector<Index> tarjan_components(const AttributedGraph& g, std::size_t& count) {
  const auto n = g.num_vertices();
  std::vector<Index> comp(n, kNoIndex);
  std::vector<Index> index(n, kNoIndex), low(n, 0);
  std::vector<Index> stack;
  std::vector<bool> on_stack(n, false);
  struct Frame {
    Index v;
    std::size_t next;
  };
  std::vector<Frame> call;
  Index counter = 0;
  count = 0;

  for (Index root = 0; root < n; ++root) {
    if (index[root] != kNoIndex) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      auto& f = call.back();
      auto succ = g.successors(f.v);
      if (f.next < succ.size()) {
        Index w = succ[f.next++];
        if (index[w] == kNoIndex) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      Index v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        Index w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = static_cast<Index>(count);
        } while (w != v);
        ++count;
      }
    }
  }
  return comp;
}

}  // namespace detail

/// Condenses every strongly connected component into a super-vertex and
/// pre-aggregates each registered function over its members (and, for edge
/// functions, over the edges inside the component).
inline CondensedGraph condense_scc(const AttributedGraph& g,
                                   std::span<const AggFunction> aggs = {}) {
  CondensedGraph c;
  const auto n = g.num_vertices();
  std::size_t count = 0;
  auto raw = detail::tarjan_components(g, count);

  // Renumber components by their smallest member (indices are vid-ordered).
  std::vector<Index> renumber(count, kNoIndex);
  Index next = 0;
  for (Index v = 0; v < n; ++v) {
    if (renumber[raw[v]] == kNoIndex) renumber[raw[v]] = next++;
  }
  c.super_of_.resize(n);
  c.members_.assign(count, {});
  for (Index v = 0; v < n; ++v) {
    c.super_of_[v] = renumber[raw[v]];
    c.members_[c.super_of_[v]].push_back(v);
  }

  c.intra_.assign(count, {});
  for (EdgeIndex e = 0; e < g.num_edges(); ++e) {
    const auto& ed = g.edge(e);
    auto s = c.super_of_[ed.src], t = c.super_of_[ed.tgt];
    if (s == t)
      c.intra_[s].push_back(e);
    else
      c.inter_.push_back(e);
  }
  const auto& inter = c.inter_;
  const auto& sup = c.super_of_;
  auto out = detail::Csr::build(
      count, inter.size(), [&](std::size_t i) { return sup[g.edge(inter[i]).src]; },
      [&](std::size_t i) { return sup[g.edge(inter[i]).tgt]; });
  auto in = detail::Csr::build(
      count, inter.size(), [&](std::size_t i) { return sup[g.edge(inter[i]).tgt]; },
      [&](std::size_t i) { return sup[g.edge(inter[i]).src]; });
  // Csr stores positions into `inter`; translate them to original edge ids.
  for (auto& id : out.edge_ids) id = inter[id];
  for (auto& id : in.edge_ids) id = inter[id];
  c.out_ = std::move(out);
  c.in_ = std::move(in);

  if (aggs.empty()) return c;
  return c.with_functions(g, aggs);
}

class CycleError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Kahn's algorithm with the smallest ready id first. Works on any graph
/// exposing num_vertices() and successors(v); throws CycleError if cyclic.
template <class G>
std::vector<Index> topological_order(const G& g) {
  const auto n = g.num_vertices();
  std::vector<std::uint32_t> indeg(n, 0);
  for (Index v = 0; v < n; ++v)
    for (auto w : g.successors(v)) ++indeg[w];
  std::priority_queue<Index, std::vector<Index>, std::greater<>> ready;
  for (Index v = 0; v < n; ++v)
    if (indeg[v] == 0) ready.push(v);
  std::vector<Index> order;
  order.reserve(n);
  while (!ready.empty()) {
    auto v = ready.top();
    ready.pop();
    order.push_back(v);
    for (auto w : g.successors(v))
      if (--indeg[w] == 0) ready.push(w);
  }
  if (order.size() != n) throw CycleError("graph is not acyclic; condensation failed");
  return order;
}

}  // namespace hubex
