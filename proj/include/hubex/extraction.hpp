#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hubex/aggregation.hpp"
#include "hubex/condense.hpp"
#include "hubex/tags.hpp"

namespace hubex {

/// Tagged elements ready for aggregation: distinct vertex and edge tags plus
/// one ElementValues per aggregate function (aligned with `functions`).
template <Membership T>
struct Extraction {
  std::size_t hubs = 0;
  std::vector<AggFunction> functions;
  TagTable<T> vertex_tags;
  TagTable<T> edge_tags;
  std::vector<ElementValues> values;

  const TagTable<T>& tags_for(ElementKind kind) const {
    return kind == ElementKind::Vertex ? vertex_tags : edge_tags;
  }
};

/// Elements of a condensed graph: a super-vertex's pre-aggregate table stands
/// for its members, inter-component edges stand for themselves, and each
/// super-vertex's intra-component pre-aggregate is one more edge element.
/// The condensed graph must have been built with the same functions.
inline Extraction<Tag> extract_condensed(const AttributedGraph& g, const CondensedGraph& cg,
                                         BetweennessTags tags) {
  Extraction<Tag> out;
  out.hubs = tags.per_super.empty() ? 0 : tags.per_super.front().hubs();
  auto fns = cg.functions();
  out.functions.assign(fns.begin(), fns.end());
  out.values.resize(fns.size());
  const auto n = cg.num_vertices();
  auto inter = cg.inter_edges();
  for (std::size_t f = 0; f < fns.size(); ++f) {
    const auto& fn = fns[f];
    auto& vals = out.values[f];
    if (fn.kind == ElementKind::Vertex) {
      for (Index s = 0; s < n; ++s)
        for (const auto& [key, p] : cg.preaggregate(f, s)) vals.push(tags.vertices.of[s], key, p);
    } else {
      for (std::size_t i = 0; i < inter.size(); ++i) {
        const auto& e = g.edge(inter[i]);
        vals.push(tags.edges.of[i], fn.edge_key(g, e), fn.edge_value(e));
      }
      for (Index s = 0; s < n; ++s) {
        auto t = tags.edges.of[inter.size() + s];
        for (const auto& [key, p] : cg.preaggregate(f, s)) vals.push(t, key, p);
      }
    }
  }
  out.vertex_tags = std::move(tags.vertices);
  out.edge_tags = std::move(tags.edges);
  return out;
}

/// Elements of an uncondensed graph with explicit per-vertex pair masks. An
/// edge belongs to G'(x, y) when both endpoints do.
inline Extraction<PairMask> extract_masked(const AttributedGraph& g,
                                           std::vector<PairMask> vertex_masks,
                                           std::span<const AggFunction> fns) {
  if (vertex_masks.size() != g.num_vertices())
    throw std::invalid_argument("one mask per vertex required");
  Extraction<PairMask> out;
  out.hubs = vertex_masks.empty() ? 0 : vertex_masks.front().hubs();
  out.functions.assign(fns.begin(), fns.end());
  std::vector<PairMask> edge_masks;
  edge_masks.reserve(g.num_edges());
  for (const auto& e : g.edges()) edge_masks.push_back(shared_component(vertex_masks[e.src], vertex_masks[e.tgt]));
  out.vertex_tags = dedupe_tags<PairMask, PairMaskHash>(std::move(vertex_masks));
  out.edge_tags = dedupe_tags<PairMask, PairMaskHash>(std::move(edge_masks));
  out.values.resize(fns.size());
  for (std::size_t f = 0; f < fns.size(); ++f) {
    const auto& fn = fns[f];
    auto& vals = out.values[f];
    if (fn.kind == ElementKind::Vertex) {
      for (Index v = 0; v < g.num_vertices(); ++v)
        vals.push(out.vertex_tags.of[v], fn.vertex_key(g.vertex(v)), fn.vertex_value(g.vertex(v)));
    } else {
      for (EdgeIndex e = 0; e < g.num_edges(); ++e)
        vals.push(out.edge_tags.of[e], fn.edge_key(g, g.edge(e)), fn.edge_value(g.edge(e)));
    }
  }
  return out;
}

enum class Strategy { SharedNothing, Sharing };

struct AggregationStats {
  AddOps ops;
  double plan_seconds = 0;
  double aggregate_seconds = 0;
  std::size_t vertex_groups = 0;
  std::size_t edge_groups = 0;
  std::size_t clusters = 0;
};

/// Aggregates every function of an extraction. With Sharing, one plan is
/// built per element kind and reused by all functions of that kind.
template <Membership T, class Clock>
std::vector<FunctionResult> aggregate_all(const Extraction<T>& ex, Strategy strategy,
                                          PlanOptions options, AggregationStats& stats,
                                          Clock&& clock) {
  std::vector<FunctionResult> results;
  results.reserve(ex.functions.size());
  stats.vertex_groups = ex.vertex_tags.tags.size();
  stats.edge_groups = ex.edge_tags.tags.size();
  if (strategy == Strategy::SharedNothing) {
    auto t0 = clock();
    for (std::size_t f = 0; f < ex.functions.size(); ++f) {
      const auto& tags = ex.tags_for(ex.functions[f].kind).tags;
      results.push_back(sn_aggregate<T>(tags, ex.values[f], ex.functions[f], ex.hubs));
      stats.ops += results.back().ops;
    }
    stats.aggregate_seconds += clock() - t0;
    return results;
  }
  std::optional<AggPlan<T>> plans[2];
  for (std::size_t f = 0; f < ex.functions.size(); ++f) {
    const auto kind = ex.functions[f].kind;
    auto& plan = plans[kind == ElementKind::Vertex ? 0 : 1];
    if (!plan) {
      auto t0 = clock();
      const auto& tags = ex.tags_for(kind).tags;
      plan = build_as_plan<T>(tags, options, present_tags(tags.size(), ex.values[f]));
      plan->hubs = ex.hubs;
      auto problems = audit_plan(*plan);
      if (!problems.empty())
        throw PlanError("aggregation plan breaks the routing partition: " + problems.front());
      stats.plan_seconds += clock() - t0;
      stats.clusters += plan->clusters;
    }
    auto t0 = clock();
    results.push_back(execute_plan(*plan, ex.values[f], ex.functions[f], false));
    stats.aggregate_seconds += clock() - t0;
    stats.ops += results.back().ops;
  }
  return results;
}

}  // namespace hubex
