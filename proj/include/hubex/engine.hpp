#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "hubex/aggregation.hpp"
#include "hubex/condense.hpp"
#include "hubex/extraction.hpp"
#include "hubex/graph.hpp"
#include "hubex/hubs.hpp"
#include "hubex/query.hpp"
#include "hubex/reachability.hpp"
#include "hubex/structural.hpp"
#include "hubex/tags.hpp"
#include "hubex/view.hpp"

namespace hubex {

/// A registered graph with what queries over the whole graph reuse: its
/// condensation, a transitive-closure index (when under the size cap) and,
/// on first use, static closeness.
class Dataset {
 public:
  static std::shared_ptr<const Dataset> make(std::string name, AttributedGraph g,
                                             std::size_t closure_cap = TransitiveClosure::kDefaultCap) {
    auto ds = std::shared_ptr<Dataset>(new Dataset);
    ds->name_ = std::move(name);
    ds->graph_ = std::make_shared<const AttributedGraph>(std::move(g));
    ds->condensed_ = std::make_shared<const CondensedGraph>(condense_scc(*ds->graph_));
    if (ds->condensed_->num_vertices() <= closure_cap)
      ds->closure_ = std::make_shared<const TransitiveClosure>(
          TransitiveClosure::build(*ds->condensed_, closure_cap));
    return ds;
  }

  const std::string& name() const noexcept { return name_; }
  const AttributedGraph& graph() const noexcept { return *graph_; }
  std::shared_ptr<const AttributedGraph> graph_ptr() const noexcept { return graph_; }
  const CondensedGraph& condensed() const noexcept { return *condensed_; }
  const TransitiveClosure* closure() const noexcept { return closure_.get(); }

  const StaticClosenessIndex& static_closeness() const {
    std::call_once(closeness_once_, [&] { closeness_ = std::make_unique<StaticClosenessIndex>(*graph_); });
    return *closeness_;
  }

 private:
  Dataset() = default;

  std::string name_;
  std::shared_ptr<const AttributedGraph> graph_;
  std::shared_ptr<const CondensedGraph> condensed_;
  std::shared_ptr<const TransitiveClosure> closure_;
  mutable std::once_flag closeness_once_;
  mutable std::unique_ptr<StaticClosenessIndex> closeness_;
};

/// Seconds spent per pipeline phase.
struct PhaseTimes {
  double select = 0;     // pi view and sigma hubs
  double tag = 0;        // condensation and S/R tags
  double extract = 0;    // pre-aggregation and element values
  double plan = 0;
  double aggregate = 0;
  double summarize = 0;  // structural summaries and HA-graph assembly
  double total = 0;

  double phases() const { return tag + extract + plan + aggregate; }
};

struct ExecOptions {
  Strategy strategy = Strategy::Sharing;
  PlanOptions plan;
  Params params;
  /// Probe the dataset's closure index for whole-graph queries (else propagate).
  bool use_index = true;
};

struct HubInfo {
  Index root = 0;  // index in the dataset graph
  VertexId vid = 0;
  std::string name;
  Group grp = 0;
  Measure mr = 0;
  HubOrigin origin = HubOrigin::Selected;
};

struct TableRow {
  GroupKey key;
  FinalValue value;
};

/// One hub pair's cell of a shared function result; rows are built on demand.
struct TableSummary {
  std::shared_ptr<const FunctionResult> result;
  std::size_t x = 0, y = 0;

  const AggFunction& fn() const { return result->fn; }
  std::vector<TableRow> rows() const {
    std::vector<TableRow> out;
    for (const auto& [key, p] : result->rows(x, y)) out.push_back({key, finalize(result->fn.op, p)});
    return out;
  }
};

using SummaryValue = std::variant<std::int64_t, TableSummary, PathSummary, Strength>;

struct NamedSummary {
  std::string name;
  SummaryValue value;
};

struct HAEdge {
  std::size_t x = 0, y = 0;  // positions in HAGraph::hubs
  std::vector<NamedSummary> summaries;
  int width_band = 3;
};

/// What a query extracted, kept so edge views can be produced on demand.
class ExtractionState {
 public:
  std::shared_ptr<const Dataset> dataset;
  SubgraphView view;                               // pi view, dataset indices
  std::shared_ptr<const AttributedGraph> local;    // the view as a graph
  std::vector<Index> hubs;                         // local indices
  // Unbounded betweenness: per local vertex super id and per super tag.
  std::vector<Index> super_of;
  std::vector<Tag> super_tags;
  // Hop-bounded betweenness: per local vertex pair masks.
  std::vector<PairMask> masks;
  bool bounded = false;

  bool member(Index v, std::size_t x, std::size_t y) const {
    return bounded ? masks[v].contains(x, y) : super_tags[super_of[v]].contains(x, y);
  }

  /// G'(x, y) in dataset indices: member vertices and the edges between them.
  SubgraphView edge_view(std::size_t x, std::size_t y) const {
    SubgraphView local_view;
    for (Index v = 0; v < local->num_vertices(); ++v)
      if (member(v, x, y)) local_view.vertices.push_back(v);
    for (EdgeIndex e = 0; e < local->num_edges(); ++e) {
      const auto& ed = local->edge(e);
      if (member(ed.src, x, y) && member(ed.tgt, x, y)) local_view.edges.push_back(e);
    }
    return lift_view(view, local_view);
  }
};

/// Hub-based aggregation graph: hubs plus one edge per hub pair whose
/// induced subgraph is non-empty.
struct HAGraph {
  std::string id;
  std::string parent_id;
  std::string dataset;
  GEQuery query;
  std::vector<HubInfo> hubs;
  std::vector<HAEdge> edges;
  PhaseTimes times;
  AggregationStats stats;
  std::shared_ptr<const ExtractionState> state;

  std::optional<std::size_t> hub_position(VertexId vid) const {
    for (std::size_t i = 0; i < hubs.size(); ++i)
      if (hubs[i].vid == vid) return i;
    return std::nullopt;
  }
  const HAEdge* find_edge(VertexId x, VertexId y) const {
    auto px = hub_position(x), py = hub_position(y);
    if (!px || !py) return nullptr;
    for (const auto& e : edges)
      if (e.x == *px && e.y == *py) return &e;
    return nullptr;
  }
  const NamedSummary* summary(const HAEdge& e, std::string_view name) const {
    for (const auto& s : e.summaries)
      if (s.name == name) return &s;
    return nullptr;
  }
};

class EdgeNotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

inline Index resolve_anchor(const AttributedGraph& g, const AnchorRef& ref) {
  std::optional<Index> found;
  if (ref.vid)
    found = g.index_of(*ref.vid);
  else
    found = g.find_by_label(ref.name);
  if (!found) throw BindError("unknown vertex '" + ref.text() + "'");
  return *found;
}

inline Index local_of(const SubgraphView& view, Index root) {
  auto it = std::lower_bound(view.vertices.begin(), view.vertices.end(), root);
  if (it == view.vertices.end() || *it != root) throw BindError("vertex is outside the subgraph of interest");
  return static_cast<Index>(it - view.vertices.begin());
}

/// The subgraph a query runs over plus the anchors it must keep as hubs.
struct Scope {
  std::optional<SubgraphView> view;  // empty: the whole dataset graph
  std::vector<Index> anchors;        // dataset indices
};

inline Scope scope_of(const Dataset& ds, const GEQuery& q, const Params& params) {
  Scope s;
  auto src = bind_source(q.from, params);
  if (src.whole) return s;
  auto a = resolve_anchor(ds.graph(), src.a), b = resolve_anchor(ds.graph(), src.b);
  s.view = extract_path_subgraph(ds.graph(), a, b, src.h);
  s.anchors = {a, b};
  return s;
}

inline FinalValue table_scalar(const FunctionResult& r, std::size_t x, std::size_t y) {
  const auto& cell = r.at(x, y);
  auto it = cell.find(GroupKey{});
  if (it == cell.end()) return r.fn.op == Combine::Avg ? FinalValue{0.0} : FinalValue{std::int64_t{0}};
  return finalize(r.fn.op, it->second);
}

inline std::int64_t as_int(const FinalValue& v) {
  return std::holds_alternative<std::int64_t>(v) ? std::get<std::int64_t>(v)
                                                 : static_cast<std::int64_t>(std::get<double>(v));
}

inline HAGraph run(std::shared_ptr<const Dataset> ds, const GEQuery& q, const ExecOptions& opt,
                   Scope scope) {
  const auto t_start = Clock::now();
  HAGraph ha;
  ha.dataset = ds->name();
  ha.query = q;
  auto state = std::make_shared<ExtractionState>();
  state->dataset = ds;
  PhaseTimes& times = ha.times;

  // pi: the subgraph of interest.
  auto t0 = Clock::now();
  const bool root = !scope.view.has_value();
  if (root) {
    state->local = ds->graph_ptr();
    state->view = whole_view(ds->graph());
  } else {
    state->view = std::move(*scope.view);
    state->local = std::make_shared<const AttributedGraph>(materialize(ds->graph(), state->view));
  }
  const AttributedGraph& g = *state->local;

  // sigma: anchors first, then selected vertices.
  HubSet hubs;
  for (auto a : scope.anchors) hubs.add(root ? a : local_of(state->view, a), HubOrigin::Anchor);
  auto sel = bind_selector(q.select, opt.params);
  std::vector<Index> picked;
  switch (sel.kind) {
    case SelectorSpec::Kind::TopDegree:
      picked = top_max_degree(g, sel.k, sel.degree);
      break;
    case SelectorSpec::Kind::TopCloseness:
      if (sel.dynamic || sel.k == 0) {
        picked = top_closeness_dynamic(g, sel.k);
      } else {
        const auto& view = state->view;
        for (auto r : ds->static_closeness().top(sel.k, [&](Index v) { return root || view.contains_vertex(v); }))
          picked.push_back(root ? r : local_of(view, r));
      }
      break;
    case SelectorSpec::Kind::AttrEquals:
    case SelectorSpec::Kind::AttrAbove:
      try {
        picked = select_by_attribute(g, sel.attr,
                                     sel.kind == SelectorSpec::Kind::AttrEquals ? Compare::Equal : Compare::Above,
                                     sel.value);
      } catch (const std::invalid_argument& e) {
        throw BindError(q.select.name + ": " + e.what());
      }
      break;
  }
  for (auto v : picked) hubs.add(v, HubOrigin::Selected);
  state->hubs = hubs.hubs;
  const auto k = hubs.size();
  for (std::size_t i = 0; i < k; ++i) {
    const auto& v = g.vertex(hubs.hubs[i]);
    ha.hubs.push_back({root ? hubs.hubs[i] : state->view.vertices[hubs.hubs[i]], v.vid,
                       v.label.empty() ? std::to_string(v.vid) : v.label, v.grp, v.mr, hubs.origin[i]});
  }

  // tau bindings: aggregate functions the extraction has to carry.
  std::vector<SummarySpec> specs;
  std::vector<std::optional<std::size_t>> fn_of;
  std::vector<AggFunction> fns;
  for (const auto& c : q.summarize) {
    specs.push_back(bind_summary(c, opt.params));
    if (specs.back().kind == SummarySpec::Kind::RelationshipType) {
      fn_of.emplace_back();
    } else {
      fn_of.push_back(fns.size());
      fns.push_back(specs.back().fn);
    }
  }
  auto grouping = bind_grouping(q.group_by, opt.params);
  times.select = seconds_since(t0);

  // gamma: tags, then element values.
  auto clock = [] { return std::chrono::duration<double>(Clock::now().time_since_epoch()).count(); };
  std::vector<FunctionResult> results;
  std::vector<bool> present(k * k, false);
  if (!grouping.h) {
    t0 = Clock::now();
    std::optional<CondensedGraph> own;
    if (!root) own = condense_scc(g);
    const CondensedGraph& cg = root ? ds->condensed() : *own;
    std::vector<Index> hub_supers;
    for (auto h : hubs.hubs) hub_supers.push_back(cg.super_of(h));
    std::vector<Tag> tags = root && opt.use_index && ds->closure()
                                ? compute_tags_indexed(cg, hub_supers, *ds->closure())
                                : compute_tags_propagation(cg, hub_supers);
    times.tag = seconds_since(t0);

    t0 = Clock::now();
    std::optional cgf(cg.with_functions(g, fns));
    std::optional ex(extract_condensed(g, *cgf, tabulate_tags(g, *cgf, tags)));
    for (const auto& t : ex->vertex_tags.tags) t.for_each_pair([&](std::size_t x, std::size_t y) { present[x * k + y] = true; });
    times.extract = seconds_since(t0);
    results = aggregate_all(*ex, opt.strategy, opt.plan, ha.stats, clock);
    // Teardown is charged to the phase that built the data.
    t0 = Clock::now();
    ex.reset();
    cgf.reset();
    times.extract += seconds_since(t0);
    t0 = Clock::now();
    state->super_of.assign(cg.super_map().begin(), cg.super_map().end());
    state->super_tags = std::move(tags);
    own.reset();
    times.tag += seconds_since(t0);
  } else {
    t0 = Clock::now();
    auto masks = compute_tags_bounded(g, hubs.hubs, *grouping.h, grouping.mode);
    times.tag = seconds_since(t0);
    t0 = Clock::now();
    std::optional ex(extract_masked(g, masks, fns));
    for (const auto& t : ex->vertex_tags.tags) t.for_each_pair([&](std::size_t x, std::size_t y) { present[x * k + y] = true; });
    times.extract = seconds_since(t0);
    results = aggregate_all(*ex, opt.strategy, opt.plan, ha.stats, clock);
    t0 = Clock::now();
    ex.reset();
    times.extract += seconds_since(t0);
    state->masks = std::move(masks);
    state->bounded = true;
  }
  times.plan = ha.stats.plan_seconds;
  times.aggregate = ha.stats.aggregate_seconds;

  // HA-graph assembly with structural summaries.
  t0 = Clock::now();
  bool wants_paths = false;
  for (const auto& s : specs)
    wants_paths |= s.kind == SummarySpec::Kind::RelationshipType || s.kind == SummarySpec::Kind::RelationshipStrength;
  std::vector<std::vector<std::uint32_t>> to_hub(k);
  if (wants_paths)
    for (std::size_t y = 0; y < k; ++y) to_hub[y] = bfs_distances(g, hubs.hubs[y], Direction::Reverse);

  std::vector<std::shared_ptr<const FunctionResult>> shared;
  for (auto& r : results) shared.push_back(std::make_shared<const FunctionResult>(std::move(r)));

  std::vector<double> strengths;
  bool has_strength = false;
  for (std::size_t x = 0; x < k; ++x) {
    for (std::size_t y = 0; y < k; ++y) {
      if (x == y || !present[x * k + y]) continue;
      HAEdge edge{x, y, {}, 3};
      double strength = 0;
      for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto& spec = specs[i];
        switch (spec.kind) {
          case SummarySpec::Kind::Aggregate:
            edge.summaries.push_back({spec.name, TableSummary{shared[*fn_of[i]], x, y}});
            break;
          case SummarySpec::Kind::VertexCount:
            edge.summaries.push_back({spec.name, as_int(table_scalar(*shared[*fn_of[i]], x, y))});
            break;
          case SummarySpec::Kind::RelationshipStrength: {
            Strength s{static_cast<std::uint64_t>(as_int(table_scalar(*shared[*fn_of[i]], x, y))),
                       to_hub[y][hubs.hubs[x]]};
            strength = s.value();
            has_strength = true;
            edge.summaries.push_back({spec.name, s});
            break;
          }
          case SummarySpec::Kind::RelationshipType:
            edge.summaries.push_back({spec.name, shortest_path_summary(g, hubs.hubs[x], hubs.hubs[y], to_hub[y])});
            break;
        }
      }
      strengths.push_back(strength);
      ha.edges.push_back(std::move(edge));
    }
  }
  if (has_strength) {
    auto bands = width_bands(strengths);
    for (std::size_t i = 0; i < ha.edges.size(); ++i) ha.edges[i].width_band = bands[i];
  }
  ha.state = std::move(state);
  times.summarize = seconds_since(t0);
  times.total = seconds_since(t_start);
  return ha;
}

}  // namespace detail

/// Runs a GE-query over a dataset: pi view, sigma hubs (anchors included),
/// gamma tags, aggregation, then the HA-graph with per-phase times.
inline HAGraph execute(std::shared_ptr<const Dataset> ds, const GEQuery& q, const ExecOptions& opt = {}) {
  auto scope = detail::scope_of(*ds, q, opt.params);
  return detail::run(std::move(ds), q, opt, std::move(scope));
}

inline HAGraph execute(std::shared_ptr<const Dataset> ds, std::string_view text, const ExecOptions& opt = {}) {
  return execute(std::move(ds), parse_query(text), opt);
}

/// Parameters a zoom may change in the child query.
struct ZoomOverrides {
  std::optional<std::size_t> k;
  std::optional<std::uint32_t> h;
  std::optional<std::string> select;    // full selector call, e.g. "TopCloseness(3)"
  std::optional<std::string> group_by;  // full grouping call, e.g. "betweenness(4)"
};

namespace detail {

inline GEQuery child_query(const HAGraph& parent, const ZoomOverrides& o) {
  GEQuery q = parent.query;
  q.from = Source{std::nullopt, parent.id.empty() ? std::string("parent") : parent.id, ""};
  if (o.select) q.select = parse_call(*o.select, Role::Selector);
  if (o.k) {
    if (q.select.name != "TopMaxDegreeVertices" && q.select.name != "TopCloseness")
      throw BindError("k applies to top-k selectors only, not " + q.select.name);
    Literal lit{Literal::Kind::Int, std::to_string(*o.k), static_cast<std::int64_t>(*o.k)};
    if (q.select.args.empty())
      q.select.args.push_back(lit);
    else
      q.select.args[0] = lit;
  }
  if (o.group_by) q.group_by = parse_call(*o.group_by, Role::Grouping);
  if (o.h) {
    auto keep = q.group_by.args.size() > 1 ? std::optional<Literal>(q.group_by.args[1]) : std::nullopt;
    q.group_by.args = {Literal{Literal::Kind::Int, std::to_string(*o.h), static_cast<std::int64_t>(*o.h)}};
    if (keep) q.group_by.args.push_back(*keep);
  }
  return q;
}

inline void require_state(const HAGraph& parent) {
  if (!parent.state) throw std::logic_error("HA-graph has no extraction state to zoom into");
}

}  // namespace detail

/// Re-runs the parent's query over G'(x, y) with x and y as anchors.
inline HAGraph zoom_edge(const HAGraph& parent, VertexId x, VertexId y, const ZoomOverrides& o = {},
                         const ExecOptions& opt = {}) {
  detail::require_state(parent);
  const auto* e = parent.find_edge(x, y);
  if (!e)
    throw EdgeNotFound("no edge (" + std::to_string(x) + ", " + std::to_string(y) + ") in HA-graph " +
                       (parent.id.empty() ? "" : parent.id));
  detail::Scope scope{parent.state->edge_view(e->x, e->y), {parent.hubs[e->x].root, parent.hubs[e->y].root}};
  auto child = detail::run(parent.state->dataset, detail::child_query(parent, o), opt, std::move(scope));
  child.parent_id = parent.id;
  return child;
}

/// Re-runs the parent's query over the union of the induced subgraphs among
/// the chosen hubs, which become the anchors.
inline HAGraph zoom_subset(const HAGraph& parent, const std::vector<VertexId>& vids, const ZoomOverrides& o = {},
                           const ExecOptions& opt = {}) {
  detail::require_state(parent);
  if (vids.size() < 2) throw BindError("subset zoom needs at least two hubs");
  std::vector<std::size_t> pos;
  for (auto v : vids) {
    auto p = parent.hub_position(v);
    if (!p) throw EdgeNotFound("vertex " + std::to_string(v) + " is not a hub of this HA-graph");
    if (std::find(pos.begin(), pos.end(), *p) == pos.end()) pos.push_back(*p);
  }
  if (pos.size() < 2) throw BindError("subset zoom needs at least two distinct hubs");
  std::vector<SubgraphView> parts;
  for (const auto& e : parent.edges) {
    bool in_x = std::find(pos.begin(), pos.end(), e.x) != pos.end();
    bool in_y = std::find(pos.begin(), pos.end(), e.y) != pos.end();
    if (in_x && in_y) parts.push_back(parent.state->edge_view(e.x, e.y));
  }
  SubgraphView anchors_only;
  for (auto p : pos) anchors_only.vertices.push_back(parent.hubs[p].root);
  std::sort(anchors_only.vertices.begin(), anchors_only.vertices.end());
  std::vector<const SubgraphView*> ptrs{&anchors_only};
  for (const auto& p : parts) ptrs.push_back(&p);
  detail::Scope scope{unite(ptrs), {}};
  for (auto p : pos) scope.anchors.push_back(parent.hubs[p].root);
  auto child = detail::run(parent.state->dataset, detail::child_query(parent, o), opt, std::move(scope));
  child.parent_id = parent.id;
  return child;
}

}  // namespace hubex
