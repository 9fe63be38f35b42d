#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hubex/graph.hpp"
#include "hubex/reachability.hpp"

namespace hubex {

enum class HubOrigin { Selected, Anchor };

/// Hubs as graph indices, in display order, with how each got there.
struct HubSet {
  std::vector<Index> hubs;
  std::vector<HubOrigin> origin;

  std::size_t size() const noexcept { return hubs.size(); }
  bool contains(Index v) const { return std::find(hubs.begin(), hubs.end(), v) != hubs.end(); }

  /// Appends unless already present (an anchor keeps its Anchor origin).
  void add(Index v, HubOrigin o) {
    auto it = std::find(hubs.begin(), hubs.end(), v);
    if (it != hubs.end()) {
      if (o == HubOrigin::Anchor) origin[it - hubs.begin()] = o;
      return;
    }
    hubs.push_back(v);
    origin.push_back(o);
  }
};

enum class DegreeMode { Total, Out };

inline std::size_t degree_of(const AttributedGraph& g, Index v, DegreeMode mode) {
  return mode == DegreeMode::Out ? g.out_degree(v) : g.out_degree(v) + g.in_degree(v);
}

/// k vertices of largest degree, ties to the smaller vid.
inline std::vector<Index> top_max_degree(const AttributedGraph& g, std::size_t k,
                                         DegreeMode mode = DegreeMode::Total) {
  std::vector<Index> order(g.num_vertices());
  std::iota(order.begin(), order.end(), Index{0});
  k = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](Index a, Index b) {
                      auto da = degree_of(g, a, mode), db = degree_of(g, b, mode);
                      return da != db ? da > db : a < b;
                    });
  order.resize(k);
  return order;
}

/// reach / distance_sum, kept exact. Zero when nothing else is reachable.
struct Closeness {
  std::uint64_t reach = 0;
  std::uint64_t distance_sum = 0;

  double value() const {
    return distance_sum == 0 ? 0.0 : static_cast<double>(reach) / static_cast<double>(distance_sum);
  }
  friend bool operator==(const Closeness& a, const Closeness& b) {
    auto [an, ad] = a.ratio();
    auto [bn, bd] = b.ratio();
    return an * bd == bn * ad;
  }
  friend bool operator<(const Closeness& a, const Closeness& b) {
    auto [an, ad] = a.ratio();
    auto [bn, bd] = b.ratio();
    return an * bd < bn * ad;
  }

 private:
  std::pair<std::uint64_t, std::uint64_t> ratio() const {
    return distance_sum == 0 ? std::pair<std::uint64_t, std::uint64_t>{0, 1} : std::pair{reach, distance_sum};
  }
};

template <DirectedGraph G>
Closeness closeness_of(const G& g, Index v) {
  auto dist = bfs_distances(g, v, Direction::Forward);
  Closeness c;
  for (Index w = 0; w < dist.size(); ++w) {
    if (w == v || dist[w] == kUnreachable) continue;
    ++c.reach;
    c.distance_sum += dist[w];
  }
  return c;
}

namespace detail {
inline std::vector<Index> top_by_closeness(std::vector<std::pair<Index, Closeness>> scored,
                                           std::size_t k) {
  k = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(),
                    [](const auto& a, const auto& b) {
                      if (b.second < a.second) return true;
                      if (a.second < b.second) return false;
                      return a.first < b.first;
                    });
  std::vector<Index> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(scored[i].first);
  return out;
}
}  // namespace detail

/// Closeness recomputed inside the given graph (one BFS per vertex).
inline std::vector<Index> top_closeness_dynamic(const AttributedGraph& g, std::size_t k) {
  if (k == 0) return {};
  std::vector<std::pair<Index, Closeness>> scored;
  scored.reserve(g.num_vertices());
  for (Index v = 0; v < g.num_vertices(); ++v) scored.emplace_back(v, closeness_of(g, v));
  return detail::top_by_closeness(std::move(scored), k);
}

/// Closeness computed once on a root graph, kept ordered by value (highest
/// first, ties by vid) so top-k over any subset is a prefix scan.
class StaticClosenessIndex {
 public:
  StaticClosenessIndex() = default;
  explicit StaticClosenessIndex(const AttributedGraph& root) {
    values_.reserve(root.num_vertices());
    for (Index v = 0; v < root.num_vertices(); ++v) values_.push_back(closeness_of(root, v));
    ranked_.resize(values_.size());
    std::iota(ranked_.begin(), ranked_.end(), Index{0});
    std::stable_sort(ranked_.begin(), ranked_.end(),
                     [&](Index a, Index b) { return values_[b] < values_[a]; });
  }

  const Closeness& value(Index root_vertex) const { return values_.at(root_vertex); }
  std::span<const Index> ranking() const noexcept { return ranked_; }

  /// Top k root vertices accepted by `keep`.
  std::vector<Index> top(std::size_t k, const std::function<bool(Index)>& keep) const {
    std::vector<Index> out;
    for (auto v : ranked_) {
      if (out.size() >= k) break;
      if (keep(v)) out.push_back(v);
    }
    return out;
  }

 private:
  std::vector<Closeness> values_;
  std::vector<Index> ranked_;
};

enum class Compare { Equal, Above };

class UnknownAttribute : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Vertices whose attribute satisfies the comparison, in vid order.
/// Attributes: vid, v_grp, v_mr (numeric) and name/label (string).
inline std::vector<Index> select_by_attribute(const AttributedGraph& g, const std::string& attr,
                                              Compare cmp, const std::string& value) {
  std::vector<Index> out;
  if (attr == "name" || attr == "label") {
    for (Index v = 0; v < g.num_vertices(); ++v) {
      const auto& l = g.vertex(v).label;
      if (cmp == Compare::Equal ? l == value : l > value) out.push_back(v);
    }
    return out;
  }
  std::function<std::int64_t(const Vertex&)> get;
  if (attr == "vid")
    get = [](const Vertex& v) { return static_cast<std::int64_t>(v.vid); };
  else if (attr == "v_grp")
    get = [](const Vertex& v) { return static_cast<std::int64_t>(v.grp); };
  else if (attr == "v_mr")
    get = [](const Vertex& v) { return v.mr; };
  else
    throw UnknownAttribute("unknown vertex attribute '" + attr + "'");
  auto target = detail::parse_number<std::int64_t>(value);
  if (!target) throw std::invalid_argument("attribute " + attr + " needs an integer, got '" + value + "'");
  for (Index v = 0; v < g.num_vertices(); ++v) {
    auto x = get(g.vertex(v));
    if (cmp == Compare::Equal ? x == *target : x > *target) out.push_back(v);
  }
  return out;
}

}  // namespace hubex
