#pragma once

#include <concepts>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "hubex/condense.hpp"
#include "hubex/reachability.hpp"

namespace hubex {

// ---------------------------------------------------------------------------
// Bit helpers

struct BitsHash {
  std::size_t operator()(const Bits& b) const noexcept {
    std::size_t h = std::hash<std::size_t>{}(b.size());
    for (auto i = b.find_first(); i != Bits::npos; i = b.find_next(i))
      h ^= std::hash<std::size_t>{}(i) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

/// Compares the ascending lists of set positions lexicographically.
inline int lex_compare(const Bits& a, const Bits& b) {
  auto i = a.find_first(), j = b.find_first();
  while (true) {
    if (i == Bits::npos && j == Bits::npos) return 0;
    if (i == Bits::npos) return -1;  // a is a prefix of b
    if (j == Bits::npos) return 1;
    if (i != j) return i < j ? -1 : 1;
    i = a.find_next(i);
    j = b.find_next(j);
  }
}

inline std::string bits_to_list(const Bits& b, std::span<const std::string> names = {}) {
  std::string out;
  for (auto i = b.find_first(); i != Bits::npos; i = b.find_next(i)) {
    if (!out.empty()) out += ',';
    out += i < names.size() ? names[i] : std::to_string(i);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tag: hubs reaching an element (S) and hubs the element reaches (R).
// The element belongs to G'(x, y) for every x in S, y in R with x != y.

struct Tag {
  Bits S;
  Bits R;

  Tag() = default;
  explicit Tag(std::size_t hubs) : S(hubs), R(hubs) {}
  Tag(Bits s, Bits r) : S(std::move(s)), R(std::move(r)) {}

  std::size_t hubs() const noexcept { return S.size(); }

  /// Number of ordered hub pairs (x, y), x != y, in S x R.
  std::uint64_t cardinality() const {
    const auto cs = S.count(), cr = R.count();
    if (cs == 0 || cr == 0) return 0;
    thread_local Bits both;
    both = S;
    both &= R;
    return cs * cr - both.count();
  }

  bool contains(std::size_t x, std::size_t y) const { return x != y && S.test(x) && R.test(y); }

  template <class F>
  void for_each_pair(F&& f) const {
    for (auto x = S.find_first(); x != Bits::npos; x = S.find_next(x))
      for (auto y = R.find_first(); y != Bits::npos; y = R.find_next(y))
        if (x != y) f(x, y);
  }

  /// "<1,2,3><4,5>" with hub positions, or with the supplied hub names.
  std::string to_string(std::span<const std::string> names = {}) const {
    return "<" + bits_to_list(S, names) + "><" + bits_to_list(R, names) + ">";
  }

  friend bool operator==(const Tag&, const Tag&) = default;
};

struct TagHash {
  std::size_t operator()(const Tag& t) const noexcept {
    return BitsHash{}(t.S) * 31 + BitsHash{}(t.R);
  }
};

/// Subgraphs two tags have in common.
inline Tag shared_component(const Tag& a, const Tag& b) { return {a.S & b.S, a.R & b.R}; }

/// Cardinality of shared_component(a, b) without building it.
inline std::uint64_t shared_cardinality(const Tag& a, const Tag& b) {
  thread_local Bits s, r;
  s = a.S;
  s &= b.S;
  r = a.R;
  r &= b.R;
  const auto cs = s.count(), cr = r.count();
  if (cs == 0 || cr == 0) return 0;
  s &= r;
  return cs * cr - s.count();
}

/// Pairs of `t` not in `sub`, as at most two rectangles:
/// (S - S_sub) x R  and  S_sub x (R - R_sub). Requires sub.S <= t.S, sub.R <= t.R.
inline std::vector<Tag> subtract(const Tag& t, const Tag& sub) {
  std::vector<Tag> out;
  out.reserve(2);
  Bits s = t.S - sub.S;
  if (s.any() && t.R.any()) {
    Tag first{std::move(s), t.R};
    if (first.cardinality() > 0) out.push_back(std::move(first));
  }
  Bits r = t.R - sub.R;
  if (r.any() && sub.S.any()) {
    Tag second{sub.S, std::move(r)};
    if (second.cardinality() > 0) out.push_back(std::move(second));
  }
  return out;
}

/// Lexicographic order on S, then R.
inline bool lex_less(const Tag& a, const Tag& b) {
  if (int c = lex_compare(a.S, b.S)) return c < 0;
  return lex_compare(a.R, b.R) < 0;
}

/// Planner order: larger cardinality first, then S, then R lexicographically.
inline bool plan_order_less(const Tag& a, const Tag& b) {
  auto ca = a.cardinality(), cb = b.cardinality();
  if (ca != cb) return ca > cb;
  return lex_less(a, b);
}

// ---------------------------------------------------------------------------
// PairMask: explicit set of ordered hub pairs, used when membership is not a
// product of independent S and R sets (hop-bounded betweenness).

struct PairMask {
  std::size_t k = 0;
  Bits bits;

  PairMask() = default;
  explicit PairMask(std::size_t hubs) : k(hubs), bits(hubs * hubs) {}

  std::size_t hubs() const noexcept { return k; }
  std::uint64_t cardinality() const { return bits.count(); }
  bool contains(std::size_t x, std::size_t y) const { return bits.test(x * k + y); }
  void set(std::size_t x, std::size_t y) {
    if (x != y) bits.set(x * k + y);
  }

  template <class F>
  void for_each_pair(F&& f) const {
    for (auto i = bits.find_first(); i != Bits::npos; i = bits.find_next(i)) f(i / k, i % k);
  }

  std::string to_string(std::span<const std::string> names = {}) const {
    std::string out = "{";
    bool first = true;
    for_each_pair([&](std::size_t x, std::size_t y) {
      if (!first) out += ' ';
      first = false;
      auto nm = [&](std::size_t h) { return h < names.size() ? names[h] : std::to_string(h); };
      out += "(" + nm(x) + "," + nm(y) + ")";
    });
    return out + "}";
  }

  friend bool operator==(const PairMask&, const PairMask&) = default;
};

struct PairMaskHash {
  std::size_t operator()(const PairMask& m) const noexcept { return BitsHash{}(m.bits); }
};

inline PairMask shared_component(const PairMask& a, const PairMask& b) {
  PairMask m(a.k);
  m.bits = a.bits & b.bits;
  return m;
}

inline std::uint64_t shared_cardinality(const PairMask& a, const PairMask& b) {
  thread_local Bits m;
  m = a.bits;
  m &= b.bits;
  return m.count();
}

inline std::vector<PairMask> subtract(const PairMask& t, const PairMask& sub) {
  PairMask m(t.k);
  m.bits = t.bits - sub.bits;
  if (m.cardinality() == 0) return {};
  return {m};
}

inline bool lex_less(const PairMask& a, const PairMask& b) { return lex_compare(a.bits, b.bits) < 0; }

inline bool plan_order_less(const PairMask& a, const PairMask& b) {
  auto ca = a.cardinality(), cb = b.cardinality();
  if (ca != cb) return ca > cb;
  return lex_less(a, b);
}

inline PairMask to_pair_mask(const Tag& t) {
  PairMask m(t.hubs());
  t.for_each_pair([&](std::size_t x, std::size_t y) { m.set(x, y); });
  return m;
}

/// What the aggregation planner needs from a membership representation.
template <class T>
concept Membership = std::equality_comparable<T> && requires(const T& a, const T& b) {
  { a.cardinality() } -> std::convertible_to<std::uint64_t>;
  { a.hubs() } -> std::convertible_to<std::size_t>;
  { shared_component(a, b) } -> std::same_as<T>;
  { shared_cardinality(a, b) } -> std::convertible_to<std::uint64_t>;
  { subtract(a, b) } -> std::same_as<std::vector<T>>;
  { plan_order_less(a, b) } -> std::same_as<bool>;
  { lex_less(a, b) } -> std::same_as<bool>;
  { a.contains(std::size_t{}, std::size_t{}) } -> std::same_as<bool>;
};

// ---------------------------------------------------------------------------
// Tag computation over a condensed DAG. `hubs` are super-vertex ids; several
// hubs may share one super-vertex.

namespace detail {
inline void check_hubs(std::span<const Index> hubs, std::size_t n) {
  for (auto h : hubs)
    if (h >= n) throw std::out_of_range("hub " + std::to_string(h) + " is not in the graph");
}
}  // namespace detail

/// S(v) = {i : hub_i reaches v}, R(v) = {i : v reaches hub_i}, by index probes.
template <ReachabilityIndex I>
std::vector<Tag> compute_tags_indexed(const CondensedGraph& g, std::span<const Index> hubs,
                                      const I& index) {
  const auto n = g.num_vertices();
  detail::check_hubs(hubs, n);
  std::vector<Tag> tags(n, Tag(hubs.size()));
  for (Index v = 0; v < n; ++v) {
    for (std::size_t i = 0; i < hubs.size(); ++i) {
      if (index.reaches(hubs[i], v)) tags[v].S.set(i);
      if (index.reaches(v, hubs[i])) tags[v].R.set(i);
    }
  }
  return tags;
}

/// Same result without an index: S pushed along topological order, R along
/// the reverse order.
template <DirectedGraph G>
std::vector<Tag> compute_tags_propagation(const G& dag, std::span<const Index> hubs) {
  const auto n = dag.num_vertices();
  detail::check_hubs(hubs, n);
  std::vector<Tag> tags(n, Tag(hubs.size()));
  for (std::size_t i = 0; i < hubs.size(); ++i) {
    tags[hubs[i]].S.set(i);
    tags[hubs[i]].R.set(i);
  }
  auto order = topological_order(dag);
  for (auto v : order)
    for (auto w : dag.successors(v)) tags[w].S |= tags[v].S;
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    for (auto w : dag.successors(*it)) tags[*it].R |= tags[w].R;
  return tags;
}

/// Tag of edge (s, t): S of its source, R of its target.
inline Tag edge_tag(std::span<const Tag> tags, Index s, Index t) {
  return {tags[s].S, tags[t].R};
}

enum class HopBound {
  Total,   // dist(x, v) + dist(v, y) <= h
  PerSide  // dist(x, v) <= h and dist(v, y) <= h
};

/// Hop-bounded betweenness over any directed graph (cycles allowed): v is in
/// G'(x, y) when it lies within the hop budget between the two hubs.
/// `hubs` are vertex ids of `g`.
template <DirectedGraph G>
std::vector<PairMask> compute_tags_bounded(const G& g, std::span<const Index> hubs,
                                           std::uint32_t h, HopBound mode = HopBound::Total) {
  const auto n = g.num_vertices();
  detail::check_hubs(hubs, n);
  const auto k = hubs.size();
  std::vector<std::vector<std::uint32_t>> from(k), to(k);
  for (std::size_t i = 0; i < k; ++i) {
    from[i] = bfs_distances(g, hubs[i], Direction::Forward, h);
    to[i] = bfs_distances(g, hubs[i], Direction::Reverse, h);
  }
  std::vector<PairMask> masks(n, PairMask(k));
  for (Index v = 0; v < n; ++v) {
    for (std::size_t x = 0; x < k; ++x) {
      auto dx = from[x][v];
      if (dx == kUnreachable) continue;
      for (std::size_t y = 0; y < k; ++y) {
        auto dy = to[y][v];
        if (x == y || dy == kUnreachable) continue;
        bool in = mode == HopBound::Total ? dx + dy <= h : (dx <= h && dy <= h);
        if (in) masks[v].set(x, y);
      }
    }
  }
  return masks;
}

// ---------------------------------------------------------------------------
// Distinct tags shared by many elements.

template <class T>
struct TagTable {
  std::vector<T> tags;              // distinct memberships
  std::vector<std::uint32_t> of;    // element -> position in `tags`
};

/// Deduplicates per-element memberships.
template <class T, class Hash>
TagTable<T> dedupe_tags(std::vector<T> per_element) {
  TagTable<T> table;
  std::unordered_map<T, std::uint32_t, Hash> ids;
  table.of.reserve(per_element.size());
  for (auto& t : per_element) {
    auto [it, fresh] = ids.try_emplace(t, static_cast<std::uint32_t>(table.tags.size()));
    if (fresh) table.tags.push_back(std::move(t));
    table.of.push_back(it->second);
  }
  return table;
}

/// Vertex and edge tag tables over a condensed graph. Vertex elements are
/// super-vertices. Edge elements are the inter-component edges (in
/// CondensedGraph::inter_edges order) followed by one intra-component
/// element per super-vertex.
struct BetweennessTags {
  std::vector<Tag> per_super;
  TagTable<Tag> vertices;
  TagTable<Tag> edges;
};

inline BetweennessTags tabulate_tags(const AttributedGraph& g, const CondensedGraph& cg,
                                     std::vector<Tag> per_super) {
  BetweennessTags out;
  const auto n = cg.num_vertices();
  // Distinct S and R sets; an edge tag is identified by (S id of source, R id of target).
  std::unordered_map<Bits, std::uint32_t, BitsHash> s_ids, r_ids;
  std::vector<const Bits*> s_sets, r_sets;
  std::vector<std::uint32_t> sid(n), rid(n);
  for (Index s = 0; s < n; ++s) {
    auto [a, fa] = s_ids.try_emplace(per_super[s].S, static_cast<std::uint32_t>(s_sets.size()));
    if (fa) s_sets.push_back(&a->first);
    sid[s] = a->second;
    auto [b, fb] = r_ids.try_emplace(per_super[s].R, static_cast<std::uint32_t>(r_sets.size()));
    if (fb) r_sets.push_back(&b->first);
    rid[s] = b->second;
  }
  auto tabulate = [&](auto key_of, std::size_t count) {
    TagTable<Tag> table;
    std::unordered_map<std::uint64_t, std::uint32_t> ids;
    table.of.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      auto [si, ri] = key_of(i);
      auto key = (static_cast<std::uint64_t>(si) << 32) | ri;
      auto [it, fresh] = ids.try_emplace(key, static_cast<std::uint32_t>(table.tags.size()));
      if (fresh) table.tags.emplace_back(*s_sets[si], *r_sets[ri]);
      table.of.push_back(it->second);
    }
    return table;
  };
  out.vertices = tabulate([&](std::size_t s) { return std::pair{sid[s], rid[s]}; }, n);
  auto inter = cg.inter_edges();
  out.edges = tabulate(
      [&](std::size_t i) {
        if (i < inter.size()) {
          const auto& e = g.edge(inter[i]);
          return std::pair{sid[cg.super_of(e.src)], rid[cg.super_of(e.tgt)]};
        }
        auto s = static_cast<Index>(i - inter.size());
        return std::pair{sid[s], rid[s]};
      },
      inter.size() + n);
  out.per_super = std::move(per_super);
  return out;
}

}  // namespace hubex
