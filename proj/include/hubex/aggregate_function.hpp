#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hubex/graph.hpp"

namespace hubex {

enum class ElementKind { Vertex, Edge };

enum class Combine { Sum, Count, Min, Max, Avg };

/// Group-by dimensions. Edges see the v_grp of their source vertex (the
/// vertex attribute join); vertices carry no edge group, so their e_grp
/// coordinate is always 0. EMrBucket groups edges into Low/Middle/High by e_mr.
enum class GroupBy { None, VGrp, EGrp, VGrpEGrp, EMrBucket };

/// Packed group key. Meaning of the two halves depends on GroupBy.
struct GroupKey {
  std::uint64_t packed = 0;

  static constexpr GroupKey of(std::uint32_t hi, std::uint32_t lo) {
    return {(static_cast<std::uint64_t>(hi) << 32) | lo};
  }
  constexpr std::uint32_t hi() const { return static_cast<std::uint32_t>(packed >> 32); }
  constexpr std::uint32_t lo() const { return static_cast<std::uint32_t>(packed); }

  friend constexpr auto operator<=>(GroupKey, GroupKey) = default;
};

struct GroupKeyHash {
  std::size_t operator()(GroupKey k) const noexcept {
    std::uint64_t x = k.packed + 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return static_cast<std::size_t>(x ^ (x >> 31));
  }
};

/// Partial aggregate. `value` is the running SUM/COUNT/MIN/MAX; `count` is
/// the number of contributing elements (AVG is value/count at read time).
struct Partial {
  std::int64_t value = 0;
  std::int64_t count = 0;

  friend constexpr bool operator==(const Partial&, const Partial&) = default;
};

inline constexpr Partial lift(Combine op, Measure m) {
  return op == Combine::Count ? Partial{1, 1} : Partial{m, 1};
}

inline constexpr void combine_into(Combine op, Partial& acc, const Partial& x) {
  switch (op) {
    case Combine::Sum:
    case Combine::Count:
    case Combine::Avg:
      acc.value += x.value;
      break;
    case Combine::Min:
      acc.value = std::min(acc.value, x.value);
      break;
    case Combine::Max:
      acc.value = std::max(acc.value, x.value);
      break;
  }
  acc.count += x.count;
}

using FinalValue = std::variant<std::int64_t, double>;

inline FinalValue finalize(Combine op, const Partial& p) {
  if (op == Combine::Avg)
    return p.count == 0 ? 0.0 : static_cast<double>(p.value) / static_cast<double>(p.count);
  return p.value;
}

/// Thresholds for the Low / Middle / High bucketing of e_mr.
struct Buckets {
  Measure low_max = 4;     // e_mr <= low_max  -> Low
  Measure middle_max = 19; // e_mr <= middle_max -> Middle, above -> High

  std::uint32_t of(Measure m) const { return m <= low_max ? 0U : m <= middle_max ? 1U : 2U; }
  static const char* name(std::uint32_t b) {
    static const char* names[] = {"Low", "Middle", "High"};
    return b < 3 ? names[b] : "?";
  }
};

struct AggFunction {
  std::string name;
  ElementKind kind = ElementKind::Vertex;
  Combine op = Combine::Sum;
  GroupBy dims = GroupBy::None;
  Buckets buckets{};

  GroupKey vertex_key(const Vertex& v) const {
    switch (dims) {
      case GroupBy::VGrp:
      case GroupBy::VGrpEGrp:
        return GroupKey::of(v.grp, 0);
      default:
        return {};
    }
  }

  GroupKey edge_key(const AttributedGraph& g, const Edge& e) const {
    switch (dims) {
      case GroupBy::None:
        return {};
      case GroupBy::VGrp:
        return GroupKey::of(g.vertex(e.src).grp, 0);
      case GroupBy::EGrp:
        return GroupKey::of(0, e.grp);
      case GroupBy::VGrpEGrp:
        return GroupKey::of(g.vertex(e.src).grp, e.grp);
      case GroupBy::EMrBucket:
        return GroupKey::of(buckets.of(e.mr), 0);
    }
    return {};
  }

  Partial vertex_value(const Vertex& v) const { return lift(op, v.mr); }
  Partial edge_value(const Edge& e) const { return lift(op, e.mr); }
};

inline AggFunction vertex_function(std::string name, Combine op, GroupBy dims) {
  if (dims == GroupBy::EMrBucket) throw std::invalid_argument("e_mr buckets apply to edges only");
  return AggFunction{std::move(name), ElementKind::Vertex, op, dims, {}};
}

inline AggFunction edge_function(std::string name, Combine op, GroupBy dims,
                                 Buckets buckets = {}) {
  return AggFunction{std::move(name), ElementKind::Edge, op, dims, buckets};
}

/// Keyed partial values sorted by key.
using PartialTable = std::vector<std::pair<GroupKey, Partial>>;

/// Folds (key, value) pairs into a sorted table.
inline PartialTable fold_table(Combine op, std::vector<std::pair<GroupKey, Partial>> items) {
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  PartialTable out;
  for (auto& [k, p] : items) {
    if (!out.empty() && out.back().first == k)
      combine_into(op, out.back().second, p);
    else
      out.emplace_back(k, p);
  }
  return out;
}

}  // namespace hubex
