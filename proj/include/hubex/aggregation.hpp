#pragma once

#include <algorithm>
#include <bit>
#include <type_traits>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <absl/container/flat_hash_map.h>

#include "hubex/aggregate_function.hpp"
#include "hubex/tags.hpp"

namespace hubex {

/// Add-operation counts. A delivery is one keyed partial value added into one
/// subgraph accumulator; a merge is one value folded into a shared
/// pre-aggregate (same-tag group or cluster) that already holds a value.
struct AddOps {
  std::uint64_t merges = 0;
  std::uint64_t deliveries = 0;

  std::uint64_t total() const noexcept { return merges + deliveries; }
  AddOps& operator+=(const AddOps& o) {
    merges += o.merges;
    deliveries += o.deliveries;
    return *this;
  }
  friend bool operator==(const AddOps&, const AddOps&) = default;
};

/// Keyed partial values, each belonging to an element with a tag.
struct ElementValues {
  std::vector<std::uint32_t> tag;
  std::vector<GroupKey> key;
  std::vector<Partial> value;

  std::size_t size() const noexcept { return tag.size(); }
  void push(std::uint32_t t, GroupKey k, Partial p) {
    tag.push_back(t);
    key.push_back(k);
    value.push_back(p);
  }
};

using Cell = absl::flat_hash_map<GroupKey, Partial, GroupKeyHash>;

/// Result of one aggregate function over every ordered hub pair.
struct FunctionResult {
  AggFunction fn;
  std::size_t hubs = 0;
  std::vector<Cell> cells;  // row-major (x, y)
  AddOps ops;

  FunctionResult() = default;
  FunctionResult(AggFunction f, std::size_t k) : fn(std::move(f)), hubs(k), cells(k * k) {}

  const Cell& at(std::size_t x, std::size_t y) const { return cells[x * hubs + y]; }

  void add(std::size_t x, std::size_t y, GroupKey key, const Partial& p) {
    auto [it, fresh] = cells[x * hubs + y].try_emplace(key, p);
    if (!fresh) combine_into(fn.op, it->second, p);
    ++ops.deliveries;
  }

  /// Rows sorted by key for stable output.
  PartialTable rows(std::size_t x, std::size_t y) const {
    const auto& c = at(x, y);
    PartialTable out(c.begin(), c.end());
    std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.first < b.first; });
    return out;
  }

  /// Value equality of every cell (ignores add-op counts).
  bool same_values(const FunctionResult& o) const { return hubs == o.hubs && cells == o.cells; }
};

// ---------------------------------------------------------------------------
// Shared nothing: every element goes to every subgraph in its tag.

template <Membership T>
FunctionResult sn_aggregate(std::span<const T> tags, const ElementValues& values,
                            const AggFunction& fn, std::optional<std::size_t> hubs = {}) {
  const std::size_t k = hubs ? *hubs : tags.empty() ? 0 : tags.front().hubs();
  FunctionResult out(fn, k);
  for (std::size_t i = 0; i < values.size(); ++i) {
    tags[values.tag[i]].for_each_pair(
        [&](std::size_t x, std::size_t y) { out.add(x, y, values.key[i], values.value[i]); });
  }
  return out;
}

// ---------------------------------------------------------------------------
// Aggregation sharing

/// Net benefit of admitting a tag into a cluster with common tag `ct` and
/// `size` members: |ct & nt| * (size + 1) - |ct| * size.
template <Membership T>
std::int64_t saving(const T& ct, std::size_t size, const T& nt) {
  auto shared = static_cast<std::int64_t>(shared_cardinality(ct, nt));
  auto sz = static_cast<std::int64_t>(size);
  return shared * (sz + 1) - static_cast<std::int64_t>(ct.cardinality()) * sz;
}

enum class Admission {
  PositiveSaving,  // join the best cluster only when its saving is > 0
  AnyShared        // join the best cluster whenever the shared component is non-empty
};

struct PlanOptions {
  /// Tags with cardinality below this are routed directly (0 disables the gate).
  std::uint64_t threshold = 3;
  Admission admission = Admission::PositiveSaving;
};

template <Membership T>
struct AggPlan {
  /// Route a group's pre-aggregate straight to its subgraphs.
  struct Direct {
    std::uint32_t group;  // delivered under its own tag, groups[group]
  };
  /// Start a cluster whose common tag is the group's tag.
  struct Open {
    std::uint32_t cluster;
    std::uint32_t group;
  };
  /// Admit a group: the cluster's current combined value goes to `shrink`
  /// (old common tag minus new), the group's own value goes to
  /// `differential` (its tag minus new common tag), then the group is folded
  /// into the cluster.
  struct Admit {
    std::uint32_t cluster;
    std::uint32_t group;
    std::int64_t saving;
    std::vector<T> shrink;
    std::vector<T> differential;
  };
  /// Route the cluster's combined value to its final common tag.
  struct Close {
    std::uint32_t cluster;
    T common;
  };
  using Step = std::variant<Direct, Open, Admit, Close>;

  std::size_t hubs = 0;
  std::vector<T> groups;  // group id -> tag
  std::vector<Step> steps;
  std::size_t clusters = 0;
  PlanOptions options;
  /// Deliveries and merges if every pre-aggregate were a single value.
  std::uint64_t predicted_deliveries = 0;
  std::uint64_t predicted_merges = 0;
};

namespace detail {

/// A tag's S and R as single words; valid when there are at most 64 hubs.
struct TagWords {
  std::uint64_t S = 0, R = 0;
};

inline std::uint64_t word_of(const Bits& b) {
  std::uint64_t w = 0;
  boost::to_block_range(b, &w);
  return w;
}

template <Membership T>
constexpr bool word_sized(std::size_t hubs) {
  return std::is_same_v<T, Tag> && hubs <= 64;
}

template <Membership T>
TagWords words_of(const T& t) {
  if constexpr (std::is_same_v<T, Tag>)
    return {word_of(t.S), word_of(t.R)};
  else
    return {};
}

/// lex_compare on single words.
inline int lex_compare(std::uint64_t a, std::uint64_t b) {
  if (a == b) return 0;
  const auto p = std::countr_zero(a ^ b);
  const bool a_has = (a >> p) & 1;
  const auto other = a_has ? b : a;
  const bool other_ends = (other >> p) == 0;  // the other list is a prefix
  return a_has == other_ends ? 1 : -1;
}

inline bool lex_less(TagWords a, TagWords b) {
  if (int c = lex_compare(a.S, b.S)) return c < 0;
  return lex_compare(a.R, b.R) < 0;
}

inline std::uint64_t shared_cardinality(TagWords a, TagWords b) {
  auto s = a.S & b.S, r = a.R & b.R;
  return static_cast<std::uint64_t>(std::popcount(s)) * static_cast<std::uint64_t>(std::popcount(r)) -
         static_cast<std::uint64_t>(std::popcount(s & r));
}

inline std::uint64_t cardinality(TagWords t) { return shared_cardinality(t, t); }

inline Tag tag_of(TagWords t, std::size_t hubs) { return Tag{Bits(hubs, t.S), Bits(hubs, t.R)}; }

// Word-level counterpart of subtract(Tag, Tag); adds the pieces'
// cardinalities to `total`.
inline std::vector<Tag> subtract(TagWords t, TagWords sub, std::size_t hubs, std::uint64_t& total) {
  std::vector<Tag> out;
  TagWords first{t.S & ~sub.S, t.R}, second{sub.S, t.R & ~sub.R};
  auto c1 = cardinality(first), c2 = cardinality(second);
  out.reserve((c1 > 0) + (c2 > 0));
  if (c1 > 0) out.push_back(tag_of(first, hubs));
  if (c2 > 0) out.push_back(tag_of(second, hubs));
  total += c1 + c2;
  return out;
}

template <Membership T>
std::uint64_t total_cardinality(const std::vector<T>& pieces) {
  std::uint64_t n = 0;
  for (const auto& p : pieces) n += p.cardinality();
  return n;
}
}  // namespace detail

/// Plans aggregation over distinct tags (one group per tag). Groups whose
/// `present` flag is false (no elements) or whose cardinality is zero are
/// skipped. Tags are visited by descending cardinality; tags below the
/// threshold are routed directly, the rest join the cluster with the best
/// saving or open a new one.
template <Membership T>
AggPlan<T> build_as_plan(std::span<const T> tags, PlanOptions options = {},
                         const std::vector<bool>& present = {}) {
  AggPlan<T> plan;
  plan.options = options;
  plan.hubs = tags.empty() ? 0 : tags.front().hubs();
  plan.groups.assign(tags.begin(), tags.end());

  const bool words = detail::word_sized<T>(plan.hubs);
  std::vector<std::uint32_t> order;
  std::vector<std::uint64_t> cards(tags.size(), 0);
  std::vector<detail::TagWords> tag_words(words ? tags.size() : 0);
  for (std::uint32_t g = 0; g < tags.size(); ++g) {
    if (!present.empty() && !present[g]) continue;
    if (words) {
      tag_words[g] = detail::words_of(tags[g]);
      cards[g] = detail::cardinality(tag_words[g]);
    } else {
      cards[g] = tags[g].cardinality();
    }
    if (cards[g] == 0) continue;
    order.push_back(g);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (cards[a] != cards[b]) return cards[a] > cards[b];
    return words ? detail::lex_less(tag_words[a], tag_words[b]) : lex_less(tags[a], tags[b]);
  });
  plan.steps.reserve(order.size() + order.size() / 4);

  struct Cluster {
    T common;
    std::size_t size;
    std::int64_t card;  // common.cardinality()
  };
  std::vector<Cluster> clusters;
  // Word-sized tags: common tags, sizes and cardinalities packed for the scan.
  std::vector<std::uint64_t> cs, cr;
  std::vector<std::int64_t> csize, ccard;

  for (auto g : order) {
    const T& nt = tags[g];
    const auto card = cards[g];
    if (card < options.threshold) {
      plan.steps.push_back(typename AggPlan<T>::Direct{g});
      plan.predicted_deliveries += card;
      continue;
    }
    std::size_t best = clusters.size();
    std::int64_t best_saving = 0;
    std::uint64_t best_shared = 0;
    if (words) {
      const auto nw = tag_words[g];
      for (std::size_t c = 0; c < cs.size(); ++c) {
        auto sh = detail::shared_cardinality({cs[c], cr[c]}, nw);
        auto sv = static_cast<std::int64_t>(sh) * (csize[c] + 1) - ccard[c] * csize[c];
        if (best == clusters.size() || sv > best_saving) {
          best = c;
          best_saving = sv;
          best_shared = sh;
        }
      }
    } else {
      for (std::size_t c = 0; c < clusters.size(); ++c) {
        const auto& cl = clusters[c];
        auto sh = shared_cardinality(cl.common, nt);
        auto sz = static_cast<std::int64_t>(cl.size);
        auto sv = static_cast<std::int64_t>(sh) * (sz + 1) - cl.card * sz;
        if (best == clusters.size() || sv > best_saving) {
          best = c;
          best_saving = sv;
          best_shared = sh;
        }
      }
    }
    bool join = best < clusters.size() &&
                (options.admission == Admission::PositiveSaving ? best_saving > 0
                                                                : best_shared > 0);
    if (!join) {
      plan.steps.push_back(
          typename AggPlan<T>::Open{static_cast<std::uint32_t>(clusters.size()), g});
      clusters.push_back({words ? T{} : nt, 1, static_cast<std::int64_t>(card)});
      if (words) {
        cs.push_back(tag_words[g].S);
        cr.push_back(tag_words[g].R);
        csize.push_back(1);
        ccard.push_back(static_cast<std::int64_t>(card));
      }
      continue;
    }
    auto& cl = clusters[best];
    if constexpr (std::is_same_v<T, Tag>) {
      if (words) {
        const auto nw = tag_words[g];
        const detail::TagWords cw{cs[best], cr[best]}, sw{cw.S & nw.S, cw.R & nw.R};
        typename AggPlan<T>::Admit step{static_cast<std::uint32_t>(best), g, best_saving,
                                        detail::subtract(cw, sw, plan.hubs, plan.predicted_deliveries),
                                        detail::subtract(nw, sw, plan.hubs, plan.predicted_deliveries)};
        plan.predicted_merges += 1;
        plan.steps.push_back(std::move(step));
        cs[best] = sw.S;
        cr[best] = sw.R;
        cl.card = static_cast<std::int64_t>(detail::cardinality(sw));
        cl.size += 1;
        csize[best] += 1;
        ccard[best] = cl.card;
        continue;
      }
    }
    T st = shared_component(cl.common, nt);
    typename AggPlan<T>::Admit step{static_cast<std::uint32_t>(best), g, best_saving,
                                    subtract(cl.common, st), subtract(nt, st)};
    plan.predicted_deliveries +=
        detail::total_cardinality(step.shrink) + detail::total_cardinality(step.differential);
    plan.predicted_merges += 1;
    plan.steps.push_back(std::move(step));
    cl.common = std::move(st);
    cl.card = static_cast<std::int64_t>(cl.common.cardinality());
    cl.size += 1;
    if (words) {
      cs[best] &= tag_words[g].S;
      cr[best] &= tag_words[g].R;
      csize[best] += 1;
      ccard[best] = cl.card;
    }
  }
  for (std::uint32_t c = 0; c < clusters.size(); ++c) {
    if constexpr (std::is_same_v<T, Tag>) {
      if (words) clusters[c].common = detail::tag_of({cs[c], cr[c]}, plan.hubs);
    }
    plan.predicted_deliveries += clusters[c].common.cardinality();
    plan.steps.push_back(typename AggPlan<T>::Close{c, std::move(clusters[c].common)});
  }
  plan.clusters = clusters.size();
  return plan;
}

/// Plan that routes every group directly (the shared-nothing routing over groups).
template <Membership T>
AggPlan<T> build_direct_plan(std::span<const T> tags, const std::vector<bool>& present = {}) {
  PlanOptions opts;
  opts.threshold = std::numeric_limits<std::uint64_t>::max();
  return build_as_plan(tags, opts, present);
}

class PlanError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Replays the plan's routing per group and checks that every group reaches
/// each pair of its tag exactly once. Returns human-readable problems.
template <Membership T>
std::vector<std::string> audit_plan(const AggPlan<T>& plan) {
  const auto k = plan.hubs;
  const bool words = detail::word_sized<T>(k);
  std::vector<std::string> problems;
  // Per group: one row of target bits per source hub (word-sized tags), or
  // a hit count per ordered pair.
  std::vector<std::uint64_t> rows(words ? plan.groups.size() * k : 0, 0);
  std::vector<std::vector<std::uint16_t>> hits(words ? 0 : plan.groups.size());
  std::vector<bool> routed(plan.groups.size(), false);
  std::vector<std::vector<std::uint32_t>> members(plan.clusters);
  auto pair_text = [](std::size_t x, std::size_t y) {
    return "(" + std::to_string(x) + "," + std::to_string(y) + ")";
  };
  // Word-sized tags credit cluster deliveries once per cluster. A member
  // receives everything its cluster delivered after it joined, which is the
  // cluster's row minus the snapshot taken at joining.
  std::vector<std::uint64_t> cluster_rows(words ? plan.clusters * k : 0, 0), joined(rows.size(), 0);
  std::vector<std::int64_t> member_of(words ? plan.groups.size() : 0, -1);
  auto mark = [&](std::uint64_t* row, std::uint32_t g, std::span<const T> pieces) {
    for (const auto& p : pieces) {
      auto w = detail::words_of(p);
      for (auto sx = w.S; sx; sx &= sx - 1) {
        auto x = static_cast<std::size_t>(std::countr_zero(sx));
        auto targets = w.R & ~(std::uint64_t{1} << x);
        if (auto twice = row[x] & targets)
          problems.push_back("group " + std::to_string(g) + " reaches " +
                             pair_text(x, static_cast<std::size_t>(std::countr_zero(twice))) + " more than once");
        row[x] |= targets;
      }
    }
  };
  auto opener = [&](std::uint32_t c) { return members.at(c).empty() ? 0u : members[c].front(); };
  auto join = [&](std::uint32_t c, std::uint32_t g) {
    member_of[g] = c;
    std::copy_n(cluster_rows.data() + std::size_t{c} * k, k, joined.data() + std::size_t{g} * k);
  };
  auto credit = [&](std::uint32_t g, std::span<const T> pieces) {
    if (words) return mark(rows.data() + std::size_t{g} * k, g, pieces);
    auto& h = hits[g];
    if (h.empty()) h.assign(k * k, 0);
    for (const auto& p : pieces)
      p.for_each_pair([&](std::size_t x, std::size_t y) { ++h[x * k + y]; });
  };
  for (const auto& step : plan.steps) {
    std::visit(
        [&](const auto& s) {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, typename AggPlan<T>::Direct>) {
            routed[s.group] = true;
            credit(s.group, std::span<const T>(&plan.groups[s.group], 1));
          } else if constexpr (std::is_same_v<S, typename AggPlan<T>::Open>) {
            routed[s.group] = true;
            members.at(s.cluster).push_back(s.group);
            if (words) join(s.cluster, s.group);
          } else if constexpr (std::is_same_v<S, typename AggPlan<T>::Admit>) {
            if (plan.options.admission == Admission::PositiveSaving && s.saving <= 0)
              problems.push_back("group " + std::to_string(s.group) +
                                 " admitted with non-positive saving");
            routed[s.group] = true;
            if (words) {
              mark(cluster_rows.data() + std::size_t{s.cluster} * k, opener(s.cluster), s.shrink);
              credit(s.group, s.differential);
              join(s.cluster, s.group);
            } else {
              for (auto m : members.at(s.cluster)) credit(m, s.shrink);
              credit(s.group, s.differential);
            }
            members[s.cluster].push_back(s.group);
          } else if (words) {
            mark(cluster_rows.data() + std::size_t{s.cluster} * k, opener(s.cluster),
                 std::span<const T>(&s.common, 1));
          } else {
            for (auto m : members.at(s.cluster)) credit(m, std::span<const T>(&s.common, 1));
          }
        },
        step);
  }
  for (std::uint32_t g = 0; g < plan.groups.size(); ++g) {
    if (!routed[g]) continue;
    const auto& tag = plan.groups[g];
    if (words) {
      auto w = detail::words_of(tag);
      for (std::size_t x = 0; x < k; ++x) {
        auto want = (w.S >> x) & 1 ? w.R & ~(std::uint64_t{1} << x) : 0;
        auto got = rows[std::size_t{g} * k + x];
        if (member_of[g] >= 0) {
          auto later = cluster_rows[static_cast<std::size_t>(member_of[g]) * k + x] & ~joined[std::size_t{g} * k + x];
          if (auto twice = got & later)
            problems.push_back("group " + std::to_string(g) + " reaches " +
                               pair_text(x, static_cast<std::size_t>(std::countr_zero(twice))) + " more than once");
          got |= later;
        }
        if (got != want) {
          auto y = static_cast<std::size_t>(std::countr_zero(got ^ want));
          problems.push_back("group " + std::to_string(g) + (want >> y & 1 ? " misses " : " wrongly reaches ") +
                             pair_text(x, y));
        }
      }
      continue;
    }
    for (std::size_t x = 0; x < k; ++x) {
      for (std::size_t y = 0; y < k; ++y) {
        unsigned want = tag.contains(x, y) ? 1 : 0;
        unsigned got = hits[g].empty() ? 0 : hits[g][x * k + y];
        if (got != want) {
          problems.push_back("group " + std::to_string(g) + " reaches " + pair_text(x, y) + " " +
                             std::to_string(got) + " times, expected " + std::to_string(want));
        }
      }
    }
  }
  return problems;
}

/// Runs a plan for one function. Same-tag elements are first folded into
/// their group's pre-aggregate, then the plan's routing is replayed.
/// With `audit`, a routing gap or overlap throws PlanError.
template <Membership T>
FunctionResult execute_plan(const AggPlan<T>& plan, const ElementValues& values,
                            const AggFunction& fn, bool audit = true) {
  if (audit) {
    auto problems = audit_plan(plan);
    if (!problems.empty()) {
      std::string msg = "aggregation plan breaks the routing partition: " + problems.front();
      if (problems.size() > 1) msg += " (+" + std::to_string(problems.size() - 1) + " more)";
      throw PlanError(msg);
    }
  }
  FunctionResult out(fn, plan.hubs);
  const auto groups = plan.groups.size();

  // Groups the plan never routes (empty tags) are not aggregated at all.
  std::vector<bool> routed(groups, false);
  for (const auto& step : plan.steps) {
    std::visit(
        [&](const auto& s) {
          if constexpr (requires { s.group; }) routed[s.group] = true;
        },
        step);
  }

  // Same-tag combining.
  std::vector<Cell> pre(groups);
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto g = values.tag[i];
    if (g >= groups) throw PlanError("element tag " + std::to_string(g) + " not in plan");
    if (!routed[g]) continue;
    auto [it, fresh] = pre[g].try_emplace(values.key[i], values.value[i]);
    if (!fresh) {
      combine_into(fn.op, it->second, values.value[i]);
      ++out.ops.merges;
    }
  }

  std::vector<PartialTable> tables(groups);
  for (std::size_t g = 0; g < groups; ++g) tables[g].assign(pre[g].begin(), pre[g].end());

  auto deliver = [&](const auto& table, std::span<const T> pieces) {
    if (table.empty()) return;
    for (const auto& p : pieces) {
      p.for_each_pair([&](std::size_t x, std::size_t y) {
        for (const auto& [key, value] : table) out.add(x, y, key, value);
      });
    }
  };

  std::vector<Cell> cluster(plan.clusters);
  for (const auto& step : plan.steps) {
    std::visit(
        [&](const auto& s) {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, typename AggPlan<T>::Direct>) {
            deliver(tables[s.group], std::span<const T>(&plan.groups[s.group], 1));
          } else if constexpr (std::is_same_v<S, typename AggPlan<T>::Open>) {
            cluster[s.cluster] = Cell(tables[s.group].begin(), tables[s.group].end());
          } else if constexpr (std::is_same_v<S, typename AggPlan<T>::Admit>) {
            auto& combined = cluster[s.cluster];
            deliver(combined, s.shrink);
            deliver(tables[s.group], s.differential);
            for (const auto& [key, value] : tables[s.group]) {
              auto [it, fresh] = combined.try_emplace(key, value);
              if (!fresh) {
                combine_into(fn.op, it->second, value);
                ++out.ops.merges;
              }
            }
          } else {
            deliver(cluster[s.cluster], std::span<const T>(&s.common, 1));
          }
        },
        step);
  }
  return out;
}

/// Flags tags that have at least one element value.
inline std::vector<bool> present_tags(std::size_t tag_count, const ElementValues& values) {
  std::vector<bool> present(tag_count, false);
  for (auto t : values.tag) present[t] = true;
  return present;
}

}  // namespace hubex
