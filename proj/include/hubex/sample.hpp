// Bundled social-network samples. Both are built deterministically; `hubex
// sample` writes them under data/ together with a manifest.
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "hubex/graph.hpp"

namespace hubex {

namespace detail {

class SampleBuilder {
 public:
  explicit SampleBuilder(std::uint64_t seed) : rng_(seed) {}

  VertexId vertex(VertexId vid, std::string name) {
    vertices_.push_back({vid, static_cast<Group>(pick(0, 3)), pick(1, 100), std::move(name)});
    return vid;
  }
  void edge(VertexId s, VertexId t, const std::string& label, Measure mr = -1) {
    edges_.push_back({s, t, static_cast<Group>(pick(0, 2)), mr < 0 ? pick(1, 100) : mr, label});
  }
  void both(VertexId s, VertexId t, const std::string& label, Measure mr = -1) {
    edge(s, t, label, mr);
    edge(t, s, label, mr);
  }
  Measure pick(Measure lo, Measure hi) { return std::uniform_int_distribution<Measure>(lo, hi)(rng_); }
  std::mt19937_64& rng() { return rng_; }

  AttributedGraph build() { return AttributedGraph(std::move(vertices_), std::move(edges_), true, true); }

 private:
  std::mt19937_64 rng_;
  std::vector<Vertex> vertices_;
  std::vector<EdgeRecord> edges_;
};

inline std::string user_name(VertexId vid) { return "user" + std::to_string(vid); }

}  // namespace detail

/// Who-follows-whom sample around kristy and bingfish. Within four hops from
/// kristy to bingfish the graph is layered:
///   kristy -> w1..w6, p1..p6 -> z1..z11 (from w) and David (from w, p)
///   z -> karlfun;  David -> y1..y10 (two mentions each);  y -> bingfish
///   karlfun -> bingfish (16 mentions)
/// Friendships kristy-w-z-karlfun are mutual. Everything else is background
/// that only reaches the core through kristy, so it never falls on a short
/// kristy -> bingfish path.
inline AttributedGraph twitter_sample(std::size_t background = 5000) {
  detail::SampleBuilder b(20110411);
  const VertexId kristy = b.vertex(1, "kristy"), bingfish = b.vertex(2, "bingfish"),
                 david = b.vertex(3, "David"), karlfun = b.vertex(4, "karlfun");
  std::vector<VertexId> w, p, z, y;
  for (VertexId i = 1; i <= 6; ++i) w.push_back(b.vertex(10 + i, "w" + std::to_string(i)));
  for (VertexId i = 1; i <= 6; ++i) p.push_back(b.vertex(20 + i, "p" + std::to_string(i)));
  for (VertexId i = 1; i <= 11; ++i) z.push_back(b.vertex(30 + i, "z" + std::to_string(i)));
  for (VertexId i = 1; i <= 10; ++i) y.push_back(b.vertex(50 + i, "y" + std::to_string(i)));

  for (auto v : w) b.both(kristy, v, "friend");
  for (auto v : p) b.edge(kristy, v, "follow");
  // w1 knows six of the z users, the others one each.
  for (std::size_t i = 0; i < 6; ++i) b.both(w[0], z[i], "friend");
  for (std::size_t i = 1; i < 6; ++i) b.both(w[i], z[5 + i], "friend");
  for (auto v : z) b.both(v, karlfun, "friend");
  for (auto v : w) b.edge(v, david, "follow");
  for (auto v : p) b.edge(v, david, "follow");
  for (auto v : y) {
    b.edge(david, v, "mention");
    b.edge(david, v, "mention");
    b.edge(v, bingfish, "retweet");
  }
  for (int i = 0; i < 16; ++i) b.edge(karlfun, bingfish, "mention");

  // Background users with mutual friendships and follows among themselves.
  const VertexId first = 1000;
  std::vector<VertexId> bg;
  for (VertexId i = 0; i < background; ++i) bg.push_back(b.vertex(first + i, detail::user_name(first + i)));
  if (!bg.empty()) {
    std::uniform_int_distribution<std::size_t> any(0, bg.size() - 1);
    for (std::size_t i = 0; i < bg.size(); ++i) {
      auto u = bg[i], v = bg[any(b.rng())];
      if (u != v) b.both(u, v, "friend");
      auto x = bg[any(b.rng())];
      if (u != x) b.edge(u, x, "follow");
    }
    // Followers of kristy, and accounts the downstream users follow.
    for (int i = 0; i < 40; ++i) b.edge(bg[any(b.rng())], kristy, "follow");
    for (auto u : {david, karlfun, bingfish}) {
      for (int i = 0; i < 5; ++i) b.edge(u, bg[any(b.rng())], "follow");
    }
    for (auto u : y) b.edge(u, bg[any(b.rng())], "follow");
  }
  return b.build();
}

/// Activity sample for closeness buckets (High > 19 >= Middle > 4 >= Low):
///   u1 -> a1 -> u2 (High, High); u2 -> c1 -> u1 (Low) closes a cycle
///   u1 -> x1 -> x2 -> x3 -> u4 (Low); u4 -> b1..b5 (High); b -> u5 (Middle)
///   u5 -> y1 -> y2 -> u2 (Low); u2 -> d1 -> u3 (Middle)
/// u1, u2, u3 have many background followers and followees, none of which
/// leads back into the core.
inline AttributedGraph twitter_activity(std::size_t background = 400) {
  detail::SampleBuilder b(20110412);
  constexpr Measure high = 30, middle = 10, low = 2;
  VertexId u[6];
  for (VertexId i = 1; i <= 5; ++i) u[i] = b.vertex(i, "u" + std::to_string(i));
  auto v = [&](VertexId vid, const char* name) { return b.vertex(vid, name); };
  auto a1 = v(11, "a1"), c1 = v(12, "c1"), d1 = v(13, "d1");
  auto x1 = v(21, "x1"), x2 = v(22, "x2"), x3 = v(23, "x3");
  auto y1 = v(31, "y1"), y2 = v(32, "y2");
  std::vector<VertexId> mid;
  for (VertexId i = 1; i <= 5; ++i) mid.push_back(v(40 + i, ("b" + std::to_string(i)).c_str()));

  b.edge(u[1], a1, "reply", high + 5);
  b.edge(a1, u[2], "reply", high);
  b.edge(u[2], c1, "mention", low);
  b.edge(c1, u[1], "mention", low);
  b.edge(u[1], x1, "follow", low);
  b.edge(x1, x2, "follow", low);
  b.edge(x2, x3, "follow", low);
  b.edge(x3, u[4], "follow", low);
  for (std::size_t i = 0; i < mid.size(); ++i) {
    b.edge(u[4], mid[i], "reply", high + static_cast<Measure>(i));
    b.edge(mid[i], u[5], "mention", middle);
  }
  b.edge(u[5], y1, "follow", low);
  b.edge(y1, y2, "follow", low);
  b.edge(y2, u[2], "follow", low);
  b.edge(u[2], d1, "retweet", middle);
  b.edge(d1, u[3], "retweet", middle);

  // Followers only point at the core; followees are only pointed at.
  const VertexId first = 1000;
  std::vector<VertexId> followers, followees;
  for (VertexId i = 0; i < background; ++i) {
    auto id = first + i;
    (i % 2 == 0 ? followers : followees).push_back(b.vertex(id, detail::user_name(id)));
  }
  auto link = [&](std::vector<VertexId>& pool) {
    if (pool.size() < 2) return;
    std::uniform_int_distribution<std::size_t> any(0, pool.size() - 1);
    for (auto s : pool) {
      auto t = pool[any(b.rng())];
      if (s != t) b.edge(s, t, "follow", b.pick(1, 40));
    }
  };
  link(followers);
  link(followees);
  const int fans[] = {0, 30, 28, 26};
  for (int h = 1; h <= 3; ++h) {
    for (int i = 0; i < fans[h] && !followers.empty(); ++i)
      b.edge(followers[(static_cast<std::size_t>(h) * 37 + static_cast<std::size_t>(i) * 7) % followers.size()], u[h],
             "follow", b.pick(1, 40));
    for (int i = 0; i < fans[h] / 2 && !followees.empty(); ++i)
      b.edge(u[h], followees[(static_cast<std::size_t>(h) * 53 + static_cast<std::size_t>(i) * 11) % followees.size()],
             "follow", b.pick(1, 40));
  }
  return b.build();
}

/// Writes both samples and a manifest naming them into `dir`.
inline void write_samples(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  struct Entry {
    const char* name;
    AttributedGraph graph;
  };
  Entry entries[] = {{"twitter_sample", twitter_sample()}, {"twitter_activity", twitter_activity()}};
  std::ofstream manifest(dir / "manifest.json");
  if (!manifest) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
  manifest << "{\n  \"datasets\": [\n";
  for (std::size_t i = 0; i < std::size(entries); ++i) {
    const auto& e = entries[i];
    auto vpath = std::string(e.name) + ".vertices.tsv", epath = std::string(e.name) + ".edges.tsv";
    save_graph(e.graph, (dir / vpath).string(), (dir / epath).string());
    manifest << "    {\"name\": \"" << e.name << "\", \"vertices\": \"" << vpath << "\", \"edges\": \"" << epath
             << "\"}" << (i + 1 < std::size(entries) ? "," : "") << "\n";
  }
  manifest << "  ]\n}\n";
}

}  // namespace hubex
