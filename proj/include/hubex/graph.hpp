#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hubex {

using VertexId = std::uint64_t;  // external id as it appears in the vertex table
using Index = std::uint32_t;     // dense internal vertex index, ordered by vid
using EdgeIndex = std::uint32_t;
using Group = std::uint32_t;
using Measure = std::int64_t;

inline constexpr Index kNoIndex = std::numeric_limits<Index>::max();

struct Vertex {
  VertexId vid = 0;
  Group grp = 0;
  Measure mr = 0;
  std::string label;

  friend bool operator==(const Vertex&, const Vertex&) = default;
};

/// Edge as it appears in the edge table (endpoints by vid).
struct EdgeRecord {
  VertexId src = 0;
  VertexId tgt = 0;
  Group grp = 0;
  Measure mr = 0;
  std::string label;

  friend bool operator==(const EdgeRecord&, const EdgeRecord&) = default;
};

/// Edge with endpoints resolved to internal indices.
struct Edge {
  Index src = 0;
  Index tgt = 0;
  Group grp = 0;
  Measure mr = 0;
  std::string label;

  friend bool operator==(const Edge&, const Edge&) = default;
};

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LoadError : public GraphError {
 public:
  LoadError(std::string path, std::size_t line, const std::string& what)
      : GraphError(path + ":" + std::to_string(line) + ": " + what),
        path_(std::move(path)),
        line_(line) {}

  const std::string& path() const noexcept { return path_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

namespace detail {

// Compressed adjacency: offsets into parallel neighbor / edge-id arrays.
struct Csr {
  std::vector<std::uint32_t> offsets;
  std::vector<Index> neighbors;
  std::vector<EdgeIndex> edge_ids;

  std::span<const Index> neighbors_of(Index v) const {
    return {neighbors.data() + offsets[v], offsets[v + 1] - offsets[v]};
  }
  std::span<const EdgeIndex> edges_of(Index v) const {
    return {edge_ids.data() + offsets[v], offsets[v + 1] - offsets[v]};
  }

  template <class EndpointFn, class OtherFn>
  static Csr build(std::size_t n, std::size_t m, EndpointFn endpoint, OtherFn other) {
    Csr c;
    c.offsets.assign(n + 1, 0);
    for (std::size_t e = 0; e < m; ++e) ++c.offsets[endpoint(e) + 1];
    std::partial_sum(c.offsets.begin(), c.offsets.end(), c.offsets.begin());
    c.neighbors.resize(m);
    c.edge_ids.resize(m);
    std::vector<std::uint32_t> cursor(c.offsets.begin(), c.offsets.end() - 1);
    for (std::size_t e = 0; e < m; ++e) {
      auto slot = cursor[endpoint(e)]++;
      c.neighbors[slot] = other(e);
      c.edge_ids[slot] = static_cast<EdgeIndex>(e);
    }
    return c;
  }
};

}  // namespace detail

/// Directed graph with the fixed attribute schema (vid, v_grp, v_mr[, label])
/// on vertices and (src_vid, tgt_vid, e_grp, e_mr[, label]) on edges.
/// Immutable once constructed.
class AttributedGraph {
 public:
  AttributedGraph() { build_adjacency(); }

  /// Validates ids and endpoints. Vertices are reordered by vid; edges are
  /// stably ordered by (src vid, tgt vid).
  AttributedGraph(std::vector<Vertex> vertices, std::vector<EdgeRecord> edges,
                  bool vertex_labels = false, bool edge_labels = false)
      : vertex_labels_(vertex_labels), edge_labels_(edge_labels) {
    std::stable_sort(vertices.begin(), vertices.end(),
                     [](const Vertex& a, const Vertex& b) { return a.vid < b.vid; });
    for (std::size_t i = 1; i < vertices.size(); ++i) {
      if (vertices[i].vid == vertices[i - 1].vid)
        throw GraphError("duplicate vid " + std::to_string(vertices[i].vid));
    }
    if (vertices.size() >= kNoIndex) throw GraphError("too many vertices");
    vertices_ = std::move(vertices);

    edges_.reserve(edges.size());
    for (auto& r : edges) {
      auto s = index_of(r.src);
      auto t = index_of(r.tgt);
      if (!s || !t) {
        throw GraphError("edge endpoint " + std::to_string(!s ? r.src : r.tgt) +
                         " is not a vertex");
      }
      edges_.push_back(Edge{*s, *t, r.grp, r.mr, std::move(r.label)});
    }
    std::stable_sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
      return a.src != b.src ? a.src < b.src : a.tgt < b.tgt;
    });
    for (const auto& v : vertices_) vertex_labels_ = vertex_labels_ || !v.label.empty();
    for (const auto& e : edges_) edge_labels_ = edge_labels_ || !e.label.empty();
    build_adjacency();
  }

  std::size_t num_vertices() const noexcept { return vertices_.size(); }
  std::size_t num_edges() const noexcept { return edges_.size(); }

  const Vertex& vertex(Index v) const { return vertices_[v]; }
  const Edge& edge(EdgeIndex e) const { return edges_[e]; }
  std::span<const Vertex> vertices() const noexcept { return vertices_; }
  std::span<const Edge> edges() const noexcept { return edges_; }

  std::optional<Index> index_of(VertexId vid) const {
    auto it = std::lower_bound(vertices_.begin(), vertices_.end(), vid,
                               [](const Vertex& v, VertexId id) { return v.vid < id; });
    if (it == vertices_.end() || it->vid != vid) return std::nullopt;
    return static_cast<Index>(it - vertices_.begin());
  }

  /// First vertex (in vid order) whose label equals `label`.
  std::optional<Index> find_by_label(std::string_view label) const {
    for (std::size_t i = 0; i < vertices_.size(); ++i)
      if (vertices_[i].label == label) return static_cast<Index>(i);
    return std::nullopt;
  }

  std::span<const Index> successors(Index v) const { return out_.neighbors_of(v); }
  std::span<const Index> predecessors(Index v) const { return in_.neighbors_of(v); }
  std::span<const EdgeIndex> out_edges(Index v) const { return out_.edges_of(v); }
  std::span<const EdgeIndex> in_edges(Index v) const { return in_.edges_of(v); }
  std::size_t out_degree(Index v) const { return out_.offsets[v + 1] - out_.offsets[v]; }
  std::size_t in_degree(Index v) const { return in_.offsets[v + 1] - in_.offsets[v]; }

  bool has_vertex_labels() const noexcept { return vertex_labels_; }
  bool has_edge_labels() const noexcept { return edge_labels_; }

  /// Edge table in vid form, in internal order.
  std::vector<EdgeRecord> edge_records() const {
    std::vector<EdgeRecord> out;
    out.reserve(edges_.size());
    for (const auto& e : edges_)
      out.push_back({vertices_[e.src].vid, vertices_[e.tgt].vid, e.grp, e.mr, e.label});
    return out;
  }

  friend bool operator==(const AttributedGraph& a, const AttributedGraph& b) {
    return a.vertices_ == b.vertices_ && a.edges_ == b.edges_;
  }

 private:
  void build_adjacency() {
    out_ = detail::Csr::build(
        vertices_.size(), edges_.size(), [&](std::size_t e) { return edges_[e].src; },
        [&](std::size_t e) { return edges_[e].tgt; });
    in_ = detail::Csr::build(
        vertices_.size(), edges_.size(), [&](std::size_t e) { return edges_[e].tgt; },
        [&](std::size_t e) { return edges_[e].src; });
  }

  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  detail::Csr out_;
  detail::Csr in_;
  bool vertex_labels_ = false;
  bool edge_labels_ = false;
};

// ---------------------------------------------------------------------------
// Delimited text format

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(delim, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;  // (line, fields)
};

inline Table read_table(const std::string& path, char delim,
                        std::span<const std::string_view> required,
                        std::string_view optional_column) {
  std::ifstream in(path);
  if (!in) throw LoadError(path, 0, "cannot open file");
  Table t;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line, delim);
    if (!header) {
      for (auto f : fields) t.columns.emplace_back(f);
      for (auto name : required) {
        if (std::find(t.columns.begin(), t.columns.end(), name) == t.columns.end())
          throw LoadError(path, lineno, "missing column '" + std::string(name) + "'");
      }
      for (const auto& c : t.columns) {
        bool known = c == optional_column ||
                     std::find(required.begin(), required.end(), c) != required.end();
        if (!known) throw LoadError(path, lineno, "unexpected column '" + c + "'");
      }
      header = true;
      continue;
    }
    if (fields.size() != t.columns.size()) {
      throw LoadError(path, lineno,
                      "expected " + std::to_string(t.columns.size()) + " fields, got " +
                          std::to_string(fields.size()));
    }
    std::vector<std::string> row;
    row.reserve(fields.size());
    for (auto f : fields) row.emplace_back(f);
    t.rows.emplace_back(lineno, std::move(row));
  }
  if (!header) throw LoadError(path, lineno, "missing header line");
  return t;
}

inline std::size_t column(const Table& t, std::string_view name) {
  auto it = std::find(t.columns.begin(), t.columns.end(), name);
  return it == t.columns.end() ? std::string::npos
                               : static_cast<std::size_t>(it - t.columns.begin());
}

template <class T>
T field(const std::string& path, std::size_t line, const std::vector<std::string>& row,
        std::size_t col, std::string_view name) {
  auto v = parse_number<T>(row[col]);
  if (!v) throw LoadError(path, line, "malformed " + std::string(name) + " '" + row[col] + "'");
  return *v;
}

}  // namespace detail

/// Loads a graph from header-bearing delimited vertex and edge files.
/// Columns: vid, v_grp, v_mr[, label] and src_vid, tgt_vid, e_grp, e_mr[, label].
/// Throws LoadError naming the offending file and line.
inline AttributedGraph load_graph(const std::string& vertex_path, const std::string& edge_path,
                                  char delim = '\t') {
  using namespace std::string_view_literals;
  static constexpr std::string_view vcols[] = {"vid"sv, "v_grp"sv, "v_mr"sv};
  static constexpr std::string_view ecols[] = {"src_vid"sv, "tgt_vid"sv, "e_grp"sv, "e_mr"sv};

  auto vt = detail::read_table(vertex_path, delim, vcols, "label");
  auto et = detail::read_table(edge_path, delim, ecols, "label");

  const auto c_vid = detail::column(vt, "vid"), c_vgrp = detail::column(vt, "v_grp"),
             c_vmr = detail::column(vt, "v_mr"), c_vlabel = detail::column(vt, "label");
  std::vector<Vertex> vertices;
  vertices.reserve(vt.rows.size());
  std::unordered_map<VertexId, std::size_t> seen;
  seen.reserve(vt.rows.size());
  for (const auto& [line, row] : vt.rows) {
    Vertex v;
    v.vid = detail::field<VertexId>(vertex_path, line, row, c_vid, "vid");
    v.grp = detail::field<Group>(vertex_path, line, row, c_vgrp, "v_grp");
    v.mr = detail::field<Measure>(vertex_path, line, row, c_vmr, "v_mr");
    if (c_vlabel != std::string::npos) v.label = row[c_vlabel];
    auto [it, fresh] = seen.emplace(v.vid, line);
    if (!fresh) {
      throw LoadError(vertex_path, line,
                      "duplicate vid " + std::to_string(v.vid) + " (first at line " +
                          std::to_string(it->second) + ")");
    }
    vertices.push_back(std::move(v));
  }

  const auto c_src = detail::column(et, "src_vid"), c_tgt = detail::column(et, "tgt_vid"),
             c_egrp = detail::column(et, "e_grp"), c_emr = detail::column(et, "e_mr"),
             c_elabel = detail::column(et, "label");
  std::vector<EdgeRecord> edges;
  edges.reserve(et.rows.size());
  for (const auto& [line, row] : et.rows) {
    EdgeRecord e;
    e.src = detail::field<VertexId>(edge_path, line, row, c_src, "src_vid");
    e.tgt = detail::field<VertexId>(edge_path, line, row, c_tgt, "tgt_vid");
    e.grp = detail::field<Group>(edge_path, line, row, c_egrp, "e_grp");
    e.mr = detail::field<Measure>(edge_path, line, row, c_emr, "e_mr");
    if (c_elabel != std::string::npos) e.label = row[c_elabel];
    for (auto id : {e.src, e.tgt}) {
      if (!seen.contains(id))
        throw LoadError(edge_path, line, "dangling endpoint " + std::to_string(id));
    }
    edges.push_back(std::move(e));
  }
  return AttributedGraph(std::move(vertices), std::move(edges), c_vlabel != std::string::npos,
                         c_elabel != std::string::npos);
}

inline void save_graph(const AttributedGraph& g, const std::string& vertex_path,
                       const std::string& edge_path, char delim = '\t') {
  std::ofstream vo(vertex_path);
  std::ofstream eo(edge_path);
  if (!vo || !eo) throw GraphError("cannot write " + vertex_path + " / " + edge_path);
  vo << "vid" << delim << "v_grp" << delim << "v_mr";
  if (g.has_vertex_labels()) vo << delim << "label";
  vo << '\n';
  for (const auto& v : g.vertices()) {
    vo << v.vid << delim << v.grp << delim << v.mr;
    if (g.has_vertex_labels()) vo << delim << v.label;
    vo << '\n';
  }
  eo << "src_vid" << delim << "tgt_vid" << delim << "e_grp" << delim << "e_mr";
  if (g.has_edge_labels()) eo << delim << "label";
  eo << '\n';
  for (const auto& e : g.edges()) {
    eo << g.vertex(e.src).vid << delim << g.vertex(e.tgt).vid << delim << e.grp << delim << e.mr;
    if (g.has_edge_labels()) eo << delim << e.label;
    eo << '\n';
  }
}

}  // namespace hubex
