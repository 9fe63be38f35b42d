// HTTP JSON API over registered datasets and the HA-graphs computed from them.
#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include "hubex/engine.hpp"

namespace hubex {

using json = nlohmann::json;

/// Error with an HTTP status and a machine-readable code.
class ApiError : public std::runtime_error {
 public:
  ApiError(int status, std::string code, const std::string& message)
      : std::runtime_error(message), status_(status), code_(std::move(code)) {}
  int status() const noexcept { return status_; }
  const std::string& code() const noexcept { return code_; }

 private:
  int status_;
  std::string code_;
};

/// Datasets by name and HA-graphs by id. Lookups take a shared lock,
/// registration an exclusive one; queries run outside the lock.
class SessionStore {
 public:
  std::shared_ptr<const Dataset> add_dataset(std::string name, AttributedGraph g) {
    auto ds = Dataset::make(name, std::move(g));
    std::unique_lock lock(mu_);
    datasets_[std::move(name)] = ds;
    return ds;
  }

  std::shared_ptr<const Dataset> dataset(const std::string& name) const {
    std::shared_lock lock(mu_);
    auto it = datasets_.find(name);
    if (it == datasets_.end()) throw ApiError(404, "dataset_not_found", "no dataset named '" + name + "'");
    return it->second;
  }

  std::vector<std::shared_ptr<const Dataset>> datasets() const {
    std::shared_lock lock(mu_);
    std::vector<std::shared_ptr<const Dataset>> out;
    for (const auto& [_, ds] : datasets_) out.push_back(ds);
    return out;
  }

  /// Assigns the next id ("ha-N") and stores the graph.
  std::shared_ptr<const HAGraph> put(HAGraph ha) {
    ha.id = "ha-" + std::to_string(next_.fetch_add(1));
    auto p = std::make_shared<const HAGraph>(std::move(ha));
    std::unique_lock lock(mu_);
    graphs_[p->id] = p;
    return p;
  }

  std::shared_ptr<const HAGraph> get(const std::string& id) const {
    std::shared_lock lock(mu_);
    auto it = graphs_.find(id);
    if (it == graphs_.end()) throw ApiError(404, "ha_not_found", "no HA-graph with id '" + id + "'");
    return it->second;
  }

 private:
  mutable std::shared_mutex mu_;
  std::map<std::string, std::shared_ptr<const Dataset>> datasets_;
  std::map<std::string, std::shared_ptr<const HAGraph>> graphs_;
  std::atomic<std::uint64_t> next_{1};
};

/// Loads every dataset of a manifest `{"datasets": [{name, vertices, edges}]}`;
/// file paths are relative to the manifest. Returns the names loaded.
inline std::vector<std::string> load_manifest(SessionStore& store, const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw std::runtime_error("cannot open manifest " + manifest.string());
  json m;
  try {
    m = json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error("bad manifest " + manifest.string() + ": " + e.what());
  }
  std::vector<std::string> names;
  auto dir = manifest.parent_path();
  for (const auto& d : m.at("datasets")) {
    auto name = d.at("name").get<std::string>();
    auto g = load_graph((dir / d.at("vertices").get<std::string>()).string(),
                        (dir / d.at("edges").get<std::string>()).string());
    store.add_dataset(name, std::move(g));
    names.push_back(name);
  }
  return names;
}

namespace detail {

inline json final_json(const FinalValue& v) {
  return std::visit([](auto x) { return json(x); }, v);
}

inline json group_key_json(const AggFunction& fn, GroupKey k) {
  switch (fn.dims) {
    case GroupBy::VGrp:
      return {{"v_grp", k.hi()}};
    case GroupBy::EGrp:
      return {{"e_grp", k.lo()}};
    case GroupBy::VGrpEGrp:
      return {{"v_grp", k.hi()}, {"e_grp", k.lo()}};
    case GroupBy::EMrBucket:
      return Buckets::name(k.hi());
    case GroupBy::None:
      break;
  }
  return nullptr;
}

inline json table_json(const TableSummary& t) {
  auto rows = t.rows();
  if (t.fn().dims == GroupBy::None) {
    if (rows.empty()) return t.fn().op == Combine::Sum || t.fn().op == Combine::Count ? json(0) : json(nullptr);
    return final_json(rows.front().value);
  }
  json out = json::array();
  for (const auto& r : rows) out.push_back({{"group_key", group_key_json(t.fn(), r.key)}, {"value", final_json(r.value)}});
  return out;
}

inline json path_json(const PathSummary& p, const AttributedGraph& g) {
  json vertices = json::array();
  for (auto vid : p.vids) {
    auto idx = g.index_of(vid);
    const auto& label = idx ? g.vertex(*idx).label : std::string();
    vertices.push_back({{"vid", vid}, {"name", label.empty() ? std::to_string(vid) : label}});
  }
  return {{"distance", p.reachable() ? json(p.distance) : json(nullptr)},
          {"labels", p.labels},
          {"text", p.text()},
          {"vertices", vertices}};
}

inline json summary_json(const SummaryValue& v, const AttributedGraph& g) {
  return std::visit(
      [&](const auto& s) -> json {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, std::int64_t>)
          return s;
        else if constexpr (std::is_same_v<S, TableSummary>)
          return table_json(s);
        else if constexpr (std::is_same_v<S, PathSummary>)
          return path_json(s, g);
        else
          return {{"value", s.value()},
                  {"edges", s.edges},
                  {"distance", s.distance == kUnreachable ? json(nullptr) : json(s.distance)}};
      },
      v);
}

inline std::string query_text(const GEQuery& q) { return to_string(q); }

}  // namespace detail

inline json to_json(const HAGraph& ha) {
  const auto& g = ha.state->dataset->graph();
  json hubs = json::array();
  for (const auto& h : ha.hubs)
    hubs.push_back({{"vid", h.vid},
                    {"name", h.name},
                    {"attrs",
                     {{"v_grp", h.grp},
                      {"v_mr", h.mr},
                      {"origin", h.origin == HubOrigin::Anchor ? "anchor" : "selected"}}}});
  json edges = json::array();
  for (const auto& e : ha.edges) {
    json summaries = json::object();
    for (const auto& s : e.summaries) summaries[s.name] = detail::summary_json(s.value, g);
    auto x = ha.hubs[e.x].vid, y = ha.hubs[e.y].vid;
    edges.push_back({{"src", x},
                     {"dst", y},
                     {"summaries", summaries},
                     {"width_band", e.width_band},
                     {"subgraph_ref", "/ha/" + ha.id + "/edge/" + std::to_string(x) + "/" + std::to_string(y) + "/details"}});
  }
  const auto& t = ha.times;
  return {{"id", ha.id},
          {"parent_id", ha.parent_id.empty() ? json(nullptr) : json(ha.parent_id)},
          {"dataset", ha.dataset},
          {"query", detail::query_text(ha.query)},
          {"hubs", hubs},
          {"edges", edges},
          {"times",
           {{"select", t.select},
            {"tag", t.tag},
            {"extract", t.extract},
            {"plan", t.plan},
            {"aggregate", t.aggregate},
            {"summarize", t.summarize},
            {"total", t.total}}},
          {"add_ops", {{"merges", ha.stats.ops.merges}, {"deliveries", ha.stats.ops.deliveries}}}};
}

/// Data-mode detail of one HA edge: the grouped tables and the vertices and
/// edges of its induced subgraph (at most `limit` of each).
inline json edge_details(const HAGraph& ha, VertexId x, VertexId y, std::size_t limit = 1000) {
  const auto* e = ha.find_edge(x, y);
  if (!e) throw ApiError(404, "edge_not_found", "no edge (" + std::to_string(x) + ", " + std::to_string(y) + ") in " + ha.id);
  const auto& g = ha.state->dataset->graph();
  json tables = json::object(), values = json::object();
  for (const auto& s : e->summaries) {
    if (const auto* t = std::get_if<TableSummary>(&s.value); t && t->fn().dims != GroupBy::None)
      tables[s.name] = detail::table_json(*t);
    else
      values[s.name] = detail::summary_json(s.value, g);
  }
  auto view = ha.state->edge_view(e->x, e->y);
  json vertices = json::array(), edges = json::array();
  for (std::size_t i = 0; i < view.vertices.size() && i < limit; ++i) {
    const auto& v = g.vertex(view.vertices[i]);
    vertices.push_back({{"vid", v.vid}, {"name", v.label}, {"v_grp", v.grp}, {"v_mr", v.mr}});
  }
  for (std::size_t i = 0; i < view.edges.size() && i < limit; ++i) {
    const auto& ed = g.edge(view.edges[i]);
    edges.push_back({{"src", g.vertex(ed.src).vid},
                     {"dst", g.vertex(ed.tgt).vid},
                     {"label", ed.label},
                     {"e_grp", ed.grp},
                     {"e_mr", ed.mr}});
  }
  return {{"ha_id", ha.id},
          {"src", x},
          {"dst", y},
          {"tables", tables},
          {"values", values},
          {"vertex_count", view.vertices.size()},
          {"edge_count", view.edges.size()},
          {"vertices", vertices},
          {"edges", edges},
          {"truncated", view.vertices.size() > limit || view.edges.size() > limit}};
}

inline json error_json(const std::string& code, const std::string& message) {
  return {{"error", {{"code", code}, {"message", message}}}};
}

struct ApiResponse {
  int status = 200;
  json body;
};

/// Endpoint handlers, independent of the transport.
class Api {
 public:
  explicit Api(SessionStore& store) : store_(store) {}

  ApiResponse healthz() const { return {200, {{"status", "ok"}}}; }

  ApiResponse datasets() const {
    json out = json::array();
    for (const auto& ds : store_.datasets())
      out.push_back({{"name", ds->name()},
                     {"vertices", ds->graph().num_vertices()},
                     {"edges", ds->graph().num_edges()},
                     {"sccs", ds->condensed().num_vertices()}});
    return {200, {{"datasets", out}}};
  }

  ApiResponse query(const json& body) {
    return guarded([&] {
      auto ds = store_.dataset(field<std::string>(body, "dataset"));
      ExecOptions opt;
      if (body.contains("params"))
        for (const auto& [k, v] : body.at("params").items()) opt.params[k] = v.get<std::int64_t>();
      auto ha = store_.put(execute(ds, field<std::string>(body, "text"), opt));
      return ApiResponse{200, to_json(*ha)};
    });
  }

  ApiResponse zoom(const json& body) {
    return guarded([&] {
      auto parent = store_.get(field<std::string>(body, "ha_id"));
      auto mode = body.value("mode", std::string("edge"));
      ZoomOverrides o;
      if (body.contains("overrides")) {
        const auto& ov = body.at("overrides");
        if (ov.contains("k")) o.k = ov.at("k").get<std::size_t>();
        if (ov.contains("h")) o.h = ov.at("h").get<std::uint32_t>();
        if (ov.contains("select")) o.select = ov.at("select").get<std::string>();
        if (ov.contains("group_by")) o.group_by = ov.at("group_by").get<std::string>();
      }
      HAGraph child;
      if (mode == "edge") {
        auto edge = field<std::vector<VertexId>>(body, "edge");
        if (edge.size() != 2) throw ApiError(400, "bad_request", "edge must be [x, y]");
        child = zoom_edge(*parent, edge[0], edge[1], o);
      } else if (mode == "subset") {
        child = zoom_subset(*parent, field<std::vector<VertexId>>(body, "vertices"), o);
      } else {
        throw ApiError(400, "bad_request", "mode must be 'edge' or 'subset'");
      }
      return ApiResponse{200, to_json(*store_.put(std::move(child)))};
    });
  }

  ApiResponse ha(const std::string& id) const {
    return guarded([&] { return ApiResponse{200, to_json(*store_.get(id))}; });
  }

  ApiResponse details(const std::string& id, VertexId x, VertexId y, std::size_t limit = 1000) const {
    return guarded([&] { return ApiResponse{200, edge_details(*store_.get(id), x, y, limit)}; });
  }

  /// Registers the routes on an httplib server.
  void mount(httplib::Server& server) {
    auto reply = [](httplib::Response& res, const ApiResponse& r) {
      res.status = r.status;
      res.set_content(r.body.dump(), "application/json");
    };
    auto parse = [](const httplib::Request& req) {
      try {
        return json::parse(req.body);
      } catch (const json::exception& e) {
        throw ApiError(400, "bad_request", std::string("invalid JSON: ") + e.what());
      }
    };
    auto post = [this, reply, parse](ApiResponse (Api::*fn)(const json&)) {
      return [this, reply, parse, fn](const httplib::Request& req, httplib::Response& res) {
        try {
          reply(res, (this->*fn)(parse(req)));
        } catch (const ApiError& e) {
          reply(res, {e.status(), error_json(e.code(), e.what())});
        }
      };
    };
    server.Get("/healthz", [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, healthz()); });
    server.Get("/datasets", [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, datasets()); });
    server.Post("/query", post(&Api::query));
    server.Post("/zoom", post(&Api::zoom));
    server.Get(R"(/ha/([^/]+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
      reply(res, ha(req.matches[1]));
    });
    server.Get(R"(/ha/([^/]+)/edge/(\d+)/(\d+)/details)", [this, reply](const httplib::Request& req,
                                                                        httplib::Response& res) {
      std::size_t limit = 1000;
      if (req.has_param("limit")) limit = std::stoul(req.get_param_value("limit"));
      reply(res, details(req.matches[1], std::stoull(req.matches[2]), std::stoull(req.matches[3]), limit));
    });
    server.set_error_handler([reply](const httplib::Request&, httplib::Response& res) {
      if (res.body.empty()) reply(res, {res.status, error_json("not_found", "no such endpoint")});
    });
  }

 private:
  template <class T>
  static T field(const json& body, const char* name) {
    if (!body.is_object() || !body.contains(name))
      throw ApiError(400, "bad_request", std::string("missing field '") + name + "'");
    try {
      return body.at(name).get<T>();
    } catch (const json::exception& e) {
      throw ApiError(400, "bad_request", std::string("bad field '") + name + "': " + e.what());
    }
  }

  template <class F>
  static ApiResponse guarded(F&& f) {
    try {
      return f();
    } catch (const ApiError& e) {
      return {e.status(), error_json(e.code(), e.what())};
    } catch (const EdgeNotFound& e) {
      return {404, error_json("edge_not_found", e.what())};
    } catch (const QueryError& e) {
      auto body = error_json("query_error", e.what());
      body["error"]["line"] = e.line();
      body["error"]["column"] = e.column();
      return {400, body};
    } catch (const BindError& e) {
      return {400, error_json("bind_error", e.what())};
    } catch (const json::exception& e) {
      return {400, error_json("bad_request", e.what())};
    } catch (const std::exception& e) {
      return {500, error_json("internal", e.what())};
    }
  }

  SessionStore& store_;
};

/// Serves the API until the server is stopped.
inline bool serve(SessionStore& store, const std::string& host, int port) {
  httplib::Server server;
  Api api(store);
  api.mount(server);
  return server.listen(host, port);
}

}  // namespace hubex
