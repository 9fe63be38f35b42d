#include <thread>

#include <gtest/gtest.h>

#include "hubex/sample.hpp"
#include "hubex/service.hpp"

using namespace hubex;
using nlohmann::json;

namespace {

const char* kSocial = R"(SELECT TopMaxDegreeVertices(G', 2)
FROM Subgraph(G, kristy, bingfish, 4) G'
GROUP BY betweenness()
SUMMARIZE BY relationshipStrength(),
             relationshipType(),
             vertexCount())";

class ServiceTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    store_ = new SessionStore;
    load_manifest(*store_, std::filesystem::path(HUBEX_DATA_DIR) / "manifest.json");
  }
  static void TearDownTestSuite() {
    delete store_;
    store_ = nullptr;
  }

  static VertexId vid(const std::string& name) {
    const auto& g = store_->dataset("twitter_sample")->graph();
    return g.vertex(*g.find_by_label(name)).vid;
  }

  static json social_query(Api& api) {
    auto r = api.query({{"dataset", "twitter_sample"}, {"text", kSocial}});
    EXPECT_EQ(r.status, 200) << r.body.dump();
    return r.body;
  }

  static const json* find_edge(const json& ha, VertexId x, VertexId y) {
    for (const auto& e : ha.at("edges"))
      if (e.at("src") == x && e.at("dst") == y) return &e;
    return nullptr;
  }

  static SessionStore* store_;
};

SessionStore* ServiceTest::store_ = nullptr;

json strip_ids(json ha) {
  ha.erase("id");
  ha.erase("times");
  for (auto& e : ha.at("edges")) e.erase("subgraph_ref");
  return ha;
}

}  // namespace

TEST_F(ServiceTest, HealthAndDatasets) {
  Api api(*store_);
  EXPECT_EQ(api.healthz().body.at("status"), "ok");
  auto r = api.datasets();
  ASSERT_EQ(r.status, 200);
  auto sample = twitter_sample();
  bool found = false;
  for (const auto& d : r.body.at("datasets")) {
    if (d.at("name") != "twitter_sample") continue;
    found = true;
    EXPECT_EQ(d.at("vertices"), sample.num_vertices());
    EXPECT_EQ(d.at("edges"), sample.num_edges());
    EXPECT_EQ(d.at("sccs"), store_->dataset("twitter_sample")->condensed().num_vertices());
    EXPECT_GT(d.at("sccs").get<std::size_t>(), 0u);
  }
  EXPECT_TRUE(found);
  EXPECT_EQ(r.body.at("datasets").size(), 2u);
}

TEST_F(ServiceTest, QueryReturnsSocialHubs) {
  Api api(*store_);
  auto ha = social_query(api);
  ASSERT_EQ(ha.at("hubs").size(), 4u);
  std::vector<std::string> names;
  for (const auto& h : ha.at("hubs")) names.push_back(h.at("name"));
  EXPECT_EQ(names, (std::vector<std::string>{"kristy", "bingfish", "David", "karlfun"}));
  EXPECT_EQ(ha.at("hubs")[0].at("attrs").at("origin"), "anchor");
  EXPECT_TRUE(ha.at("parent_id").is_null());

  const auto* e = find_edge(ha, vid("kristy"), vid("karlfun"));
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(e->at("summaries").at("vertexCount"), 19);
  const auto& path = e->at("summaries").at("relationshipType");
  EXPECT_EQ(path.at("distance"), 3);
  EXPECT_EQ(path.at("labels"), (json{"friend", "friend", "friend"}));
  EXPECT_EQ(path.at("vertices").size(), 4u);
  EXPECT_EQ(e->at("width_band"), 1);
  EXPECT_EQ(e->at("subgraph_ref"), "/ha/" + ha.at("id").get<std::string>() + "/edge/" +
                                       std::to_string(vid("kristy")) + "/" + std::to_string(vid("karlfun")) +
                                       "/details");

  auto again = api.ha(ha.at("id"));
  EXPECT_EQ(again.status, 200);
  EXPECT_EQ(again.body, ha);
}

TEST_F(ServiceTest, RepeatedQueriesGetNewIdsAndSameGraph) {
  Api api(*store_);
  auto a = social_query(api), b = social_query(api);
  EXPECT_NE(a.at("id"), b.at("id"));
  EXPECT_EQ(strip_ids(a), strip_ids(b));
}

TEST_F(ServiceTest, EdgeZoomAndMissingEdge) {
  Api api(*store_);
  auto ha = social_query(api);
  auto kristy = vid("kristy"), karlfun = vid("karlfun");
  auto r = api.zoom({{"ha_id", ha.at("id")}, {"mode", "edge"}, {"edge", {kristy, karlfun}}});
  ASSERT_EQ(r.status, 200) << r.body.dump();
  EXPECT_EQ(r.body.at("parent_id"), ha.at("id"));
  EXPECT_EQ(r.body.at("hubs")[0].at("vid"), kristy);
  EXPECT_EQ(r.body.at("hubs")[1].at("vid"), karlfun);
  EXPECT_EQ(r.body.at("hubs")[1].at("attrs").at("origin"), "anchor");

  auto missing = api.zoom({{"ha_id", ha.at("id")}, {"edge", {vid("bingfish"), kristy}}});
  EXPECT_EQ(missing.status, 404);
  EXPECT_EQ(missing.body.at("error").at("code"), "edge_not_found");

  auto no_ha = api.zoom({{"ha_id", "ha-0"}, {"edge", {kristy, karlfun}}});
  EXPECT_EQ(no_ha.status, 404);
  EXPECT_EQ(no_ha.body.at("error").at("code"), "ha_not_found");

  auto bad_mode = api.zoom({{"ha_id", ha.at("id")}, {"mode", "sideways"}});
  EXPECT_EQ(bad_mode.status, 400);
}

TEST_F(ServiceTest, SubsetZoomWithOverrides) {
  Api api(*store_);
  auto ha = social_query(api);
  auto r = api.zoom({{"ha_id", ha.at("id")},
                     {"mode", "subset"},
                     {"vertices", {vid("kristy"), vid("bingfish"), vid("karlfun")}},
                     {"overrides", {{"k", 1}}}});
  ASSERT_EQ(r.status, 200) << r.body.dump();
  EXPECT_EQ(r.body.at("parent_id"), ha.at("id"));
  EXPECT_GE(r.body.at("hubs").size(), 3u);
  for (const auto& e : r.body.at("edges")) EXPECT_NE(e.at("src"), e.at("dst"));
}

TEST_F(ServiceTest, EdgeDetails) {
  Api api(*store_);
  auto ha = social_query(api);
  auto id = ha.at("id").get<std::string>();
  auto r = api.details(id, vid("kristy"), vid("karlfun"));
  ASSERT_EQ(r.status, 200) << r.body.dump();
  EXPECT_EQ(r.body.at("vertex_count"), 19);
  EXPECT_EQ(r.body.at("vertices").size(), 19u);
  EXPECT_FALSE(r.body.at("truncated"));
  EXPECT_EQ(r.body.at("values").at("vertexCount"), 19);

  auto cut = api.details(id, vid("kristy"), vid("karlfun"), 5);
  EXPECT_EQ(cut.body.at("vertices").size(), 5u);
  EXPECT_TRUE(cut.body.at("truncated"));

  EXPECT_EQ(api.details(id, vid("bingfish"), vid("kristy")).status, 404);
}

TEST_F(ServiceTest, ErrorBodies) {
  Api api(*store_);
  auto no_ds = api.query({{"dataset", "nope"}, {"text", kSocial}});
  EXPECT_EQ(no_ds.status, 404);
  EXPECT_EQ(no_ds.body.at("error").at("code"), "dataset_not_found");

  auto missing = api.query({{"dataset", "twitter_sample"}});
  EXPECT_EQ(missing.status, 400);
  EXPECT_EQ(missing.body.at("error").at("code"), "bad_request");

  auto syntax = api.query({{"dataset", "twitter_sample"}, {"text", "SELECT FROM WHERE"}});
  EXPECT_EQ(syntax.status, 400);
  EXPECT_EQ(syntax.body.at("error").at("code"), "query_error");
  EXPECT_TRUE(syntax.body.at("error").contains("line"));
  EXPECT_TRUE(syntax.body.at("error").contains("column"));

  auto unknown = api.ha("ha-999999");
  EXPECT_EQ(unknown.status, 404);
  EXPECT_EQ(unknown.body.at("error").at("code"), "ha_not_found");
}

TEST_F(ServiceTest, HttpRoundTrip) {
  httplib::Server server;
  Api api(*store_);
  api.mount(server);
  int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto health = client.Get("/healthz");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);

  json body = {{"dataset", "twitter_sample"}, {"text", kSocial}};
  auto q = client.Post("/query", body.dump(), "application/json");
  ASSERT_TRUE(q);
  ASSERT_EQ(q->status, 200) << q->body;
  auto ha = json::parse(q->body);
  EXPECT_EQ(ha.at("hubs").size(), 4u);

  const auto* e = find_edge(ha, vid("kristy"), vid("karlfun"));
  ASSERT_NE(e, nullptr);
  auto d = client.Get(e->at("subgraph_ref").get<std::string>());
  ASSERT_TRUE(d);
  EXPECT_EQ(d->status, 200);
  EXPECT_EQ(json::parse(d->body).at("vertex_count"), 19);

  auto got = client.Get("/ha/" + ha.at("id").get<std::string>());
  ASSERT_TRUE(got);
  EXPECT_EQ(json::parse(got->body), ha);

  auto bad = client.Post("/query", "{not json", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  EXPECT_EQ(json::parse(bad->body).at("error").at("code"), "bad_request");

  auto zoom = client.Post("/zoom", json{{"ha_id", ha.at("id")}, {"edge", {vid("bingfish"), vid("kristy")}}}.dump(),
                          "application/json");
  ASSERT_TRUE(zoom);
  EXPECT_EQ(zoom->status, 404);
  EXPECT_EQ(json::parse(zoom->body).at("error").at("code"), "edge_not_found");

  auto nowhere = client.Get("/no/such/route");
  ASSERT_TRUE(nowhere);
  EXPECT_EQ(nowhere->status, 404);
  EXPECT_EQ(json::parse(nowhere->body).at("error").at("code"), "not_found");

  server.stop();
  t.join();
}
