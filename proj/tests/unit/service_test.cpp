// Copyright 2026 The patland Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "patland/service.hpp"

using namespace patland;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const char* kOn[] = {"neural", "network", "training", "gradient", "layer", "tensor"};
const char* kOff[] = {"hinge", "door", "latch", "bracket", "spring", "frame"};

std::shared_ptr<const CorpusStore> corpus(std::size_t n = 40) {
  std::vector<PatentRecord> records;
  for (std::size_t i = 0; i < n; ++i) {
    PatentRecord r;
    char id[8];
    std::snprintf(id, sizeof id, "US%03zu", i);
    r.patent_id = id;
    r.title = "item " + std::to_string(i);
    for (std::size_t t = 0; t < 8; ++t) {
      const bool on = (i * 7 + t * 3) % 10 < (i < n / 2 ? 8u : 2u);
      r.abstract_text += std::string(on ? kOn[(i + t) % 6] : kOff[(i * t) % 6]) + " ";
    }
    r.claims = std::string(1500, 'c');
    r.cpc_codes = {"G06N3/08"};
    records.push_back(std::move(r));
  }
  return std::make_shared<const CorpusStore>(std::move(records));
}

ServiceConfig config(const std::string& state_dir = {}) {
  ServiceConfig c;
  c.corpus = corpus();
  c.state_dir = state_dir;
  c.clock = [] { return std::string("2026-01-01T00:00:00Z"); };
  return c;
}

const std::string kCreate =
    R"({"session_id":"alpha","rng_seed":3,"seed_ids":["US000","US001"],"antiseed_ids":["US039","US038"]})";

json body(const ApiResponse& r) { return json::parse(r.body); }

ApiResponse get(ApiService& s, const std::string& path, std::multimap<std::string, std::string> q = {}) {
  return s.handle("GET", path, q, "");
}

ApiResponse post(ApiService& s, const std::string& path, const std::string& b) { return s.handle("POST", path, {}, b); }

std::string label_body(const std::string& id, const std::string& label, const std::string& who = "ann") {
  return json{{"patent_id", id}, {"label", label}, {"annotator_id", who}}.dump();
}

std::string truth(const std::string& id) { return std::stoi(id.substr(2)) < 20 ? "positive" : "negative"; }

// Labels the head of the queue n times; returns the retrained flags.
std::vector<bool> label_head(ApiService& s, int n) {
  std::vector<bool> flags;
  for (int i = 0; i < n; ++i) {
    const auto q = body(get(s, "/api/v1/sessions/alpha/queue", {{"k", "1"}}));
    const auto id = q["items"][0]["patent_id"].get<std::string>();
    const auto r = post(s, "/api/v1/sessions/alpha/labels", label_body(id, truth(id)));
    EXPECT_EQ(r.status, 200) << r.body;
    flags.push_back(body(r)["retrained"].get<bool>());
  }
  return flags;
}

fs::path temp_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("patland_service_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(ServiceTest, CreateSessionAndQueueOrdering) {
  ApiService s(config());
  const auto c = post(s, "/api/v1/sessions", kCreate);
  ASSERT_EQ(c.status, 201) << c.body;
  EXPECT_EQ(body(c)["pool_size"], 36);
  EXPECT_EQ(body(c)["labels_total"], 4);

  const auto q = get(s, "/api/v1/sessions/alpha/queue", {{"k", "3"}});
  ASSERT_EQ(q.status, 200);
  const auto items = body(q)["items"];
  ASSERT_EQ(items.size(), 3u);
  const auto expected = s.session("alpha")->next_candidates(3);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(items[i]["patent_id"], expected[i].patent_id);
    EXPECT_DOUBLE_EQ(items[i]["uncertainty"].get<double>(), expected[i].margin);
    if (i > 0) EXPECT_LE(items[i - 1]["uncertainty"].get<double>(), items[i]["uncertainty"].get<double>());
    EXPECT_EQ(items[i]["claims_excerpt"].get<std::string>().size(), 1000u);
  }
  EXPECT_EQ(body(get(s, "/api/v1/sessions/alpha/queue"))["items"].size(), 10u);
  EXPECT_EQ(body(get(s, "/api/v1/sessions"))["sessions"], json::array({"alpha"}));
}

TEST(ServiceTest, EmptyPoolGivesEmptyList) {
  ApiService s(config());
  const auto c = post(s, "/api/v1/sessions",
                      R"({"session_id":"alpha","seed_ids":["US000"],"antiseed_ids":["US039"],"pool":[]})");
  ASSERT_EQ(c.status, 201) << c.body;
  const auto q = get(s, "/api/v1/sessions/alpha/queue", {{"k", "5"}});
  EXPECT_EQ(q.status, 200);
  EXPECT_TRUE(body(q)["items"].empty());
}

TEST(ServiceTest, ErrorObjects) {
  ApiService s(config());
  const auto missing = get(s, "/api/v1/sessions/nope/queue");
  EXPECT_EQ(missing.status, 404);
  EXPECT_EQ(body(missing)["code"], "not_found");
  EXPECT_TRUE(body(missing).contains("message"));

  const auto patent = get(s, "/api/v1/patents/US999");
  EXPECT_EQ(patent.status, 404);
  EXPECT_EQ(body(patent)["code"], "not_found");
  EXPECT_EQ(get(s, "/api/v2/sessions").status, 404);

  post(s, "/api/v1/sessions", kCreate);
  EXPECT_EQ(post(s, "/api/v1/sessions", kCreate).status, 409);
  EXPECT_EQ(post(s, "/api/v1/sessions", "{not json").status, 400);
  EXPECT_EQ(post(s, "/api/v1/sessions", R"({"bogus":1})").status, 400);
  EXPECT_EQ(post(s, "/api/v1/sessions", R"({"seed_ids":["US000","US001"]})").status, 422);
  EXPECT_EQ(get(s, "/api/v1/sessions/alpha/queue", {{"k", "0"}}).status, 400);
  EXPECT_EQ(get(s, "/api/v1/sessions/alpha/queue", {{"k", "x"}}).status, 400);
  EXPECT_EQ(post(s, "/api/v1/sessions/alpha/labels", R"({"patent_id":"US010"})").status, 400);
  const auto unknown = post(s, "/api/v1/sessions/alpha/labels", label_body("US999", "positive"));
  EXPECT_EQ(unknown.status, 404);
  EXPECT_EQ(s.handle("OPTIONS", "/api/v1/sessions", {}, "").status, 204);
}

TEST(ServiceTest, GetPatent) {
  ApiService s(config());
  const auto r = get(s, "/api/v1/patents/US005");
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(body(r)["patent_id"], "US005");
  EXPECT_EQ(body(r)["claims"].get<std::string>().size(), 1500u);
}

TEST(ServiceTest, TenthLabelRetrains) {
  ApiService s(config());
  post(s, "/api/v1/sessions", kCreate);
  const auto flags = label_head(s, 10);
  for (int i = 0; i < 9; ++i) EXPECT_FALSE(flags[i]) << i;
  EXPECT_TRUE(flags[9]);
}

TEST(ServiceTest, RelabelConflictEchoesExistingLabel) {
  ApiService s(config());
  post(s, "/api/v1/sessions", kCreate);
  EXPECT_EQ(post(s, "/api/v1/sessions/alpha/labels", label_body("US010", "positive", "a")).status, 200);
  const auto r = post(s, "/api/v1/sessions/alpha/labels", label_body("US010", "negative", "b"));
  EXPECT_EQ(r.status, 409);
  EXPECT_EQ(body(r)["code"], "conflict");
  EXPECT_EQ(body(r)["detail"]["existing_label"], "positive");
  const auto st = body(get(s, "/api/v1/sessions/alpha/stats"));
  EXPECT_EQ(st["disputes"], 1);
  const auto o = post(s, "/api/v1/sessions/alpha/overrides", label_body("US010", "negative", "lead"));
  EXPECT_EQ(o.status, 200) << o.body;
}

TEST(ServiceTest, StatsAfterTwelveLabels) {
  ApiService s(config());
  post(s, "/api/v1/sessions", kCreate);
  const auto fresh = body(get(s, "/api/v1/sessions/alpha/stats"));
  EXPECT_EQ(fresh["labels_total"], 4);
  EXPECT_EQ(fresh["positive"], 2);
  EXPECT_EQ(fresh["negative"], 2);
  EXPECT_EQ(fresh["retrain_count"], 0);
  label_head(s, 12);
  const auto st = body(get(s, "/api/v1/sessions/alpha/stats"));
  EXPECT_EQ(st["retrain_count"], 1);
  EXPECT_EQ(st["trainings"], 2);
  EXPECT_EQ(st["labels_since_retrain"], 2);
  EXPECT_EQ(st["labels_total"], 16);
  EXPECT_EQ(st["pool_size"], 24);
}

TEST(ServiceTest, ConcurrentDuplicatePostsExactlyOneWins) {
  ApiService s(config());
  post(s, "/api/v1/sessions", kCreate);
  std::atomic<int> ok{0}, conflict{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      const auto r = post(s, "/api/v1/sessions/alpha/labels", label_body("US012", "positive", "t" + std::to_string(t)));
      if (r.status == 200) ++ok;
      if (r.status == 409) ++conflict;
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(ok.load(), 1);
  EXPECT_EQ(conflict.load(), 7);
}

TEST(ServiceTest, PersistenceAndRecovery) {
  const auto dir = temp_dir("persist");
  std::string before;
  {
    ApiService s(config(dir.string()));
    post(s, "/api/v1/sessions", kCreate);
    label_head(s, 11);
    post(s, "/api/v1/sessions/alpha/labels", label_body("US000", "negative", "late"));
    before = get(s, "/api/v1/sessions/alpha/stats").body;
    EXPECT_TRUE(fs::exists(dir / "sessions" / "alpha.events.jsonl"));
  }
  ApiService restored(config(dir.string()));
  EXPECT_EQ(restored.recover(), 1u);
  EXPECT_EQ(get(restored, "/api/v1/sessions/alpha/stats").body, before);
  // New sessions created after recovery do not collide with restored ids.
  const auto c = post(restored, "/api/v1/sessions", R"({"seed_ids":["US000"],"antiseed_ids":["US039"]})");
  EXPECT_EQ(c.status, 201);
  fs::remove_all(dir);
}

TEST(ServiceTest, RealSocketRoundTrip) {
  ApiService s(config());
  HttpServer server(s);
  const int port = server.bind("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  std::thread loop([&] { server.serve(); });

  httplib::Client client("127.0.0.1", port);
  client.set_connection_timeout(5);
  auto created = client.Post("/api/v1/sessions", kCreate, "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  EXPECT_EQ(created->get_header_value("Access-Control-Allow-Origin"), "*");
  EXPECT_NE(created->get_header_value("Content-Type").find("application/json"), std::string::npos);
  auto queue = client.Get("/api/v1/sessions/alpha/queue?k=2");
  ASSERT_TRUE(queue);
  EXPECT_EQ(queue->status, 200);
  EXPECT_EQ(json::parse(queue->body)["items"].size(), 2u);
  auto missing = client.Get("/api/v1/sessions/zzz/stats");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  EXPECT_EQ(json::parse(missing->body)["code"], "not_found");

  server.stop();
  loop.join();
}
