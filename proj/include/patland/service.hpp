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

#ifndef PATLAND_SERVICE_HPP_
#define PATLAND_SERVICE_HPP_

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "patland/active.hpp"
#include "patland/corpus.hpp"

namespace patland {

struct ApiResponse {
  int status = 200;
  std::string body;  // JSON, empty for 204
};

struct ServiceConfig {
  std::shared_ptr<const CorpusStore> corpus;
  // Event logs go to <state_dir>/sessions/<id>.events.jsonl; empty disables persistence.
  std::string state_dir;
  std::string cors_origin = "*";
  std::size_t default_queue_k = 10;
  std::size_t claims_excerpt_chars = 1000;
  ActiveLearningSession::Clock clock;
};

// Transport-independent handler for the /api/v1 endpoints:
//
//   POST /api/v1/sessions                 create a session
//   GET  /api/v1/sessions                 list session ids
//   GET  /api/v1/sessions/{id}/queue?k=N  most uncertain pool items
//   POST /api/v1/sessions/{id}/labels     {patent_id, label, annotator_id}
//   POST /api/v1/sessions/{id}/overrides  {patent_id, label, annotator_id}
//   GET  /api/v1/sessions/{id}/stats
//   GET  /api/v1/patents/{id}
//
// Errors are {code, message, detail?} with an HTTP-style status.
class ApiService {
 public:
  explicit ApiService(ServiceConfig config);

  ApiResponse handle(const std::string& method, const std::string& path,
                     const std::multimap<std::string, std::string>& query, const std::string& body);

  // Replays every persisted event log under state_dir; returns the number of
  // sessions restored.
  std::size_t recover();

  std::vector<std::string> session_ids() const;
  std::shared_ptr<ActiveLearningSession> session(const std::string& id) const;
  const std::string& cors_origin() const { return config_.cors_origin; }

 private:
  struct Entry {
    std::shared_ptr<ActiveLearningSession> session;
    std::mutex persist_mutex;
    std::size_t persisted = 0;
    std::mutex served_mutex;
    std::map<std::string, std::set<std::string>> served;  // annotator -> ids handed out
  };

  ApiResponse create_session(const std::string& body);
  ApiResponse queue(Entry& entry, const std::multimap<std::string, std::string>& query);
  ApiResponse post_label(Entry& entry, const std::string& body, bool is_override);
  ApiResponse stats(Entry& entry);
  ApiResponse patent(const std::string& id);
  std::shared_ptr<Entry> find(const std::string& id) const;
  void persist(Entry& entry);
  std::string log_path(const std::string& id) const;

  ServiceConfig config_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::atomic<std::size_t> next_id_{1};
};

// Blocking HTTP front end. port 0 binds an ephemeral port.
class HttpServer {
 public:
  explicit HttpServer(ApiService& service);
  ~HttpServer();

  // Binds; returns the bound port. Throws kIo on failure.
  int bind(const std::string& host, int port);
  // Serves until stop() is called.
  void serve();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace patland

#endif  // PATLAND_SERVICE_HPP_
