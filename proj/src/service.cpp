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

#include "patland/service.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "patland/error.hpp"

namespace patland {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kPrefix = "/api/v1";

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParse:
    case ErrorCode::kValidation:
    case ErrorCode::kFormat: return 400;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kConflict: return 409;
    case ErrorCode::kPrecondition: return 422;
    default: return 500;
  }
}

ApiResponse error_response(ErrorCode code, const std::string& message, const json& detail = nullptr) {
  json j;
  j["code"] = error_code_name(code);
  j["message"] = message;
  if (!detail.is_null()) j["detail"] = detail;
  return {http_status(code), j.dump()};
}

ApiResponse ok(const json& j, int status = 200) { return {status, j.dump()}; }

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : path) {
    if (c == '/') {
      if (!cur.empty()) parts.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) parts.push_back(std::move(cur));
  return parts;
}

bool valid_session_id(const std::string& id) {
  return !id.empty() && id.size() <= 64 && std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
  });
}

json parse_body(const std::string& body) {
  json j;
  try {
    j = json::parse(body.empty() ? "{}" : body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("request body is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kValidation, "request body must be a JSON object");
  return j;
}

std::string required_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string() || it->get<std::string>().empty())
    throw Error(ErrorCode::kValidation, std::string("field '") + key + "' must be a non-empty string");
  return it->get<std::string>();
}

std::vector<std::string> string_list(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  if (!it->is_array()) throw Error(ErrorCode::kValidation, std::string("field '") + key + "' must be an array");
  std::vector<std::string> out;
  for (const auto& v : *it) {
    if (!v.is_string()) throw Error(ErrorCode::kValidation, std::string("field '") + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::string excerpt(const std::string& text, std::size_t limit) {
  if (text.size() <= limit) return text;
  std::size_t cut = limit;
  // Do not split a UTF-8 sequence.
  while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) --cut;
  return text.substr(0, cut);
}

json record_json(const PatentRecord& r) { return json::parse(to_json_line(r)); }

}  // namespace

ApiService::ApiService(ServiceConfig config) : config_(std::move(config)) {
  if (!config_.corpus) throw Error(ErrorCode::kInvalidArgument, "service needs a corpus");
}

std::string ApiService::log_path(const std::string& id) const {
  return (fs::path(config_.state_dir) / "sessions" / (id + ".events.jsonl")).string();
}

std::shared_ptr<ApiService::Entry> ApiService::find(const std::string& id) const {
  std::shared_lock lock(sessions_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::kNotFound, "unknown session '" + id + "'");
  return it->second;
}

std::vector<std::string> ApiService::session_ids() const {
  std::shared_lock lock(sessions_mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, _] : sessions_) ids.push_back(id);
  return ids;
}

std::shared_ptr<ActiveLearningSession> ApiService::session(const std::string& id) const {
  return find(id)->session;
}

void ApiService::persist(Entry& entry) {
  if (config_.state_dir.empty()) return;
  std::lock_guard lock(entry.persist_mutex);
  const auto log = entry.session->event_log();
  if (entry.persisted >= log.size()) return;
  const auto path = log_path(entry.session->state()->session_id);
  std::error_code ec;
  fs::create_directories(fs::path(path).parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::kIo, "cannot append to '" + path + "'");
  for (std::size_t i = entry.persisted; i < log.size(); ++i) out << log[i] << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "failed writing '" + path + "'");
  entry.persisted = log.size();
}

std::size_t ApiService::recover() {
  if (config_.state_dir.empty()) return 0;
  const auto dir = fs::path(config_.state_dir) / "sessions";
  if (!fs::exists(dir)) return 0;
  std::vector<fs::path> files;
  for (const auto& f : fs::directory_iterator(dir)) {
    const auto name = f.path().filename().string();
    if (name.size() > 13 && name.ends_with(".events.jsonl")) files.push_back(f.path());
  }
  std::sort(files.begin(), files.end());
  std::size_t restored = 0;
  for (const auto& path : files) {
    std::ifstream in(path, std::ios::binary);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) lines.push_back(line);
    std::shared_ptr<ActiveLearningSession> s;
    try {
      s = ActiveLearningSession::replay(config_.corpus, lines);
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ": " + e.what());
    }
    auto entry = std::make_shared<Entry>();
    entry->session = std::move(s);
    entry->persisted = lines.size();
    const auto id = entry->session->state()->session_id;
    std::unique_lock lock(sessions_mutex_);
    sessions_[id] = std::move(entry);
    ++restored;
  }
  return restored;
}

ApiResponse ApiService::handle(const std::string& method, const std::string& path,
                               const std::multimap<std::string, std::string>& query, const std::string& body) {
  try {
    if (method == "OPTIONS") return {204, ""};
    const auto parts = split_path(path);
    if (parts.size() < 3 || "/" + parts[0] + "/" + parts[1] != kPrefix)
      return error_response(ErrorCode::kNotFound, "no route for " + method + " " + path);
    const std::string& resource = parts[2];
    if (resource == "sessions") {
      if (parts.size() == 3) {
        if (method == "POST") return create_session(body);
        if (method == "GET") return ok({{"sessions", session_ids()}});
      } else if (parts.size() == 5) {
        auto entry = find(parts[3]);
        const auto& action = parts[4];
        if (action == "queue" && method == "GET") return queue(*entry, query);
        if (action == "labels" && method == "POST") return post_label(*entry, body, false);
        if (action == "overrides" && method == "POST") return post_label(*entry, body, true);
        if (action == "stats" && method == "GET") return stats(*entry);
      }
    } else if (resource == "patents" && parts.size() == 4 && method == "GET") {
      return patent(parts[3]);
    }
    return error_response(ErrorCode::kNotFound, "no route for " + method + " " + path);
  } catch (const ConflictError& e) {
    return error_response(ErrorCode::kConflict, e.what(), {{"existing_label", e.existing_label()}});
  } catch (const Error& e) {
    return error_response(e.code(), e.what());
  } catch (const std::exception& e) {
    return error_response(ErrorCode::kInternal, e.what());
  }
}

ApiResponse ApiService::create_session(const std::string& body) {
  const json j = parse_body(body);
  for (const auto& [key, _] : j.items()) {
    static const std::set<std::string> known = {"session_id", "seeds",          "seed_ids",     "antiseed_ids",
                                                "rng_seed",   "retrain_cadence", "training_set", "pool"};
    if (!known.count(key)) throw Error(ErrorCode::kValidation, "unknown field '" + key + "'");
  }
  std::vector<LabeledExample> seeds;
  if (auto it = j.find("seeds"); it != j.end()) {
    if (!it->is_array()) throw Error(ErrorCode::kValidation, "field 'seeds' must be an array of label objects");
    for (const auto& s : *it) seeds.push_back(label_from_json_line(s.dump()));
  }
  for (const auto& id : string_list(j, "seed_ids")) seeds.push_back(make_seed(id));
  for (const auto& id : string_list(j, "antiseed_ids")) seeds.push_back(make_antiseed(id));

  SessionOptions options;
  if (auto it = j.find("retrain_cadence"); it != j.end()) {
    if (!it->is_number_unsigned()) throw Error(ErrorCode::kValidation, "retrain_cadence must be a positive integer");
    options.retrain_cadence = it->get<std::size_t>();
  }
  if (auto it = j.find("training_set"); it != j.end()) {
    const auto v = it->get<std::string>();
    if (v == "all") options.training_set = TrainingSet::kAllLabels;
    else if (v == "annotations") options.training_set = TrainingSet::kAnnotations;
    else throw Error(ErrorCode::kValidation, "training_set must be 'all' or 'annotations'");
  }
  if (j.contains("pool") && !j.at("pool").is_null()) options.pool = string_list(j, "pool");
  std::uint64_t rng_seed = 0;
  if (auto it = j.find("rng_seed"); it != j.end()) {
    if (!it->is_number_unsigned()) throw Error(ErrorCode::kValidation, "rng_seed must be a non-negative integer");
    rng_seed = it->get<std::uint64_t>();
  }

  std::string id;
  if (auto it = j.find("session_id"); it != j.end()) {
    id = it->get<std::string>();
    if (!valid_session_id(id))
      throw Error(ErrorCode::kValidation, "session_id may contain only letters, digits, '-' and '_'");
  }
  std::unique_lock lock(sessions_mutex_);
  if (id.empty()) {
    do {
      id = "s" + std::to_string(next_id_++);
    } while (sessions_.count(id));
  } else if (sessions_.count(id)) {
    return error_response(ErrorCode::kConflict, "session '" + id + "' already exists");
  }
  auto entry = std::make_shared<Entry>();
  entry->session = std::make_shared<ActiveLearningSession>(config_.corpus, std::move(seeds), rng_seed, options, id,
                                                           config_.clock);
  sessions_[id] = entry;
  lock.unlock();
  persist(*entry);
  const auto st = entry->session->stats();
  return ok({{"session_id", id},
             {"pool_size", st.pool_size},
             {"queue_size", st.queue_size},
             {"labels_total", st.labeled_total}},
            201);
}

ApiResponse ApiService::queue(Entry& entry, const std::multimap<std::string, std::string>& query) {
  std::size_t k = config_.default_queue_k;
  if (auto it = query.find("k"); it != query.end()) {
    const auto& v = it->second;
    if (v.empty() || !std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; }) ||
        v.size() > 9 || std::stoul(v) == 0)
      throw Error(ErrorCode::kInvalidArgument, "k must be a positive integer");
    k = std::stoul(v);
  }
  std::string annotator;
  if (auto it = query.find("annotator_id"); it != query.end()) annotator = it->second;

  const auto items = entry.session->next_candidates(k);
  json out = json::array();
  for (const auto& q : items) {
    const auto& r = config_.corpus->record(q.patent_id);
    out.push_back({{"patent_id", r.patent_id},
                   {"title", r.title},
                   {"abstract", r.abstract_text},
                   {"claims_excerpt", excerpt(r.claims, config_.claims_excerpt_chars)},
                   {"cpc_codes", r.cpc_codes},
                   {"uncertainty", q.margin}});
  }
  if (!annotator.empty()) {
    std::lock_guard lock(entry.served_mutex);
    for (const auto& q : items) entry.served[annotator].insert(q.patent_id);
  }
  return ok({{"session_id", entry.session->state()->session_id}, {"items", out}});
}

ApiResponse ApiService::post_label(Entry& entry, const std::string& body, bool is_override) {
  const json j = parse_body(body);
  const auto patent_id = required_string(j, "patent_id");
  const auto label = parse_label(required_string(j, "label"));
  const auto annotator = required_string(j, "annotator_id");
  if (is_override) {
    entry.session->override_label(patent_id, label, annotator);
    persist(entry);
    return ok({{"labels_total", entry.session->state()->labeled.size()}});
  }
  SubmitResult r;
  try {
    r = entry.session->submit_label(patent_id, label, annotator);
  } catch (const ConflictError&) {
    persist(entry);
    throw;
  }
  persist(entry);
  return ok({{"retrained", r.retrained}, {"labels_total", r.labels_total}});
}

ApiResponse ApiService::stats(Entry& entry) {
  return {200, stats_to_json(entry.session->stats())};
}

ApiResponse ApiService::patent(const std::string& id) {
  const auto* r = config_.corpus->find(id);
  if (r == nullptr) throw Error(ErrorCode::kNotFound, "unknown patent '" + id + "'");
  return ok(record_json(*r));
}

// ---- HTTP transport -----------------------------------------------------------------

struct HttpServer::Impl {
  ApiService& service;
  httplib::Server server;

  explicit Impl(ApiService& s) : service(s) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
      std::multimap<std::string, std::string> query(req.params.begin(), req.params.end());
      const auto r = service.handle(req.method, req.path, query, req.body);
      res.status = r.status;
      res.set_header("Access-Control-Allow-Origin", service.cors_origin());
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      if (!r.body.empty()) res.set_content(r.body, "application/json");
    };
    const std::string pattern = R"(/.*)";
    server.Get(pattern, handler);
    server.Post(pattern, handler);
    server.Put(pattern, handler);
    server.Delete(pattern, handler);
    server.Options(pattern, handler);
  }
};

HttpServer::HttpServer(ApiService& service) : impl_(std::make_unique<Impl>(service)) {}
HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound <= 0) throw Error(ErrorCode::kIo, "cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port))
    throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void HttpServer::serve() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace patland
