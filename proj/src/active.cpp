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

#include "patland/active.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <sstream>

#include "json.hpp"
#include "patland/error.hpp"
#include "patland/rng.hpp"

namespace patland {

using nlohmann::json;

namespace {

std::string system_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

const char* training_set_name(TrainingSet t) { return t == TrainingSet::kAnnotations ? "annotations" : "all"; }

TrainingSet parse_training_set(const std::string& s) {
  if (s == "all") return TrainingSet::kAllLabels;
  if (s == "annotations") return TrainingSet::kAnnotations;
  throw Error(ErrorCode::kValidation, "unknown training set '" + s + "'");
}

json options_json(const SessionOptions& o) {
  json j;
  j["retrain_cadence"] = o.retrain_cadence;
  j["lambda"] = o.svm.lambda;
  j["epochs"] = o.svm.epochs;
  j["svm_rng_seed"] = o.svm.rng_seed;
  j["training_set"] = training_set_name(o.training_set);
  j["min_df"] = o.min_df;
  j["pool"] = o.pool ? json(*o.pool) : json(nullptr);
  return j;
}

SessionOptions options_from_json(const json& j) {
  SessionOptions o;
  o.retrain_cadence = j.at("retrain_cadence").get<std::size_t>();
  o.svm.lambda = j.at("lambda").get<double>();
  o.svm.epochs = j.at("epochs").get<std::size_t>();
  o.svm.rng_seed = j.at("svm_rng_seed").get<std::uint64_t>();
  o.training_set = parse_training_set(j.at("training_set").get<std::string>());
  o.min_df = j.at("min_df").get<std::size_t>();
  if (!j.at("pool").is_null()) o.pool = j.at("pool").get<std::vector<std::string>>();
  return o;
}

const LabeledExample* find_label(const std::vector<LabeledExample>& labeled, const std::string& id) {
  for (const auto& e : labeled)
    if (e.patent_id == id) return &e;
  return nullptr;
}

}  // namespace

// ---- construction ----------------------------------------------------------------

ActiveLearningSession::ActiveLearningSession(std::shared_ptr<const CorpusStore> corpus, Clock clock, ReplayTag)
    : corpus_(std::move(corpus)), clock_(std::move(clock)) {
  if (!corpus_) throw Error(ErrorCode::kInvalidArgument, "session needs a corpus");
}

ActiveLearningSession::ActiveLearningSession(std::shared_ptr<const CorpusStore> corpus,
                                             std::vector<LabeledExample> seeds, std::uint64_t rng_seed,
                                             SessionOptions options, std::string session_id, Clock clock)
    : ActiveLearningSession(std::move(corpus), std::move(clock), ReplayTag{}) {
  std::lock_guard lock(write_mutex_);
  initialize(std::move(seeds), rng_seed, std::move(options), std::move(session_id), now());
}

std::string ActiveLearningSession::now() const { return clock_ ? clock_() : system_now(); }

void ActiveLearningSession::initialize(std::vector<LabeledExample> seeds, std::uint64_t rng_seed,
                                       SessionOptions options, std::string session_id, const std::string& at) {
  if (options.retrain_cadence == 0) throw Error(ErrorCode::kInvalidArgument, "retrain cadence must be positive");
  std::set<std::string> seen;
  bool pos = false, neg = false;
  for (const auto& e : seeds) {
    if (!corpus_->contains(e.patent_id))
      throw Error(ErrorCode::kNotFound, "seed example '" + e.patent_id + "' is not in the corpus");
    auto violations = validate(e);
    if (!violations.empty())
      throw Error(ErrorCode::kValidation, "seed example '" + e.patent_id + "': " + violations.front().message);
    if (!seen.insert(e.patent_id).second)
      throw Error(ErrorCode::kValidation, "patent '" + e.patent_id + "' appears twice in the seed set");
    (e.label == Label::kPositive ? pos : neg) = true;
  }
  if (!pos || !neg) throw Error(ErrorCode::kPrecondition, "seed examples must contain both labels");

  auto next = std::make_shared<SessionState>();
  next->session_id = std::move(session_id);
  next->rng_seed = rng_seed;
  next->options = options;
  next->labeled = std::move(seeds);
  if (options.pool) {
    for (const auto& id : *options.pool) {
      if (!corpus_->contains(id)) throw Error(ErrorCode::kNotFound, "pool patent '" + id + "' is not in the corpus");
      if (!seen.count(id)) next->pool.insert(id);
    }
  } else {
    for (const auto& r : corpus_->records())
      if (!seen.count(r.patent_id)) next->pool.insert(r.patent_id);
  }

  std::vector<std::vector<std::string>> docs;
  docs.reserve(corpus_->size());
  for (const auto& r : corpus_->records()) docs.push_back(tokenize(r.title + "\n" + r.abstract_text));
  vocabulary_ = build_vocabulary(docs, english_stopwords(), options.min_df);
  features_.clear();
  for (std::size_t i = 0; i < docs.size(); ++i)
    features_.emplace(corpus_->records()[i].patent_id, tfidf_vector(docs[i], vocabulary_));

  train_and_rank(*next);

  json ev;
  ev["seq"] = 0;
  ev["type"] = "init";
  ev["at"] = at;
  ev["session_id"] = next->session_id;
  ev["rng_seed"] = rng_seed;
  ev["options"] = options_json(options);
  json seed_json = json::array();
  for (const auto& e : next->labeled) seed_json.push_back(json::parse(to_json_line(e)));
  ev["seeds"] = seed_json;
  ev["model_hash"] = hex64(next->model_hash);
  commit(std::move(next), ev.dump());
}

const SparseVector& ActiveLearningSession::features(const std::string& patent_id) const {
  return features_.at(patent_id);
}

void ActiveLearningSession::train_and_rank(SessionState& next) const {
  bool annotations_only = false;
  if (next.options.training_set == TrainingSet::kAnnotations) {
    bool pos = false, neg = false;
    for (const auto& e : next.labeled)
      if (e.source == Source::kAnnotator) (e.label == Label::kPositive ? pos : neg) = true;
    annotations_only = pos && neg;
  }
  std::vector<SvmExample> data;
  for (const auto& e : next.labeled) {
    if (annotations_only && e.source != Source::kAnnotator) continue;
    data.push_back({features(e.patent_id), e.label == Label::kPositive ? 1 : -1});
  }
  LinearSvmParams params = next.options.svm;
  params.rng_seed = derive_seed(next.rng_seed ^ next.options.svm.rng_seed, next.retrain_count);
  next.model = train_linear(data, params);
  next.model_hash = model_hash(next.model);

  next.queue.clear();
  next.queue.reserve(next.pool.size());
  for (const auto& id : next.pool) next.queue.push_back({id, margin_distance(next.model, features(id))});
  std::sort(next.queue.begin(), next.queue.end(), [](const QueueEntry& a, const QueueEntry& b) {
    return a.margin != b.margin ? a.margin < b.margin : a.patent_id < b.patent_id;
  });
}

void ActiveLearningSession::commit(std::shared_ptr<SessionState> next, std::string event) {
  next->event_count = log_.size() + 1;
  std::shared_ptr<const SessionState> frozen = std::move(next);
  std::lock_guard lock(read_mutex_);
  log_.push_back(std::move(event));
  state_ = std::move(frozen);
}

std::shared_ptr<const SessionState> ActiveLearningSession::state() const {
  std::lock_guard lock(read_mutex_);
  return state_;
}

std::vector<std::string> ActiveLearningSession::event_log() const {
  std::lock_guard lock(read_mutex_);
  return log_;
}

// ---- queue and labels ------------------------------------------------------------

std::vector<QueueEntry> ActiveLearningSession::next_candidates(std::size_t k) const {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  auto s = state();
  const auto n = std::min(k, s->queue.size());
  return {s->queue.begin(), s->queue.begin() + static_cast<std::ptrdiff_t>(n)};
}

SubmitResult ActiveLearningSession::submit_label(const std::string& patent_id, Label label,
                                                 const std::string& annotator_id) {
  std::lock_guard lock(write_mutex_);
  return submit_locked(patent_id, label, annotator_id, now());
}

SubmitResult ActiveLearningSession::submit_locked(const std::string& patent_id, Label label,
                                                  const std::string& annotator_id, const std::string& at) {
  if (annotator_id.empty()) throw Error(ErrorCode::kInvalidArgument, "annotator_id must be non-empty");
  if (!corpus_->contains(patent_id)) throw Error(ErrorCode::kNotFound, "unknown patent '" + patent_id + "'");
  const auto& cur = *state_;
  if (const auto* existing = find_label(cur.labeled, patent_id)) {
    const std::string existing_label = to_string(existing->label);
    const std::string by = existing->annotator_id ? *existing->annotator_id : to_string(existing->source);
    auto next = std::make_shared<SessionState>(cur);
    next->judgments[annotator_id][patent_id] = label;
    ++next->disputes;
    json ev;
    ev["seq"] = log_.size();
    ev["type"] = "dispute";
    ev["at"] = at;
    ev["patent_id"] = patent_id;
    ev["label"] = to_string(label);
    ev["annotator_id"] = annotator_id;
    ev["existing_label"] = existing_label;
    commit(std::move(next), ev.dump());
    throw ConflictError("patent '" + patent_id + "' is already labeled " + existing_label + " (by " + by + ")",
                        existing_label);
  }
  if (!cur.pool.count(patent_id))
    throw Error(ErrorCode::kPrecondition, "patent '" + patent_id + "' is not in the session pool");

  auto next = std::make_shared<SessionState>(cur);
  next->labeled.push_back(make_annotation(patent_id, label, annotator_id, at));
  next->pool.erase(patent_id);
  std::erase_if(next->queue, [&](const QueueEntry& q) { return q.patent_id == patent_id; });
  ++next->labels_since_retrain;
  ++next->annotator_labels;
  next->judgments[annotator_id][patent_id] = label;
  json ev;
  ev["seq"] = log_.size();
  ev["type"] = "label";
  ev["at"] = at;
  ev["patent_id"] = patent_id;
  ev["label"] = to_string(label);
  ev["annotator_id"] = annotator_id;
  const auto total = next->labeled.size();
  auto pending = std::make_shared<SessionState>(*next);
  commit(std::move(next), ev.dump());

  SubmitResult result;
  result.labels_total = total;
  result.retrained = retrain_locked(*pending, at);
  return result;
}

void ActiveLearningSession::override_label(const std::string& patent_id, Label label,
                                           const std::string& annotator_id) {
  std::lock_guard lock(write_mutex_);
  override_locked(patent_id, label, annotator_id, now());
}

void ActiveLearningSession::override_locked(const std::string& patent_id, Label label,
                                            const std::string& annotator_id, const std::string& at) {
  if (annotator_id.empty()) throw Error(ErrorCode::kInvalidArgument, "annotator_id must be non-empty");
  if (!corpus_->contains(patent_id)) throw Error(ErrorCode::kNotFound, "unknown patent '" + patent_id + "'");
  auto next = std::make_shared<SessionState>(*state_);
  auto it = std::find_if(next->labeled.begin(), next->labeled.end(),
                         [&](const LabeledExample& e) { return e.patent_id == patent_id; });
  if (it == next->labeled.end())
    throw Error(ErrorCode::kPrecondition, "patent '" + patent_id + "' has no label to override");
  const std::string previous = to_string(it->label);
  if (it->source == Source::kAnnotator) {
    it->label = label;
    it->annotator_id = annotator_id;
    it->labeled_at = at;
  } else {
    *it = make_annotation(patent_id, label, annotator_id, at);
  }
  next->judgments[annotator_id][patent_id] = label;
  json ev;
  ev["seq"] = log_.size();
  ev["type"] = "override";
  ev["at"] = at;
  ev["patent_id"] = patent_id;
  ev["label"] = to_string(label);
  ev["annotator_id"] = annotator_id;
  ev["previous_label"] = previous;
  commit(std::move(next), ev.dump());
}

bool ActiveLearningSession::maybe_retrain() {
  std::lock_guard lock(write_mutex_);
  SessionState next = *state_;
  return retrain_locked(next, now());
}

bool ActiveLearningSession::retrain_locked(SessionState& next, const std::string& at) {
  if (next.labels_since_retrain < next.options.retrain_cadence) return false;
  ++next.retrain_count;
  train_and_rank(next);
  next.labels_since_retrain = 0;
  json ev;
  ev["seq"] = log_.size();
  ev["type"] = "retrain";
  ev["at"] = at;
  ev["model_hash"] = hex64(next.model_hash);
  ev["labels_total"] = next.labeled.size();
  ev["retrain_count"] = next.retrain_count;
  commit(std::make_shared<SessionState>(std::move(next)), ev.dump());
  return true;
}

// ---- replay -----------------------------------------------------------------------

std::unique_ptr<ActiveLearningSession> ActiveLearningSession::replay(std::shared_ptr<const CorpusStore> corpus,
                                                                     const std::vector<std::string>& event_log) {
  if (event_log.empty()) throw Error(ErrorCode::kFormat, "empty event log");
  std::unique_ptr<ActiveLearningSession> session(
      new ActiveLearningSession(std::move(corpus), Clock{}, ReplayTag{}));
  std::lock_guard lock(session->write_mutex_);
  std::size_t checked = 0;
  for (std::size_t i = 0; i < event_log.size(); ++i) {
    json ev;
    try {
      ev = json::parse(event_log[i]);
    } catch (const json::parse_error& e) {
      throw ParseError(ErrorCode::kParse, i + 1, std::string("malformed event: ") + e.what());
    }
    try {
      const auto type = ev.at("type").get<std::string>();
      const auto at = ev.at("at").get<std::string>();
      if (i == 0) {
        if (type != "init") throw Error(ErrorCode::kFormat, "event log must start with an init event");
        std::vector<LabeledExample> seeds;
        for (const auto& s : ev.at("seeds")) seeds.push_back(label_from_json_line(s.dump()));
        session->initialize(std::move(seeds), ev.at("rng_seed").get<std::uint64_t>(),
                            options_from_json(ev.at("options")), ev.at("session_id").get<std::string>(), at);
      } else if (type == "label") {
        session->submit_locked(ev.at("patent_id").get<std::string>(),
                               parse_label(ev.at("label").get<std::string>()),
                               ev.at("annotator_id").get<std::string>(), at);
      } else if (type == "dispute") {
        try {
          session->submit_locked(ev.at("patent_id").get<std::string>(),
                                 parse_label(ev.at("label").get<std::string>()),
                                 ev.at("annotator_id").get<std::string>(), at);
        } catch (const ConflictError&) {
        }
      } else if (type == "override") {
        session->override_locked(ev.at("patent_id").get<std::string>(),
                                 parse_label(ev.at("label").get<std::string>()),
                                 ev.at("annotator_id").get<std::string>(), at);
      } else if (type == "retrain") {
        // Regenerated by the label event that reached the cadence.
      } else {
        throw Error(ErrorCode::kFormat, "unknown event type '" + type + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.code(), i + 1, e.what());
    } catch (const json::exception& e) {
      throw ParseError(ErrorCode::kFormat, i + 1, e.what());
    }
    if (session->log_.size() < i + 1)
      throw ParseError(ErrorCode::kValidation, i + 1, "recorded event was not reproduced by replay");
    for (; checked < session->log_.size(); ++checked) {
      if (checked >= event_log.size() || session->log_[checked] != event_log[checked])
        throw ParseError(ErrorCode::kValidation, checked + 1, "replay diverged from the recorded event log");
    }
  }
  if (session->log_.size() != event_log.size())
    throw Error(ErrorCode::kValidation, "replay produced events missing from the recorded log");
  return session;
}

// ---- stats ------------------------------------------------------------------------

std::vector<AnnotatorAgreement> pairwise_agreement(
    const std::map<std::string, std::map<std::string, Label>>& judgments) {
  std::vector<AnnotatorAgreement> out;
  for (auto a = judgments.begin(); a != judgments.end(); ++a) {
    for (auto b = std::next(a); b != judgments.end(); ++b) {
      std::size_t shared = 0;
      for (const auto& [id, _] : a->second) shared += b->second.count(id);
      if (shared == 0) continue;
      out.push_back({a->first, b->first, shared, cohens_kappa(a->second, b->second)});
    }
  }
  return out;
}

SessionStats ActiveLearningSession::stats() const {
  auto s = state();
  SessionStats st;
  st.session_id = s->session_id;
  st.pool_size = s->pool.size();
  st.queue_size = s->queue.size();
  st.labeled_total = s->labeled.size();
  for (const auto& e : s->labeled) {
    (e.label == Label::kPositive ? st.positive : st.negative)++;
    if (e.annotator_id) ++st.labels_by_annotator[*e.annotator_id];
  }
  st.categories = count_categories(s->labeled);
  st.annotator_labels = s->annotator_labels;
  st.retrain_count = s->retrain_count;
  st.labels_since_retrain = s->labels_since_retrain;
  st.retrain_cadence = s->options.retrain_cadence;
  st.disputes = s->disputes;
  st.model_hash = s->model_hash;
  st.agreement = pairwise_agreement(s->judgments);
  return st;
}

std::string stats_to_json(const SessionStats& st) {
  json j;
  j["session_id"] = st.session_id;
  j["pool_size"] = st.pool_size;
  j["queue_size"] = st.queue_size;
  j["labels_total"] = st.labeled_total;
  j["positive"] = st.positive;
  j["negative"] = st.negative;
  j["categories"] = {{"hard_positive", st.categories[0]},
                     {"hard_negative", st.categories[1]},
                     {"easy_positive", st.categories[2]},
                     {"easy_negative", st.categories[3]}};
  j["annotator_labels"] = st.annotator_labels;
  j["labels_by_annotator"] = st.labels_by_annotator;
  j["retrain_count"] = st.retrain_count;
  j["trainings"] = st.retrain_count + 1;
  j["labels_since_retrain"] = st.labels_since_retrain;
  j["retrain_cadence"] = st.retrain_cadence;
  j["disputes"] = st.disputes;
  j["model_hash"] = hex64(st.model_hash);
  json agreement = json::array();
  for (const auto& a : st.agreement)
    agreement.push_back({{"annotator_a", a.annotator_a}, {"annotator_b", a.annotator_b},
                         {"shared_items", a.shared_items}, {"kappa", a.kappa}});
  j["agreement"] = agreement;
  return j.dump();
}

}  // namespace patland
