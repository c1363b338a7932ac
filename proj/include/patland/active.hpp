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

#ifndef PATLAND_ACTIVE_HPP_
#define PATLAND_ACTIVE_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "patland/corpus.hpp"
#include "patland/eval.hpp"
#include "patland/features.hpp"
#include "patland/svm.hpp"

namespace patland {

enum class TrainingSet {
  kAllLabels,    // seeds, anti-seeds and annotations
  kAnnotations,  // annotations only, once they contain both classes
};

struct SessionOptions {
  std::size_t retrain_cadence = 10;
  LinearSvmParams svm;
  TrainingSet training_set = TrainingSet::kAllLabels;
  // Candidate pool. Unset: every corpus patent without a seed label.
  std::optional<std::vector<std::string>> pool;
  std::size_t min_df = 1;

  friend bool operator==(const SessionOptions&, const SessionOptions&) = default;
};

struct QueueEntry {
  std::string patent_id;
  double margin = 0.0;  // margin_distance under the current model

  friend bool operator==(const QueueEntry&, const QueueEntry&) = default;
};

// Immutable view of a session after one committed mutation.
struct SessionState {
  std::string session_id;
  std::uint64_t rng_seed = 0;
  SessionOptions options;
  std::vector<LabeledExample> labeled;  // in labeling order
  std::set<std::string> pool;
  std::vector<QueueEntry> queue;  // ascending (margin, patent_id)
  LinearSvmModel model;
  std::uint64_t model_hash = 0;
  std::size_t labels_since_retrain = 0;
  std::size_t retrain_count = 0;  // cadence retrains, not counting the initial fit
  std::size_t annotator_labels = 0;
  std::size_t disputes = 0;
  // Every judgment seen per annotator, including rejected relabel attempts.
  std::map<std::string, std::map<std::string, Label>> judgments;
  std::size_t event_count = 0;

  friend bool operator==(const SessionState&, const SessionState&) = default;
};

struct AnnotatorAgreement {
  std::string annotator_a;
  std::string annotator_b;
  std::size_t shared_items = 0;
  double kappa = 0.0;
};

struct SessionStats {
  std::string session_id;
  std::size_t pool_size = 0;
  std::size_t queue_size = 0;
  std::size_t labeled_total = 0;
  std::size_t positive = 0;
  std::size_t negative = 0;
  CategoryCounts categories{};
  std::size_t annotator_labels = 0;
  std::map<std::string, std::size_t> labels_by_annotator;
  std::size_t retrain_count = 0;
  std::size_t labels_since_retrain = 0;
  std::size_t retrain_cadence = 0;
  std::size_t disputes = 0;
  std::uint64_t model_hash = 0;
  std::vector<AnnotatorAgreement> agreement;
};

struct SubmitResult {
  bool retrained = false;
  std::size_t labels_total = 0;
};

// Pool-based uncertainty sampling around a linear SVM on title + abstract
// tf-idf. Mutations are serialized; readers take the latest committed
// SessionState without blocking writers. Every mutation appends one JSON
// line to the event log, from which replay() rebuilds an identical session.
class ActiveLearningSession {
 public:
  using Clock = std::function<std::string()>;

  // Throws kNotFound for unresolved ids, kValidation for duplicate or
  // malformed seeds, kPrecondition when the seeds lack one of the labels.
  ActiveLearningSession(std::shared_ptr<const CorpusStore> corpus, std::vector<LabeledExample> seeds,
                        std::uint64_t rng_seed, SessionOptions options = {}, std::string session_id = "session",
                        Clock clock = {});

  ActiveLearningSession(const ActiveLearningSession&) = delete;
  ActiveLearningSession& operator=(const ActiveLearningSession&) = delete;

  std::shared_ptr<const SessionState> state() const;
  const CorpusStore& corpus() const { return *corpus_; }

  // First min(k, |queue|) entries. Throws kInvalidArgument when k is 0.
  std::vector<QueueEntry> next_candidates(std::size_t k) const;

  // Throws kNotFound for unknown ids, ConflictError when the patent already
  // carries a label (the attempt is still logged as a dispute), and
  // kPrecondition for corpus patents outside the pool.
  SubmitResult submit_label(const std::string& patent_id, Label label, const std::string& annotator_id);

  // Replaces the label of an already-labeled patent; logged. Does not count
  // towards the retrain cadence.
  void override_label(const std::string& patent_id, Label label, const std::string& annotator_id);

  // Retrains when the cadence is reached; returns whether it did.
  bool maybe_retrain();

  SessionStats stats() const;
  std::vector<std::string> event_log() const;

  static std::unique_ptr<ActiveLearningSession> replay(std::shared_ptr<const CorpusStore> corpus,
                                                       const std::vector<std::string>& event_log);

 private:
  struct ReplayTag {};
  ActiveLearningSession(std::shared_ptr<const CorpusStore> corpus, Clock clock, ReplayTag);

  void initialize(std::vector<LabeledExample> seeds, std::uint64_t rng_seed, SessionOptions options,
                  std::string session_id, const std::string& at);
  SubmitResult submit_locked(const std::string& patent_id, Label label, const std::string& annotator_id,
                             const std::string& at);
  void override_locked(const std::string& patent_id, Label label, const std::string& annotator_id,
                       const std::string& at);
  bool retrain_locked(SessionState& next, const std::string& at);
  void train_and_rank(SessionState& next) const;
  const SparseVector& features(const std::string& patent_id) const;
  void commit(std::shared_ptr<SessionState> next, std::string event);
  std::string now() const;

  std::shared_ptr<const CorpusStore> corpus_;
  Clock clock_;
  Vocabulary vocabulary_;
  std::unordered_map<std::string, SparseVector> features_;

  mutable std::mutex write_mutex_;
  mutable std::mutex read_mutex_;
  std::shared_ptr<const SessionState> state_;
  std::vector<std::string> log_;
};

// Cohen's kappa for every annotator pair with at least one shared item.
std::vector<AnnotatorAgreement> pairwise_agreement(
    const std::map<std::string, std::map<std::string, Label>>& judgments);

std::string stats_to_json(const SessionStats& stats);

}  // namespace patland

#endif  // PATLAND_ACTIVE_HPP_
