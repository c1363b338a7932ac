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
#include <cmath>
#include <random>
#include <set>
#include <thread>

#include "patland/active.hpp"
#include "patland/error.hpp"

using namespace patland;

namespace {

const char* kOn[] = {"neural", "network", "training", "gradient", "layer", "tensor", "inference", "weights"};
const char* kOff[] = {"hinge", "door", "latch", "bracket", "spring", "frame", "bolt", "panel"};

// n patents; the first half lean on-topic. Text is random but seeded.
std::shared_ptr<const CorpusStore> make_corpus(std::size_t n, std::uint64_t seed = 1) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> word(0, 7);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<PatentRecord> records;
  for (std::size_t i = 0; i < n; ++i) {
    PatentRecord r;
    char id[8];
    std::snprintf(id, sizeof id, "US%03zu", i);
    r.patent_id = id;
    const double share = i < n / 2 ? 0.8 : 0.2;
    r.title = "device";
    for (int t = 0; t < 12; ++t) {
      r.abstract_text += u(gen) < share ? kOn[word(gen)] : kOff[word(gen)];
      r.abstract_text += ' ';
    }
    records.push_back(std::move(r));
  }
  return std::make_shared<const CorpusStore>(std::move(records));
}

std::string fixed_clock() { return "2026-01-01T00:00:00Z"; }

// Two of each category, drawn from the ends of the corpus.
std::vector<LabeledExample> balanced8() {
  return {make_seed("US000"),
          make_seed("US001"),
          make_antiseed("US029"),
          make_antiseed("US028"),
          make_annotation("US002", Label::kPositive, "a"),
          make_annotation("US003", Label::kPositive, "a"),
          make_annotation("US027", Label::kNegative, "a"),
          make_annotation("US026", Label::kNegative, "a")};
}

std::unique_ptr<ActiveLearningSession> session(std::size_t n = 30, SessionOptions o = {}) {
  return std::make_unique<ActiveLearningSession>(make_corpus(n), balanced8(), 5, o, "s1", fixed_clock);
}

Label truth(const std::string& id) { return std::stoi(id.substr(2)) < 15 ? Label::kPositive : Label::kNegative; }

// Independent re-rank: rebuild the tf-idf space and score with the model.
std::vector<QueueEntry> brute_rank(const CorpusStore& corpus, const SessionState& s) {
  std::vector<std::vector<std::string>> docs;
  for (const auto& r : corpus.records()) docs.push_back(tokenize(r.title + "\n" + r.abstract_text));
  const auto vocab = build_vocabulary(docs, english_stopwords(), 1);
  std::vector<QueueEntry> out;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto& id = corpus.records()[i].patent_id;
    if (!s.pool.count(id)) continue;
    const auto x = tfidf_vector(docs[i], vocab);
    double d = s.model.bias;
    for (std::size_t k = 0; k < x.nnz(); ++k) d += s.model.weight[x.indices[k]] * x.values[k];
    out.push_back({id, std::abs(d) / s.model.weight_norm()});
  }
  std::sort(out.begin(), out.end(), [](const QueueEntry& a, const QueueEntry& b) {
    return a.margin != b.margin ? a.margin < b.margin : a.patent_id < b.patent_id;
  });
  return out;
}

void expect_same_ranking(const std::vector<QueueEntry>& got, const std::vector<QueueEntry>& want) {
  ASSERT_EQ(got.size(), want.size());
  std::set<std::string> a, b;
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_NEAR(got[i].margin, want[i].margin, 1e-9);
    a.insert(got[i].patent_id);
    b.insert(want[i].patent_id);
  }
  EXPECT_EQ(a, b);
}

}  // namespace

TEST(ActiveSessionTest, BalancedEightOnThirtyPatents) {
  auto s = session();
  const auto st = s->state();
  EXPECT_EQ(st->labeled.size(), 8u);
  EXPECT_EQ(st->pool.size(), 22u);
  EXPECT_EQ(st->queue.size(), 22u);
  EXPECT_EQ(s->next_candidates(100).size(), 22u);
  EXPECT_EQ(s->event_log().size(), 1u);
}

TEST(ActiveSessionTest, QueueIsSortedByMarginThenId) {
  auto s = session();
  const auto q = s->state()->queue;
  for (std::size_t i = 1; i < q.size(); ++i) {
    EXPECT_TRUE(q[i - 1].margin < q[i].margin ||
                (q[i - 1].margin == q[i].margin && q[i - 1].patent_id < q[i].patent_id));
  }
  const auto top = s->next_candidates(1);
  ASSERT_EQ(top.size(), 1u);
  EXPECT_EQ(top[0], q[0]);
  expect_same_ranking(q, brute_rank(s->corpus(), *s->state()));
}

TEST(ActiveSessionTest, TiesBreakById) {
  // Identical text gives identical margins everywhere.
  std::vector<PatentRecord> records;
  for (int i = 0; i < 6; ++i) {
    PatentRecord r;
    r.patent_id = "P" + std::to_string(5 - i);
    r.abstract_text = i < 2 ? "neural network" : (i < 4 ? "door hinge" : "neural hinge");
    records.push_back(r);
  }
  auto corpus = std::make_shared<const CorpusStore>(records);
  SessionOptions o;
  o.pool = std::vector<std::string>{"P1", "P0"};
  ActiveLearningSession s(corpus, {make_seed("P5"), make_antiseed("P3")}, 1, o, "t", fixed_clock);
  const auto q = s.next_candidates(5);
  ASSERT_EQ(q.size(), 2u);
  EXPECT_EQ(q[0].patent_id, "P0");
  EXPECT_EQ(q[1].patent_id, "P1");
  EXPECT_EQ(q[0].margin, q[1].margin);
}

TEST(ActiveSessionTest, EmptyPoolAndErrors) {
  SessionOptions o;
  o.pool = std::vector<std::string>{};
  auto s = session(30, o);
  EXPECT_TRUE(s->next_candidates(5).empty());
  EXPECT_THROW(s->next_candidates(0), Error);

  auto corpus = make_corpus(30);
  std::vector<LabeledExample> pos = {make_seed("US000"), make_seed("US001")};
  try {
    ActiveLearningSession bad(corpus, pos, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPrecondition);
  }
  std::vector<LabeledExample> missing = {make_seed("US000"), make_antiseed("NOPE")};
  EXPECT_THROW(ActiveLearningSession(corpus, missing, 1), Error);
  std::vector<LabeledExample> twice = {make_seed("US000"), make_antiseed("US000")};
  EXPECT_THROW(ActiveLearningSession(corpus, twice, 1), Error);
}

TEST(ActiveSessionTest, SubmitLabelBookkeeping) {
  auto s = session();
  const auto before = s->state();
  const auto id = s->next_candidates(1)[0].patent_id;
  const auto r = s->submit_label(id, truth(id), "ann");
  EXPECT_FALSE(r.retrained);
  EXPECT_EQ(r.labels_total, 9u);
  const auto after = s->state();
  EXPECT_EQ(after->pool.size(), before->pool.size() - 1);
  EXPECT_EQ(after->labeled.size(), before->labeled.size() + 1);
  EXPECT_EQ(after->labels_since_retrain, 1u);
  EXPECT_EQ(after->labeled.back().source, Source::kAnnotator);
  EXPECT_EQ(after->labeled.back().difficulty, Difficulty::kHard);
  for (const auto& q : after->queue) EXPECT_NE(q.patent_id, id);
  // The previous snapshot is untouched.
  EXPECT_EQ(before->pool.size(), 22u);
}

TEST(ActiveSessionTest, SubmitErrors) {
  auto s = session();
  try {
    s->submit_label("US999", Label::kPositive, "a");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
  }
  try {
    s->submit_label("US000", Label::kNegative, "b");
    FAIL();
  } catch (const ConflictError& e) {
    EXPECT_EQ(e.existing_label(), "positive");
  }
  EXPECT_EQ(s->state()->disputes, 1u);
  EXPECT_THROW(s->submit_label("US010", Label::kPositive, ""), Error);

  SessionOptions o;
  o.pool = std::vector<std::string>{"US010"};
  auto narrow = session(30, o);
  try {
    narrow->submit_label("US011", Label::kPositive, "a");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPrecondition);
  }
}

TEST(ActiveSessionTest, RetrainCadenceAndConservation) {
  auto s = session(60);
  const std::size_t total = s->state()->labeled.size() + s->state()->pool.size();
  for (int i = 1; i <= 25; ++i) {
    const auto id = s->next_candidates(1)[0].patent_id;
    const auto r = s->submit_label(id, truth(id), i % 2 ? "a" : "b");
    EXPECT_EQ(r.retrained, i % 10 == 0) << i;
    const auto st = s->state();
    EXPECT_EQ(st->labeled.size() + st->pool.size(), total);
    EXPECT_LT(st->labels_since_retrain, 10u);
    EXPECT_EQ(st->retrain_count, static_cast<std::size_t>(i / 10));
    if (r.retrained) {
      for (std::size_t k = 1; k < st->queue.size(); ++k) EXPECT_LE(st->queue[k - 1].margin, st->queue[k].margin);
      expect_same_ranking(st->queue, brute_rank(s->corpus(), *st));
    }
  }
  EXPECT_FALSE(s->maybe_retrain());
}

TEST(ActiveSessionTest, CustomCadence) {
  SessionOptions o;
  o.retrain_cadence = 3;
  auto s = session(30, o);
  int retrains = 0;
  for (int i = 0; i < 9; ++i) {
    const auto id = s->next_candidates(1)[0].patent_id;
    retrains += s->submit_label(id, truth(id), "a").retrained;
  }
  EXPECT_EQ(retrains, 3);
  o.retrain_cadence = 0;
  EXPECT_THROW(session(30, o), Error);
}

TEST(ActiveSessionTest, ReplayIsBitIdentical) {
  auto s = session(60);
  for (int i = 0; i < 23; ++i) {
    const auto id = s->next_candidates(3)[static_cast<std::size_t>(i % 3)].patent_id;
    s->submit_label(id, truth(id), i % 3 ? "a" : "b");
  }
  try {
    s->submit_label("US000", Label::kNegative, "c");
  } catch (const ConflictError&) {
  }
  s->override_label("US002", Label::kNegative, "lead");
  const auto log = s->event_log();
  auto r = ActiveLearningSession::replay(std::make_shared<const CorpusStore>(s->corpus()), log);
  EXPECT_EQ(*r->state(), *s->state());
  EXPECT_EQ(r->event_log(), log);

  auto broken = log;
  broken[3] = "{not json";
  try {
    ActiveLearningSession::replay(make_corpus(60), broken);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
  EXPECT_THROW(ActiveLearningSession::replay(make_corpus(60), {}), Error);
}

TEST(ActiveSessionTest, AnnotationsOnlyTrainingFallsBackUntilBothClasses) {
  SessionOptions o;
  o.training_set = TrainingSet::kAnnotations;
  auto all = session(30);
  auto ann = session(30, o);
  // The seed set has annotations of both classes, so the models differ.
  EXPECT_NE(all->state()->model_hash, ann->state()->model_hash);

  std::vector<LabeledExample> seeds = {make_seed("US000"), make_antiseed("US029")};
  ActiveLearningSession only(make_corpus(30), seeds, 5, o, "s", fixed_clock);
  EXPECT_GT(only.state()->queue.size(), 0u);
}

TEST(ActiveSessionTest, OverrideAndStats) {
  auto s = session();
  s->override_label("US000", Label::kNegative, "lead");
  const auto st = s->stats();
  EXPECT_EQ(st.labeled_total, 8u);
  EXPECT_EQ(st.negative, 5u);
  EXPECT_EQ(st.labels_since_retrain, 0u);
  EXPECT_EQ(st.retrain_cadence, 10u);
  EXPECT_THROW(s->override_label("US010", Label::kNegative, "lead"), Error);
  EXPECT_NE(stats_to_json(st).find("\"retrain_count\""), std::string::npos);
}

TEST(ActiveSessionTest, PairwiseAgreement) {
  std::map<std::string, std::map<std::string, Label>> j;
  // a and b agree on 4 of 4 with a mix of labels.
  for (int i = 0; i < 4; ++i) {
    const auto l = i % 2 ? Label::kPositive : Label::kNegative;
    j["a"]["P" + std::to_string(i)] = l;
    j["b"]["P" + std::to_string(i)] = l;
  }
  j["c"]["Z"] = Label::kPositive;
  const auto agree = pairwise_agreement(j);
  ASSERT_EQ(agree.size(), 1u);
  EXPECT_EQ(agree[0].shared_items, 4u);
  EXPECT_DOUBLE_EQ(agree[0].kappa, 1.0);
}

TEST(ActiveSessionTest, ConcurrentDuplicateSubmissions) {
  auto s = session();
  const auto id = s->next_candidates(1)[0].patent_id;
  std::atomic<int> ok{0}, conflicts{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      try {
        s->submit_label(id, Label::kPositive, "t" + std::to_string(t));
        ++ok;
      } catch (const ConflictError&) {
        ++conflicts;
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(ok.load(), 1);
  EXPECT_EQ(conflicts.load(), 7);
  EXPECT_EQ(s->state()->labeled.size(), 9u);
}

TEST(ActiveSessionTest, ConcurrentReadersSeeConsistentSnapshots) {
  auto s = session(60);
  std::atomic<bool> done{false};
  std::atomic<int> bad{0};
  const std::size_t total = s->state()->labeled.size() + s->state()->pool.size();
  std::thread reader([&] {
    while (!done) {
      const auto st = s->state();
      if (st->labeled.size() + st->pool.size() != total || st->queue.size() != st->pool.size()) ++bad;
    }
  });
  for (int i = 0; i < 15; ++i) {
    const auto id = s->next_candidates(1)[0].patent_id;
    s->submit_label(id, truth(id), "a");
  }
  done = true;
  reader.join();
  EXPECT_EQ(bad.load(), 0);
}
