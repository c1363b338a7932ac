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

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "patland/embedding.hpp"
#include "patland/error.hpp"
#include "patland/features.hpp"
#include "patland/pca.hpp"

using namespace patland;
using Tokens = std::vector<std::string>;

namespace {

PatentRecord rec(std::string id, std::vector<std::string> codes = {}, std::vector<std::string> cites = {}) {
  PatentRecord r;
  r.patent_id = std::move(id);
  r.cpc_codes = std::move(codes);
  r.citations = std::move(cites);
  return r;
}

EmbeddingTable table2d() {
  EmbeddingTable t(2, "toy");
  t.add("x", {1.0f, 0.0f});
  t.add("y", {0.0f, 1.0f});
  t.add("z", {2.0f, 4.0f});
  t.add("xx", {1.0f, 0.0f});
  t.add("yy", {0.0f, 1.0f});
  t.add("zz", {2.0f, 4.0f});
  return t;
}

}  // namespace

// ---- tokenize ---------------------------------------------------------------

TEST(TokenizeTest, Rules) {
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_EQ(tokenize("Neural networks, neural nets."), (Tokens{"neural", "networks", "neural", "nets"}));
  EXPECT_EQ(tokenize("A 512-token input"), (Tokens{"token", "input"}));
  EXPECT_EQ(tokenize("CPC G06N3/08 x"), (Tokens{"cpc", "g06n3"}));
  EXPECT_EQ(tokenize("G06N3/08"), (Tokens{"g06n3"}));
}

TEST(StopwordsTest, BundledListHas179Words) {
  const auto& s = english_stopwords();
  EXPECT_EQ(s.words.size(), 179u);
  EXPECT_EQ(s.id, "en-v1");
  EXPECT_TRUE(s.contains("the"));
}

// ---- vocabulary ---------------------------------------------------------------

TEST(VocabularyTest, NoDocsGiveEmptyVocabulary) {
  EXPECT_TRUE(build_vocabulary({}, english_stopwords(), 1).empty());
}

TEST(VocabularyTest, MinDfAndStopwordsAndLexicographicOrder) {
  const std::vector<Tokens> docs = {{"the", "gear", "motor"}, {"the", "motor", "axle"}, {"the", "gear", "motor"}};
  const auto v = build_vocabulary(docs, english_stopwords(), 2);
  EXPECT_EQ(v.tokens(), (Tokens{"gear", "motor"}));
  EXPECT_EQ(v.document_frequency(0), 2u);
  EXPECT_EQ(v.document_frequency(1), 3u);
  EXPECT_EQ(v.index_of("the"), -1);
  EXPECT_EQ(v.index_of("axle"), -1);
  EXPECT_EQ(v.total_documents(), 3u);
  const auto all = build_vocabulary(docs, english_stopwords(), 1);
  EXPECT_EQ(all.tokens(), (Tokens{"axle", "gear", "motor"}));
}

TEST(VocabularyTest, JsonRoundTrip) {
  const std::vector<Tokens> docs = {{"alpha", "beta"}, {"beta", "gamma"}};
  const auto v = build_vocabulary(docs, english_stopwords(), 1);
  const auto back = Vocabulary::from_json(v.to_json());
  EXPECT_EQ(back.tokens(), v.tokens());
  EXPECT_EQ(back.total_documents(), v.total_documents());
  EXPECT_EQ(back.stopword_set_id(), "en-v1");
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(back.document_frequency(i), v.document_frequency(i));
  EXPECT_THROW(Vocabulary::from_json("{\"format\":\"nope\"}"), Error);
}

// ---- tf-idf -------------------------------------------------------------------

TEST(TfidfTest, NoInVocabularyTokensGiveZeroVector) {
  const auto v = build_vocabulary({{"alpha"}}, empty_stopwords(), 1);
  const auto x = tfidf_vector({"zeta"}, v);
  EXPECT_EQ(x.dimension, 1u);
  EXPECT_EQ(x.nnz(), 0u);
  EXPECT_TRUE(x.well_formed());
}

TEST(TfidfTest, SingleTokenIsUnitVector) {
  const auto v = build_vocabulary({{"alpha", "beta"}, {"beta"}}, empty_stopwords(), 1);
  const auto x = tfidf_vector({"beta", "beta"}, v);
  ASSERT_EQ(x.nnz(), 1u);
  EXPECT_NEAR(x.values[0], 1.0, 1e-12);
}

TEST(TfidfTest, HandComputedThreeDocExample) {
  // df(a)=3, df(b)=1, N=3; query [a, a, b].
  const std::vector<Tokens> docs = {{"a1", "b1"}, {"a1"}, {"a1", "c1"}};
  const auto v = build_vocabulary(docs, empty_stopwords(), 1);
  const auto x = tfidf_vector({"a1", "a1", "b1"}, v);
  const double wa = 2.0 * (std::log(4.0 / 4.0) + 1.0);
  const double wb = 1.0 * (std::log(4.0 / 2.0) + 1.0);
  const double n = std::sqrt(wa * wa + wb * wb);
  EXPECT_NEAR(x.at(static_cast<std::uint32_t>(v.index_of("a1"))), wa / n, 1e-12);
  EXPECT_NEAR(x.at(static_cast<std::uint32_t>(v.index_of("b1"))), wb / n, 1e-12);
  EXPECT_NEAR(x.norm(), 1.0, 1e-9);
  EXPECT_TRUE(x.normalized);
}

TEST(TfidfTest, DocumentOrderDoesNotChangeVectors) {
  std::vector<Tokens> docs = {{"gear", "axle", "wheel"}, {"motor", "gear"}, {"battery", "cell", "gear"},
                              {"wheel", "wheel", "hub"}};
  const auto v1 = build_vocabulary(docs, english_stopwords(), 1);
  std::reverse(docs.begin(), docs.end());
  const auto v2 = build_vocabulary(docs, english_stopwords(), 1);
  for (const auto& d : docs) EXPECT_EQ(tfidf_vector(d, v1), tfidf_vector(d, v2));
}

// ---- sparse vectors -----------------------------------------------------------

TEST(SparseVectorTest, DenseRoundTripAndDot) {
  const std::vector<double> a = {0, 1.5, 0, -2}, b = {3, 0, 0, 4};
  const auto sa = SparseVector::from_dense(a), sb = SparseVector::from_dense(b);
  EXPECT_EQ(sa.to_dense(), a);
  EXPECT_EQ(sa.nnz(), 2u);
  EXPECT_DOUBLE_EQ(dot(sa, sb), -8.0);
  EXPECT_DOUBLE_EQ(dot(sa, std::span<const double>(b)), -8.0);
  EXPECT_DOUBLE_EQ(squared_distance(sa, sb), 9 + 2.25 + 36);
  const auto c = concat(sa, sb);
  EXPECT_EQ(c.dimension, 8u);
  EXPECT_DOUBLE_EQ(c.at(7), 4.0);
  auto n = sa;
  l2_normalize(n);
  EXPECT_NEAR(n.norm(), 1.0, 1e-12);
  EXPECT_TRUE(n.well_formed());
}

TEST(SparseVectorTest, WellFormedChecks) {
  SparseVector v;
  v.dimension = 3;
  v.indices = {2, 1};
  v.values = {1, 1};
  EXPECT_FALSE(v.well_formed());
  v.indices = {1, 3};
  EXPECT_FALSE(v.well_formed());
  v.indices = {0, 2};
  v.values = {1, 0};
  EXPECT_FALSE(v.well_formed());
}

// ---- citation count vectors -------------------------------------------------------

TEST(CitationFeaturesTest, OneHopCountsDocumentsPerSubclass) {
  CorpusStore store({rec("P", {}, {"Q", "R"}), rec("Q", {"A01B1/02", "A01B3/10"}), rec("R", {"A01B1/04"}),
                     rec("S")});
  const auto index = build_index(store);
  const auto space = build_code_space({"P", "Q", "R", "S"}, index, 1);
  EXPECT_EQ(space.keys(), (Tokens{"A01B"}));
  const auto v = onehop_cpc_counts("P", index, space);
  EXPECT_DOUBLE_EQ(v.at(0), 2.0);
  EXPECT_FALSE(v.normalized);
  EXPECT_EQ(onehop_cpc_counts("S", index, space).nnz(), 0u);
  EXPECT_THROW(onehop_cpc_counts("missing", index, space), Error);
}

TEST(CitationFeaturesTest, TwoHopChain) {
  CorpusStore store({rec("P", {}, {"Q"}), rec("Q", {"A01B1/02"}, {"R"}), rec("R", {"E05D5/02"})});
  const auto index = build_index(store);
  const auto space = build_code_space({"P"}, index, 2);
  EXPECT_EQ(space.keys(), (Tokens{"A01B-E05D"}));
  const auto v = twohop_pair_counts("P", index, space);
  EXPECT_DOUBLE_EQ(v.at(0), 1.0);
  EXPECT_EQ(twohop_pair_counts("R", index, space).nnz(), 0u);
}

TEST(CitationFeaturesTest, UnseenCodesAreDropped) {
  CorpusStore store({rec("P", {}, {"Q"}), rec("Q", {"G06N3/08"}), rec("T", {}, {"U"}), rec("U", {"H01M10/05"})});
  const auto index = build_index(store);
  const auto space = build_code_space({"P"}, index, 1);
  EXPECT_EQ(space.keys(), (Tokens{"G06N"}));
  EXPECT_EQ(onehop_cpc_counts("T", index, space).nnz(), 0u);
}

TEST(CitationFeaturesTest, RandomFixturesMatchBruteForce) {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 15; ++trial) {
    const auto records = oracle::random_corpus(gen, 8 + 3 * trial);
    CorpusStore store(records);
    const auto index = build_index(store);
    std::vector<std::string> ids;
    for (const auto& r : records) ids.push_back(r.patent_id);
    for (int k : {1, 2}) {
      const auto space = build_code_space(ids, index, k);
      for (const auto& r : records) {
        const auto v = k == 1 ? onehop_cpc_counts(r.patent_id, index, space)
                              : twohop_pair_counts(r.patent_id, index, space);
        ASSERT_EQ(v.dimension, space.size());
        std::vector<double> want(space.size(), 0.0);
        for (const auto& [key, n] : oracle::khop(records, r.patent_id, k))
          want[static_cast<std::size_t>(space.index_of(key))] = static_cast<double>(n);
        EXPECT_EQ(v.to_dense(), want);
        EXPECT_TRUE(v.well_formed());
      }
    }
  }
}

// ---- embeddings ---------------------------------------------------------------

TEST(EmbeddingTest, MeanEmbeddingBasics) {
  const auto t = table2d();
  EXPECT_EQ(mean_embedding({}, t, 8), (std::vector<double>{0, 0}));
  EXPECT_EQ(mean_embedding({"z"}, t, 8), (std::vector<double>{2, 4}));
  EXPECT_EQ(mean_embedding({"x", "y"}, t, 8), (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(mean_embedding({"unknown"}, t, 8), (std::vector<double>{0, 0}));
  EXPECT_EQ(mean_embedding({"z", "z", "z"}, t, 8), (std::vector<double>{2, 4}));
  EXPECT_EQ(mean_embedding({"x", "q", "y"}, t, 8), mean_embedding({"y", "x"}, t, 8));
  // Only the first max_tokens resolvable tokens count.
  EXPECT_EQ(mean_embedding({"q", "x", "y"}, t, 1), (std::vector<double>{1, 0}));
  EXPECT_THROW(mean_embedding({"x"}, t, 0), Error);
}

TEST(EmbeddingTest, ZeroVectorPolicyCountsUnknownTokens) {
  auto t = table2d();
  t.set_oov_policy(OovPolicy::kZeroVector);
  EXPECT_EQ(mean_embedding({"x", "unknown"}, t, 8), (std::vector<double>{0.5, 0}));
}

TEST(EmbeddingTest, DimensionMismatchRejected) {
  EmbeddingTable t(2, "t");
  EXPECT_THROW(t.add("bad", {1.0f}), Error);
}

TEST(EmbeddingTest, BinaryAndTextRoundTrip) {
  const auto t = table2d();
  std::stringstream bin;
  t.write_binary(bin);
  const auto back = EmbeddingTable::read_binary(bin, "back");
  EXPECT_EQ(back.dimension(), 2u);
  EXPECT_EQ(back.tokens(), t.tokens());
  EXPECT_EQ(*back.find("z"), *t.find("z"));

  std::stringstream text("3 2\nx 1 0\ny 0 1\nz 2 4\n");
  const auto parsed = EmbeddingTable::read_text(text, "txt");
  EXPECT_EQ(parsed.size(), 3u);
  EXPECT_EQ(*parsed.find("z"), (std::vector<float>{2.0f, 4.0f}));

  std::stringstream bad("NOPE");
  EXPECT_THROW(EmbeddingTable::read_binary(bad), Error);
  std::stringstream ragged("x 1 0\ny 1\n");
  EXPECT_THROW(EmbeddingTable::read_text(ragged), Error);
}

TEST(EmbeddingTest, BinaryHeaderLayout) {
  EmbeddingTable t(1, "t");
  t.add("ab", {0.5f});
  std::stringstream bin;
  t.write_binary(bin);
  const std::string s = bin.str();
  ASSERT_EQ(s.size(), 4u + 4 + 4 + 8 + 4 + 2 + 4);
  EXPECT_EQ(s.substr(0, 4), "EMBT");
  EXPECT_EQ(static_cast<unsigned char>(s[8]), 1u);   // d
  EXPECT_EQ(static_cast<unsigned char>(s[12]), 1u);  // count
  EXPECT_EQ(static_cast<unsigned char>(s[20]), 2u);  // token length
  EXPECT_EQ(s.substr(24, 2), "ab");
}

TEST(CpcAverageTest, NoCodesGiveZeros) {
  const auto r = cpc_avg_embedding({}, {}, table2d(), 3);
  EXPECT_EQ(r.sequence.values, std::vector<double>(6, 0.0));
}

TEST(CpcAverageTest, OneCodeIsItsOwnPaddedSequence) {
  const CpcTitles titles = {{"A01B", "xx zz"}};
  const auto r = cpc_avg_embedding({"A01B1/02"}, titles, table2d(), 3);
  EXPECT_EQ(r.sequence.values, (std::vector<double>{1, 0, 2, 4, 0, 0}));
  EXPECT_TRUE(r.missing_titles.empty());
}

TEST(CpcAverageTest, TwoCodesAverageSlotwiseAndOrderDoesNotMatter) {
  const CpcTitles titles = {{"A01B1/02", "xx"}, {"E05D", "yy"}};
  const auto r = cpc_avg_embedding({"A01B1/02", "E05D5/02", "G06N3/08"}, titles, table2d(), 2);
  EXPECT_EQ(r.sequence.values, (std::vector<double>{0.5, 0.5, 0, 0}));
  EXPECT_EQ(r.missing_titles, (Tokens{"G06N3/08"}));
  const auto s = cpc_avg_embedding({"G06N3/08", "E05D5/02", "A01B1/02"}, titles, table2d(), 2);
  EXPECT_EQ(s.sequence.values, r.sequence.values);
}

// ---- PCA ------------------------------------------------------------------------

TEST(PcaTest, LineYEqualsX) {
  const auto p = pca_fit({{0, 0}, {1, 1}, {2, 2}, {3, 3.0}}, 1);
  ASSERT_EQ(p.output_dimension(), 1u);
  const double s = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(p.components[0][0]), s, 1e-9);
  EXPECT_NEAR(p.components[0][0], p.components[0][1], 1e-9);
}

TEST(PcaTest, ProjectingTheMeanGivesZero) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> n;
  std::vector<std::vector<double>> data(30, std::vector<double>(6));
  for (auto& v : data)
    for (auto& x : v) x = n(gen);
  const auto p = pca_fit(data, 3);
  for (double x : pca_project(p.mean, p)) EXPECT_NEAR(x, 0.0, 1e-9);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      double d = 0;
      for (std::size_t c = 0; c < 6; ++c) d += p.components[i][c] * p.components[j][c];
      EXPECT_NEAR(d, i == j ? 1.0 : 0.0, 1e-6);
    }
}

TEST(PcaTest, RecoversLowRankSubspace) {
  // Points in span{b1, b2} of R^5 plus an offset.
  const std::vector<double> b1 = {1, 2, 0, 0, 1}, b2 = {0, 1, -1, 3, 0}, off = {5, -1, 2, 0, 1};
  std::mt19937_64 gen(6);
  std::normal_distribution<double> n;
  std::vector<std::vector<double>> data;
  for (int i = 0; i < 40; ++i) {
    const double s = n(gen), t = n(gen);
    std::vector<double> v(5);
    for (int c = 0; c < 5; ++c) v[c] = off[c] + s * b1[c] + t * b2[c];
    data.push_back(v);
  }
  const auto p = pca_fit(data, 2);
  for (const auto& v : data) {
    const auto z = pca_project(v, p);
    std::vector<double> rec = p.mean;
    for (std::size_t k = 0; k < 2; ++k)
      for (int c = 0; c < 5; ++c) rec[c] += z[k] * p.components[k][c];
    double err = 0;
    for (int c = 0; c < 5; ++c) err += (rec[c] - v[c]) * (rec[c] - v[c]);
    EXPECT_LT(std::sqrt(err), 1e-6);
  }
}

TEST(PcaTest, ReconstructionErrorNonIncreasingInK) {
  std::mt19937_64 gen(12);
  std::normal_distribution<double> n;
  std::vector<std::vector<double>> data(25, std::vector<double>(7));
  for (auto& v : data)
    for (std::size_t c = 0; c < v.size(); ++c) v[c] = n(gen) * (1.0 + static_cast<double>(c));
  double previous = 1e300;
  for (std::size_t k = 1; k <= 7; ++k) {
    const auto p = pca_fit(data, k);
    double err = 0;
    for (const auto& v : data) {
      const auto z = pca_project(v, p);
      for (std::size_t c = 0; c < v.size(); ++c) {
        double r = p.mean[c];
        for (std::size_t j = 0; j < z.size(); ++j) r += z[j] * p.components[j][c];
        err += (r - v[c]) * (r - v[c]);
      }
    }
    EXPECT_LE(err, previous + 1e-9);
    previous = err;
  }
}

TEST(PcaTest, ClampsKAndRejectsDegenerateInput) {
  const auto p = pca_fit({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, 50);
  EXPECT_TRUE(p.clamped);
  EXPECT_EQ(p.output_dimension(), 2u);
  EXPECT_THROW(pca_fit({{1, 2}}, 1), Error);
  try {
    pca_fit({{1, 2}, {1, 2}, {1, 2}}, 1);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNumerical);
  }
}

TEST(PcaTest, JsonRoundTrip) {
  const auto p = pca_fit({{0, 1}, {1, 3}, {2, 2}, {5, 1}}, 2);
  const auto q = PcaProjection::from_json(p.to_json());
  EXPECT_EQ(q.mean, p.mean);
  EXPECT_EQ(q.components, p.components);
}
