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

#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "patland/error.hpp"
#include "patland/graph.hpp"

using namespace patland;
namespace fs = std::filesystem;

namespace {

PatentRecord rec(std::string id, std::vector<std::string> codes = {}, std::vector<std::string> cites = {},
                 std::string family = {}) {
  PatentRecord r;
  r.patent_id = std::move(id);
  r.cpc_codes = std::move(codes);
  r.citations = std::move(cites);
  r.family_id = std::move(family);
  return r;
}

IdSet to_ids(const std::set<std::string>& s) { return IdSet(s.begin(), s.end()); }

std::set<std::string> random_seeds(std::mt19937_64& gen, const std::vector<PatentRecord>& records) {
  std::set<std::string> seeds;
  std::uniform_real_distribution<double> u(0, 1);
  for (const auto& r : records)
    if (u(gen) < 0.15) seeds.insert(r.patent_id);
  return seeds;
}

}  // namespace

TEST(GraphIndexTest, EmptyCorpus) {
  CorpusStore empty;
  const auto index = build_index(empty);
  EXPECT_EQ(index.size(), 0u);
  EXPECT_TRUE(expand({}, index).l2.empty());
}

TEST(GraphIndexTest, ReverseIsTranspose) {
  CorpusStore store({rec("A", {}, {"B"}), rec("B")});
  const auto index = build_index(store);
  EXPECT_EQ(index.reverse_citations().at("B"), std::vector<std::string>{"A"});
  EXPECT_TRUE(index.reverse_citations().at("A").empty());
}

TEST(GraphIndexTest, FiveRecordFixtureMatchesHandBuiltAdjacency) {
  CorpusStore store({rec("A", {"A01B1/02"}, {"B", "C"}), rec("B", {"E05D5/02"}, {"C", "Z"}),
                     rec("C", {"A01B1/02", "G06N3/08"}), rec("D", {}, {"A", "C"}, "F"), rec("E", {}, {}, "F")});
  const auto index = build_index(store);
  const std::map<std::string, std::vector<std::string>> forward = {
      {"A", {"B", "C"}}, {"B", {"C"}}, {"C", {}}, {"D", {"A", "C"}}, {"E", {}}};
  const std::map<std::string, std::vector<std::string>> reverse = {
      {"A", {"D"}}, {"B", {"A"}}, {"C", {"A", "B", "D"}}, {"D", {}}, {"E", {}}};
  EXPECT_EQ(index.forward_citations(), forward);
  EXPECT_EQ(index.reverse_citations(), reverse);
  ASSERT_EQ(index.dangling().size(), 1u);
  EXPECT_EQ(index.dangling()[0].source, "B");
  EXPECT_EQ(index.dangling()[0].target, "Z");
  const auto& with_code = index.patents_with_code("A01B1/02", CpcLevel::kSubgroup);
  ASSERT_EQ(with_code.size(), 2u);
  EXPECT_EQ(index.id(with_code[0]), "A");
  EXPECT_EQ(index.id(with_code[1]), "C");
  EXPECT_EQ(index.family_members("F").size(), 2u);
}

TEST(GraphIndexTest, RandomIndexesAreSortedTransposes) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 10; ++trial) {
    CorpusStore store(oracle::random_corpus(gen, 40));
    const auto index = build_index(store);
    for (GraphIndex::Node n = 0; n < index.size(); ++n) {
      const auto& f = index.forward(n);
      EXPECT_TRUE(std::is_sorted(f.begin(), f.end()));
      EXPECT_EQ(std::adjacent_find(f.begin(), f.end()), f.end());
      for (auto m : f) {
        const auto& r = index.reverse(m);
        EXPECT_TRUE(std::binary_search(r.begin(), r.end(), n));
      }
      for (auto m : index.reverse(n)) {
        const auto& back = index.forward(m);
        EXPECT_TRUE(std::binary_search(back.begin(), back.end(), n));
      }
    }
    // Deterministic construction.
    const auto again = build_index(store);
    EXPECT_EQ(again.forward_citations(), index.forward_citations());
  }
}

TEST(ExpandTest, EmptySeeds) {
  CorpusStore store({rec("A", {"A01B1/02"})});
  const auto index = build_index(store);
  EXPECT_TRUE(expand_l1({}, index).empty());
  EXPECT_TRUE(expand_l2({}, index).empty());
}

TEST(ExpandTest, SharedCodeJoinsL1) {
  CorpusStore store({rec("S", {"A01B1/02"}), rec("P", {"A01B1/02"}), rec("Q", {"A01B1/04"})});
  const auto index = build_index(store);
  EXPECT_EQ(expand_l1({"S"}, index), (IdSet{"P", "S"}));
  ExpansionOptions subclass;
  subclass.cpc_level = CpcLevel::kSubclass;
  EXPECT_EQ(expand_l1({"S"}, index, subclass), (IdSet{"P", "Q", "S"}));
}

TEST(ExpandTest, OutwardCitationsOnlyByDefault) {
  CorpusStore store({rec("S", {}, {"B"}), rec("B"), rec("C", {}, {"S"})});
  const auto index = build_index(store);
  EXPECT_EQ(expand_l1({"S"}, index), (IdSet{"B", "S"}));
  ExpansionOptions citing;
  citing.include_citing = true;
  EXPECT_EQ(expand_l1({"S"}, index, citing), (IdSet{"B", "C", "S"}));
}

TEST(ExpandTest, FamilyJoinsL2) {
  CorpusStore store({rec("A", {}, {}, "F1"), rec("B", {}, {}, "F1"), rec("C")});
  const auto index = build_index(store);
  EXPECT_EQ(expand_l2({"A"}, index), (IdSet{"A", "B"}));
}

TEST(ExpandTest, UnknownSeedNamesId) {
  CorpusStore store({rec("A")});
  const auto index = build_index(store);
  try {
    expand_l1({"GHOST"}, index);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
    EXPECT_NE(std::string(e.what()).find("GHOST"), std::string::npos);
  }
}

TEST(ExpandTest, EightPatentFixtureMatchesBruteForce) {
  const std::vector<PatentRecord> records = {
      rec("P1", {"A01B1/02"}, {"P3"}),  rec("P2", {"A01B1/02", "B60K6/20"}), rec("P3", {"E05D5/02"}, {"P4"}),
      rec("P4", {"G06N3/08"}, {}, "F"), rec("P5", {}, {"P1"}, "F"),          rec("P6", {"B60K6/20"}),
      rec("P7", {"H01M10/05"}, {"P6"}), rec("P8", {}, {}, "G")};
  CorpusStore store(records);
  const auto index = build_index(store);
  for (const std::set<std::string>& seeds : {std::set<std::string>{"P1"}, {"P2"}, {"P3", "P7"}, {"P8"}}) {
    const auto want_l1 = oracle::l1(records, seeds);
    EXPECT_EQ(expand_l1(to_ids(seeds), index), to_ids(want_l1));
    EXPECT_EQ(expand_l2(to_ids(want_l1), index), to_ids(oracle::l2(records, want_l1)));
  }
}

TEST(ExpandTest, ThreeFamilyClosureMatchesBruteForce) {
  const std::vector<PatentRecord> records = {rec("A", {}, {}, "F1"), rec("B", {}, {}, "F1"), rec("C", {}, {}, "F2"),
                                             rec("D", {}, {}, "F2"), rec("E", {}, {}, "F3"), rec("G"),
                                             rec("H", {}, {}, "F3")};
  CorpusStore store(records);
  const auto index = build_index(store);
  const std::set<std::string> l1 = {"A", "D", "G"};
  EXPECT_EQ(expand_l2(to_ids(l1), index), to_ids(oracle::l2(records, l1)));
  EXPECT_EQ(expand_l2(to_ids(l1), index), (IdSet{"A", "B", "C", "D", "G"}));
}

TEST(ExpandTest, RandomCorporaMatchOraclesAndInvariants) {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 25; ++trial) {
    const auto records = oracle::random_corpus(gen, 10 + trial);
    CorpusStore store(records);
    const auto index = build_index(store);
    const auto seeds = random_seeds(gen, records);
    for (bool subclass : {false, true}) {
      ExpansionOptions opt;
      opt.cpc_level = subclass ? CpcLevel::kSubclass : CpcLevel::kSubgroup;
      const auto result = expand(to_ids(seeds), index, opt);
      const auto want_l1 = oracle::l1(records, seeds, subclass);
      EXPECT_EQ(result.l1, to_ids(want_l1));
      EXPECT_EQ(result.l2, to_ids(oracle::l2(records, want_l1)));
      // Exact cover.
      std::size_t covered = 0;
      for (const auto& r : records) {
        const bool in_l2 = result.l2.count(r.patent_id) > 0;
        const bool in_pool = result.antiseed_pool.count(r.patent_id) > 0;
        EXPECT_NE(in_l2, in_pool);
        covered += in_l2 || in_pool;
      }
      EXPECT_EQ(covered, records.size());
      EXPECT_TRUE(std::includes(result.l1.begin(), result.l1.end(), result.seeds.begin(), result.seeds.end()));
      EXPECT_TRUE(std::includes(result.l2.begin(), result.l2.end(), result.l1.begin(), result.l1.end()));
      EXPECT_EQ(expand_l2(result.l2, index), result.l2);
    }
  }
}

TEST(ExpandTest, Monotone) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto records = oracle::random_corpus(gen, 30);
    CorpusStore store(records);
    const auto index = build_index(store);
    auto small = random_seeds(gen, records);
    auto big = small;
    for (const auto& s : random_seeds(gen, records)) big.insert(s);
    const auto a = expand(to_ids(small), index), b = expand(to_ids(big), index);
    EXPECT_TRUE(std::includes(b.l1.begin(), b.l1.end(), a.l1.begin(), a.l1.end()));
    EXPECT_TRUE(std::includes(b.l2.begin(), b.l2.end(), a.l2.begin(), a.l2.end()));
  }
}

TEST(AntiseedTest, EdgeCases) {
  const IdSet pool = {"a", "b", "c"};
  EXPECT_TRUE(sample_antiseeds(pool, 0, 1).empty());
  EXPECT_EQ(sample_antiseeds(pool, 3, 1), (std::vector<std::string>{"a", "b", "c"}));
  try {
    sample_antiseeds(pool, 4, 1);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find('4'), std::string::npos);
    EXPECT_NE(msg.find('3'), std::string::npos);
  }
}

TEST(AntiseedTest, SampleIsSortedSubsetAndReproducible) {
  IdSet pool;
  for (int i = 0; i < 100; ++i) pool.insert("id" + std::to_string(1000 + i));
  const auto a = sample_antiseeds(pool, 10, 1), b = sample_antiseeds(pool, 10, 2);
  for (const auto& s : {a, b}) {
    EXPECT_EQ(s.size(), 10u);
    EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
    EXPECT_EQ(std::set<std::string>(s.begin(), s.end()).size(), 10u);
    for (const auto& id : s) EXPECT_TRUE(pool.count(id));
  }
  EXPECT_EQ(a, sample_antiseeds(pool, 10, 1));
  EXPECT_NE(a, b);
}

TEST(AntiseedTest, SamplingIsRoughlyUniform) {
  IdSet pool;
  for (int i = 0; i < 20; ++i) pool.insert("id" + std::to_string(10 + i));
  std::map<std::string, int> hits;
  const int trials = 4000;
  for (int t = 0; t < trials; ++t)
    for (const auto& id : sample_antiseeds(pool, 5, t)) ++hits[id];
  // Each id is expected trials * 5 / 20 = 1000 times.
  for (const auto& [id, n] : hits) EXPECT_NEAR(n, 1000, 150) << id;
}

TEST(KhopTest, NoCitations) {
  CorpusStore store({rec("A", {"A01B1/02"})});
  const auto index = build_index(store);
  EXPECT_TRUE(khop_citation_codes("A", 1, index).empty());
  EXPECT_TRUE(khop_citation_codes("A", 2, index).empty());
}

TEST(KhopTest, TwoHopChainIncrementsPairOnce) {
  CorpusStore store({rec("P", {}, {"Q"}), rec("Q", {"A01B1/02"}, {"R"}), rec("R", {"E05D5/02"})});
  const auto index = build_index(store);
  EXPECT_EQ(khop_citation_codes("P", 2, index), (CodeCounts{{"A01B-E05D", 1}}));
  EXPECT_EQ(khop_citation_codes("P", 1, index), (CodeCounts{{"A01B", 1}}));
}

TEST(KhopTest, ErrorsOnUnknownPatentAndBadK) {
  CorpusStore store({rec("A")});
  const auto index = build_index(store);
  EXPECT_THROW(khop_citation_codes("Z", 1, index), Error);
  EXPECT_THROW(khop_citation_codes("A", 3, index), Error);
}

TEST(KhopTest, SixNodeFixtureMatchesPathEnumeration) {
  const std::vector<PatentRecord> records = {
      rec("N1", {}, {"N2", "N3"}), rec("N2", {"A01B1/02", "B60K6/20"}, {"N4", "N5"}),
      rec("N3", {"A01B3/10"}, {"N4"}), rec("N4", {"E05D5/02", "E05D7/04"}), rec("N5", {"G06N3/08"}, {"N6"}),
      rec("N6", {"H01M10/05"})};
  CorpusStore store(records);
  const auto index = build_index(store);
  for (const auto& r : records)
    for (int k : {1, 2}) {
      const auto want = oracle::khop(records, r.patent_id, k);
      EXPECT_EQ(khop_citation_codes(r.patent_id, k, index), CodeCounts(want.begin(), want.end()))
          << r.patent_id << " k=" << k;
    }
  // N1 -> N2 -> {N4, N5}, N1 -> N3 -> N4, by hand.
  EXPECT_EQ(khop_citation_codes("N1", 2, index),
            (CodeCounts{{"A01B-E05D", 2}, {"A01B-G06N", 1}, {"B60K-E05D", 1}, {"B60K-G06N", 1}}));
}

TEST(KhopTest, RandomCorporaMatchOracle) {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 20; ++trial) {
    const auto records = oracle::random_corpus(gen, 50);
    CorpusStore store(records);
    const auto index = build_index(store);
    for (const auto& r : records)
      for (int k : {1, 2}) {
        const auto want = oracle::khop(records, r.patent_id, k);
        ASSERT_EQ(khop_citation_codes(r.patent_id, k, index), CodeCounts(want.begin(), want.end()));
      }
  }
}

TEST(ExportTest, WritesFourSortedIdFiles) {
  CorpusStore store({rec("B", {"A01B1/02"}), rec("A", {"A01B1/02"}), rec("C")});
  const auto index = build_index(store);
  const auto result = expand({"B"}, index);
  const auto dir = fs::temp_directory_path() / "patland_graph_export";
  fs::remove_all(dir);
  write_expansion(dir.string(), result);
  EXPECT_EQ(read_id_file((dir / "seeds.txt").string()), (std::vector<std::string>{"B"}));
  EXPECT_EQ(read_id_file((dir / "l1.txt").string()), (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(read_id_file((dir / "l2.txt").string()), (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(read_id_file((dir / "antiseed_pool.txt").string()), (std::vector<std::string>{"C"}));
  fs::remove_all(dir);
}
