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

#ifndef PATLAND_FEATURES_HPP_
#define PATLAND_FEATURES_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "patland/graph.hpp"

namespace patland {

// Lowercases, splits on runs of non-alphanumeric ASCII, and keeps tokens of
// length >= 2 that are not made only of digits.
std::vector<std::string> tokenize(std::string_view text);

struct StopwordSet {
  std::string id;
  std::unordered_set<std::string> words;

  bool contains(const std::string& token) const { return words.count(token) != 0; }
};

// The bundled English list (179 words), id "en-v1".
const StopwordSet& english_stopwords();
StopwordSet empty_stopwords();

class Vocabulary {
 public:
  Vocabulary() = default;

  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::size_t document_frequency(std::size_t index) const { return df_[index]; }
  std::size_t total_documents() const { return total_documents_; }
  const std::string& stopword_set_id() const { return stopword_set_id_; }
  std::size_t min_df() const { return min_df_; }

  // Column of token, or -1 when absent.
  std::int64_t index_of(const std::string& token) const;
  double idf(std::size_t index) const;

  std::string to_json() const;
  static Vocabulary from_json(const std::string& text);

  friend Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& docs,
                                     const StopwordSet& stopwords, std::size_t min_df);

 private:
  std::vector<std::string> tokens_;  // lexicographic
  std::vector<std::size_t> df_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::size_t total_documents_ = 0;
  std::size_t min_df_ = 1;
  std::string stopword_set_id_;
};

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& docs,
                            const StopwordSet& stopwords, std::size_t min_df = 1);

// Sparse vector with strictly increasing indices and nonzero values.
struct SparseVector {
  std::size_t dimension = 0;
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
  bool normalized = false;

  std::size_t nnz() const { return indices.size(); }
  double squared_norm() const;
  double norm() const;
  double at(std::uint32_t index) const;
  std::vector<double> to_dense() const;
  // Checks index order, bounds, nonzero values and (when flagged) unit norm.
  bool well_formed() const;

  static SparseVector from_dense(std::span<const double> dense);

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

double dot(const SparseVector& a, const SparseVector& b);
double dot(const SparseVector& a, std::span<const double> dense);
double squared_distance(const SparseVector& a, const SparseVector& b);
// Concatenates feature blocks; the result is not flagged normalized.
SparseVector concat(const SparseVector& a, const SparseVector& b);
void l2_normalize(SparseVector& v);

// value(t) = tf(t) * (ln((1+N)/(1+df(t))) + 1), then L2-normalized.
SparseVector tfidf_vector(const std::vector<std::string>& doc, const Vocabulary& vocab);

// Ordered key space for citation count vectors, frozen at training time.
class CodeSpace {
 public:
  CodeSpace() = default;
  explicit CodeSpace(std::vector<std::string> keys);

  std::size_t size() const { return keys_.size(); }
  const std::vector<std::string>& keys() const { return keys_; }
  std::int64_t index_of(const std::string& key) const;

 private:
  std::vector<std::string> keys_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// Every key produced by khop_citation_codes(id, hops) over the training ids.
CodeSpace build_code_space(const std::vector<std::string>& training_ids, const GraphIndex& index,
                           int hops);

// Count of directly cited patents per subclass; codes outside the space are dropped.
SparseVector onehop_cpc_counts(std::string_view patent_id, const GraphIndex& index,
                               const CodeSpace& code_space);
// Count of 2-hop citation paths per (hop-1 subclass, hop-2 subclass) pair.
SparseVector twohop_pair_counts(std::string_view patent_id, const GraphIndex& index,
                                const CodeSpace& pair_space);

}  // namespace patland

#endif  // PATLAND_FEATURES_HPP_
