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

#ifndef PATLAND_EMBEDDING_HPP_
#define PATLAND_EMBEDDING_HPP_

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace patland {

enum class OovPolicy {
  kSkip,        // unknown tokens contribute nothing
  kZeroVector,  // unknown tokens count as zero vectors
};

// Precomputed token -> vector table. Tables are consumed, never trained.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::size_t dimension, std::string name, OovPolicy policy = OovPolicy::kSkip);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return order_.size(); }
  const std::string& name() const { return name_; }
  OovPolicy oov_policy() const { return policy_; }
  void set_oov_policy(OovPolicy policy) { policy_ = policy; }

  // Adds or replaces an entry. Throws kInvalidArgument on a dimension mismatch.
  void add(const std::string& token, std::vector<float> vector);
  // nullptr when the token is unknown.
  const std::vector<float>* find(const std::string& token) const;
  const std::vector<std::string>& tokens() const { return order_; }

  // Binary: "EMBT", u32 version, u32 d, u64 count, then per entry a u32
  // length-prefixed UTF-8 token and d little-endian float32 values.
  void write_binary(std::ostream& out) const;
  static EmbeddingTable read_binary(std::istream& in, std::string name = {});
  // Text: one "token v1 v2 ... vd" line per entry. A leading "count d"
  // header line (word2vec style) is accepted and skipped.
  static EmbeddingTable read_text(std::istream& in, std::string name = {});
  // Picks the reader by magic bytes.
  static EmbeddingTable load(const std::string& path);
  void save_binary(const std::string& path) const;

 private:
  std::size_t dimension_ = 0;
  std::string name_;
  OovPolicy policy_ = OovPolicy::kSkip;
  std::unordered_map<std::string, std::vector<float>> vectors_;
  std::vector<std::string> order_;
};

// Mean of the embeddings of the first max_tokens resolvable tokens. Empty or
// fully unresolvable input gives the zero vector of length d.
std::vector<double> mean_embedding(const std::vector<std::string>& tokens,
                                   const EmbeddingTable& table, std::size_t max_tokens);

using CpcTitles = std::map<std::string, std::string>;

// Reads "code<TAB>title" lines.
CpcTitles read_cpc_titles(const std::string& path);

struct SlotSequence {
  std::size_t slots = 0;
  std::size_t dimension = 0;
  std::vector<double> values;  // slots x dimension, row-major

  std::span<const double> slot(std::size_t j) const {
    return {values.data() + j * dimension, dimension};
  }
};

struct CpcAverageResult {
  SlotSequence sequence;
  std::vector<std::string> missing_titles;
};

// Embeds each code's title into max_tokens slots (zero padded) and averages
// slot-by-slot over the codes. A code's title is looked up under its full
// form first and its subclass second; codes with neither are skipped.
CpcAverageResult cpc_avg_embedding(const std::vector<std::string>& codes, const CpcTitles& titles,
                                   const EmbeddingTable& table, std::size_t max_tokens);

// Concatenated titles of all codes in order, for the sequential CPC stream.
std::vector<std::string> cpc_title_tokens(const std::vector<std::string>& codes,
                                          const CpcTitles& titles);

}  // namespace patland

#endif  // PATLAND_EMBEDDING_HPP_
