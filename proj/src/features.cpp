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

#include "patland/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "json.hpp"
#include "patland/error.hpp"

namespace patland {

namespace detail {
extern const char kEnglishStopwordsV1[];
}

using nlohmann::json;

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (current.size() >= 2 &&
        !std::all_of(current.begin(), current.end(), [](char c) { return c >= '0' && c <= '9'; }))
      tokens.push_back(current);
    current.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
      current.push_back(static_cast<char>(c));
    } else if (c >= 'A' && c <= 'Z') {
      current.push_back(static_cast<char>(c - 'A' + 'a'));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

const StopwordSet& english_stopwords() {
  static const StopwordSet set = [] {
    StopwordSet s;
    s.id = "en-v1";
    std::istringstream in(detail::kEnglishStopwordsV1);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream words(line);
      std::string word;
      while (words >> word) s.words.insert(word);
    }
    return s;
  }();
  return set;
}

StopwordSet empty_stopwords() { return {"none", {}}; }

// ---- Vocabulary --------------------------------------------------------------

std::int64_t Vocabulary::index_of(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

double Vocabulary::idf(std::size_t index) const {
  return std::log((1.0 + static_cast<double>(total_documents_)) /
                  (1.0 + static_cast<double>(df_[index]))) +
         1.0;
}

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& docs,
                            const StopwordSet& stopwords, std::size_t min_df) {
  if (min_df < 1) throw Error(ErrorCode::kInvalidArgument, "min_df must be >= 1");
  std::map<std::string, std::size_t> df;
  for (const auto& doc : docs) {
    std::vector<std::string> distinct(doc.begin(), doc.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (const auto& t : distinct)
      if (!stopwords.contains(t)) ++df[t];
  }
  Vocabulary v;
  v.total_documents_ = docs.size();
  v.min_df_ = min_df;
  v.stopword_set_id_ = stopwords.id;
  for (const auto& [token, count] : df) {
    if (count < min_df) continue;
    v.index_.emplace(token, static_cast<std::uint32_t>(v.tokens_.size()));
    v.tokens_.push_back(token);
    v.df_.push_back(count);
  }
  return v;
}

std::string Vocabulary::to_json() const {
  json j;
  j["format"] = "patland.vocabulary";
  j["version"] = 1;
  j["stopword_set"] = stopword_set_id_;
  j["min_df"] = min_df_;
  j["total_documents"] = total_documents_;
  j["tokens"] = tokens_;
  j["document_frequency"] = df_;
  return j.dump();
}

Vocabulary Vocabulary::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("vocabulary: ") + e.what());
  }
  if (j.value("format", "") != "patland.vocabulary" || j.value("version", 0) != 1)
    throw Error(ErrorCode::kFormat, "vocabulary: unsupported format or version");
  Vocabulary v;
  try {
    v.stopword_set_id_ = j.at("stopword_set").get<std::string>();
    v.min_df_ = j.at("min_df").get<std::size_t>();
    v.total_documents_ = j.at("total_documents").get<std::size_t>();
    v.tokens_ = j.at("tokens").get<std::vector<std::string>>();
    v.df_ = j.at("document_frequency").get<std::vector<std::size_t>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("vocabulary: ") + e.what());
  }
  if (v.df_.size() != v.tokens_.size() || !std::is_sorted(v.tokens_.begin(), v.tokens_.end()))
    throw Error(ErrorCode::kFormat, "vocabulary: inconsistent token table");
  for (std::size_t i = 0; i < v.tokens_.size(); ++i)
    v.index_.emplace(v.tokens_[i], static_cast<std::uint32_t>(i));
  return v;
}

// ---- SparseVector ------------------------------------------------------------

double SparseVector::squared_norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return s;
}

double SparseVector::norm() const { return std::sqrt(squared_norm()); }

double SparseVector::at(std::uint32_t index) const {
  auto it = std::lower_bound(indices.begin(), indices.end(), index);
  if (it == indices.end() || *it != index) return 0.0;
  return values[static_cast<std::size_t>(it - indices.begin())];
}

std::vector<double> SparseVector::to_dense() const {
  std::vector<double> out(dimension, 0.0);
  for (std::size_t i = 0; i < indices.size(); ++i) out[indices[i]] = values[i];
  return out;
}

bool SparseVector::well_formed() const {
  if (indices.size() != values.size()) return false;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= dimension || values[i] == 0.0 || !std::isfinite(values[i])) return false;
    if (i > 0 && indices[i] <= indices[i - 1]) return false;
  }
  if (normalized && !indices.empty() && std::abs(norm() - 1.0) > 1e-9) return false;
  return true;
}

SparseVector SparseVector::from_dense(std::span<const double> dense) {
  SparseVector v;
  v.dimension = dense.size();
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) {
      v.indices.push_back(static_cast<std::uint32_t>(i));
      v.values.push_back(dense[i]);
    }
  }
  return v;
}

double dot(const SparseVector& a, const SparseVector& b) {
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.indices.size() && j < b.indices.size()) {
    if (a.indices[i] == b.indices[j]) {
      s += a.values[i++] * b.values[j++];
    } else if (a.indices[i] < b.indices[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return s;
}

double dot(const SparseVector& a, std::span<const double> dense) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.indices.size(); ++i) s += a.values[i] * dense[a.indices[i]];
  return s;
}

double squared_distance(const SparseVector& a, const SparseVector& b) {
  return std::max(0.0, a.squared_norm() + b.squared_norm() - 2.0 * dot(a, b));
}

SparseVector concat(const SparseVector& a, const SparseVector& b) {
  SparseVector out;
  out.dimension = a.dimension + b.dimension;
  out.indices = a.indices;
  out.values = a.values;
  for (std::size_t i = 0; i < b.indices.size(); ++i) {
    out.indices.push_back(static_cast<std::uint32_t>(a.dimension + b.indices[i]));
    out.values.push_back(b.values[i]);
  }
  return out;
}

void l2_normalize(SparseVector& v) {
  const double n = v.norm();
  if (n > 0.0)
    for (double& x : v.values) x /= n;
  v.normalized = true;
}

SparseVector tfidf_vector(const std::vector<std::string>& doc, const Vocabulary& vocab) {
  std::map<std::uint32_t, double> tf;
  for (const auto& token : doc) {
    const auto idx = vocab.index_of(token);
    if (idx >= 0) tf[static_cast<std::uint32_t>(idx)] += 1.0;
  }
  SparseVector v;
  v.dimension = vocab.size();
  for (const auto& [idx, count] : tf) {
    v.indices.push_back(idx);
    v.values.push_back(count * vocab.idf(idx));
  }
  l2_normalize(v);
  return v;
}

// ---- Citation count features -------------------------------------------------

CodeSpace::CodeSpace(std::vector<std::string> keys) : keys_(std::move(keys)) {
  std::sort(keys_.begin(), keys_.end());
  keys_.erase(std::unique(keys_.begin(), keys_.end()), keys_.end());
  for (std::size_t i = 0; i < keys_.size(); ++i) index_.emplace(keys_[i], static_cast<std::uint32_t>(i));
}

std::int64_t CodeSpace::index_of(const std::string& key) const {
  auto it = index_.find(key);
  return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

CodeSpace build_code_space(const std::vector<std::string>& training_ids, const GraphIndex& index,
                           int hops) {
  std::vector<std::string> keys;
  for (const auto& id : training_ids)
    for (const auto& [key, _] : khop_citation_codes(id, hops, index)) keys.push_back(key);
  return CodeSpace(std::move(keys));
}

namespace {

SparseVector counts_to_vector(const CodeCounts& counts, const CodeSpace& space) {
  std::map<std::uint32_t, double> cells;
  for (const auto& [key, n] : counts) {
    const auto idx = space.index_of(key);
    if (idx >= 0) cells[static_cast<std::uint32_t>(idx)] += static_cast<double>(n);
  }
  SparseVector v;
  v.dimension = space.size();
  for (const auto& [idx, value] : cells) {
    v.indices.push_back(idx);
    v.values.push_back(value);
  }
  return v;
}

}  // namespace

SparseVector onehop_cpc_counts(std::string_view patent_id, const GraphIndex& index,
                               const CodeSpace& code_space) {
  return counts_to_vector(khop_citation_codes(patent_id, 1, index), code_space);
}

SparseVector twohop_pair_counts(std::string_view patent_id, const GraphIndex& index,
                                const CodeSpace& pair_space) {
  return counts_to_vector(khop_citation_codes(patent_id, 2, index), pair_space);
}

}  // namespace patland
