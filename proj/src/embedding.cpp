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

#include "patland/embedding.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "patland/binary_io.hpp"
#include "patland/error.hpp"
#include "patland/features.hpp"

namespace patland {

namespace {
constexpr char kMagic[4] = {'E', 'M', 'B', 'T'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

EmbeddingTable::EmbeddingTable(std::size_t dimension, std::string name, OovPolicy policy)
    : dimension_(dimension), name_(std::move(name)), policy_(policy) {}

void EmbeddingTable::add(const std::string& token, std::vector<float> vector) {
  if (vector.size() != dimension_) {
    throw Error(ErrorCode::kInvalidArgument,
                "embedding for '" + token + "' has length " + std::to_string(vector.size()) +
                    ", table dimension is " + std::to_string(dimension_));
  }
  auto [it, inserted] = vectors_.insert_or_assign(token, std::move(vector));
  if (inserted) order_.push_back(token);
}

const std::vector<float>* EmbeddingTable::find(const std::string& token) const {
  auto it = vectors_.find(token);
  return it == vectors_.end() ? nullptr : &it->second;
}

void EmbeddingTable::write_binary(std::ostream& out) const {
  out.write(kMagic, 4);
  io::write_u32(out, kVersion);
  io::write_u32(out, static_cast<std::uint32_t>(dimension_));
  io::write_u64(out, order_.size());
  for (const auto& token : order_) {
    io::write_u32(out, static_cast<std::uint32_t>(token.size()));
    out.write(token.data(), static_cast<std::streamsize>(token.size()));
    for (float f : vectors_.at(token)) io::write_f32(out, f);
  }
  if (!out) throw Error(ErrorCode::kIo, "failed writing embedding table");
}

EmbeddingTable EmbeddingTable::read_binary(std::istream& in, std::string name) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw Error(ErrorCode::kFormat, "embedding table: bad magic");
  const auto version = io::read_u32(in);
  if (version != kVersion)
    throw Error(ErrorCode::kFormat, "embedding table: unsupported version " + std::to_string(version));
  const auto d = io::read_u32(in);
  const auto count = io::read_u64(in);
  EmbeddingTable table(d, std::move(name));
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto len = io::read_u32(in);
    std::string token(len, '\0');
    if (!in.read(token.data(), len)) throw Error(ErrorCode::kFormat, "embedding table: truncated token");
    std::vector<float> v(d);
    for (auto& f : v) f = io::read_f32(in);
    table.add(token, std::move(v));
  }
  return table;
}

EmbeddingTable EmbeddingTable::read_text(std::istream& in, std::string name) {
  EmbeddingTable table;
  table.name_ = std::move(name);
  std::string line;
  std::size_t line_no = 0;
  bool have_dimension = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;
    std::vector<float> v;
    std::string cell;
    while (fields >> cell) {
      try {
        std::size_t used = 0;
        v.push_back(std::stof(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ParseError(ErrorCode::kParse, line_no, "embedding text: bad number '" + cell + "'");
      }
    }
    if (line_no == 1 && v.size() == 1 &&
        std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      continue;  // word2vec "count dim" header
    }
    if (!have_dimension) {
      if (v.empty()) throw ParseError(ErrorCode::kParse, line_no, "embedding text: no values");
      table.dimension_ = v.size();
      have_dimension = true;
    }
    if (v.size() != table.dimension_)
      throw ParseError(ErrorCode::kParse, line_no, "embedding text: inconsistent dimension");
    table.add(token, std::move(v));
  }
  return table;
}

EmbeddingTable EmbeddingTable::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  char magic[4] = {};
  in.read(magic, 4);
  in.clear();
  in.seekg(0);
  if (std::memcmp(magic, kMagic, 4) == 0) return read_binary(in, path);
  return read_text(in, path);
}

void EmbeddingTable::save_binary(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  write_binary(out);
}

std::vector<double> mean_embedding(const std::vector<std::string>& tokens,
                                   const EmbeddingTable& table, std::size_t max_tokens) {
  if (max_tokens < 1) throw Error(ErrorCode::kInvalidArgument, "max_tokens must be >= 1");
  std::vector<double> sum(table.dimension(), 0.0);
  std::size_t used = 0;
  for (const auto& token : tokens) {
    if (used == max_tokens) break;
    const auto* v = table.find(token);
    if (v == nullptr) {
      if (table.oov_policy() == OovPolicy::kZeroVector) ++used;
      continue;
    }
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += (*v)[i];
    ++used;
  }
  if (used > 0)
    for (double& x : sum) x /= static_cast<double>(used);
  return sum;
}

CpcTitles read_cpc_titles(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  CpcTitles titles;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError(ErrorCode::kFormat, line_no, path + ": expected code<TAB>title");
    titles[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return titles;
}

namespace {

const std::string* lookup_title(const std::string& code, const CpcTitles& titles) {
  if (auto it = titles.find(code); it != titles.end()) return &it->second;
  if (auto parsed = CpcCode::parse(code)) {
    if (auto it = titles.find(parsed->subclass()); it != titles.end()) return &it->second;
  }
  return nullptr;
}

}  // namespace

CpcAverageResult cpc_avg_embedding(const std::vector<std::string>& codes, const CpcTitles& titles,
                                   const EmbeddingTable& table, std::size_t max_tokens) {
  if (max_tokens < 1) throw Error(ErrorCode::kInvalidArgument, "max_tokens must be >= 1");
  CpcAverageResult result;
  auto& seq = result.sequence;
  seq.slots = max_tokens;
  seq.dimension = table.dimension();
  seq.values.assign(max_tokens * table.dimension(), 0.0);

  // Summation in sorted order makes the result independent of input order.
  std::vector<std::string> sorted = codes;
  std::sort(sorted.begin(), sorted.end());
  std::size_t used = 0;
  for (const auto& code : sorted) {
    const auto* title = lookup_title(code, titles);
    if (title == nullptr) {
      result.missing_titles.push_back(code);
      continue;
    }
    std::size_t slot = 0;
    for (const auto& token : tokenize(*title)) {
      if (slot == max_tokens) break;
      const auto* v = table.find(token);
      if (v == nullptr) {
        if (table.oov_policy() == OovPolicy::kZeroVector) ++slot;
        continue;
      }
      double* row = seq.values.data() + slot * seq.dimension;
      for (std::size_t i = 0; i < seq.dimension; ++i) row[i] += (*v)[i];
      ++slot;
    }
    ++used;
  }
  if (used > 0)
    for (double& x : seq.values) x /= static_cast<double>(used);
  return result;
}

std::vector<std::string> cpc_title_tokens(const std::vector<std::string>& codes,
                                          const CpcTitles& titles) {
  std::vector<std::string> tokens;
  for (const auto& code : codes) {
    const auto* title = lookup_title(code, titles);
    if (title == nullptr) continue;
    auto t = tokenize(*title);
    tokens.insert(tokens.end(), t.begin(), t.end());
  }
  return tokens;
}

}  // namespace patland
