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

#include "patland/graph.hpp"

#include <algorithm>
#include <filesystem>

#include "patland/error.hpp"
#include "patland/rng.hpp"

namespace patland {

namespace {

const std::vector<GraphIndex::Node> kNoNodes;

void sort_unique(std::vector<GraphIndex::Node>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

GraphIndex::GraphIndex(const CorpusStore& corpus) {
  const auto& records = corpus.records();
  const std::size_t n = records.size();
  ids_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ids_.push_back(records[i].patent_id);
    nodes_.emplace(records[i].patent_id, static_cast<Node>(i));
  }
  forward_.resize(n);
  reverse_.resize(n);
  codes_.resize(n);
  subclasses_.resize(n);
  families_.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = records[i];
    const Node self = static_cast<Node>(i);
    for (const auto& target : r.citations) {
      auto it = nodes_.find(target);
      if (it == nodes_.end()) {
        dangling_.push_back({r.patent_id, target});
        continue;
      }
      if (it->second == self) continue;
      forward_[i].push_back(it->second);
    }
    sort_unique(forward_[i]);

    for (const auto& text : r.cpc_codes) {
      auto code = CpcCode::parse(text);
      if (!code) continue;
      codes_[i].push_back(code->str());
      subclasses_[i].push_back(code->subclass());
    }
    for (auto* list : {&codes_[i], &subclasses_[i]}) {
      std::sort(list->begin(), list->end());
      list->erase(std::unique(list->begin(), list->end()), list->end());
    }
    for (const auto& c : codes_[i]) by_code_[c].push_back(self);
    for (const auto& s : subclasses_[i]) by_subclass_[s].push_back(self);

    families_[i] = r.family_id;
    if (!r.family_id.empty()) by_family_[r.family_id].push_back(self);
  }
  // Sources are visited in increasing order, so reverse lists come out sorted.
  for (std::size_t i = 0; i < n; ++i)
    for (Node t : forward_[i]) reverse_[t].push_back(static_cast<Node>(i));
}

GraphIndex build_index(const CorpusStore& corpus) { return GraphIndex(corpus); }

bool GraphIndex::contains(std::string_view patent_id) const {
  return nodes_.find(std::string(patent_id)) != nodes_.end();
}

GraphIndex::Node GraphIndex::node(std::string_view patent_id) const {
  auto it = nodes_.find(std::string(patent_id));
  if (it == nodes_.end())
    throw Error(ErrorCode::kNotFound, "unknown patent '" + std::string(patent_id) + "'");
  return it->second;
}

const std::vector<GraphIndex::Node>& GraphIndex::patents_with_code(const std::string& code,
                                                                    CpcLevel level) const {
  const auto& table = level == CpcLevel::kSubgroup ? by_code_ : by_subclass_;
  auto it = table.find(code);
  return it == table.end() ? kNoNodes : it->second;
}

const std::vector<GraphIndex::Node>& GraphIndex::family_members(const std::string& family_id) const {
  auto it = by_family_.find(family_id);
  return it == by_family_.end() ? kNoNodes : it->second;
}

std::map<std::string, std::vector<std::string>> GraphIndex::forward_citations() const {
  std::map<std::string, std::vector<std::string>> out;
  for (std::size_t i = 0; i < size(); ++i) {
    auto& list = out[ids_[i]];
    for (Node t : forward_[i]) list.push_back(ids_[t]);
    std::sort(list.begin(), list.end());
  }
  return out;
}

std::map<std::string, std::vector<std::string>> GraphIndex::reverse_citations() const {
  std::map<std::string, std::vector<std::string>> out;
  for (std::size_t i = 0; i < size(); ++i) {
    auto& list = out[ids_[i]];
    for (Node s : reverse_[i]) list.push_back(ids_[s]);
    std::sort(list.begin(), list.end());
  }
  return out;
}

IdSet expand_l1(const IdSet& seeds, const GraphIndex& index, const ExpansionOptions& options) {
  IdSet out;
  for (const auto& seed : seeds) {
    const auto s = index.node(seed);
    out.insert(seed);
    const auto& keys = options.cpc_level == CpcLevel::kSubgroup ? index.codes(s) : index.subclasses(s);
    for (const auto& key : keys)
      for (auto p : index.patents_with_code(key, options.cpc_level)) out.insert(index.id(p));
    for (auto p : index.forward(s)) out.insert(index.id(p));
    if (options.include_citing)
      for (auto p : index.reverse(s)) out.insert(index.id(p));
  }
  return out;
}

IdSet expand_l2(const IdSet& l1, const GraphIndex& index) {
  IdSet out = l1;
  for (const auto& id : l1) {
    const auto& family = index.family(index.node(id));
    if (family.empty()) continue;
    for (auto p : index.family_members(family)) out.insert(index.id(p));
  }
  return out;
}

ExpansionResult expand(const IdSet& seeds, const GraphIndex& index, const ExpansionOptions& options) {
  ExpansionResult result;
  result.seeds = seeds;
  result.l1 = expand_l1(seeds, index, options);
  result.l2 = expand_l2(result.l1, index);
  for (const auto& id : index.ids())
    if (!result.l2.count(id)) result.antiseed_pool.insert(id);
  return result;
}

std::vector<std::string> sample_antiseeds(const IdSet& pool, std::size_t n, std::uint64_t rng_seed) {
  if (n > pool.size()) {
    throw Error(ErrorCode::kPrecondition, "cannot sample " + std::to_string(n) +
                                              " anti-seeds from a pool of " +
                                              std::to_string(pool.size()));
  }
  std::vector<std::string> items(pool.begin(), pool.end());
  // Partial Fisher-Yates: the first n slots end up a uniform sample.
  Rng rng(rng_seed);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.uniform_index(items.size() - i));
    std::swap(items[i], items[j]);
  }
  items.resize(n);
  std::sort(items.begin(), items.end());
  return items;
}

CodeCounts khop_citation_codes(std::string_view patent_id, int k, const GraphIndex& index) {
  if (k != 1 && k != 2) throw Error(ErrorCode::kInvalidArgument, "hop count must be 1 or 2");
  const auto p = index.node(patent_id);
  CodeCounts counts;
  for (auto q : index.forward(p)) {
    if (k == 1) {
      for (const auto& s : index.subclasses(q)) ++counts[s];
      continue;
    }
    for (auto r : index.forward(q))
      for (const auto& x : index.subclasses(q))
        for (const auto& y : index.subclasses(r)) ++counts[x + "-" + y];
  }
  return counts;
}

void write_expansion(const std::string& directory, const ExpansionResult& result) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create '" + directory + "': " + ec.message());
  auto dump = [&](const char* name, const IdSet& ids) {
    write_id_file((fs::path(directory) / name).string(), std::vector<std::string>(ids.begin(), ids.end()));
  };
  dump("seeds.txt", result.seeds);
  dump("l1.txt", result.l1);
  dump("l2.txt", result.l2);
  dump("antiseed_pool.txt", result.antiseed_pool);
}

}  // namespace patland
