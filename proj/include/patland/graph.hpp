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

#ifndef PATLAND_GRAPH_HPP_
#define PATLAND_GRAPH_HPP_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "patland/corpus.hpp"

namespace patland {

using IdSet = std::set<std::string>;

// Code multiset: key -> multiplicity. For 2-hop keys are "X-Y" subclass pairs.
using CodeCounts = std::map<std::string, std::uint64_t>;

enum class CpcLevel { kSubgroup, kSubclass };

struct ExpansionOptions {
  CpcLevel cpc_level = CpcLevel::kSubgroup;
  // Also pull in patents that cite a seed (inward citations).
  bool include_citing = false;
};

struct DanglingCitation {
  std::string source;
  std::string target;
};

// Citation, CPC and family indexes over one corpus. Immutable once built.
//
// Patents are addressed by their position in the corpus; adjacency lists are
// sorted and duplicate-free, and reverse is the exact transpose of forward.
class GraphIndex {
 public:
  using Node = std::uint32_t;

  GraphIndex() = default;
  explicit GraphIndex(const CorpusStore& corpus);

  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::string& id(Node n) const { return ids_[n]; }
  bool contains(std::string_view patent_id) const;
  Node node(std::string_view patent_id) const;  // throws kNotFound

  const std::vector<Node>& forward(Node n) const { return forward_[n]; }
  const std::vector<Node>& reverse(Node n) const { return reverse_[n]; }
  // Canonical full codes and distinct subclasses of a patent, sorted.
  const std::vector<std::string>& codes(Node n) const { return codes_[n]; }
  const std::vector<std::string>& subclasses(Node n) const { return subclasses_[n]; }
  const std::string& family(Node n) const { return families_[n]; }

  // Patents carrying a code at the given level; empty when none.
  const std::vector<Node>& patents_with_code(const std::string& code, CpcLevel level) const;
  const std::vector<Node>& family_members(const std::string& family_id) const;

  const std::vector<DanglingCitation>& dangling() const { return dangling_; }

  // forward/reverse keyed by patent_id, for export and inspection.
  std::map<std::string, std::vector<std::string>> forward_citations() const;
  std::map<std::string, std::vector<std::string>> reverse_citations() const;

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, Node> nodes_;
  std::vector<std::vector<Node>> forward_;
  std::vector<std::vector<Node>> reverse_;
  std::vector<std::vector<std::string>> codes_;
  std::vector<std::vector<std::string>> subclasses_;
  std::vector<std::string> families_;
  std::map<std::string, std::vector<Node>, std::less<>> by_code_;
  std::map<std::string, std::vector<Node>, std::less<>> by_subclass_;
  std::map<std::string, std::vector<Node>, std::less<>> by_family_;
  std::vector<DanglingCitation> dangling_;
};

GraphIndex build_index(const CorpusStore& corpus);

struct ExpansionResult {
  IdSet seeds;
  IdSet l1;
  IdSet l2;
  IdSet antiseed_pool;
};

// seeds plus every patent sharing a CPC code with a seed or cited by a seed.
IdSet expand_l1(const IdSet& seeds, const GraphIndex& index, const ExpansionOptions& options = {});
// l1 plus every patent sharing a non-empty family_id with a member of l1.
IdSet expand_l2(const IdSet& l1, const GraphIndex& index);
ExpansionResult expand(const IdSet& seeds, const GraphIndex& index,
                       const ExpansionOptions& options = {});

// Uniform sample without replacement, sorted by patent_id.
std::vector<std::string> sample_antiseeds(const IdSet& pool, std::size_t n, std::uint64_t rng_seed);

// k=1: subclasses of directly cited patents. k=2: ordered subclass pairs
// along every outward two-step citation path. Multiplicity counts paths.
CodeCounts khop_citation_codes(std::string_view patent_id, int k, const GraphIndex& index);

// Writes seeds.txt, l1.txt, l2.txt and antiseed_pool.txt into directory.
void write_expansion(const std::string& directory, const ExpansionResult& result);

}  // namespace patland

#endif  // PATLAND_GRAPH_HPP_
