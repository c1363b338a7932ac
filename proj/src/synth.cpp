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

#include "patland/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>

#include "patland/active.hpp"
#include "patland/error.hpp"
#include "patland/rng.hpp"

namespace patland {

namespace {

enum Group { kEasyPos, kBoundaryPos, kBoundaryNeg, kEasyNeg };

std::string make_word(const std::string& prefix, std::size_t i) {
  std::string letters;
  do {
    letters.push_back(static_cast<char>('a' + i % 26));
    i /= 26;
  } while (i > 0);
  while (letters.size() < 2) letters.push_back('a');
  return prefix + letters;
}

const std::vector<std::string> kTopicSubclasses = {"G06N", "G06F", "G10L", "G06V"};
const std::vector<std::string> kOtherSubclasses = {"A01B", "B60K", "C07D", "E05D", "F16H", "H01M"};
const std::vector<std::string> kFiller = {"the", "of", "and", "a", "to", "in", "is"};
constexpr std::size_t kGroupsPerSubclass = 12;

std::string subgroup_code(const std::string& subclass, std::size_t g) {
  return subclass + std::to_string(1 + g / 4) + "/" + (g % 4 == 0 ? "00" : std::to_string(10 * (g % 4)));
}

struct Vocab {
  std::vector<std::string> topic, other, shared;
};

class TextGen {
 public:
  TextGen(const Vocab& v, const SynthOptions& o, Rng& rng) : v_(v), o_(o), rng_(rng) {}

  std::string words(std::size_t n, double share) {
    std::string out;
    for (std::size_t k = 0; k < n; ++k) {
      if (!out.empty()) out.push_back(' ');
      if (k % 7 == 3) {
        out += kFiller[rng_.uniform_index(kFiller.size())];
        out.push_back(' ');
      }
      out += token(share);
    }
    return out;
  }

 private:
  const std::string& token(double share) {
    if (rng_.bernoulli(o_.shared_token_rate)) return pick(v_.shared);
    return rng_.bernoulli(share) ? pick(v_.topic) : pick(v_.other);
  }
  const std::string& pick(const std::vector<std::string>& list) { return list[rng_.uniform_index(list.size())]; }

  const Vocab& v_;
  const SynthOptions& o_;
  Rng& rng_;
};

}  // namespace

SyntheticLandscape generate_landscape(const SynthOptions& o) {
  if (o.patents < 8) throw Error(ErrorCode::kInvalidArgument, "synthetic corpus needs at least 8 patents");
  if (o.topic_vocabulary < 2 || o.shared_vocabulary < 2 || o.embedding_dimension < 1)
    throw Error(ErrorCode::kInvalidArgument, "synthetic vocabulary and embedding sizes must be positive");
  Rng rng(o.rng_seed);
  SyntheticLandscape out;

  Vocab vocab;
  for (std::size_t i = 0; i < o.topic_vocabulary; ++i) {
    vocab.topic.push_back(make_word("pz", i));
    vocab.other.push_back(make_word("nq", i));
  }
  for (std::size_t i = 0; i < o.shared_vocabulary; ++i) vocab.shared.push_back(make_word("cx", i));

  // Embeddings: topic words sit around +u, off-topic words around -u.
  const std::size_t d = o.embedding_dimension;
  std::vector<double> u(d);
  double norm = 0.0;
  for (auto& x : u) {
    x = rng.normal();
    norm += x * x;
  }
  for (auto& x : u) x /= std::sqrt(norm);
  out.embeddings = EmbeddingTable(d, "synthetic");
  const double noise = o.embedding_noise / std::sqrt(static_cast<double>(d));
  auto embed = [&](const std::vector<std::string>& words, double sign) {
    for (const auto& w : words) {
      std::vector<float> v(d);
      for (std::size_t i = 0; i < d; ++i) v[i] = static_cast<float>(sign * u[i] + noise * rng.normal());
      out.embeddings.add(w, std::move(v));
    }
  };
  embed(vocab.topic, 1.0);
  embed(vocab.other, -1.0);
  embed(vocab.shared, 0.0);

  TextGen text(vocab, o, rng);
  for (const auto& s : kTopicSubclasses) out.cpc_titles[s] = text.words(6, 1.0);
  for (const auto& s : kOtherSubclasses) out.cpc_titles[s] = text.words(6, 0.0);

  // Group assignment with exact counts, then shuffled.
  const auto count = [&](double f) { return static_cast<std::size_t>(std::llround(f * static_cast<double>(o.patents))); };
  std::vector<Group> groups;
  groups.insert(groups.end(), count(o.easy_positive_fraction), kEasyPos);
  groups.insert(groups.end(), count(o.boundary_positive_fraction), kBoundaryPos);
  groups.insert(groups.end(), count(o.boundary_negative_fraction), kBoundaryNeg);
  if (groups.size() > o.patents) throw Error(ErrorCode::kInvalidArgument, "group fractions exceed 1");
  groups.resize(o.patents, kEasyNeg);
  rng.shuffle(std::span<Group>(groups));

  const std::size_t n = o.patents;
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    ids[i] = "US" + std::to_string(1000000 + 37 * i);
  }
  std::vector<std::size_t> pos_nodes, neg_nodes;
  for (std::size_t i = 0; i < n; ++i) (groups[i] <= kBoundaryPos ? pos_nodes : neg_nodes).push_back(i);

  out.records.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = out.records[i];
    const Group g = groups[i];
    const bool positive = g == kEasyPos || g == kBoundaryPos;
    const double share = g == kEasyPos       ? o.easy_positive_share
                         : g == kBoundaryPos ? o.boundary_positive_share
                         : g == kBoundaryNeg ? o.boundary_negative_share
                                             : o.easy_negative_share;
    r.patent_id = ids[i];
    r.title = text.words(6, share);
    r.abstract_text = text.words(o.abstract_tokens, share);
    const std::size_t claim_count = 2 + rng.uniform_index(3);
    for (std::size_t c = 0; c < claim_count; ++c) {
      if (c > 0) r.claims += "\n";
      r.claims += std::to_string(c + 1) + ". " + text.words(o.claims_tokens / claim_count, share);
    }
    r.description = text.words(30, share);

    std::set<std::string> codes;
    auto add_codes = [&](const std::vector<std::string>& subclasses, std::size_t k) {
      for (std::size_t c = 0; c < k; ++c)
        codes.insert(subgroup_code(subclasses[rng.uniform_index(subclasses.size())],
                                   rng.uniform_index(kGroupsPerSubclass)));
    };
    if (g == kEasyPos) add_codes(kTopicSubclasses, 1 + rng.uniform_index(3));
    else if (g == kEasyNeg) add_codes(kOtherSubclasses, 1 + rng.uniform_index(3));
    else {
      add_codes(kTopicSubclasses, 1);
      add_codes(kOtherSubclasses, 1);
    }
    r.cpc_codes.assign(codes.begin(), codes.end());

    std::set<std::string> cites;
    const std::size_t k = 2 + rng.uniform_index(5);
    for (std::size_t c = 0; c < k; ++c) {
      const bool same = rng.bernoulli(o.citation_homophily);
      const auto& bucket = (same == positive) ? pos_nodes : neg_nodes;
      if (bucket.empty()) continue;
      const auto j = bucket[rng.uniform_index(bucket.size())];
      if (j != i) cites.insert(ids[j]);
    }
    r.citations.assign(cites.begin(), cites.end());

    char date[16];
    std::snprintf(date, sizeof date, "%04d-%02d-%02d", 2005 + static_cast<int>(rng.uniform_index(16)),
                  1 + static_cast<int>(rng.uniform_index(12)), 1 + static_cast<int>(rng.uniform_index(28)));
    r.grant_date = date;

    out.truth[r.patent_id] = positive ? Label::kPositive : Label::kNegative;
    out.boundary[r.patent_id] = g == kBoundaryPos || g == kBoundaryNeg;
  }

  // Families pair patents of the same class.
  for (std::size_t i = 0; i < n; ++i) {
    if (!out.records[i].family_id.empty() || !rng.bernoulli(o.family_rate)) continue;
    const auto& bucket = (groups[i] <= kBoundaryPos) ? pos_nodes : neg_nodes;
    const auto j = bucket[rng.uniform_index(bucket.size())];
    if (j == i || !out.records[j].family_id.empty()) continue;
    out.records[i].family_id = out.records[j].family_id = "F" + ids[i].substr(2);
  }

  std::vector<std::string> easy_pos;
  for (std::size_t i = 0; i < n; ++i)
    if (groups[i] == kEasyPos) easy_pos.push_back(ids[i]);
  if (o.seed_count > easy_pos.size())
    throw Error(ErrorCode::kInvalidArgument, "seed count exceeds the number of clear in-topic patents");
  for (std::size_t i = 0; i < o.seed_count; ++i) {
    const auto j = i + rng.uniform_index(easy_pos.size() - i);
    std::swap(easy_pos[i], easy_pos[j]);
  }
  out.seeds.assign(easy_pos.begin(), easy_pos.begin() + static_cast<std::ptrdiff_t>(o.seed_count));
  std::sort(out.seeds.begin(), out.seeds.end());
  return out;
}

void write_landscape(const std::string& directory, const SyntheticLandscape& landscape) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create '" + directory + "': " + ec.message());
  const fs::path dir(directory);
  {
    std::ofstream out(dir / "patents.jsonl", std::ios::binary);
    if (!out) throw Error(ErrorCode::kIo, "cannot write patents.jsonl in '" + directory + "'");
    write_jsonl(out, landscape.records);
  }
  write_id_file((dir / "seeds.txt").string(), landscape.seeds);
  std::vector<LabeledExample> truth;
  for (const auto& [id, label] : landscape.truth) truth.push_back(make_annotation(id, label, "oracle"));
  write_labels_file((dir / "truth.jsonl").string(), truth);
  landscape.embeddings.save_binary((dir / "embeddings.embt").string());
  std::ofstream titles(dir / "cpc_titles.tsv", std::ios::binary);
  if (!titles) throw Error(ErrorCode::kIo, "cannot write cpc_titles.tsv in '" + directory + "'");
  for (const auto& [code, title] : landscape.cpc_titles) titles << code << '\t' << title << '\n';
}

HarvestResult harvest_labels(const SyntheticLandscape& landscape, const HarvestOptions& options) {
  auto corpus = std::make_shared<const CorpusStore>(landscape.records, "synthetic");
  const auto index = build_index(*corpus);
  HarvestResult result;
  result.expansion = expand(IdSet(landscape.seeds.begin(), landscape.seeds.end()), index);
  const std::size_t n_anti = options.antiseeds ? options.antiseeds : landscape.seeds.size();
  const auto antiseeds = sample_antiseeds(result.expansion.antiseed_pool, n_anti, derive_seed(options.rng_seed, 1));

  std::vector<LabeledExample> initial;
  for (const auto& id : landscape.seeds) initial.push_back(make_seed(id, "2026-01-01T00:00:00Z"));
  for (const auto& id : antiseeds) initial.push_back(make_antiseed(id, "2026-01-01T00:00:00Z"));
  SessionOptions so;
  so.pool = std::vector<std::string>(result.expansion.l2.begin(), result.expansion.l2.end());
  ActiveLearningSession session(corpus, initial, options.rng_seed, so, "harvest",
                                [] { return std::string("2026-01-01T00:00:00Z"); });

  std::size_t hard_pos = 0, hard_neg = 0;
  while (result.annotations < options.max_annotations &&
         (hard_pos < options.target_per_class || hard_neg < options.target_per_class)) {
    const auto batch = session.next_candidates(std::max<std::size_t>(options.batch, 1));
    if (batch.empty()) break;
    for (const auto& entry : batch) {
      if (result.annotations == options.max_annotations) break;
      const Label truth = landscape.truth.at(entry.patent_id);
      const auto r = session.submit_label(entry.patent_id, truth, "oracle");
      ++result.annotations;
      (truth == Label::kPositive ? hard_pos : hard_neg)++;
      if (r.retrained) ++result.retrains;
    }
  }

  const auto state = session.state();
  const auto counts = count_categories(state->labeled);
  const std::size_t cap = std::min({counts[1], counts[2], counts[3]});
  std::size_t kept_pos = 0;
  for (const auto& e : state->labeled) {
    if (e.category() == Category::kHardPositive && kept_pos++ >= cap) continue;
    result.labels.push_back(e);
  }
  return result;
}

}  // namespace patland
