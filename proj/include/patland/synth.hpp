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

#ifndef PATLAND_SYNTH_HPP_
#define PATLAND_SYNTH_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "patland/corpus.hpp"
#include "patland/embedding.hpp"
#include "patland/graph.hpp"

namespace patland {

// Generator for landscape corpora with a planted topic. Patents are drawn
// from four groups: clear in-topic, clear off-topic, and two boundary groups
// whose text mixes both vocabularies. CPC codes and citations correlate with
// the topic; a fraction of patents share families.
struct SynthOptions {
  std::size_t patents = 2000;
  double easy_positive_fraction = 0.2;
  double boundary_positive_fraction = 0.125;
  double boundary_negative_fraction = 0.125;
  std::size_t topic_vocabulary = 1200;  // words per topic cluster
  std::size_t shared_vocabulary = 400;
  std::size_t abstract_tokens = 40;
  std::size_t claims_tokens = 80;
  double shared_token_rate = 0.3;
  // Share of on-topic words among topical tokens, per group.
  double easy_positive_share = 0.92;
  double boundary_positive_share = 0.68;
  double boundary_negative_share = 0.32;
  double easy_negative_share = 0.04;
  double citation_homophily = 0.85;
  double family_rate = 0.1;
  std::size_t embedding_dimension = 32;
  double embedding_noise = 1.0;
  std::size_t seed_count = 120;
  std::uint64_t rng_seed = 7;
};

struct SyntheticLandscape {
  std::vector<PatentRecord> records;
  std::map<std::string, Label> truth;
  std::map<std::string, bool> boundary;  // true for the mixed-vocabulary groups
  std::vector<std::string> seeds;        // sorted
  EmbeddingTable embeddings;
  CpcTitles cpc_titles;
};

SyntheticLandscape generate_landscape(const SynthOptions& options = {});

// Writes patents.jsonl, seeds.txt, truth.jsonl (ground-truth labels as
// annotations by "oracle"), embeddings.embt and cpc_titles.tsv.
void write_landscape(const std::string& directory, const SyntheticLandscape& landscape);

struct HarvestOptions {
  std::size_t antiseeds = 0;         // 0: as many as seeds
  std::size_t target_per_class = 100;  // hard labels wanted per class
  std::size_t max_annotations = 600;
  std::size_t batch = 10;
  std::uint64_t rng_seed = 11;
};

struct HarvestResult {
  ExpansionResult expansion;
  std::vector<LabeledExample> labels;  // seeds, anti-seeds and annotations
  std::size_t annotations = 0;
  std::size_t retrains = 0;
};

// Runs the landscaping front half on a synthetic corpus: expands the seeds,
// samples anti-seeds outside L2, then drives an active-learning session over
// L2 with an annotator that answers from the ground truth, until both hard
// classes reach the target or the annotation budget runs out. Surplus Hard+
// labels are dropped so Hard+ is never larger than another category.
HarvestResult harvest_labels(const SyntheticLandscape& landscape, const HarvestOptions& options = {});

}  // namespace patland

#endif  // PATLAND_SYNTH_HPP_
