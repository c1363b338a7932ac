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

#ifndef PATLAND_LEARNERS_HPP_
#define PATLAND_LEARNERS_HPP_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "patland/corpus.hpp"
#include "patland/embedding.hpp"
#include "patland/eval.hpp"
#include "patland/graph.hpp"
#include "patland/neural.hpp"
#include "patland/svm.hpp"

namespace patland {

// Shared, read-only inputs of every featurizer.
struct LearnerResources {
  std::shared_ptr<const CorpusStore> corpus;
  std::shared_ptr<const GraphIndex> index;
  // Keyed "w2v", "ft", or "text"; the neural text streams use "text",
  // falling back to "w2v" and then "ft".
  std::map<std::string, std::shared_ptr<const EmbeddingTable>> embeddings;
  CpcTitles cpc_titles;

  static std::shared_ptr<LearnerResources> over(std::shared_ptr<const CorpusStore> corpus);
};

struct LearnerOptions {
  RbfSvmParams svm;  // unset gamma: 1 / (d * Var(X)) of the training features
  std::size_t min_df = 1;
  std::size_t pca_components = 50;
  std::size_t abstract_tokens = 256;
  std::size_t claims_tokens = 512;
  std::size_t description_tokens = 512;
  std::size_t cpc_seq_tokens = 512;
  std::size_t cpc_slots = 8;
  std::size_t stream_width = 64;
  std::vector<std::size_t> hidden = {300, 64};
  double dropout = 0.4;
  NeuralTrainOptions neural;
  double threshold = 0.5;
};

// Streams of a "neural:<spec>" model, e.g. "abstract_text+claims_text+cpc_avg"
// or by number, "1+2+5" (1 abstract, 2 claims, 3 description, 4 1-hop
// citations, 5 averaged CPC titles). The abstract stream is mandatory.
std::vector<StreamKind> parse_stream_spec(const std::string& spec);

// A fitted model that can be written to and read back from a directory.
class ModelPredictor : public Predictor {
 public:
  virtual std::string model_name() const = 0;
  virtual void save(const std::string& directory) const = 0;
};

std::unique_ptr<ModelPredictor> load_predictor(const std::string& directory,
                                               std::shared_ptr<const LearnerResources> resources);

// Model kinds: svm-tfidf, svm-w2v, svm-ft, svm-1hop, svm-tfidf-1hop and
// neural:<stream-spec>. fit() returns a ModelPredictor.
std::unique_ptr<Learner> make_learner(const std::string& model, std::shared_ptr<const LearnerResources> resources,
                                      const LearnerOptions& options = {});

// Positive-class probability (neural) or decision value (SVM) for each id.
struct ScoredPatent {
  std::string patent_id;
  double score = 0.0;
  bool included = false;
};

std::vector<ScoredPatent> score_patents(const Predictor& predictor, const std::vector<std::string>& ids);

}  // namespace patland

#endif  // PATLAND_LEARNERS_HPP_
