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

#include "patland/learners.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "patland/error.hpp"
#include "patland/features.hpp"
#include "patland/pca.hpp"

namespace patland {

using nlohmann::json;
namespace fs = std::filesystem;

std::shared_ptr<LearnerResources> LearnerResources::over(std::shared_ptr<const CorpusStore> corpus) {
  auto r = std::make_shared<LearnerResources>();
  r->index = std::make_shared<const GraphIndex>(*corpus);
  r->corpus = std::move(corpus);
  return r;
}

std::vector<StreamKind> parse_stream_spec(const std::string& spec) {
  std::vector<StreamKind> kinds;
  std::stringstream in(spec);
  std::string part;
  while (std::getline(in, part, '+')) {
    StreamKind k;
    if (part == "1") k = StreamKind::kAbstractText;
    else if (part == "2") k = StreamKind::kClaimsText;
    else if (part == "3") k = StreamKind::kDescriptionText;
    else if (part == "4") k = StreamKind::kCitation1Hop;
    else if (part == "5") k = StreamKind::kCpcAvg;
    else k = parse_stream_kind(part);
    if (std::find(kinds.begin(), kinds.end(), k) != kinds.end())
      throw Error(ErrorCode::kInvalidArgument, "stream '" + part + "' listed twice");
    kinds.push_back(k);
  }
  if (std::find(kinds.begin(), kinds.end(), StreamKind::kAbstractText) == kinds.end())
    throw Error(ErrorCode::kInvalidArgument, "stream spec '" + spec + "' must include abstract_text");
  return kinds;
}

namespace {

constexpr const char* kModelFormat = "patland.model";
constexpr int kModelVersion = 1;

const PatentRecord& record_of(const LearnerResources& res, const std::string& id) {
  return res.corpus->record(id);
}

std::shared_ptr<const EmbeddingTable> find_table(const LearnerResources& res,
                                                 const std::vector<std::string>& names, std::string* chosen) {
  for (const auto& n : names) {
    auto it = res.embeddings.find(n);
    if (it != res.embeddings.end() && it->second) {
      if (chosen) *chosen = n;
      return it->second;
    }
  }
  std::string list;
  for (const auto& n : names) list += (list.empty() ? "" : " or ") + n;
  throw Error(ErrorCode::kPrecondition, "model needs an embedding table (" + list + ")");
}

json options_json(const LearnerOptions& o) {
  return {{"min_df", o.min_df},
          {"pca_components", o.pca_components},
          {"abstract_tokens", o.abstract_tokens},
          {"claims_tokens", o.claims_tokens},
          {"description_tokens", o.description_tokens},
          {"cpc_seq_tokens", o.cpc_seq_tokens},
          {"cpc_slots", o.cpc_slots},
          {"threshold", o.threshold}};
}

void options_from_json(const json& j, LearnerOptions& o) {
  o.min_df = j.at("min_df").get<std::size_t>();
  o.pca_components = j.at("pca_components").get<std::size_t>();
  o.abstract_tokens = j.at("abstract_tokens").get<std::size_t>();
  o.claims_tokens = j.at("claims_tokens").get<std::size_t>();
  o.description_tokens = j.at("description_tokens").get<std::size_t>();
  o.cpc_seq_tokens = j.at("cpc_seq_tokens").get<std::size_t>();
  o.cpc_slots = j.at("cpc_slots").get<std::size_t>();
  o.threshold = j.at("threshold").get<double>();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << text << '\n';
}

void ensure_dir(const std::string& directory) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create '" + directory + "': " + ec.message());
}

SparseVector scaled(SparseVector v, double s) {
  for (auto& x : v.values) x *= s;
  v.normalized = false;
  return v;
}

std::vector<std::string> ids_of(const std::vector<LabeledExample>& train) {
  std::vector<std::string> ids;
  for (const auto& e : train) ids.push_back(e.patent_id);
  return ids;
}

// ---- SVM models ----------------------------------------------------------------

enum class SvmKind { kTfidf, kW2v, kFt, kOneHop, kTfidfOneHop };

const char* svm_kind_name(SvmKind k) {
  switch (k) {
    case SvmKind::kTfidf: return "svm-tfidf";
    case SvmKind::kW2v: return "svm-w2v";
    case SvmKind::kFt: return "svm-ft";
    case SvmKind::kOneHop: return "svm-1hop";
    case SvmKind::kTfidfOneHop: return "svm-tfidf-1hop";
  }
  return "svm";
}

bool uses_tfidf(SvmKind k) { return k == SvmKind::kTfidf || k == SvmKind::kTfidfOneHop; }
bool uses_onehop(SvmKind k) { return k == SvmKind::kOneHop || k == SvmKind::kTfidfOneHop; }
bool uses_embedding(SvmKind k) { return k == SvmKind::kW2v || k == SvmKind::kFt; }

struct SvmFeaturizer {
  SvmKind kind = SvmKind::kTfidf;
  LearnerOptions options;
  std::shared_ptr<const LearnerResources> res;
  Vocabulary vocab_abstract, vocab_claims;
  CodeSpace code_space;
  std::shared_ptr<const EmbeddingTable> table;
  std::string table_name;
  PcaProjection pca;

  std::vector<double> embedding_input(const PatentRecord& r) const {
    auto a = mean_embedding(tokenize(r.abstract_text), *table, options.abstract_tokens);
    auto c = mean_embedding(tokenize(r.claims), *table, options.claims_tokens);
    a.insert(a.end(), c.begin(), c.end());
    return a;
  }

  SparseVector onehop(const std::string& id) const {
    auto v = onehop_cpc_counts(id, *res->index, code_space);
    l2_normalize(v);
    return v;
  }

  SparseVector operator()(const std::string& id) const {
    const auto& r = record_of(*res, id);
    if (uses_embedding(kind)) {
      const auto x = embedding_input(r);
      return SparseVector::from_dense(pca_project(x, pca));
    }
    SparseVector x;
    if (uses_tfidf(kind)) {
      const double s = 1.0 / std::sqrt(2.0);
      x = concat(scaled(tfidf_vector(tokenize(r.abstract_text), vocab_abstract), s),
                 scaled(tfidf_vector(tokenize(r.claims), vocab_claims), s));
    }
    if (uses_onehop(kind)) x = uses_tfidf(kind) ? concat(x, onehop(id)) : onehop(id);
    return x;
  }

  void fit(const std::vector<std::string>& ids) {
    if (uses_tfidf(kind)) {
      std::vector<std::vector<std::string>> da, dc;
      for (const auto& id : ids) {
        const auto& r = record_of(*res, id);
        da.push_back(tokenize(r.abstract_text));
        dc.push_back(tokenize(r.claims));
      }
      vocab_abstract = build_vocabulary(da, english_stopwords(), options.min_df);
      vocab_claims = build_vocabulary(dc, english_stopwords(), options.min_df);
    }
    if (uses_onehop(kind)) code_space = build_code_space(ids, *res->index, 1);
    if (uses_embedding(kind)) {
      std::vector<std::vector<double>> xs;
      for (const auto& id : ids) xs.push_back(embedding_input(record_of(*res, id)));
      pca = pca_fit(xs, options.pca_components);
    }
  }

  json state() const {
    json j;
    if (uses_tfidf(kind)) {
      j["vocab_abstract"] = json::parse(vocab_abstract.to_json());
      j["vocab_claims"] = json::parse(vocab_claims.to_json());
    }
    if (uses_onehop(kind)) j["code_space"] = code_space.keys();
    if (uses_embedding(kind)) {
      j["embedding"] = table_name;
      j["pca"] = json::parse(pca.to_json());
    }
    return j;
  }

  void restore(const json& j) {
    if (uses_tfidf(kind)) {
      vocab_abstract = Vocabulary::from_json(j.at("vocab_abstract").dump());
      vocab_claims = Vocabulary::from_json(j.at("vocab_claims").dump());
    }
    if (uses_onehop(kind)) code_space = CodeSpace(j.at("code_space").get<std::vector<std::string>>());
    if (uses_embedding(kind)) pca = PcaProjection::from_json(j.at("pca").dump());
  }
};

class SvmPredictor : public ModelPredictor {
 public:
  SvmPredictor(SvmFeaturizer featurizer, KernelSvmModel model)
      : featurizer_(std::move(featurizer)), model_(std::move(model)) {}

  Label predict(const std::string& id) const override {
    return patland::predict(model_, featurizer_(id)) > 0 ? Label::kPositive : Label::kNegative;
  }
  double score(const std::string& id) const override { return decision_value(model_, featurizer_(id)); }
  std::string model_name() const override { return svm_kind_name(featurizer_.kind); }

  void save(const std::string& directory) const override {
    ensure_dir(directory);
    json j;
    j["format"] = kModelFormat;
    j["version"] = kModelVersion;
    j["model"] = model_name();
    j["options"] = options_json(featurizer_.options);
    j["features"] = featurizer_.state();
    j["svm"] = json::parse(to_json(model_));
    write_text(fs::path(directory) / "model.json", j.dump());
  }

 private:
  SvmFeaturizer featurizer_;
  KernelSvmModel model_;
};

// 1 / (d * Var(X)) over every feature cell of the training matrix.
double scaled_gamma(const std::vector<SvmExample>& data) {
  const double d = static_cast<double>(data.front().x.dimension);
  const double cells = d * static_cast<double>(data.size());
  double sum = 0.0, sq = 0.0;
  for (const auto& e : data) {
    for (double v : e.x.values) {
      sum += v;
      sq += v * v;
    }
  }
  const double mean = sum / cells;
  const double var = sq / cells - mean * mean;
  if (!(var > 0.0) || d == 0.0) return 1.0;
  return 1.0 / (d * var);
}

class SvmLearner : public Learner {
 public:
  SvmLearner(SvmKind kind, std::shared_ptr<const LearnerResources> res, LearnerOptions options)
      : kind_(kind), res_(std::move(res)), options_(std::move(options)) {
    if (uses_embedding(kind_))
      table_ = find_table(*res_, {kind_ == SvmKind::kW2v ? "w2v" : "ft"}, &table_name_);
  }

  std::string name() const override { return svm_kind_name(kind_); }

  std::unique_ptr<Predictor> fit(const std::vector<LabeledExample>& train, std::uint64_t) const override {
    SvmFeaturizer f{kind_, options_, res_, {}, {}, {}, table_, table_name_, {}};
    f.fit(ids_of(train));
    std::vector<SvmExample> data;
    for (const auto& e : train) data.push_back({f(e.patent_id), e.label == Label::kPositive ? 1 : -1});
    RbfSvmParams params = options_.svm;
    if (!params.gamma) params.gamma = scaled_gamma(data);
    auto model = train_smo_rbf(data, params);
    return std::make_unique<SvmPredictor>(std::move(f), std::move(model));
  }

 private:
  SvmKind kind_;
  std::shared_ptr<const LearnerResources> res_;
  LearnerOptions options_;
  std::shared_ptr<const EmbeddingTable> table_;
  std::string table_name_;
};

// ---- neural model --------------------------------------------------------------

bool is_text_stream(StreamKind k) {
  return k == StreamKind::kAbstractText || k == StreamKind::kClaimsText || k == StreamKind::kDescriptionText ||
         k == StreamKind::kCpcSeq || k == StreamKind::kCpcAvg;
}

std::string stream_spec_string(const std::vector<StreamKind>& kinds) {
  std::string s;
  for (auto k : kinds) s += (s.empty() ? "" : "+") + std::string(to_string(k));
  return s;
}

struct NeuralFeaturizer {
  std::vector<StreamKind> kinds;
  LearnerOptions options;
  std::shared_ptr<const LearnerResources> res;
  std::shared_ptr<const EmbeddingTable> table;
  std::string table_name;
  CodeSpace onehop_space, twohop_space;

  std::size_t input_dim(StreamKind k) const {
    switch (k) {
      case StreamKind::kCitation1Hop: return std::max<std::size_t>(1, onehop_space.size());
      case StreamKind::kCitation2Hop: return std::max<std::size_t>(1, twohop_space.size());
      case StreamKind::kCpcAvg: return options.cpc_slots * table->dimension();
      default: return table->dimension();
    }
  }

  std::vector<double> counts(const SparseVector& v, std::size_t dim) const {
    std::vector<double> out(dim, 0.0);
    for (std::size_t i = 0; i < v.nnz(); ++i) out[v.indices[i]] = v.values[i];
    return out;
  }

  StreamInputs operator()(const std::string& id) const {
    const auto& r = record_of(*res, id);
    StreamInputs in;
    for (auto k : kinds) {
      switch (k) {
        case StreamKind::kAbstractText:
          in[k] = mean_embedding(tokenize(r.abstract_text), *table, options.abstract_tokens);
          break;
        case StreamKind::kClaimsText:
          in[k] = mean_embedding(tokenize(r.claims), *table, options.claims_tokens);
          break;
        case StreamKind::kDescriptionText:
          in[k] = mean_embedding(tokenize(r.description), *table, options.description_tokens);
          break;
        case StreamKind::kCitation1Hop:
          in[k] = counts(onehop_cpc_counts(id, *res->index, onehop_space), input_dim(k));
          break;
        case StreamKind::kCitation2Hop:
          in[k] = counts(twohop_pair_counts(id, *res->index, twohop_space), input_dim(k));
          break;
        case StreamKind::kCpcSeq:
          in[k] = mean_embedding(cpc_title_tokens(r.cpc_codes, res->cpc_titles), *table, options.cpc_seq_tokens);
          break;
        case StreamKind::kCpcAvg:
          in[k] = cpc_avg_embedding(r.cpc_codes, res->cpc_titles, *table, options.cpc_slots).sequence.values;
          break;
      }
    }
    return in;
  }

  NetworkConfig network() const {
    NetworkConfig c;
    for (auto k : kinds) c.streams.push_back({k, input_dim(k), options.stream_width, true});
    c.hidden = options.hidden;
    c.dropout = options.dropout;
    return c;
  }
};

class NeuralPredictor : public ModelPredictor {
 public:
  NeuralPredictor(NeuralFeaturizer featurizer, ClassifierModel model)
      : featurizer_(std::move(featurizer)), model_(std::move(model)) {}

  Label predict(const std::string& id) const override {
    return classify(model_, featurizer_(id), featurizer_.options.threshold) ? Label::kPositive : Label::kNegative;
  }
  double score(const std::string& id) const override { return predict_proba(model_, featurizer_(id)); }
  std::string model_name() const override { return "neural:" + stream_spec_string(featurizer_.kinds); }

  void save(const std::string& directory) const override {
    ensure_dir(directory);
    json j;
    j["format"] = kModelFormat;
    j["version"] = kModelVersion;
    j["model"] = model_name();
    j["options"] = options_json(featurizer_.options);
    j["features"] = {{"embedding", featurizer_.table_name},
                     {"onehop_space", featurizer_.onehop_space.keys()},
                     {"twohop_space", featurizer_.twohop_space.keys()}};
    write_text(fs::path(directory) / "model.json", j.dump());
    std::ofstream out(fs::path(directory) / "classifier.nlcm", std::ios::binary);
    if (!out) throw Error(ErrorCode::kIo, "cannot write classifier checkpoint in '" + directory + "'");
    model_.write_checkpoint(out);
  }

 private:
  NeuralFeaturizer featurizer_;
  ClassifierModel model_;
};

class NeuralLearner : public Learner {
 public:
  NeuralLearner(std::vector<StreamKind> kinds, std::shared_ptr<const LearnerResources> res, LearnerOptions options)
      : kinds_(std::move(kinds)), res_(std::move(res)), options_(std::move(options)) {
    table_ = find_table(*res_, {"text", "w2v", "ft"}, &table_name_);
  }

  std::string name() const override { return "neural:" + stream_spec_string(kinds_); }

  std::unique_ptr<Predictor> fit(const std::vector<LabeledExample>& train, std::uint64_t rng_seed) const override {
    NeuralFeaturizer f{kinds_, options_, res_, table_, table_name_, {}, {}};
    const auto ids = ids_of(train);
    for (auto k : kinds_) {
      if (k == StreamKind::kCitation1Hop) f.onehop_space = build_code_space(ids, *res_->index, 1);
      if (k == StreamKind::kCitation2Hop) f.twohop_space = build_code_space(ids, *res_->index, 2);
    }
    std::vector<NeuralExample> data;
    data.reserve(train.size());
    for (const auto& e : train) data.push_back({f(e.patent_id), e.label == Label::kPositive ? 1 : 0});
    auto train_options = options_.neural;
    train_options.rng_seed = rng_seed;
    auto trained = train_classifier(f.network(), data, train_options);
    return std::make_unique<NeuralPredictor>(std::move(f), std::move(trained.model));
  }

 private:
  std::vector<StreamKind> kinds_;
  std::shared_ptr<const LearnerResources> res_;
  LearnerOptions options_;
  std::shared_ptr<const EmbeddingTable> table_;
  std::string table_name_;
};

SvmKind parse_svm_kind(const std::string& model) {
  if (model == "svm-tfidf") return SvmKind::kTfidf;
  if (model == "svm-w2v") return SvmKind::kW2v;
  if (model == "svm-ft") return SvmKind::kFt;
  if (model == "svm-1hop") return SvmKind::kOneHop;
  if (model == "svm-tfidf-1hop") return SvmKind::kTfidfOneHop;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown model '" + model +
                  "' (expected svm-tfidf, svm-w2v, svm-ft, svm-1hop, svm-tfidf-1hop or neural:<streams>)");
}

void check_resources(const std::shared_ptr<const LearnerResources>& res) {
  if (!res || !res->corpus || !res->index)
    throw Error(ErrorCode::kInvalidArgument, "learner resources need a corpus and a graph index");
}

}  // namespace

std::unique_ptr<Learner> make_learner(const std::string& model, std::shared_ptr<const LearnerResources> resources,
                                      const LearnerOptions& options) {
  check_resources(resources);
  if (model.rfind("neural:", 0) == 0)
    return std::make_unique<NeuralLearner>(parse_stream_spec(model.substr(7)), std::move(resources), options);
  return std::make_unique<SvmLearner>(parse_svm_kind(model), std::move(resources), options);
}

std::unique_ptr<ModelPredictor> load_predictor(const std::string& directory,
                                               std::shared_ptr<const LearnerResources> resources) {
  check_resources(resources);
  const auto path = fs::path(directory) / "model.json";
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "no model at '" + path.string() + "'");
  try {
    const json j = json::parse(in);
    if (j.at("format").get<std::string>() != kModelFormat)
      throw Error(ErrorCode::kFormat, "'" + path.string() + "' is not a patland model");
    if (j.at("version").get<int>() != kModelVersion)
      throw Error(ErrorCode::kFormat, "unsupported model version in '" + path.string() + "'");
    const auto model = j.at("model").get<std::string>();
    LearnerOptions options;
    options_from_json(j.at("options"), options);
    const auto& feats = j.at("features");
    if (model.rfind("neural:", 0) == 0) {
      NeuralFeaturizer f;
      f.kinds = parse_stream_spec(model.substr(7));
      f.options = options;
      f.res = resources;
      f.table = find_table(*resources, {feats.at("embedding").get<std::string>()}, &f.table_name);
      f.onehop_space = CodeSpace(feats.at("onehop_space").get<std::vector<std::string>>());
      f.twohop_space = CodeSpace(feats.at("twohop_space").get<std::vector<std::string>>());
      std::ifstream bin(fs::path(directory) / "classifier.nlcm", std::ios::binary);
      if (!bin) throw Error(ErrorCode::kNotFound, "missing classifier.nlcm in '" + directory + "'");
      auto classifier = ClassifierModel::read_checkpoint(bin);
      const auto expected = f.network();
      const auto& got = classifier.config().streams;
      if (got.size() != expected.streams.size())
        throw Error(ErrorCode::kFormat, "checkpoint streams do not match the model description");
      for (std::size_t i = 0; i < got.size(); ++i)
        if (got[i].kind != expected.streams[i].kind || got[i].input_dim != expected.streams[i].input_dim)
          throw Error(ErrorCode::kFormat, std::string("checkpoint stream ") + to_string(got[i].kind) +
                                              " does not match the available features");
      return std::make_unique<NeuralPredictor>(std::move(f), std::move(classifier));
    }
    SvmFeaturizer f;
    f.kind = parse_svm_kind(model);
    f.options = options;
    f.res = resources;
    if (uses_embedding(f.kind)) f.table = find_table(*resources, {feats.at("embedding").get<std::string>()}, &f.table_name);
    f.restore(feats);
    return std::make_unique<SvmPredictor>(std::move(f), kernel_svm_from_json(j.at("svm").dump()));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, "'" + path.string() + "': " + e.what());
  }
}

std::vector<ScoredPatent> score_patents(const Predictor& predictor, const std::vector<std::string>& ids) {
  std::vector<ScoredPatent> out;
  out.reserve(ids.size());
  for (const auto& id : ids)
    out.push_back({id, predictor.score(id), predictor.predict(id) == Label::kPositive});
  return out;
}

}  // namespace patland
