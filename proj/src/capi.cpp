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

#include "patland/patland.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "patland/corpus.hpp"
#include "patland/embedding.hpp"
#include "patland/error.hpp"
#include "patland/eval.hpp"
#include "patland/features.hpp"
#include "patland/graph.hpp"
#include "patland/learners.hpp"
#include "patland/service.hpp"
#include "patland/synth.hpp"

using namespace patland;
using nlohmann::json;
namespace fs = std::filesystem;

struct pl_corpus {
  std::shared_ptr<CorpusStore> store;
};

struct pl_workspace {
  std::shared_ptr<LearnerResources> resources;
};

struct pl_model {
  std::shared_ptr<const LearnerResources> resources;
  std::unique_ptr<ModelPredictor> predictor;
};

struct pl_server {
  std::unique_ptr<ApiService> service;
  std::unique_ptr<HttpServer> http;
};

namespace {

thread_local pl_status last_status = PL_OK;
thread_local std::string last_message;

pl_status fail(pl_status status, const std::string& message) {
  last_status = status;
  last_message = message;
  return status;
}

pl_status succeed() {
  last_status = PL_OK;
  last_message.clear();
  return PL_OK;
}

template <typename F>
pl_status guarded(F&& body) {
  try {
    body();
    return succeed();
  } catch (const Error& e) {
    return fail(static_cast<pl_status>(e.code()), e.what());
  } catch (const json::exception& e) {
    return fail(PL_INVALID_ARGUMENT, std::string("options: ") + e.what());
  } catch (const std::bad_alloc&) {
    return fail(PL_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(PL_INTERNAL_ERROR, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(char** out, const std::string& s) {
  if (out) *out = dup_string(s);
}

void require(const void* p, const char* what) {
  if (!p) throw Error(ErrorCode::kInvalidArgument, std::string(what) + " is null");
}

json parse_options(const char* text, std::initializer_list<const char*> allowed) {
  if (!text || !*text) return json::object();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("options are not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "options must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw Error(ErrorCode::kInvalidArgument, "unknown option '" + key + "'");
  }
  return j;
}

void check_keys(const json& j, const char* scope, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, std::string(scope) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw Error(ErrorCode::kInvalidArgument, "unknown option '" + std::string(scope) + "." + key + "'");
  }
}

template <typename T>
void take(const json& j, const char* key, T& dest) {
  if (j.contains(key) && !j.at(key).is_null()) dest = j.at(key).get<T>();
}

#define PL_LEARNER_KEYS                                                                                \
  "svm", "neural", "min_df", "pca_components", "abstract_tokens", "claims_tokens", "description_tokens", \
      "cpc_seq_tokens", "cpc_slots", "stream_width", "hidden", "dropout", "threshold"

LearnerOptions learner_options(const json& j) {
  LearnerOptions o;
  if (j.contains("svm")) {
    const auto& s = j.at("svm");
    check_keys(s, "svm", {"c", "gamma", "tolerance", "max_iterations"});
    take(s, "c", o.svm.c);
    if (s.contains("gamma") && !s.at("gamma").is_null()) o.svm.gamma = s.at("gamma").get<double>();
    take(s, "tolerance", o.svm.tolerance);
    take(s, "max_iterations", o.svm.max_iterations);
  }
  if (j.contains("neural")) {
    const auto& n = j.at("neural");
    check_keys(n, "neural", {"epochs", "batch_size", "learning_rate", "min_updates"});
    take(n, "epochs", o.neural.epochs);
    take(n, "batch_size", o.neural.batch_size);
    take(n, "learning_rate", o.neural.learning_rate);
    take(n, "min_updates", o.neural.min_updates);
  }
  take(j, "min_df", o.min_df);
  take(j, "pca_components", o.pca_components);
  take(j, "abstract_tokens", o.abstract_tokens);
  take(j, "claims_tokens", o.claims_tokens);
  take(j, "description_tokens", o.description_tokens);
  take(j, "cpc_seq_tokens", o.cpc_seq_tokens);
  take(j, "cpc_slots", o.cpc_slots);
  take(j, "stream_width", o.stream_width);
  take(j, "hidden", o.hidden);
  take(j, "dropout", o.dropout);
  take(j, "threshold", o.threshold);
  return o;
}

std::vector<LabeledExample> load_labels(const char* path) {
  require(path, "labels path");
  return read_labels_file(path);
}

json counts_json(const CategoryCounts& c) {
  json j = json::object();
  for (int i = 0; i < 4; ++i) j[to_string(static_cast<Category>(i))] = c[i];
  return j;
}

std::vector<std::size_t> parse_sizes(const char* text) {
  if (!text || !*text) return kDefaultCurveSizes;
  std::vector<std::size_t> sizes;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    if (part.empty() || part.find_first_not_of("0123456789 ") != std::string::npos)
      throw Error(ErrorCode::kInvalidArgument, "bad curve size '" + part + "'");
    sizes.push_back(std::stoull(part));
  }
  if (sizes.empty()) throw Error(ErrorCode::kInvalidArgument, "no curve sizes given");
  return sizes;
}

std::multimap<std::string, std::string> parse_query(const char* text) {
  std::multimap<std::string, std::string> out;
  if (!text) return out;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, '&')) {
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string::npos) out.emplace(part, "");
    else out.emplace(part.substr(0, eq), part.substr(eq + 1));
  }
  return out;
}

void make_dir(const char* dir) {
  require(dir, "output directory");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, std::string("cannot create '") + dir + "': " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  return out;
}

json sparse_json(const std::string& id, const SparseVector& v) {
  return {{"patent_id", id}, {"dimension", v.dimension}, {"indices", v.indices}, {"values", v.values}};
}

}  // namespace

extern "C" {

const char* pl_version(void) { return "1.0.0"; }

const char* pl_last_error(void) { return last_message.c_str(); }

pl_status pl_last_status(void) { return last_status; }

const char* pl_status_name(pl_status status) {
  if (status == PL_OK) return "ok";
  return error_code_name(static_cast<ErrorCode>(status));
}

void pl_string_free(char* text) { std::free(text); }

// ---- corpus ----

pl_status pl_corpus_load(const char* path, pl_corpus** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto c = std::make_unique<pl_corpus>();
    if (fs::is_directory(path)) {
      c->store = std::make_shared<CorpusStore>(CorpusStore::load(path));
    } else {
      c->store = std::make_shared<CorpusStore>(read_jsonl_file(path), path);
    }
    *out = c.release();
  });
}

pl_status pl_corpus_load_tsv(const char* options_json, pl_corpus** out, char** warnings_json) {
  return guarded([&] {
    require(out, "out");
    const json o = parse_options(options_json, {"patents", "cpc", "citations", "claims", "columns"});
    if (!o.contains("patents")) throw Error(ErrorCode::kInvalidArgument, "options.patents is required");
    std::vector<std::unique_ptr<std::ifstream>> files;
    auto open = [&](const char* key) -> std::optional<NamedStream> {
      if (!o.contains(key) || o.at(key).is_null()) return std::nullopt;
      const auto path = o.at(key).get<std::string>();
      files.push_back(std::make_unique<std::ifstream>(path, std::ios::binary));
      if (!*files.back()) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
      return NamedStream{path, files.back().get()};
    };
    TsvInputs inputs;
    inputs.patents = *open("patents");
    inputs.cpc = open("cpc");
    inputs.citations = open("citations");
    inputs.claims = open("claims");
    TsvColumnMap columns;
    if (o.contains("columns")) {
      const auto& m = o.at("columns");
      check_keys(m, "columns",
                 {"patent_id", "title", "abstract_text", "claims", "description", "family_id", "grant_date",
                  "cpc_patent_id", "cpc_code", "citation_patent_id", "citation_target", "claim_patent_id",
                  "claim_text", "claim_sequence"});
      take(m, "patent_id", columns.patent_id);
      take(m, "title", columns.title);
      take(m, "abstract_text", columns.abstract_text);
      take(m, "claims", columns.claims);
      take(m, "description", columns.description);
      take(m, "family_id", columns.family_id);
      take(m, "grant_date", columns.grant_date);
      take(m, "cpc_patent_id", columns.cpc_patent_id);
      take(m, "cpc_code", columns.cpc_code);
      take(m, "citation_patent_id", columns.citation_patent_id);
      take(m, "citation_target", columns.citation_target);
      take(m, "claim_patent_id", columns.claim_patent_id);
      take(m, "claim_text", columns.claim_text);
      take(m, "claim_sequence", columns.claim_sequence);
    }
    auto result = parse_patentsview_tsv(inputs, columns);
    auto c = std::make_unique<pl_corpus>();
    c->store = std::make_shared<CorpusStore>(std::move(result.records), inputs.patents.name);
    emit(warnings_json, json{{"warnings", result.warnings},
                             {"unmatched_cpc_rows", result.unmatched_cpc_rows},
                             {"unmatched_citation_rows", result.unmatched_citation_rows},
                             {"unmatched_claim_rows", result.unmatched_claim_rows}}
                            .dump());
    *out = c.release();
  });
}

pl_status pl_corpus_add_labels(pl_corpus* corpus, const char* labels_path) {
  return guarded([&] {
    require(corpus, "corpus");
    corpus->store->put_labels(load_labels(labels_path));
  });
}

pl_status pl_corpus_save(const pl_corpus* corpus, const char* directory) {
  return guarded([&] {
    require(corpus, "corpus");
    make_dir(directory);
    corpus->store->save(directory);
  });
}

size_t pl_corpus_size(const pl_corpus* corpus) { return corpus ? corpus->store->size() : 0; }

pl_status pl_corpus_summary(const pl_corpus* corpus, char** summary_json) {
  return guarded([&] {
    require(corpus, "corpus");
    const auto& store = *corpus->store;
    const GraphIndex index(store);
    std::size_t citations = 0, cpc = 0;
    std::map<std::string, std::size_t> families;
    for (const auto& r : store.records()) {
      citations += r.citations.size();
      cpc += r.cpc_codes.size();
      if (!r.family_id.empty()) ++families[r.family_id];
    }
    std::size_t shared_families = 0;
    for (const auto& [f, n] : families) shared_families += n > 1;
    const auto labels = store.labels();
    const auto prov = store.provenance();
    emit(summary_json, json{{"patents", store.size()},
                            {"labels", labels.size()},
                            {"label_categories", counts_json(count_categories(labels))},
                            {"citations", citations},
                            {"dangling_citations", index.dangling().size()},
                            {"cpc_assignments", cpc},
                            {"families", families.size()},
                            {"multi_member_families", shared_families},
                            {"ingest_source", prov.ingest_source}}
                           .dump());
  });
}

void pl_corpus_free(pl_corpus* corpus) { delete corpus; }

// ---- graph ----

pl_status pl_expand(const pl_corpus* corpus, const char* seed_file, const char* options_json, const char* out_dir,
                    char** result_json) {
  return guarded([&] {
    require(corpus, "corpus");
    require(seed_file, "seed file");
    const json o = parse_options(options_json, {"cpc_level", "include_citing"});
    ExpansionOptions options;
    const auto level = o.value("cpc_level", std::string("subgroup"));
    if (level == "subgroup") options.cpc_level = CpcLevel::kSubgroup;
    else if (level == "subclass") options.cpc_level = CpcLevel::kSubclass;
    else throw Error(ErrorCode::kInvalidArgument, "cpc_level must be 'subgroup' or 'subclass'");
    options.include_citing = o.value("include_citing", false);
    const auto seed_ids = read_id_file(seed_file);
    const GraphIndex index(*corpus->store);
    const auto result = expand(IdSet(seed_ids.begin(), seed_ids.end()), index, options);
    make_dir(out_dir);
    write_expansion(out_dir, result);
    emit(result_json, json{{"seeds", result.seeds.size()},
                           {"l1", result.l1.size()},
                           {"l2", result.l2.size()},
                           {"antiseed_pool", result.antiseed_pool.size()}}
                          .dump());
  });
}

pl_status pl_sample_antiseeds(const char* pool_file, size_t n, uint64_t rng_seed, const char* out_dir) {
  return guarded([&] {
    require(pool_file, "pool file");
    const auto ids = read_id_file(pool_file);
    const auto sample = sample_antiseeds(IdSet(ids.begin(), ids.end()), n, rng_seed);
    make_dir(out_dir);
    write_id_file((fs::path(out_dir) / "antiseeds.txt").string(), sample);
    std::vector<LabeledExample> labels;
    for (const auto& id : sample) labels.push_back(make_antiseed(id));
    write_labels_file((fs::path(out_dir) / "antiseed_labels.jsonl").string(), labels);
  });
}

// ---- features and models ----

pl_status pl_workspace_new(const pl_corpus* corpus, const char* options_json, pl_workspace** out) {
  return guarded([&] {
    require(corpus, "corpus");
    require(out, "out");
    const json o = parse_options(options_json, {"embeddings", "w2v", "ft", "cpc_titles"});
    auto w = std::make_unique<pl_workspace>();
    w->resources = LearnerResources::over(corpus->store);
    auto table = [&](const char* key, const char* slot) {
      if (!o.contains(key) || o.at(key).is_null()) return;
      auto t = EmbeddingTable::load(o.at(key).get<std::string>());
      w->resources->embeddings[slot] = std::make_shared<const EmbeddingTable>(std::move(t));
    };
    table("embeddings", "text");
    table("w2v", "w2v");
    table("ft", "ft");
    if (o.contains("cpc_titles") && !o.at("cpc_titles").is_null())
      w->resources->cpc_titles = read_cpc_titles(o.at("cpc_titles").get<std::string>());
    *out = w.release();
  });
}

void pl_workspace_free(pl_workspace* workspace) { delete workspace; }

pl_status pl_featurize(const pl_workspace* workspace, const char* options_json, const char* out_dir,
                       char** result_json) {
  return guarded([&] {
    require(workspace, "workspace");
    const json o = parse_options(options_json, {"labels", "min_df", "hops", "embedding", "max_tokens"});
    const auto& res = *workspace->resources;
    const auto& store = *res.corpus;
    std::vector<std::string> train_ids;
    if (o.contains("labels") && !o.at("labels").is_null()) {
      for (const auto& e : read_labels_file(o.at("labels").get<std::string>())) {
        store.record(e.patent_id);
        train_ids.push_back(e.patent_id);
      }
    } else {
      for (const auto& r : store.records()) train_ids.push_back(r.patent_id);
    }
    const std::size_t min_df = o.value("min_df", std::size_t{1});
    const std::vector<int> hops = o.value("hops", std::vector<int>{1});
    for (int h : hops)
      if (h != 1 && h != 2) throw Error(ErrorCode::kInvalidArgument, "hops must be 1 or 2");
    const std::size_t max_tokens = o.value("max_tokens", std::size_t{256});

    auto doc = [&](const PatentRecord& r) { return tokenize(r.title + " " + r.abstract_text + " " + r.claims); };
    std::vector<std::vector<std::string>> docs;
    for (const auto& id : train_ids) docs.push_back(doc(store.record(id)));
    const auto vocab = build_vocabulary(docs, english_stopwords(), min_df);

    make_dir(out_dir);
    const fs::path dir(out_dir);
    open_out(dir / "vocabulary.json") << vocab.to_json() << '\n';
    {
      auto out = open_out(dir / "tfidf.jsonl");
      for (const auto& r : store.records()) out << sparse_json(r.patent_id, tfidf_vector(doc(r), vocab)).dump() << '\n';
    }
    json result = {{"patents", store.size()}, {"training_ids", train_ids.size()}, {"vocabulary", vocab.size()}};
    for (int h : hops) {
      const auto space = build_code_space(train_ids, *res.index, h);
      const std::string stem = h == 1 ? "onehop" : "twohop";
      open_out(dir / (stem + "_space.json")) << json(space.keys()).dump() << '\n';
      auto out = open_out(dir / (stem + ".jsonl"));
      for (const auto& r : store.records()) {
        const auto v = h == 1 ? onehop_cpc_counts(r.patent_id, *res.index, space)
                              : twohop_pair_counts(r.patent_id, *res.index, space);
        out << sparse_json(r.patent_id, v).dump() << '\n';
      }
      result[stem + "_codes"] = space.size();
    }
    if (o.value("embedding", false)) {
      std::shared_ptr<const EmbeddingTable> table;
      for (const char* name : {"text", "w2v", "ft"}) {
        auto it = res.embeddings.find(name);
        if (it != res.embeddings.end()) {
          table = it->second;
          break;
        }
      }
      if (!table) throw Error(ErrorCode::kPrecondition, "embedding features need an embedding table");
      auto out = open_out(dir / "embedding.jsonl");
      for (const auto& r : store.records())
        out << json{{"patent_id", r.patent_id}, {"vector", mean_embedding(doc(r), *table, max_tokens)}}.dump()
            << '\n';
      result["embedding_dimension"] = table->dimension();
    }
    emit(result_json, result.dump());
  });
}

pl_status pl_model_train(const pl_workspace* workspace, const char* labels_path, const char* model_spec,
                         const char* options_json, uint64_t rng_seed, pl_model** out) {
  return guarded([&] {
    require(workspace, "workspace");
    require(model_spec, "model");
    require(out, "out");
    const LearnerOptions options = learner_options(parse_options(options_json, {PL_LEARNER_KEYS}));
    const auto labels = load_labels(labels_path);
    const auto learner = make_learner(model_spec, workspace->resources, options);
    auto fitted = learner->fit(labels, rng_seed);
    auto m = std::make_unique<pl_model>();
    m->resources = workspace->resources;
    m->predictor.reset(dynamic_cast<ModelPredictor*>(fitted.release()));
    if (!m->predictor) throw Error(ErrorCode::kInternal, "learner did not produce a persistable model");
    *out = m.release();
  });
}

pl_status pl_model_save(const pl_model* model, const char* directory) {
  return guarded([&] {
    require(model, "model");
    make_dir(directory);
    model->predictor->save(directory);
  });
}

pl_status pl_model_load(const pl_workspace* workspace, const char* directory, pl_model** out) {
  return guarded([&] {
    require(workspace, "workspace");
    require(directory, "directory");
    require(out, "out");
    auto m = std::make_unique<pl_model>();
    m->resources = workspace->resources;
    m->predictor = load_predictor(directory, workspace->resources);
    *out = m.release();
  });
}

pl_status pl_model_export_landscape(const pl_model* model, const char* ids_file, double threshold,
                                    const char* out_path, char** summary_json) {
  return guarded([&] {
    require(model, "model");
    require(out_path, "output path");
    std::vector<std::string> ids;
    if (ids_file) {
      ids = read_id_file(ids_file);
    } else {
      for (const auto& r : model->resources->corpus->records()) ids.push_back(r.patent_id);
    }
    auto scored = score_patents(*model->predictor, ids);
    std::size_t included = 0;
    std::ofstream out = open_out(out_path);
    for (auto& s : scored) {
      if (!std::isnan(threshold)) s.included = s.score >= threshold;
      included += s.included;
      out << json{{"patent_id", s.patent_id}, {"score", s.score}, {"included", s.included}}.dump() << '\n';
    }
    if (!out) throw Error(ErrorCode::kIo, std::string("write failed for '") + out_path + "'");
    emit(summary_json, json{{"model", model->predictor->model_name()},
                            {"scored", scored.size()},
                            {"included", included}}
                           .dump());
  });
}

void pl_model_free(pl_model* model) { delete model; }

// ---- evaluation ----

pl_status pl_bundle_summary(const char* labels_path, uint64_t rng_seed, char** summary_json) {
  return guarded([&] {
    const auto bundle = build_bundle(load_labels(labels_path), rng_seed);
    emit(summary_json, json{{"balanced", bundle.balanced.size()},
                            {"holdout", bundle.holdout.size()},
                            {"balanced_counts", counts_json(bundle.balanced_counts)},
                            {"holdout_counts", counts_json(bundle.holdout_counts)}}
                           .dump());
  });
}

pl_status pl_evaluate(const pl_workspace* workspace, const char* labels_path, const char* model_spec,
                      const char* options_json, uint64_t rng_seed, char** report_json, char** report_table) {
  return guarded([&] {
    require(workspace, "workspace");
    require(model_spec, "model");
    const json o = parse_options(options_json, {PL_LEARNER_KEYS, "k"});
    const std::size_t k = o.value("k", std::size_t{5});
    const auto learner = make_learner(model_spec, workspace->resources, learner_options(o));
    const auto bundle = build_bundle(load_labels(labels_path), rng_seed);
    const auto report = evaluate(*learner, bundle, k, rng_seed);
    emit(report_json, report.to_json());
    emit(report_table, reports_table({report}));
  });
}

pl_status pl_curve(const pl_workspace* workspace, const char* labels_path, const char* model_spec, const char* sizes,
                   const char* options_json, uint64_t rng_seed, char** curve_json_out, char** curve_csv_out) {
  return guarded([&] {
    require(workspace, "workspace");
    require(model_spec, "model");
    const json o = parse_options(options_json, {PL_LEARNER_KEYS, "k"});
    const std::size_t k = o.value("k", std::size_t{5});
    const auto size_list = parse_sizes(sizes);
    const auto learner = make_learner(model_spec, workspace->resources, learner_options(o));
    const auto bundle = build_bundle(load_labels(labels_path), rng_seed);
    const auto curve = learning_curve(*learner, bundle, size_list, k, rng_seed);
    emit(curve_json_out, curve_json(curve));
    emit(curve_csv_out, curve_csv(curve));
  });
}

pl_status pl_kappa(const char* labels_a, const char* labels_b, char** result_json) {
  return guarded([&] {
    std::map<std::string, Label> a, b;
    for (const auto& e : load_labels(labels_a)) a[e.patent_id] = e.label;
    for (const auto& e : load_labels(labels_b)) b[e.patent_id] = e.label;
    AgreementTable t;
    for (const auto& [id, la] : a) {
      auto it = b.find(id);
      if (it == b.end()) continue;
      const bool pa = la == Label::kPositive, pb = it->second == Label::kPositive;
      if (pa && pb) ++t.both_positive;
      else if (pa) ++t.a_only_positive;
      else if (pb) ++t.b_only_positive;
      else ++t.both_negative;
    }
    const double kappa = cohens_kappa(a, b);
    emit(result_json, json{{"kappa", kappa},
                           {"shared", t.total()},
                           {"both_positive", t.both_positive},
                           {"a_only_positive", t.a_only_positive},
                           {"b_only_positive", t.b_only_positive},
                           {"both_negative", t.both_negative}}
                          .dump());
  });
}

// ---- annotation service ----

pl_status pl_server_new(const pl_corpus* corpus, const char* options_json, pl_server** out) {
  return guarded([&] {
    require(corpus, "corpus");
    require(out, "out");
    const json o = parse_options(options_json, {"state_dir", "cors_origin", "queue_k"});
    ServiceConfig config;
    config.corpus = corpus->store;
    take(o, "state_dir", config.state_dir);
    take(o, "cors_origin", config.cors_origin);
    take(o, "queue_k", config.default_queue_k);
    auto s = std::make_unique<pl_server>();
    s->service = std::make_unique<ApiService>(std::move(config));
    s->service->recover();
    *out = s.release();
  });
}

pl_status pl_server_handle(pl_server* server, const char* method, const char* path, const char* query,
                           const char* body, int* http_status, char** response_json) {
  return guarded([&] {
    require(server, "server");
    require(method, "method");
    require(path, "path");
    const auto r = server->service->handle(method, path, parse_query(query), body ? body : "");
    if (http_status) *http_status = r.status;
    emit(response_json, r.body);
  });
}

pl_status pl_server_bind(pl_server* server, const char* host, int port, int* bound_port) {
  return guarded([&] {
    require(server, "server");
    if (port < 0 || port > 65535) throw Error(ErrorCode::kInvalidArgument, "port out of range");
    if (!server->http) server->http = std::make_unique<HttpServer>(*server->service);
    const int p = server->http->bind(host ? host : "127.0.0.1", port);
    if (bound_port) *bound_port = p;
  });
}

pl_status pl_server_serve(pl_server* server) {
  return guarded([&] {
    require(server, "server");
    if (!server->http) throw Error(ErrorCode::kPrecondition, "server is not bound");
    server->http->serve();
  });
}

void pl_server_stop(pl_server* server) {
  if (server && server->http) server->http->stop();
}

void pl_server_free(pl_server* server) { delete server; }

// ---- synthetic data ----

pl_status pl_synth(const char* options_json, const char* out_dir, char** summary_json) {
  return guarded([&] {
    const json o = parse_options(options_json, {"patents", "seed_count", "rng_seed", "harvest", "target_per_class",
                                                "max_annotations", "harvest_seed"});
    SynthOptions so;
    take(o, "patents", so.patents);
    take(o, "seed_count", so.seed_count);
    take(o, "rng_seed", so.rng_seed);
    const auto landscape = generate_landscape(so);
    make_dir(out_dir);
    write_landscape(out_dir, landscape);
    json summary = {{"patents", landscape.records.size()}, {"seeds", landscape.seeds.size()}};
    if (o.value("harvest", false)) {
      HarvestOptions ho;
      take(o, "target_per_class", ho.target_per_class);
      take(o, "max_annotations", ho.max_annotations);
      take(o, "harvest_seed", ho.rng_seed);
      const auto h = harvest_labels(landscape, ho);
      write_labels_file((fs::path(out_dir) / "labels.jsonl").string(), h.labels);
      write_expansion((fs::path(out_dir) / "expansion").string(), h.expansion);
      summary["l1"] = h.expansion.l1.size();
      summary["l2"] = h.expansion.l2.size();
      summary["labels"] = h.labels.size();
      summary["annotations"] = h.annotations;
      summary["retrains"] = h.retrains;
      summary["categories"] = counts_json(count_categories(h.labels));
    }
    emit(summary_json, summary.dump());
  });
}

}  // extern "C"
