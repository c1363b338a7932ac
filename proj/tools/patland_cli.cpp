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

// patland: command-line front end of libpatland.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "patland/patland.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliFailure {
  pl_status status;
};

void check(pl_status s) {
  if (s != PL_OK) throw CliFailure{s};
}

std::string take_string(char* s) {
  std::string out = s ? s : "";
  pl_string_free(s);
  return out;
}

struct Corpus {
  pl_corpus* p = nullptr;
  explicit Corpus(const std::string& path) { check(pl_corpus_load(path.c_str(), &p)); }
  ~Corpus() { pl_corpus_free(p); }
};

struct Workspace {
  pl_workspace* p = nullptr;
  Workspace(const Corpus& c, const json& options) { check(pl_workspace_new(c.p, options.dump().c_str(), &p)); }
  ~Workspace() { pl_workspace_free(p); }
};

struct Model {
  pl_model* p = nullptr;
  ~Model() { pl_model_free(p); }
};

pl_server* g_server = nullptr;

void on_signal(int) {
  if (g_server) pl_server_stop(g_server);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::fprintf(stderr, "error: io_error: cannot write '%s'\n", path.string().c_str());
    throw CliFailure{PL_IO_ERROR};
  }
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"patland: seed-driven patent landscaping"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML configuration file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);

  std::uint64_t rng_seed = 0;
  std::string out;
  std::string corpus_path;
  std::string labels_path;
  std::string model = "svm-tfidf";
  std::string embeddings, w2v, ft, cpc_titles;
  std::size_t k = 5;
  app.add_option("--rng-seed", rng_seed, "Seed of every random choice")->capture_default_str();
  app.add_option("--out", out, "Output directory (or file for export-landscape)");
  app.add_option("--corpus", corpus_path, "Corpus JSONL file or directory written by ingest");
  app.add_option("--labels", labels_path, "Labeled examples (JSONL)");
  app.add_option("--model", model,
                 "svm-tfidf, svm-w2v, svm-ft, svm-1hop, svm-tfidf-1hop or neural:<streams>, e.g. neural:1+2+5")
      ->capture_default_str();
  app.add_option("--k", k, "Cross-validation folds")->capture_default_str();
  app.add_option("--embeddings", embeddings, "Embedding table for text streams (binary or text)");
  app.add_option("--w2v", w2v, "word2vec-style embedding table");
  app.add_option("--ft", ft, "fastText-style embedding table");
  app.add_option("--cpc-titles", cpc_titles, "CPC code titles (code<TAB>title)");

  std::optional<double> svm_c, svm_gamma, learning_rate, dropout;
  std::optional<std::size_t> epochs, batch_size, min_updates, min_df, pca_components, cpc_slots;
  app.add_option("--svm-c", svm_c, "RBF SVM box constraint");
  app.add_option("--svm-gamma", svm_gamma, "RBF kernel width (default 1/(d*Var(X)) of the training features)");
  app.add_option("--epochs", epochs, "Neural training epochs");
  app.add_option("--batch-size", batch_size, "Neural mini-batch size");
  app.add_option("--learning-rate", learning_rate, "Adam learning rate");
  app.add_option("--min-updates", min_updates, "Lower bound on optimizer steps");
  app.add_option("--dropout", dropout, "Dropout rate of the hidden layers");
  app.add_option("--min-df", min_df, "Minimum document frequency of vocabulary tokens");
  app.add_option("--pca-components", pca_components, "Components kept for embedding SVMs");
  app.add_option("--cpc-slots", cpc_slots, "Token slots of the averaged CPC stream");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Load patents (JSONL or PatentsView TSV) into a corpus directory");
  std::string jsonl_in, tsv_patents, tsv_cpc, tsv_citations, tsv_claims;
  ingest->add_option("--jsonl", jsonl_in, "Patents as JSON lines");
  ingest->add_option("--tsv-patents", tsv_patents, "PatentsView patent table");
  ingest->add_option("--tsv-cpc", tsv_cpc, "PatentsView CPC table");
  ingest->add_option("--tsv-citations", tsv_citations, "PatentsView citation table");
  ingest->add_option("--tsv-claims", tsv_claims, "PatentsView claims table");

  // expand
  auto* expand = app.add_subcommand("expand", "Expand seeds to L1 and L2 and write the anti-seed pool");
  std::string seed_file, cpc_level = "subgroup";
  bool include_citing = false;
  expand->add_option("--seed-file", seed_file, "One seed patent id per line")->required();
  expand->add_option("--cpc-level", cpc_level, "Code match level")
      ->check(CLI::IsMember({"subgroup", "subclass"}))
      ->capture_default_str();
  expand->add_flag("--include-citing", include_citing, "Also add patents that cite a seed");

  // antiseed
  auto* antiseed = app.add_subcommand("antiseed", "Sample anti-seeds from the pool outside L2");
  std::string pool_file;
  std::size_t antiseed_count = 0;
  antiseed->add_option("--pool", pool_file, "antiseed_pool.txt written by expand")->required();
  antiseed->add_option("--n", antiseed_count, "Number of anti-seeds")->required();

  // featurize
  auto* featurize = app.add_subcommand("featurize", "Write tf-idf, citation-code and embedding features");
  std::vector<int> hops = {1};
  bool with_embedding = false;
  featurize->add_option("--hops", hops, "Citation hops to featurize (1, 2)")->capture_default_str();
  featurize->add_flag("--embedding", with_embedding, "Also write mean text embeddings");

  // train
  auto* train = app.add_subcommand("train", "Fit a model on labeled examples and save it");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Cross-validate a model on the balanced set and score the holdout");

  // curve
  auto* curve = app.add_subcommand("curve", "Learning curve over nested balanced subsets");
  std::string sizes = "400,200,100,48,24";
  curve->add_option("--sizes", sizes, "Comma-separated training-set sizes (multiples of 4)")->capture_default_str();

  // kappa
  auto* kappa = app.add_subcommand("kappa", "Cohen's kappa between two annotators' labels");
  std::string labels_a, labels_b;
  kappa->add_option("--labels-a", labels_a, "First annotator's labels")->required();
  kappa->add_option("--labels-b", labels_b, "Second annotator's labels")->required();

  // serve
  auto* serve = app.add_subcommand("serve", "Run the annotation service");
  std::string host = "127.0.0.1", state_dir, cors_origin = "*";
  int port = 8080;
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port, "0 picks a free port")->capture_default_str();
  serve->add_option("--state-dir", state_dir, "Directory for session event logs");
  serve->add_option("--cors-origin", cors_origin)->capture_default_str();

  // export-landscape
  auto* export_cmd = app.add_subcommand("export-landscape", "Score L2 and write {patent_id, score, included}");
  std::string model_dir, ids_file;
  std::optional<double> threshold;
  export_cmd->add_option("--model-dir", model_dir, "Directory written by train (otherwise train from --labels)");
  export_cmd->add_option("--ids", ids_file, "Patents to score, e.g. l2.txt from expand")->required();
  export_cmd->add_option("--threshold", threshold, "Inclusion threshold on the score");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic landscape for experiments");
  std::size_t synth_patents = 2000, synth_seeds = 120;
  bool harvest = false;
  synth->add_option("--patents", synth_patents)->capture_default_str();
  synth->add_option("--seed-count", synth_seeds)->capture_default_str();
  synth->add_flag("--harvest", harvest, "Also label a dataset through a simulated annotation session");

  CLI11_PARSE(app, argc, argv);

  auto need = [](const std::string& value, const char* flag) {
    if (value.empty()) {
      std::fprintf(stderr, "error: invalid_argument: %s is required\n", flag);
      throw CliFailure{PL_INVALID_ARGUMENT};
    }
  };
  auto workspace_options = [&] {
    json o = json::object();
    if (!embeddings.empty()) o["embeddings"] = embeddings;
    if (!w2v.empty()) o["w2v"] = w2v;
    if (!ft.empty()) o["ft"] = ft;
    if (!cpc_titles.empty()) o["cpc_titles"] = cpc_titles;
    return o;
  };
  auto learner_options = [&] {
    json o = json::object();
    json svm = json::object(), neural = json::object();
    if (svm_c) svm["c"] = *svm_c;
    if (svm_gamma) svm["gamma"] = *svm_gamma;
    if (epochs) neural["epochs"] = *epochs;
    if (batch_size) neural["batch_size"] = *batch_size;
    if (learning_rate) neural["learning_rate"] = *learning_rate;
    if (min_updates) neural["min_updates"] = *min_updates;
    if (!svm.empty()) o["svm"] = svm;
    if (!neural.empty()) o["neural"] = neural;
    if (dropout) o["dropout"] = *dropout;
    if (min_df) o["min_df"] = *min_df;
    if (pca_components) o["pca_components"] = *pca_components;
    if (cpc_slots) o["cpc_slots"] = *cpc_slots;
    return o;
  };
  // Resolved configuration, written next to the outputs of every run.
  auto snapshot = [&](const fs::path& where) {
    std::stringstream in(app.config_to_str(true, false));
    std::string text, line;
    while (std::getline(in, line))
      if (line.size() < 3 || line.compare(line.size() - 3, 3, "=\"\"") != 0) text += line + '\n';
    write_file(where, text);
  };
  auto out_dir = [&] {
    need(out, "--out");
    std::error_code ec;
    fs::create_directories(out, ec);
    snapshot(fs::path(out) / "run_config.toml");
    return fs::path(out);
  };

  try {
    if (*ingest) {
      const fs::path dir = out_dir();
      pl_corpus* c = nullptr;
      if (!jsonl_in.empty()) {
        check(pl_corpus_load(jsonl_in.c_str(), &c));
      } else {
        need(tsv_patents, "--jsonl or --tsv-patents");
        json o = {{"patents", tsv_patents}};
        if (!tsv_cpc.empty()) o["cpc"] = tsv_cpc;
        if (!tsv_citations.empty()) o["citations"] = tsv_citations;
        if (!tsv_claims.empty()) o["claims"] = tsv_claims;
        char* warnings = nullptr;
        check(pl_corpus_load_tsv(o.dump().c_str(), &c, &warnings));
        const auto w = json::parse(take_string(warnings));
        for (const auto& line : w.at("warnings")) std::fprintf(stderr, "warning: %s\n", line.get<std::string>().c_str());
      }
      std::unique_ptr<pl_corpus, decltype(&pl_corpus_free)> guard(c, pl_corpus_free);
      if (!labels_path.empty()) check(pl_corpus_add_labels(c, labels_path.c_str()));
      check(pl_corpus_save(c, dir.string().c_str()));
      char* summary = nullptr;
      check(pl_corpus_summary(c, &summary));
      const auto text = take_string(summary);
      write_file(dir / "summary.json", text);
      std::printf("%s\n", text.c_str());
    } else if (*expand) {
      need(corpus_path, "--corpus");
      Corpus c(corpus_path);
      const fs::path dir = out_dir();
      const json o = {{"cpc_level", cpc_level}, {"include_citing", include_citing}};
      char* result = nullptr;
      check(pl_expand(c.p, seed_file.c_str(), o.dump().c_str(), dir.string().c_str(), &result));
      const auto text = take_string(result);
      write_file(dir / "expansion.json", text);
      std::printf("%s\n", text.c_str());
    } else if (*antiseed) {
      const fs::path dir = out_dir();
      check(pl_sample_antiseeds(pool_file.c_str(), antiseed_count, rng_seed, dir.string().c_str()));
      std::printf("%s\n", (dir / "antiseeds.txt").string().c_str());
    } else if (*featurize) {
      need(corpus_path, "--corpus");
      Corpus c(corpus_path);
      Workspace w(c, workspace_options());
      const fs::path dir = out_dir();
      json o = {{"hops", hops}, {"embedding", with_embedding}};
      if (!labels_path.empty()) o["labels"] = labels_path;
      if (min_df) o["min_df"] = *min_df;
      char* result = nullptr;
      check(pl_featurize(w.p, o.dump().c_str(), dir.string().c_str(), &result));
      std::printf("%s\n", take_string(result).c_str());
    } else if (*train) {
      need(corpus_path, "--corpus");
      need(labels_path, "--labels");
      Corpus c(corpus_path);
      Workspace w(c, workspace_options());
      const fs::path dir = out_dir();
      Model m;
      check(pl_model_train(w.p, labels_path.c_str(), model.c_str(), learner_options().dump().c_str(), rng_seed, &m.p));
      check(pl_model_save(m.p, dir.string().c_str()));
      std::printf("%s\n", (dir / "model.json").string().c_str());
    } else if (*evaluate) {
      need(corpus_path, "--corpus");
      need(labels_path, "--labels");
      Corpus c(corpus_path);
      Workspace w(c, workspace_options());
      json o = learner_options();
      o["k"] = k;
      char *report = nullptr, *table = nullptr;
      check(pl_evaluate(w.p, labels_path.c_str(), model.c_str(), o.dump().c_str(), rng_seed, &report, &table));
      const auto report_text = take_string(report), table_text = take_string(table);
      if (!out.empty()) {
        const fs::path dir = out_dir();
        write_file(dir / "report.json", report_text);
        write_file(dir / "report.txt", table_text);
      }
      std::printf("%s", table_text.c_str());
    } else if (*curve) {
      need(corpus_path, "--corpus");
      need(labels_path, "--labels");
      Corpus c(corpus_path);
      Workspace w(c, workspace_options());
      json o = learner_options();
      o["k"] = k;
      char *cj = nullptr, *cc = nullptr;
      check(pl_curve(w.p, labels_path.c_str(), model.c_str(), sizes.c_str(), o.dump().c_str(), rng_seed, &cj, &cc));
      const auto json_text = take_string(cj), csv_text = take_string(cc);
      if (!out.empty()) {
        const fs::path dir = out_dir();
        write_file(dir / "curve.json", json_text);
        write_file(dir / "curve.csv", csv_text);
      }
      std::printf("%s", csv_text.c_str());
    } else if (*kappa) {
      char* result = nullptr;
      check(pl_kappa(labels_a.c_str(), labels_b.c_str(), &result));
      const auto text = take_string(result);
      if (!out.empty()) write_file(out_dir() / "kappa.json", text);
      std::printf("%s\n", text.c_str());
    } else if (*serve) {
      need(corpus_path, "--corpus");
      Corpus c(corpus_path);
      json o = {{"cors_origin", cors_origin}};
      if (!state_dir.empty()) {
        o["state_dir"] = state_dir;
        std::error_code ec;
        fs::create_directories(state_dir, ec);
        snapshot(fs::path(state_dir) / "run_config.toml");
      }
      pl_server* s = nullptr;
      check(pl_server_new(c.p, o.dump().c_str(), &s));
      std::unique_ptr<pl_server, decltype(&pl_server_free)> guard(s, pl_server_free);
      int bound = 0;
      check(pl_server_bind(s, host.c_str(), port, &bound));
      g_server = s;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::printf("listening on http://%s:%d/api/v1\n", host.c_str(), bound);
      std::fflush(stdout);
      check(pl_server_serve(s));
      g_server = nullptr;
    } else if (*export_cmd) {
      need(corpus_path, "--corpus");
      need(out, "--out");
      Corpus c(corpus_path);
      Workspace w(c, workspace_options());
      Model m;
      if (!model_dir.empty()) {
        check(pl_model_load(w.p, model_dir.c_str(), &m.p));
      } else {
        need(labels_path, "--model-dir or --labels");
        check(pl_model_train(w.p, labels_path.c_str(), model.c_str(), learner_options().dump().c_str(), rng_seed,
                             &m.p));
      }
      const fs::path target(out);
      if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
      }
      snapshot(fs::path(out + ".config.toml"));
      char* summary = nullptr;
      const double t = threshold ? *threshold : std::numeric_limits<double>::quiet_NaN();
      check(pl_model_export_landscape(m.p, ids_file.c_str(), t, out.c_str(), &summary));
      std::printf("%s\n", take_string(summary).c_str());
    } else if (*synth) {
      const fs::path dir = out_dir();
      const json o = {{"patents", synth_patents}, {"seed_count", synth_seeds}, {"rng_seed", rng_seed ? rng_seed : 7},
                      {"harvest", harvest}};
      char* summary = nullptr;
      check(pl_synth(o.dump().c_str(), dir.string().c_str(), &summary));
      std::printf("%s\n", take_string(summary).c_str());
    }
  } catch (const CliFailure& f) {
    if (pl_last_status() != PL_OK)
      std::fprintf(stderr, "error: %s: %s\n", pl_status_name(pl_last_status()), pl_last_error());
    return static_cast<int>(f.status);
  }
  return 0;
}
