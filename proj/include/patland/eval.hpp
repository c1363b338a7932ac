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

#ifndef PATLAND_EVAL_HPP_
#define PATLAND_EVAL_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "patland/corpus.hpp"

namespace patland {

// Counts indexed by Category (Hard+, Hard-, Easy+, Easy-).
using CategoryCounts = std::array<std::size_t, 4>;

CategoryCounts count_categories(const std::vector<LabeledExample>& examples);

struct DatasetBundle {
  std::vector<LabeledExample> balanced;
  std::vector<LabeledExample> holdout;
  CategoryCounts balanced_counts{};
  CategoryCounts holdout_counts{};
  std::uint64_t rng_seed = 0;
};

// Balanced set: every Hard+ example plus an equal-size uniform sample of each
// other category. Holdout: everything else. Throws kPrecondition when a
// category is smaller than Hard+ (or Hard+ is empty).
DatasetBundle build_bundle(const std::vector<LabeledExample>& all_labels, std::uint64_t rng_seed);

struct Fold {
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> test;
};

// Stratified by category; test folds partition the data and differ in size by
// at most one. Independent of the input order.
std::vector<Fold> kfold(const std::vector<LabeledExample>& data, std::size_t k, std::uint64_t rng_seed);

// 2tp / (2tp + fp + fn), 0 when the denominator is 0.
double f1(std::size_t tp, std::size_t fp, std::size_t fn);

struct ClassF1 {
  double positive = 0.0;
  double negative = 0.0;
};

// F1 of each class over the items where subset[i] is true (all items when
// subset is empty). The negative-class F1 flips the label polarity.
ClassF1 per_class_f1(std::span<const Label> predictions, std::span<const Label> golds,
                     const std::vector<bool>& subset = {});

// ---- models under evaluation -------------------------------------------------

class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual Label predict(const std::string& patent_id) const = 0;
  // Continuous score, larger = more positive. Defaults to +/-1.
  virtual double score(const std::string& patent_id) const;
  virtual std::vector<Label> predict_all(const std::vector<std::string>& patent_ids) const;
};

class Learner {
 public:
  virtual ~Learner() = default;
  virtual std::string name() const = 0;
  virtual std::unique_ptr<Predictor> fit(const std::vector<LabeledExample>& train, std::uint64_t rng_seed) const = 0;
};

struct FoldMetrics {
  double hard_pos = 0, hard_neg = 0, easy_pos = 0, easy_neg = 0;
  double hard_avg = 0, easy_avg = 0, overall = 0;
  std::optional<double> holdout_hard_neg, holdout_easy_pos, holdout_easy_neg;
};

// Cross-validated scores laid out like the usual landscape results table.
// Holdout categories are single-class, so they are scored by recall.
struct MetricsReport {
  std::string model;
  double hard_pos = 0, hard_neg = 0, easy_pos = 0, easy_neg = 0;
  double hard_avg = 0, easy_avg = 0, overall = 0;
  double overall_sd = 0;
  std::optional<double> holdout_hard_neg, holdout_easy_pos, holdout_easy_neg;
  std::size_t folds = 0;
  std::size_t balanced_size = 0;
  std::vector<FoldMetrics> per_fold;

  std::string to_json() const;
  std::string to_table() const;
};

std::string reports_table(const std::vector<MetricsReport>& reports);

MetricsReport evaluate(const Learner& learner, const DatasetBundle& bundle, std::size_t k = 5,
                       std::uint64_t rng_seed = 0);

struct CurvePoint {
  std::size_t size = 0;
  MetricsReport report;
};

inline const std::vector<std::size_t> kDefaultCurveSizes = {400, 200, 100, 48, 24};

// Nested, category-balanced subsets of bundle.balanced; each is evaluated
// against the bundle's holdout. Throws kPrecondition for sizes not divisible
// by 4 or larger than the balanced set.
std::vector<CurvePoint> learning_curve(const Learner& learner, const DatasetBundle& bundle,
                                       const std::vector<std::size_t>& sizes = kDefaultCurveSizes,
                                       std::size_t k = 5, std::uint64_t rng_seed = 0);

std::string curve_csv(const std::vector<CurvePoint>& curve);
std::string curve_json(const std::vector<CurvePoint>& curve);

// 2x2 agreement counts: both positive, A positive / B negative,
// A negative / B positive, both negative.
struct AgreementTable {
  std::size_t both_positive = 0;
  std::size_t a_only_positive = 0;
  std::size_t b_only_positive = 0;
  std::size_t both_negative = 0;

  std::size_t total() const { return both_positive + a_only_positive + b_only_positive + both_negative; }
};

double cohens_kappa(const AgreementTable& table);
// Over the items both raters labeled; throws kPrecondition when there are none.
double cohens_kappa(const std::map<std::string, Label>& rater_a, const std::map<std::string, Label>& rater_b);

}  // namespace patland

#endif  // PATLAND_EVAL_HPP_
