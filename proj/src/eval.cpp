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

#include "patland/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "patland/error.hpp"
#include "patland/rng.hpp"

namespace patland {

using nlohmann::json;

namespace {

constexpr std::array<Category, 4> kCategories = {Category::kHardPositive, Category::kHardNegative,
                                                 Category::kEasyPositive, Category::kEasyNegative};

std::size_t slot(Category c) { return static_cast<std::size_t>(c); }

std::array<std::vector<LabeledExample>, 4> group_by_category(const std::vector<LabeledExample>& data) {
  std::array<std::vector<LabeledExample>, 4> groups;
  for (const auto& e : data) groups[slot(e.category())].push_back(e);
  for (auto& g : groups)
    std::sort(g.begin(), g.end(), [](const auto& a, const auto& b) { return a.patent_id < b.patent_id; });
  return groups;
}

bool by_id(const LabeledExample& a, const LabeledExample& b) { return a.patent_id < b.patent_id; }

}  // namespace

CategoryCounts count_categories(const std::vector<LabeledExample>& examples) {
  CategoryCounts counts{};
  for (const auto& e : examples) ++counts[slot(e.category())];
  return counts;
}

DatasetBundle build_bundle(const std::vector<LabeledExample>& all_labels, std::uint64_t rng_seed) {
  auto groups = group_by_category(all_labels);
  const std::size_t n = groups[slot(Category::kHardPositive)].size();
  auto describe = [&] {
    std::ostringstream s;
    for (auto c : kCategories) s << ' ' << to_string(c) << '=' << groups[slot(c)].size();
    return s.str();
  };
  if (n == 0) throw Error(ErrorCode::kPrecondition, "no Hard+ examples; counts:" + describe());
  for (auto c : kCategories) {
    if (groups[slot(c)].size() < n)
      throw Error(ErrorCode::kPrecondition, std::string(to_string(c)) + " has fewer examples than Hard+; counts:" + describe());
  }
  DatasetBundle bundle;
  bundle.rng_seed = rng_seed;
  Rng rng(rng_seed);
  for (auto c : kCategories) {
    auto& g = groups[slot(c)];
    if (c != Category::kHardPositive) {
      for (std::size_t i = 0; i < n; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.uniform_index(g.size() - i));
        std::swap(g[i], g[j]);
      }
    }
    bundle.balanced.insert(bundle.balanced.end(), g.begin(), g.begin() + static_cast<std::ptrdiff_t>(n));
    std::vector<LabeledExample> rest(g.begin() + static_cast<std::ptrdiff_t>(n), g.end());
    std::sort(rest.begin(), rest.end(), by_id);
    bundle.holdout.insert(bundle.holdout.end(), rest.begin(), rest.end());
  }
  std::sort(bundle.balanced.begin(), bundle.balanced.end(), by_id);
  bundle.balanced_counts = count_categories(bundle.balanced);
  bundle.holdout_counts = count_categories(bundle.holdout);
  return bundle;
}

std::vector<Fold> kfold(const std::vector<LabeledExample>& data, std::size_t k, std::uint64_t rng_seed) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be positive");
  if (k > data.size())
    throw Error(ErrorCode::kPrecondition, "cannot split " + std::to_string(data.size()) + " examples into " +
                                              std::to_string(k) + " folds");
  auto groups = group_by_category(data);
  Rng rng(rng_seed);
  std::vector<std::vector<LabeledExample>> tests(k);
  std::size_t next = 0;
  for (auto c : kCategories) {
    auto& g = groups[slot(c)];
    rng.shuffle(std::span<LabeledExample>(g));
    for (auto& e : g) {
      tests[next].push_back(std::move(e));
      next = (next + 1) % k;
    }
  }
  std::vector<Fold> folds(k);
  for (std::size_t f = 0; f < k; ++f) {
    folds[f].test = tests[f];
    for (std::size_t o = 0; o < k; ++o)
      if (o != f) folds[f].train.insert(folds[f].train.end(), tests[o].begin(), tests[o].end());
    std::sort(folds[f].test.begin(), folds[f].test.end(), by_id);
    std::sort(folds[f].train.begin(), folds[f].train.end(), by_id);
  }
  return folds;
}

double f1(std::size_t tp, std::size_t fp, std::size_t fn) {
  const std::size_t denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

ClassF1 per_class_f1(std::span<const Label> predictions, std::span<const Label> golds,
                     const std::vector<bool>& subset) {
  if (predictions.size() != golds.size())
    throw Error(ErrorCode::kInvalidArgument, "prediction and gold counts differ");
  if (!subset.empty() && subset.size() != golds.size())
    throw Error(ErrorCode::kInvalidArgument, "subset mask length differs from the data");
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    if (!subset.empty() && !subset[i]) continue;
    const bool p = predictions[i] == Label::kPositive;
    const bool g = golds[i] == Label::kPositive;
    if (p && g) ++tp;
    else if (p && !g) ++fp;
    else if (!p && g) ++fn;
    else ++tn;
  }
  // Flipping polarity turns tn into the negative class's true positives.
  return {f1(tp, fp, fn), f1(tn, fn, fp)};
}

// ---- Predictor defaults -------------------------------------------------------

double Predictor::score(const std::string& patent_id) const {
  return predict(patent_id) == Label::kPositive ? 1.0 : -1.0;
}

std::vector<Label> Predictor::predict_all(const std::vector<std::string>& patent_ids) const {
  std::vector<Label> out;
  out.reserve(patent_ids.size());
  for (const auto& id : patent_ids) out.push_back(predict(id));
  return out;
}

// ---- evaluate -----------------------------------------------------------------

namespace {

std::vector<std::string> ids_of(const std::vector<LabeledExample>& data) {
  std::vector<std::string> ids;
  ids.reserve(data.size());
  for (const auto& e : data) ids.push_back(e.patent_id);
  return ids;
}

FoldMetrics score_fold(const Predictor& predictor, const Fold& fold, const std::vector<LabeledExample>& holdout) {
  FoldMetrics m;
  const auto preds = predictor.predict_all(ids_of(fold.test));
  std::vector<Label> golds;
  std::vector<bool> hard, easy;
  for (const auto& e : fold.test) {
    golds.push_back(e.label);
    hard.push_back(e.difficulty == Difficulty::kHard);
    easy.push_back(e.difficulty == Difficulty::kEasy);
  }
  const auto h = per_class_f1(preds, golds, hard);
  const auto s = per_class_f1(preds, golds, easy);
  m.hard_pos = h.positive;
  m.hard_neg = h.negative;
  m.easy_pos = s.positive;
  m.easy_neg = s.negative;
  m.hard_avg = (m.hard_pos + m.hard_neg) / 2.0;
  m.easy_avg = (m.easy_pos + m.easy_neg) / 2.0;
  m.overall = (m.hard_avg + m.easy_avg) / 2.0;

  if (!holdout.empty()) {
    const auto hp = predictor.predict_all(ids_of(holdout));
    std::array<std::size_t, 4> correct{}, total{};
    for (std::size_t i = 0; i < holdout.size(); ++i) {
      const auto c = slot(holdout[i].category());
      ++total[c];
      if (hp[i] == holdout[i].label) ++correct[c];
    }
    auto recall = [&](Category c) -> std::optional<double> {
      if (total[slot(c)] == 0) return std::nullopt;
      return static_cast<double>(correct[slot(c)]) / static_cast<double>(total[slot(c)]);
    };
    m.holdout_hard_neg = recall(Category::kHardNegative);
    m.holdout_easy_pos = recall(Category::kEasyPositive);
    m.holdout_easy_neg = recall(Category::kEasyNegative);
  }
  return m;
}

std::optional<double> mean_of(const std::vector<FoldMetrics>& folds, std::optional<double> FoldMetrics::*field) {
  double sum = 0.0;
  for (const auto& f : folds) {
    if (!(f.*field)) return std::nullopt;
    sum += *(f.*field);
  }
  return sum / static_cast<double>(folds.size());
}

double mean_of(const std::vector<FoldMetrics>& folds, double FoldMetrics::*field) {
  double sum = 0.0;
  for (const auto& f : folds) sum += f.*field;
  return sum / static_cast<double>(folds.size());
}

}  // namespace

MetricsReport evaluate(const Learner& learner, const DatasetBundle& bundle, std::size_t k, std::uint64_t rng_seed) {
  MetricsReport report;
  report.model = learner.name();
  report.folds = k;
  report.balanced_size = bundle.balanced.size();
  const auto folds = kfold(bundle.balanced, k, rng_seed);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::unique_ptr<Predictor> predictor;
    try {
      predictor = learner.fit(folds[f].train, derive_seed(rng_seed, 1000 + f));
    } catch (const Error& e) {
      throw Error(e.code(), "fold " + std::to_string(f + 1) + "/" + std::to_string(k) + ": " + e.what());
    }
    report.per_fold.push_back(score_fold(*predictor, folds[f], bundle.holdout));
  }
  const auto& pf = report.per_fold;
  report.hard_pos = mean_of(pf, &FoldMetrics::hard_pos);
  report.hard_neg = mean_of(pf, &FoldMetrics::hard_neg);
  report.easy_pos = mean_of(pf, &FoldMetrics::easy_pos);
  report.easy_neg = mean_of(pf, &FoldMetrics::easy_neg);
  report.hard_avg = (report.hard_pos + report.hard_neg) / 2.0;
  report.easy_avg = (report.easy_pos + report.easy_neg) / 2.0;
  report.overall = (report.hard_avg + report.easy_avg) / 2.0;
  double var = 0.0;
  for (const auto& f : pf) var += (f.overall - report.overall) * (f.overall - report.overall);
  report.overall_sd = pf.size() > 1 ? std::sqrt(var / static_cast<double>(pf.size() - 1)) : 0.0;
  report.holdout_hard_neg = mean_of(pf, &FoldMetrics::holdout_hard_neg);
  report.holdout_easy_pos = mean_of(pf, &FoldMetrics::holdout_easy_pos);
  report.holdout_easy_neg = mean_of(pf, &FoldMetrics::holdout_easy_neg);
  return report;
}

std::vector<CurvePoint> learning_curve(const Learner& learner, const DatasetBundle& bundle,
                                       const std::vector<std::size_t>& sizes, std::size_t k,
                                       std::uint64_t rng_seed) {
  auto groups = group_by_category(bundle.balanced);
  std::size_t smallest = groups[0].size();
  for (const auto& g : groups) smallest = std::min(smallest, g.size());
  for (auto size : sizes) {
    if (size == 0 || size % 4 != 0)
      throw Error(ErrorCode::kPrecondition, "learning-curve size " + std::to_string(size) + " is not a positive multiple of 4");
    if (size / 4 > smallest)
      throw Error(ErrorCode::kPrecondition, "learning-curve size " + std::to_string(size) +
                                                " exceeds the balanced set (" + std::to_string(4 * smallest) + ")");
  }
  // One permutation per category; every size takes a prefix, so subsets nest.
  Rng rng(derive_seed(rng_seed, 77));
  for (auto& g : groups) rng.shuffle(std::span<LabeledExample>(g));

  std::vector<CurvePoint> curve;
  for (auto size : sizes) {
    DatasetBundle sub;
    sub.rng_seed = bundle.rng_seed;
    sub.holdout = bundle.holdout;
    for (const auto& g : groups)
      sub.balanced.insert(sub.balanced.end(), g.begin(), g.begin() + static_cast<std::ptrdiff_t>(size / 4));
    std::sort(sub.balanced.begin(), sub.balanced.end(), by_id);
    sub.balanced_counts = count_categories(sub.balanced);
    sub.holdout_counts = bundle.holdout_counts;
    curve.push_back({size, evaluate(learner, sub, k, rng_seed)});
  }
  return curve;
}

// ---- serialization ------------------------------------------------------------

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string cell(const std::optional<double>& v) {
  if (!v) return "  -  ";
  std::ostringstream s;
  s << std::fixed << std::setprecision(3) << *v;
  return s.str();
}

std::string cell(double v) { return cell(std::optional<double>(v)); }

}  // namespace

std::string MetricsReport::to_json() const {
  json j;
  j["model"] = model;
  j["folds"] = folds;
  j["balanced_size"] = balanced_size;
  j["overall"] = overall;
  j["overall_sd"] = overall_sd;
  j["hard"] = {{"avg", hard_avg}, {"positive_f1", hard_pos}, {"negative_f1", hard_neg}};
  j["easy"] = {{"avg", easy_avg}, {"positive_f1", easy_pos}, {"negative_f1", easy_neg}};
  j["holdout"] = {{"metric", "recall"},
                  {"hard_negative", optional_json(holdout_hard_neg)},
                  {"easy_positive", optional_json(holdout_easy_pos)},
                  {"easy_negative", optional_json(holdout_easy_neg)}};
  json per = json::array();
  for (const auto& f : per_fold) {
    per.push_back({{"overall", f.overall}, {"hard_avg", f.hard_avg}, {"easy_avg", f.easy_avg},
                   {"hard_positive_f1", f.hard_pos}, {"hard_negative_f1", f.hard_neg},
                   {"easy_positive_f1", f.easy_pos}, {"easy_negative_f1", f.easy_neg},
                   {"holdout_hard_negative", optional_json(f.holdout_hard_neg)},
                   {"holdout_easy_positive", optional_json(f.holdout_easy_pos)},
                   {"holdout_easy_negative", optional_json(f.holdout_easy_neg)}});
  }
  j["per_fold"] = per;
  return j.dump(2);
}

std::string reports_table(const std::vector<MetricsReport>& reports) {
  std::size_t name_width = 6;
  for (const auto& r : reports) name_width = std::max(name_width, r.model.size());
  std::ostringstream s;
  s << std::left << std::setw(static_cast<int>(name_width)) << "Model"
    << "  Overall |  Hard    +      -    |  Easy    +      -    | Holdout (recall)\n";
  s << std::setw(static_cast<int>(name_width)) << ""
    << "          |  Avg.                |  Avg.                | Hard-  Easy+  Easy-\n";
  for (const auto& r : reports) {
    s << std::left << std::setw(static_cast<int>(name_width)) << r.model << "  " << cell(r.overall) << "   | "
      << cell(r.hard_avg) << "  " << cell(r.hard_pos) << "  " << cell(r.hard_neg) << " | " << cell(r.easy_avg)
      << "  " << cell(r.easy_pos) << "  " << cell(r.easy_neg) << " | " << cell(r.holdout_hard_neg) << "  "
      << cell(r.holdout_easy_pos) << "  " << cell(r.holdout_easy_neg) << '\n';
  }
  return s.str();
}

std::string MetricsReport::to_table() const { return reports_table({*this}); }

std::string curve_csv(const std::vector<CurvePoint>& curve) {
  std::ostringstream s;
  s << "size,overall\n";
  s << std::setprecision(6);
  for (const auto& p : curve) s << p.size << ',' << p.report.overall << '\n';
  return s.str();
}

std::string curve_json(const std::vector<CurvePoint>& curve) {
  json points = json::array();
  for (const auto& p : curve)
    points.push_back({{"size", p.size}, {"overall", p.report.overall}, {"hard_avg", p.report.hard_avg},
                      {"easy_avg", p.report.easy_avg}, {"overall_sd", p.report.overall_sd}});
  json j;
  j["model"] = curve.empty() ? "" : curve.front().report.model;
  j["points"] = points;
  return j.dump(2);
}

// ---- agreement ----------------------------------------------------------------

double cohens_kappa(const AgreementTable& t) {
  const double n = static_cast<double>(t.total());
  if (n == 0) throw Error(ErrorCode::kPrecondition, "kappa over zero items");
  const double po = static_cast<double>(t.both_positive + t.both_negative) / n;
  const double a_pos = static_cast<double>(t.both_positive + t.a_only_positive) / n;
  const double b_pos = static_cast<double>(t.both_positive + t.b_only_positive) / n;
  const double pe = a_pos * b_pos + (1.0 - a_pos) * (1.0 - b_pos);
  if (pe >= 1.0) return 1.0;  // both raters constant and identical, so po = 1
  return (po - pe) / (1.0 - pe);
}

double cohens_kappa(const std::map<std::string, Label>& rater_a, const std::map<std::string, Label>& rater_b) {
  AgreementTable t;
  for (const auto& [id, a] : rater_a) {
    auto it = rater_b.find(id);
    if (it == rater_b.end()) continue;
    const bool ap = a == Label::kPositive, bp = it->second == Label::kPositive;
    if (ap && bp) ++t.both_positive;
    else if (ap) ++t.a_only_positive;
    else if (bp) ++t.b_only_positive;
    else ++t.both_negative;
  }
  if (t.total() == 0) throw Error(ErrorCode::kPrecondition, "raters share no labeled items");
  return cohens_kappa(t);
}

}  // namespace patland
