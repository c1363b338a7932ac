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

#ifndef PATLAND_SVM_HPP_
#define PATLAND_SVM_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "patland/features.hpp"

namespace patland {

struct SvmExample {
  SparseVector x;
  int y = 1;  // +1 or -1
};

struct LinearSvmParams {
  double lambda = 1e-4;
  std::size_t epochs = 20;
  std::uint64_t rng_seed = 0;

  friend bool operator==(const LinearSvmParams&, const LinearSvmParams&) = default;
};

// Primal linear SVM: decision(x) = <w, x> + b.
struct LinearSvmModel {
  std::vector<double> weight;
  double bias = 0.0;
  LinearSvmParams params;

  std::size_t dimension() const { return weight.size(); }
  double weight_norm() const;

  friend bool operator==(const LinearSvmModel&, const LinearSvmModel&) = default;
};

// Hinge-loss SGD with L2 regularization on w (bias unregularized), step
// 1/(lambda (t0 + t)). Deterministic for a fixed seed and data order.
LinearSvmModel train_linear(const std::vector<SvmExample>& data, const LinearSvmParams& params = {});

// lambda/2 |w|^2 + mean hinge loss.
double linear_objective(const LinearSvmModel& model, const std::vector<SvmExample>& data);

struct RbfSvmParams {
  double c = 1.0;
  std::optional<double> gamma;  // defaults to 1/d
  double tolerance = 1e-3;
  // Iteration budget; 0 means 10 passes of n pair updates each (10 n^2, at least 1000).
  std::size_t max_iterations = 0;
};

struct KernelSvmModel {
  std::vector<SparseVector> support_vectors;
  std::vector<double> coefficients;  // alpha_i y_i
  double bias = 0.0;
  double gamma = 1.0;
  double c = 1.0;
  double tolerance = 1e-3;
  std::size_t dimension = 0;
  std::size_t iterations = 0;
};

struct SmoReport {
  KernelSvmModel model;
  std::vector<double> alpha;  // one per training example
  double dual_objective = 0.0;  // sum(alpha) - 1/2 alpha' Q alpha
  double max_kkt_violation = 0.0;
  std::size_t iterations = 0;
};

// SMO with maximal-violating-pair selection. Throws ConvergenceError when the
// pair gap stays above the tolerance after the iteration budget.
SmoReport train_smo_rbf_report(const std::vector<SvmExample>& data, const RbfSvmParams& params = {});
KernelSvmModel train_smo_rbf(const std::vector<SvmExample>& data, const RbfSvmParams& params = {});

double rbf_kernel(const SparseVector& a, const SparseVector& b, double gamma);

// Dimension mismatches throw kInvalidArgument.
double decision_value(const LinearSvmModel& model, const SparseVector& x);
double decision_value(const KernelSvmModel& model, const SparseVector& x);
// sign(decision); a decision of exactly 0 is negative.
int predict(const LinearSvmModel& model, const SparseVector& x);
int predict(const KernelSvmModel& model, const SparseVector& x);
// |decision| / |w| for the linear model (|decision| when w = 0), |decision| for the kernel model.
double margin_distance(const LinearSvmModel& model, const SparseVector& x);
double margin_distance(const KernelSvmModel& model, const SparseVector& x);

// Versioned JSON checkpoints.
std::string to_json(const LinearSvmModel& model);
std::string to_json(const KernelSvmModel& model);
LinearSvmModel linear_svm_from_json(const std::string& text);
KernelSvmModel kernel_svm_from_json(const std::string& text);

// FNV-1a over the bit patterns of the parameters.
std::uint64_t model_hash(const LinearSvmModel& model);

}  // namespace patland

#endif  // PATLAND_SVM_HPP_
