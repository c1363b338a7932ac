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

#include "patland/svm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"
#include "patland/error.hpp"
#include "patland/rng.hpp"

namespace patland {

using nlohmann::json;

namespace {

void check_training_data(const std::vector<SvmExample>& data) {
  if (data.empty()) throw Error(ErrorCode::kPrecondition, "SVM training set is empty");
  bool pos = false, neg = false;
  const std::size_t d = data.front().x.dimension;
  for (const auto& e : data) {
    if (e.y == 1) pos = true;
    else if (e.y == -1) neg = true;
    else throw Error(ErrorCode::kInvalidArgument, "SVM labels must be +1 or -1");
    if (e.x.dimension != d) throw Error(ErrorCode::kInvalidArgument, "SVM training vectors differ in dimension");
  }
  if (!pos || !neg) throw Error(ErrorCode::kPrecondition, "SVM training needs both classes");
}

}  // namespace

double LinearSvmModel::weight_norm() const {
  double s = 0.0;
  for (double w : weight) s += w * w;
  return std::sqrt(s);
}

LinearSvmModel train_linear(const std::vector<SvmExample>& data, const LinearSvmParams& params) {
  check_training_data(data);
  if (!(params.lambda > 0.0)) throw Error(ErrorCode::kInvalidArgument, "lambda must be positive");
  const std::size_t d = data.front().x.dimension;
  const double lambda = params.lambda;
  // Initial step from a typical weight magnitude, as in Bottou's SGD.
  const double eta0 = std::sqrt(1.0 / std::sqrt(lambda));
  const double t0 = 1.0 / (eta0 * lambda);

  std::vector<double> v(d, 0.0);
  double scale = 1.0;
  double bias = 0.0;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(params.rng_seed);
  double t = 0.0;
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t idx : order) {
      const auto& ex = data[idx];
      t += 1.0;
      const double eta = 1.0 / (lambda * (t0 + t));
      const double margin = ex.y * (scale * dot(ex.x, v) + bias);
      scale *= 1.0 - eta * lambda;
      if (margin < 1.0) {
        const double step = eta * ex.y / scale;
        for (std::size_t k = 0; k < ex.x.indices.size(); ++k) v[ex.x.indices[k]] += step * ex.x.values[k];
        bias += eta * ex.y;
      }
      if (scale < 1e-9) {
        for (double& w : v) w *= scale;
        scale = 1.0;
      }
    }
  }
  LinearSvmModel model;
  model.weight.resize(d);
  for (std::size_t i = 0; i < d; ++i) model.weight[i] = scale * v[i];
  model.bias = bias;
  model.params = params;
  for (double w : model.weight)
    if (!std::isfinite(w)) throw Error(ErrorCode::kNumerical, "linear SVM weights diverged");
  return model;
}

double linear_objective(const LinearSvmModel& model, const std::vector<SvmExample>& data) {
  double hinge = 0.0;
  for (const auto& e : data) hinge += std::max(0.0, 1.0 - e.y * decision_value(model, e.x));
  const double n = model.weight_norm();
  return 0.5 * model.params.lambda * n * n + hinge / static_cast<double>(data.size());
}

double rbf_kernel(const SparseVector& a, const SparseVector& b, double gamma) {
  return std::exp(-gamma * squared_distance(a, b));
}

SmoReport train_smo_rbf_report(const std::vector<SvmExample>& data, const RbfSvmParams& params) {
  check_training_data(data);
  if (!(params.c > 0.0)) throw Error(ErrorCode::kInvalidArgument, "C must be positive");
  const std::size_t n = data.size();
  const std::size_t d = data.front().x.dimension;
  const double gamma = params.gamma.value_or(1.0 / static_cast<double>(std::max<std::size_t>(d, 1)));
  const double c = params.c;
  const double tau = params.tolerance;
  const std::size_t max_iter =
      params.max_iterations > 0 ? params.max_iterations : std::max<std::size_t>(1000, 10 * n * n);

  std::vector<double> y(n), sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = data[i].y;
    sq[i] = data[i].x.squared_norm();
  }
  auto kernel = [&](std::size_t i, std::size_t j) {
    const double dist = std::max(0.0, sq[i] + sq[j] - 2.0 * dot(data[i].x, data[j].x));
    return std::exp(-gamma * dist);
  };
  // Q_ij = y_i y_j K_ij, precomputed when it fits comfortably in memory.
  const bool cached = n <= 3000;
  std::vector<double> q;
  if (cached) {
    q.resize(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) q[i * n + j] = q[j * n + i] = y[i] * y[j] * kernel(i, j);
  }
  std::vector<double> row_i(n), row_j(n);
  auto load_row = [&](std::size_t i, std::vector<double>& row) -> const double* {
    if (cached) return q.data() + i * n;
    for (std::size_t k = 0; k < n; ++k) row[k] = y[i] * y[k] * kernel(i, k);
    return row.data();
  };

  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // gradient of 1/2 a'Qa - e'a
  auto in_up = [&](std::size_t t) { return (y[t] > 0 && alpha[t] < c) || (y[t] < 0 && alpha[t] > 0); };
  auto in_low = [&](std::size_t t) { return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < c); };

  std::size_t iter = 0;
  double gap = std::numeric_limits<double>::infinity();
  double m_up = 0.0, m_low = 0.0;
  while (true) {
    std::size_t i = n, j = n;
    m_up = -std::numeric_limits<double>::infinity();
    m_low = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      if (in_up(t) && v > m_up) {
        m_up = v;
        i = t;
      }
      if (in_low(t) && v < m_low) {
        m_low = v;
        j = t;
      }
    }
    gap = m_up - m_low;
    if (i == n || j == n || gap <= tau) break;
    if (iter >= max_iter) throw ConvergenceError(iter, gap);
    ++iter;

    const double* qi = load_row(i, row_i);
    const double* qj = load_row(j, row_j);
    const double old_i = alpha[i], old_j = alpha[j];
    constexpr double kTau = 1e-12;
    if (y[i] != y[j]) {
      double quad = qi[i] + qj[j] + 2.0 * qi[j];
      if (quad <= 0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      double quad = qi[i] + qj[j] - 2.0 * qi[j];
      if (quad <= 0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    for (std::size_t k = 0; k < n; ++k) grad[k] += qi[k] * di + qj[k] * dj;
  }

  // rho: mean of y G over free vectors, else the middle of the feasible interval.
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0 && alpha[t] < c) {
      sum_free += y[t] * grad[t];
      ++n_free;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : -(m_up + m_low) / 2.0;

  SmoReport report;
  report.alpha = alpha;
  report.iterations = iter;
  auto& model = report.model;
  model.gamma = gamma;
  model.c = c;
  model.tolerance = tau;
  model.dimension = d;
  model.iterations = iter;
  model.bias = -rho;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0) {
      model.support_vectors.push_back(data[t].x);
      model.coefficients.push_back(alpha[t] * y[t]);
    }
  }
  // Dual objective and KKT residuals from the maintained gradient.
  double linear = 0.0, quad = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    linear += alpha[t];
    quad += alpha[t] * (grad[t] + 1.0);
  }
  report.dual_objective = linear - 0.5 * quad;
  double worst = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yf_minus_1 = grad[t] - y[t] * rho;  // y_t f(x_t) - 1
    double v = 0.0;
    if (alpha[t] <= 0) v = std::max(0.0, -yf_minus_1);
    else if (alpha[t] >= c) v = std::max(0.0, yf_minus_1);
    else v = std::abs(yf_minus_1);
    worst = std::max(worst, v);
  }
  report.max_kkt_violation = worst;
  return report;
}

KernelSvmModel train_smo_rbf(const std::vector<SvmExample>& data, const RbfSvmParams& params) {
  return train_smo_rbf_report(data, params).model;
}

namespace {

void check_dimension(std::size_t model_dim, const SparseVector& x) {
  if (x.dimension != model_dim) {
    throw Error(ErrorCode::kInvalidArgument, "feature dimension " + std::to_string(x.dimension) +
                                                 " does not match model dimension " +
                                                 std::to_string(model_dim));
  }
}

}  // namespace

double decision_value(const LinearSvmModel& model, const SparseVector& x) {
  check_dimension(model.dimension(), x);
  return dot(x, model.weight) + model.bias;
}

double decision_value(const KernelSvmModel& model, const SparseVector& x) {
  check_dimension(model.dimension, x);
  double s = model.bias;
  for (std::size_t i = 0; i < model.support_vectors.size(); ++i)
    s += model.coefficients[i] * rbf_kernel(model.support_vectors[i], x, model.gamma);
  return s;
}

int predict(const LinearSvmModel& model, const SparseVector& x) {
  return decision_value(model, x) > 0.0 ? 1 : -1;
}

int predict(const KernelSvmModel& model, const SparseVector& x) {
  return decision_value(model, x) > 0.0 ? 1 : -1;
}

double margin_distance(const LinearSvmModel& model, const SparseVector& x) {
  const double d = std::abs(decision_value(model, x));
  const double n = model.weight_norm();
  return n > 0.0 ? d / n : d;
}

double margin_distance(const KernelSvmModel& model, const SparseVector& x) {
  return std::abs(decision_value(model, x));
}

// ---- checkpoints -------------------------------------------------------------

namespace {

json sparse_to_json(const SparseVector& v) {
  return json{{"indices", v.indices}, {"values", v.values}};
}

SparseVector sparse_from_json(const json& j, std::size_t dimension) {
  SparseVector v;
  v.dimension = dimension;
  v.indices = j.at("indices").get<std::vector<std::uint32_t>>();
  v.values = j.at("values").get<std::vector<double>>();
  if (!v.well_formed()) throw Error(ErrorCode::kFormat, "checkpoint: malformed sparse vector");
  return v;
}

json parse_checkpoint(const std::string& text, const char* kind) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("checkpoint: ") + e.what());
  }
  if (j.value("kind", "") != kind || j.value("version", 0) != 1)
    throw Error(ErrorCode::kFormat, std::string("checkpoint: expected ") + kind + " version 1");
  return j;
}

}  // namespace

std::string to_json(const LinearSvmModel& model) {
  json j;
  j["kind"] = "linear_svm";
  j["version"] = 1;
  j["dimension"] = model.dimension();
  j["parameters"] = {{"weight", model.weight}, {"bias", model.bias}};
  j["hyperparameters"] = {{"lambda", model.params.lambda}, {"epochs", model.params.epochs}};
  j["training"] = {{"rng_seed", model.params.rng_seed}, {"algorithm", "sgd-hinge-l2"}};
  return j.dump();
}

std::string to_json(const KernelSvmModel& model) {
  json svs = json::array();
  for (const auto& sv : model.support_vectors) svs.push_back(sparse_to_json(sv));
  json j;
  j["kind"] = "rbf_svm";
  j["version"] = 1;
  j["dimension"] = model.dimension;
  j["parameters"] = {{"support_vectors", svs}, {"coefficients", model.coefficients}, {"bias", model.bias}};
  j["hyperparameters"] = {{"c", model.c}, {"gamma", model.gamma}, {"tolerance", model.tolerance}};
  j["training"] = {{"iterations", model.iterations}, {"algorithm", "smo-max-violating-pair"}};
  return j.dump();
}

LinearSvmModel linear_svm_from_json(const std::string& text) {
  const auto j = parse_checkpoint(text, "linear_svm");
  LinearSvmModel m;
  try {
    m.weight = j.at("parameters").at("weight").get<std::vector<double>>();
    m.bias = j.at("parameters").at("bias").get<double>();
    m.params.lambda = j.at("hyperparameters").at("lambda").get<double>();
    m.params.epochs = j.at("hyperparameters").at("epochs").get<std::size_t>();
    m.params.rng_seed = j.at("training").at("rng_seed").get<std::uint64_t>();
    if (j.at("dimension").get<std::size_t>() != m.weight.size())
      throw Error(ErrorCode::kFormat, "checkpoint: dimension mismatch");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("checkpoint: ") + e.what());
  }
  return m;
}

KernelSvmModel kernel_svm_from_json(const std::string& text) {
  const auto j = parse_checkpoint(text, "rbf_svm");
  KernelSvmModel m;
  try {
    m.dimension = j.at("dimension").get<std::size_t>();
    const auto& p = j.at("parameters");
    for (const auto& sv : p.at("support_vectors")) m.support_vectors.push_back(sparse_from_json(sv, m.dimension));
    m.coefficients = p.at("coefficients").get<std::vector<double>>();
    m.bias = p.at("bias").get<double>();
    const auto& h = j.at("hyperparameters");
    m.c = h.at("c").get<double>();
    m.gamma = h.at("gamma").get<double>();
    m.tolerance = h.at("tolerance").get<double>();
    m.iterations = j.at("training").value("iterations", std::size_t{0});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("checkpoint: ") + e.what());
  }
  if (m.coefficients.size() != m.support_vectors.size())
    throw Error(ErrorCode::kFormat, "checkpoint: coefficient count mismatch");
  return m;
}

std::uint64_t model_hash(const LinearSvmModel& model) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  for (double w : model.weight) mix(w);
  mix(model.bias);
  return h;
}

}  // namespace patland
