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

#include "patland/pca.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "patland/error.hpp"

namespace patland {

PcaProjection pca_fit(const std::vector<std::vector<double>>& vectors, std::size_t k) {
  const std::size_t n = vectors.size();
  if (n < 2) throw Error(ErrorCode::kPrecondition, "PCA needs at least two vectors");
  const std::size_t d = vectors.front().size();
  if (d == 0) throw Error(ErrorCode::kPrecondition, "PCA on zero-dimensional data");
  for (const auto& v : vectors)
    if (v.size() != d) throw Error(ErrorCode::kInvalidArgument, "PCA input dimensions differ");

  Eigen::MatrixXd x(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) x(i, j) = vectors[i][j];
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);
  if (cov.trace() <= 1e-12 * std::max(1.0, mean.squaredNorm()))
    throw Error(ErrorCode::kNumerical, "PCA input has zero variance");

  PcaProjection proj;
  const std::size_t limit = std::min(d, n - 1);
  if (k > limit) {
    k = limit;
    proj.clamped = true;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::kNumerical, "PCA eigensolver failed");
  const auto& values = solver.eigenvalues();   // ascending
  const auto& vecs = solver.eigenvectors();

  proj.mean.assign(mean.data(), mean.data() + d);
  for (std::size_t c = 0; c < k; ++c) {
    const Eigen::Index col = static_cast<Eigen::Index>(d - 1 - c);
    Eigen::VectorXd v = vecs.col(col);
    // Sign convention: the largest-magnitude entry is positive.
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    proj.components.emplace_back(v.data(), v.data() + d);
    proj.explained_variance.push_back(std::max(0.0, values(col)));
  }
  return proj;
}

std::vector<double> pca_project(std::span<const double> v, const PcaProjection& projection) {
  if (v.size() != projection.input_dimension())
    throw Error(ErrorCode::kInvalidArgument, "PCA projection dimension mismatch");
  std::vector<double> out(projection.output_dimension(), 0.0);
  for (std::size_t c = 0; c < out.size(); ++c) {
    const auto& row = projection.components[c];
    double s = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) s += row[j] * (v[j] - projection.mean[j]);
    out[c] = s;
  }
  return out;
}

std::string PcaProjection::to_json() const {
  nlohmann::json j;
  j["format"] = "patland.pca";
  j["version"] = 1;
  j["mean"] = mean;
  j["components"] = components;
  j["explained_variance"] = explained_variance;
  j["clamped"] = clamped;
  return j.dump();
}

PcaProjection PcaProjection::from_json(const std::string& text) {
  PcaProjection p;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.value("format", "") != "patland.pca" || j.value("version", 0) != 1)
      throw Error(ErrorCode::kFormat, "PCA: unsupported format or version");
    p.mean = j.at("mean").get<std::vector<double>>();
    p.components = j.at("components").get<std::vector<std::vector<double>>>();
    p.explained_variance = j.at("explained_variance").get<std::vector<double>>();
    p.clamped = j.value("clamped", false);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("PCA: ") + e.what());
  }
  for (const auto& row : p.components)
    if (row.size() != p.mean.size()) throw Error(ErrorCode::kFormat, "PCA: component length mismatch");
  return p;
}

}  // namespace patland
