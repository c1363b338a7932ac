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

#ifndef PATLAND_PCA_HPP_
#define PATLAND_PCA_HPP_

#include <span>
#include <string>
#include <vector>

namespace patland {

struct PcaProjection {
  std::vector<double> mean;
  // k rows of length d, orthonormal, ordered by decreasing explained variance.
  std::vector<std::vector<double>> components;
  std::vector<double> explained_variance;
  bool clamped = false;  // k was reduced to min(d, n - 1)

  std::size_t input_dimension() const { return mean.size(); }
  std::size_t output_dimension() const { return components.size(); }

  std::string to_json() const;
  static PcaProjection from_json(const std::string& text);
};

// Top-k principal directions of the centered data. Needs at least two
// vectors; throws kNumerical when the data has zero variance.
PcaProjection pca_fit(const std::vector<std::vector<double>>& vectors, std::size_t k = 50);

// components * (v - mean)
std::vector<double> pca_project(std::span<const double> v, const PcaProjection& projection);

}  // namespace patland

#endif  // PATLAND_PCA_HPP_
