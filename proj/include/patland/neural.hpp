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

#ifndef PATLAND_NEURAL_HPP_
#define PATLAND_NEURAL_HPP_

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace patland {

// Input branches of the classifier.
enum class StreamKind {
  kAbstractText,
  kClaimsText,
  kDescriptionText,
  kCitation1Hop,
  kCitation2Hop,
  kCpcSeq,
  kCpcAvg,
};

const char* to_string(StreamKind kind);
StreamKind parse_stream_kind(std::string_view text);
// Count-valued streams are log(1 + x) transformed before their dense layer.
bool is_count_stream(StreamKind kind);

struct StreamSpec {
  StreamKind kind = StreamKind::kAbstractText;
  std::size_t input_dim = 0;
  std::size_t width = 64;
  bool enabled = true;
};

struct NetworkConfig {
  std::vector<StreamSpec> streams;
  std::vector<std::size_t> hidden = {300, 64};
  double dropout = 0.4;
};

using StreamInputs = std::map<StreamKind, std::vector<double>>;

struct NeuralExample {
  StreamInputs inputs;
  int label = 0;  // 0 or 1
};

// Dropout masks for a training-mode pass, drawn from a seeded stream so that
// a pass can be repeated exactly (finite-difference checks rely on this).
struct DropoutMode {
  bool enabled = false;
  std::uint64_t seed = 0;
};

// Flat parameter vector with dense-layer views.
//
// Layout, in order: one dense layer per stream (weights row-major out x in,
// then bias), the hidden layers, and the single-unit output layer. Disabled
// streams keep their parameters but feed zeros into the concatenation.
class ClassifierModel {
 public:
  struct Layer {
    std::string name;
    std::size_t in = 0;
    std::size_t out = 0;
    std::size_t weight_offset = 0;
    std::size_t bias_offset = 0;
  };

  ClassifierModel() = default;
  // Zero-initialized parameters. Throws kInvalidArgument on a bad config.
  explicit ClassifierModel(NetworkConfig config);
  // Glorot-uniform weights, zero biases.
  static ClassifierModel initialize(NetworkConfig config, std::uint64_t rng_seed);

  const NetworkConfig& config() const { return config_; }
  void set_stream_enabled(StreamKind kind, bool enabled);
  const std::vector<Layer>& layers() const { return layers_; }
  std::size_t parameter_count() const { return params_.size(); }
  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  std::uint64_t rng_seed() const { return rng_seed_; }

  // Inference-mode probability in (0, 1); dropout is inert.
  double forward(const StreamInputs& inputs) const;
  std::vector<double> forward_batch(const std::vector<const StreamInputs*>& batch) const;

  // Mean clamped binary cross-entropy over the batch; fills grad (resized to
  // parameter_count()) with its gradient.
  double loss_and_gradient(const std::vector<const NeuralExample*>& batch, const DropoutMode& dropout,
                           std::vector<double>& grad) const;
  double batch_loss(const std::vector<const NeuralExample*>& batch, const DropoutMode& dropout) const;

  // Smallest |pre-activation| over all ReLU units for the batch.
  double min_abs_preactivation(const std::vector<const NeuralExample*>& batch,
                               const DropoutMode& dropout) const;

  // "NLCM" binary checkpoint: u32 version, u32 JSON length, JSON block with
  // the stream specs and layer table, then float32 parameters in order.
  void write_checkpoint(std::ostream& out) const;
  static ClassifierModel read_checkpoint(std::istream& in);

 private:
  struct Pass;
  void run(const std::vector<const StreamInputs*>& batch, const DropoutMode& dropout, Pass& pass) const;

  NetworkConfig config_;
  std::vector<Layer> layers_;
  std::vector<double> params_;
  std::uint64_t rng_seed_ = 0;
};

// -[y ln p + (1 - y) ln(1 - p)] with p clamped to [1e-7, 1 - 1e-7].
double bce_loss(double probability, int label);

struct AdamState {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t step = 0;
  std::vector<double> m;
  std::vector<double> v;

  explicit AdamState(std::size_t parameter_count = 0, double lr = 1e-4)
      : learning_rate(lr), m(parameter_count, 0.0), v(parameter_count, 0.0) {}
};

// Bias-corrected Adam update. Throws kNumerical on a non-finite gradient.
void adam_step(std::span<double> parameters, std::span<const double> grad, AdamState& state);

struct NeuralTrainOptions {
  std::size_t epochs = 5;
  std::size_t batch_size = 64;
  double learning_rate = 1e-4;
  std::uint64_t rng_seed = 0;
  // When non-zero, the epoch count is raised until training performs at
  // least this many optimizer steps.
  std::size_t min_updates = 0;
};

struct TrainedClassifier {
  ClassifierModel model;
  std::vector<double> loss_history;  // mean training loss per epoch
};

// Throws kPrecondition when the data lacks one of the classes.
TrainedClassifier train_classifier(const NetworkConfig& config, const std::vector<NeuralExample>& data,
                                   const NeuralTrainOptions& options = {});

double predict_proba(const ClassifierModel& model, const StreamInputs& inputs);
// Positive iff probability >= threshold.
bool classify(const ClassifierModel& model, const StreamInputs& inputs, double threshold = 0.5);

}  // namespace patland

#endif  // PATLAND_NEURAL_HPP_
