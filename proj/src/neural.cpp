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

#include "patland/neural.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

#include "json.hpp"
#include "patland/binary_io.hpp"
#include "patland/error.hpp"
#include "patland/rng.hpp"

namespace patland {

using nlohmann::json;
using Matrix = Eigen::MatrixXd;
using RowMajorMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using RowMajorMutMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using VecMap = Eigen::Map<const Eigen::VectorXd>;
using VecMutMap = Eigen::Map<Eigen::VectorXd>;

namespace {

constexpr double kProbClamp = 1e-7;

struct StreamName {
  StreamKind kind;
  const char* name;
};

constexpr StreamName kStreamNames[] = {
    {StreamKind::kAbstractText, "abstract_text"},   {StreamKind::kClaimsText, "claims_text"},
    {StreamKind::kDescriptionText, "description_text"}, {StreamKind::kCitation1Hop, "citation_1hop"},
    {StreamKind::kCitation2Hop, "citation_2hop"},   {StreamKind::kCpcSeq, "cpc_seq"},
    {StreamKind::kCpcAvg, "cpc_avg"},
};

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

const char* to_string(StreamKind kind) {
  for (const auto& s : kStreamNames)
    if (s.kind == kind) return s.name;
  return "?";
}

StreamKind parse_stream_kind(std::string_view text) {
  for (const auto& s : kStreamNames)
    if (text == s.name) return s.kind;
  throw Error(ErrorCode::kInvalidArgument, "unknown stream kind '" + std::string(text) + "'");
}

bool is_count_stream(StreamKind kind) {
  return kind == StreamKind::kCitation1Hop || kind == StreamKind::kCitation2Hop;
}

double bce_loss(double probability, int label) {
  const double p = std::clamp(probability, kProbClamp, 1.0 - kProbClamp);
  return label == 1 ? -std::log(p) : -std::log(1.0 - p);
}

// ---- construction --------------------------------------------------------------

ClassifierModel::ClassifierModel(NetworkConfig config) : config_(std::move(config)) {
  if (config_.streams.empty()) throw Error(ErrorCode::kInvalidArgument, "classifier needs at least one stream");
  if (!(config_.dropout >= 0.0 && config_.dropout < 1.0))
    throw Error(ErrorCode::kInvalidArgument, "dropout rate must be in [0, 1)");
  std::size_t offset = 0;
  auto add_layer = [&](std::string name, std::size_t in, std::size_t out) {
    if (in == 0 || out == 0)
      throw Error(ErrorCode::kInvalidArgument, "layer '" + name + "' has a zero dimension");
    Layer l{std::move(name), in, out, offset, offset + in * out};
    offset += in * out + out;
    layers_.push_back(std::move(l));
  };
  std::size_t concat = 0;
  for (std::size_t i = 0; i < config_.streams.size(); ++i) {
    const auto& s = config_.streams[i];
    for (std::size_t j = 0; j < i; ++j)
      if (config_.streams[j].kind == s.kind)
        throw Error(ErrorCode::kInvalidArgument, std::string("duplicate stream ") + to_string(s.kind));
    add_layer(std::string("stream.") + to_string(s.kind), s.input_dim, s.width);
    concat += s.width;
  }
  std::size_t in = concat;
  for (std::size_t h = 0; h < config_.hidden.size(); ++h) {
    add_layer("hidden." + std::to_string(h), in, config_.hidden[h]);
    in = config_.hidden[h];
  }
  add_layer("output", in, 1);
  params_.assign(offset, 0.0);
}

ClassifierModel ClassifierModel::initialize(NetworkConfig config, std::uint64_t rng_seed) {
  ClassifierModel model(std::move(config));
  model.rng_seed_ = rng_seed;
  Rng rng(rng_seed);
  for (const auto& l : model.layers_) {
    const double limit = std::sqrt(6.0 / static_cast<double>(l.in + l.out));
    for (std::size_t k = 0; k < l.in * l.out; ++k) model.params_[l.weight_offset + k] = rng.uniform(-limit, limit);
  }
  return model;
}

void ClassifierModel::set_stream_enabled(StreamKind kind, bool enabled) {
  for (auto& s : config_.streams) {
    if (s.kind == kind) {
      s.enabled = enabled;
      return;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, std::string("model has no stream ") + to_string(kind));
}

// ---- forward / backward --------------------------------------------------------

struct ClassifierModel::Pass {
  std::size_t batch = 0;
  std::vector<Matrix> stream_in;   // in x B, after the count transform
  std::vector<Matrix> stream_pre;  // width x B
  Matrix concat;                   // sum(width) x B
  std::vector<Matrix> hidden_pre;
  std::vector<Matrix> hidden_scale;  // dropout multipliers (0 or 1/keep), empty when inert
  std::vector<Matrix> hidden_out;
  Eigen::RowVectorXd logits;
  Eigen::RowVectorXd probs;
};

void ClassifierModel::run(const std::vector<const StreamInputs*>& batch, const DropoutMode& dropout,
                          Pass& pass) const {
  const std::size_t b = batch.size();
  const std::size_t n_streams = config_.streams.size();
  pass.batch = b;
  pass.stream_in.assign(n_streams, Matrix());
  pass.stream_pre.assign(n_streams, Matrix());

  std::size_t concat_rows = 0;
  for (const auto& s : config_.streams) concat_rows += s.width;
  pass.concat = Matrix::Zero(static_cast<Eigen::Index>(concat_rows), static_cast<Eigen::Index>(b));

  std::size_t row = 0;
  for (std::size_t s = 0; s < n_streams; ++s) {
    const auto& spec = config_.streams[s];
    const auto& layer = layers_[s];
    if (spec.enabled) {
      Matrix x(static_cast<Eigen::Index>(spec.input_dim), static_cast<Eigen::Index>(b));
      for (std::size_t e = 0; e < b; ++e) {
        auto it = batch[e]->find(spec.kind);
        if (it == batch[e]->end())
          throw Error(ErrorCode::kInvalidArgument, std::string("missing input for stream ") + to_string(spec.kind));
        if (it->second.size() != spec.input_dim) {
          throw Error(ErrorCode::kInvalidArgument,
                      std::string("stream ") + to_string(spec.kind) + " expects " +
                          std::to_string(spec.input_dim) + " values, got " + std::to_string(it->second.size()));
        }
        for (std::size_t k = 0; k < spec.input_dim; ++k) {
          const double v = it->second[k];
          x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(e)) =
              is_count_stream(spec.kind) ? std::log1p(std::max(0.0, v)) : v;
        }
      }
      RowMajorMap w(params_.data() + layer.weight_offset, static_cast<Eigen::Index>(layer.out),
                    static_cast<Eigen::Index>(layer.in));
      VecMap bias(params_.data() + layer.bias_offset, static_cast<Eigen::Index>(layer.out));
      Matrix pre = w * x;
      pre.colwise() += bias;
      pass.concat.middleRows(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(spec.width)) =
          pre.cwiseMax(0.0);
      pass.stream_in[s] = std::move(x);
      pass.stream_pre[s] = std::move(pre);
    }
    row += spec.width;
  }

  const std::size_t n_hidden = config_.hidden.size();
  pass.hidden_pre.assign(n_hidden, Matrix());
  pass.hidden_out.assign(n_hidden, Matrix());
  pass.hidden_scale.assign(n_hidden, Matrix());
  const bool drop = dropout.enabled && config_.dropout > 0.0;
  Rng rng(dropout.seed);
  const double keep = 1.0 - config_.dropout;
  const Matrix* input = &pass.concat;
  for (std::size_t h = 0; h < n_hidden; ++h) {
    const auto& layer = layers_[n_streams + h];
    RowMajorMap w(params_.data() + layer.weight_offset, static_cast<Eigen::Index>(layer.out),
                  static_cast<Eigen::Index>(layer.in));
    VecMap bias(params_.data() + layer.bias_offset, static_cast<Eigen::Index>(layer.out));
    Matrix pre = w * (*input);
    pre.colwise() += bias;
    Matrix out = pre.cwiseMax(0.0);
    if (drop) {
      Matrix scale(out.rows(), out.cols());
      for (Eigen::Index e = 0; e < scale.cols(); ++e)
        for (Eigen::Index u = 0; u < scale.rows(); ++u) scale(u, e) = rng.bernoulli(keep) ? 1.0 / keep : 0.0;
      out = out.cwiseProduct(scale);
      pass.hidden_scale[h] = std::move(scale);
    }
    pass.hidden_pre[h] = std::move(pre);
    pass.hidden_out[h] = std::move(out);
    input = &pass.hidden_out[h];
  }
  const auto& out_layer = layers_.back();
  RowMajorMap w(params_.data() + out_layer.weight_offset, 1, static_cast<Eigen::Index>(out_layer.in));
  pass.logits = w * (*input);
  pass.logits.array() += params_[out_layer.bias_offset];
  pass.probs.resize(pass.logits.size());
  for (Eigen::Index e = 0; e < pass.logits.size(); ++e) pass.probs(e) = sigmoid(pass.logits(e));
}

double ClassifierModel::forward(const StreamInputs& inputs) const {
  Pass pass;
  run({&inputs}, DropoutMode{}, pass);
  return pass.probs(0);
}

std::vector<double> ClassifierModel::forward_batch(const std::vector<const StreamInputs*>& batch) const {
  if (batch.empty()) return {};
  Pass pass;
  run(batch, DropoutMode{}, pass);
  return {pass.probs.data(), pass.probs.data() + pass.probs.size()};
}

namespace {

std::vector<const StreamInputs*> inputs_of(const std::vector<const NeuralExample*>& batch) {
  std::vector<const StreamInputs*> out;
  out.reserve(batch.size());
  for (const auto* e : batch) out.push_back(&e->inputs);
  return out;
}

}  // namespace

double ClassifierModel::batch_loss(const std::vector<const NeuralExample*>& batch,
                                   const DropoutMode& dropout) const {
  if (batch.empty()) throw Error(ErrorCode::kPrecondition, "empty batch");
  Pass pass;
  run(inputs_of(batch), dropout, pass);
  double loss = 0.0;
  for (std::size_t e = 0; e < batch.size(); ++e) loss += bce_loss(pass.probs(static_cast<Eigen::Index>(e)), batch[e]->label);
  return loss / static_cast<double>(batch.size());
}

double ClassifierModel::loss_and_gradient(const std::vector<const NeuralExample*>& batch,
                                          const DropoutMode& dropout, std::vector<double>& grad) const {
  if (batch.empty()) throw Error(ErrorCode::kPrecondition, "empty batch");
  Pass pass;
  run(inputs_of(batch), dropout, pass);
  const std::size_t b = batch.size();
  const double inv_b = 1.0 / static_cast<double>(b);
  grad.assign(params_.size(), 0.0);

  double loss = 0.0;
  Eigen::RowVectorXd dlogit(static_cast<Eigen::Index>(b));
  for (std::size_t e = 0; e < b; ++e) {
    const auto ei = static_cast<Eigen::Index>(e);
    const double p = pass.probs(ei);
    const int y = batch[e]->label;
    loss += bce_loss(p, y);
    // The clamp has zero derivative where it is active.
    const bool clamped = p < kProbClamp || p > 1.0 - kProbClamp;
    dlogit(ei) = clamped ? 0.0 : (p - static_cast<double>(y)) * inv_b;
  }
  loss *= inv_b;

  const std::size_t n_streams = config_.streams.size();
  const std::size_t n_hidden = config_.hidden.size();
  auto weight_grad = [&](const Layer& l) {
    return RowMajorMutMap(grad.data() + l.weight_offset, static_cast<Eigen::Index>(l.out),
                          static_cast<Eigen::Index>(l.in));
  };
  auto bias_grad = [&](const Layer& l) {
    return VecMutMap(grad.data() + l.bias_offset, static_cast<Eigen::Index>(l.out));
  };
  auto weights = [&](const Layer& l) {
    return RowMajorMap(params_.data() + l.weight_offset, static_cast<Eigen::Index>(l.out),
                       static_cast<Eigen::Index>(l.in));
  };

  // Output layer.
  const auto& out_layer = layers_.back();
  const Matrix& last = n_hidden > 0 ? pass.hidden_out.back() : pass.concat;
  weight_grad(out_layer) = dlogit * last.transpose();
  grad[out_layer.bias_offset] = dlogit.sum();
  Matrix delta = weights(out_layer).transpose() * dlogit;  // d loss / d last

  for (std::size_t hh = n_hidden; hh-- > 0;) {
    const auto& layer = layers_[n_streams + hh];
    if (pass.hidden_scale[hh].size() > 0) delta = delta.cwiseProduct(pass.hidden_scale[hh]);
    delta = delta.cwiseProduct((pass.hidden_pre[hh].array() > 0.0).cast<double>().matrix());
    const Matrix& input = hh > 0 ? pass.hidden_out[hh - 1] : pass.concat;
    weight_grad(layer) = delta * input.transpose();
    bias_grad(layer) = delta.rowwise().sum();
    delta = weights(layer).transpose() * delta;
  }

  std::size_t row = 0;
  for (std::size_t s = 0; s < n_streams; ++s) {
    const auto& spec = config_.streams[s];
    const auto& layer = layers_[s];
    if (spec.enabled) {
      Matrix d = delta.middleRows(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(spec.width));
      d = d.cwiseProduct((pass.stream_pre[s].array() > 0.0).cast<double>().matrix());
      weight_grad(layer) = d * pass.stream_in[s].transpose();
      bias_grad(layer) = d.rowwise().sum();
    }
    row += spec.width;
  }
  for (double g : grad)
    if (!std::isfinite(g)) throw Error(ErrorCode::kNumerical, "non-finite gradient");
  return loss;
}

double ClassifierModel::min_abs_preactivation(const std::vector<const NeuralExample*>& batch,
                                              const DropoutMode& dropout) const {
  Pass pass;
  run(inputs_of(batch), dropout, pass);
  double m = std::numeric_limits<double>::infinity();
  for (const auto& pre : pass.stream_pre)
    if (pre.size() > 0) m = std::min(m, pre.cwiseAbs().minCoeff());
  for (const auto& pre : pass.hidden_pre)
    if (pre.size() > 0) m = std::min(m, pre.cwiseAbs().minCoeff());
  return m;
}

// ---- checkpoint ----------------------------------------------------------------

namespace {
constexpr char kNlcmMagic[4] = {'N', 'L', 'C', 'M'};
constexpr std::uint32_t kNlcmVersion = 1;
}  // namespace

void ClassifierModel::write_checkpoint(std::ostream& out) const {
  json streams = json::array();
  for (const auto& s : config_.streams)
    streams.push_back({{"kind", to_string(s.kind)}, {"input_dim", s.input_dim}, {"width", s.width}, {"enabled", s.enabled}});
  json blocks = json::array();
  for (const auto& l : layers_) {
    blocks.push_back({{"name", l.name + ".weight"}, {"rows", l.out}, {"cols", l.in}});
    blocks.push_back({{"name", l.name + ".bias"}, {"rows", l.out}, {"cols", 1}});
  }
  json header = {{"streams", streams},       {"hidden", config_.hidden},
                 {"dropout", config_.dropout}, {"rng_seed", rng_seed_},
                 {"parameter_count", params_.size()}, {"blocks", blocks}};
  const std::string text = header.dump();
  out.write(kNlcmMagic, 4);
  io::write_u32(out, kNlcmVersion);
  io::write_u32(out, static_cast<std::uint32_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (double p : params_) io::write_f32(out, static_cast<float>(p));
  if (!out) throw Error(ErrorCode::kIo, "failed writing classifier checkpoint");
}

ClassifierModel ClassifierModel::read_checkpoint(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kNlcmMagic, 4) != 0)
    throw Error(ErrorCode::kFormat, "classifier checkpoint: bad magic");
  const auto version = io::read_u32(in);
  if (version != kNlcmVersion)
    throw Error(ErrorCode::kFormat, "classifier checkpoint: unsupported version " + std::to_string(version));
  const auto len = io::read_u32(in);
  std::string text(len, '\0');
  if (!in.read(text.data(), len)) throw Error(ErrorCode::kFormat, "classifier checkpoint: truncated header");
  NetworkConfig config;
  std::uint64_t seed = 0;
  std::size_t count = 0;
  try {
    const auto header = json::parse(text);
    for (const auto& s : header.at("streams")) {
      config.streams.push_back({parse_stream_kind(s.at("kind").get<std::string>()),
                                s.at("input_dim").get<std::size_t>(), s.at("width").get<std::size_t>(),
                                s.at("enabled").get<bool>()});
    }
    config.hidden = header.at("hidden").get<std::vector<std::size_t>>();
    config.dropout = header.at("dropout").get<double>();
    seed = header.at("rng_seed").get<std::uint64_t>();
    count = header.at("parameter_count").get<std::size_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("classifier checkpoint: ") + e.what());
  }
  ClassifierModel model(std::move(config));
  model.rng_seed_ = seed;
  if (count != model.params_.size()) throw Error(ErrorCode::kFormat, "classifier checkpoint: parameter count mismatch");
  for (auto& p : model.params_) p = io::read_f32(in);
  return model;
}

// ---- optimizer and training ----------------------------------------------------

void adam_step(std::span<double> parameters, std::span<const double> grad, AdamState& state) {
  if (grad.size() != parameters.size() || state.m.size() != parameters.size() || state.v.size() != parameters.size())
    throw Error(ErrorCode::kInvalidArgument, "Adam state does not match the parameter vector");
  for (double g : grad)
    if (!std::isfinite(g)) throw Error(ErrorCode::kNumerical, "non-finite gradient");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < parameters.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grad[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    parameters[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
}

TrainedClassifier train_classifier(const NetworkConfig& config, const std::vector<NeuralExample>& data,
                                   const NeuralTrainOptions& options) {
  bool pos = false, neg = false;
  for (const auto& e : data) {
    if (e.label == 1) pos = true;
    else if (e.label == 0) neg = true;
    else throw Error(ErrorCode::kInvalidArgument, "classifier labels must be 0 or 1");
  }
  if (!pos || !neg) throw Error(ErrorCode::kPrecondition, "classifier training needs both classes");
  if (options.batch_size == 0) throw Error(ErrorCode::kInvalidArgument, "batch size must be positive");

  TrainedClassifier result{ClassifierModel::initialize(config, derive_seed(options.rng_seed, 1)), {}};
  auto& model = result.model;
  AdamState adam(model.parameter_count(), options.learning_rate);
  Rng order_rng(derive_seed(options.rng_seed, 2));
  Rng dropout_rng(derive_seed(options.rng_seed, 3));
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad;
  std::size_t epochs = options.epochs;
  if (options.min_updates > 0 && !data.empty()) {
    const std::size_t per_epoch = (data.size() + options.batch_size - 1) / options.batch_size;
    epochs = std::max(epochs, (options.min_updates + per_epoch - 1) / per_epoch);
  }
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    order_rng.shuffle(std::span<std::size_t>(order));
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t end = std::min(order.size(), start + options.batch_size);
      std::vector<const NeuralExample*> batch;
      for (std::size_t k = start; k < end; ++k) batch.push_back(&data[order[k]]);
      const double loss = model.loss_and_gradient(batch, {true, dropout_rng.next_u64()}, grad);
      total += loss * static_cast<double>(batch.size());
      adam_step(model.parameters(), grad, adam);
    }
    result.loss_history.push_back(total / static_cast<double>(data.size()));
  }
  return result;
}

double predict_proba(const ClassifierModel& model, const StreamInputs& inputs) { return model.forward(inputs); }

bool classify(const ClassifierModel& model, const StreamInputs& inputs, double threshold) {
  return predict_proba(model, inputs) >= threshold;
}

}  // namespace patland
