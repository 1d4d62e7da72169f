// src/gradient_suite.cc

// Copyright 2026 The rawspoof Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "rawspoof/gradient_suite.h"

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <random>

#include "rawspoof/errors.h"
#include "rawspoof/grad_check.h"

namespace rawspoof {

namespace {

struct Trial {
  ScalarFunction f;
  std::vector<Tensor> inputs;
};

Tensor RandomTensor(const Shape &shape, Rng &rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> v(NumElements(shape));
  for (double &x : v) x = dist(rng);
  return Tensor(shape, std::move(v));
}

std::size_t Uniform(Rng &rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Fixed random projection of a block output onto a scalar.
Tensor Project(const Tensor &y, const Tensor &weights) { return Sum(Mul(y, weights)); }

Trial ConvTrial(Rng &rng) {
  const std::size_t b = Uniform(rng, 1, 3), cin = Uniform(rng, 1, 3);
  const std::size_t cout = Uniform(rng, 1, 4), k = Uniform(rng, 1, 5);
  const std::size_t stride = Uniform(rng, 1, 3), positions = Uniform(rng, 1, 4);
  const std::size_t len = k + stride * (positions - 1) + Uniform(rng, 0, stride - 1);
  Tensor r = RandomTensor({b, cout, positions}, rng);
  return {[r, stride](const std::vector<Tensor> &in) {
            return Project(Conv1d(in[0], in[1], in[2], stride), r);
          },
          {RandomTensor({b, cin, len}, rng), RandomTensor({cout, cin, k}, rng),
           RandomTensor({cout}, rng)}};
}

Trial PoolTrial(Rng &rng) {
  const std::size_t b = Uniform(rng, 1, 3), c = Uniform(rng, 1, 3);
  const std::size_t width = Uniform(rng, 1, 4), blocks = Uniform(rng, 1, 4);
  const std::size_t len = width * blocks + Uniform(rng, 0, width - 1);
  Tensor r = RandomTensor({b, c, blocks}, rng);
  return {[r, width](const std::vector<Tensor> &in) {
            return Project(MaxPool1d(in[0], width), r);
          },
          {RandomTensor({b, c, len}, rng)}};
}

Trial BatchNormTrial(Rng &rng) {
  const std::size_t b = Uniform(rng, 2, 4), c = Uniform(rng, 1, 3);
  const bool rank3 = Uniform(rng, 0, 1) == 1;
  Shape shape = rank3 ? Shape{b, c, Uniform(rng, 1, 4)} : Shape{b, c};
  Tensor r = RandomTensor(shape, rng);
  return {[r](const std::vector<Tensor> &in) {
            return Project(BatchNormTrain(in[0], in[1], in[2], 1e-5, nullptr), r);
          },
          {RandomTensor(shape, rng), RandomTensor({c}, rng), RandomTensor({c}, rng)}};
}

Trial DropoutTrial(Rng &rng) {
  Shape shape{Uniform(rng, 1, 4), Uniform(rng, 1, 6)};
  Tensor mask = DropoutMask(shape, 0.5, rng);
  Tensor r = RandomTensor(shape, rng);
  return {[mask, r](const std::vector<Tensor> &in) {
            return Project(Mul(in[0], mask), r);
          },
          {RandomTensor(shape, rng)}};
}

Trial LinearTrial(Rng &rng) {
  const std::size_t b = Uniform(rng, 1, 4), n_in = Uniform(rng, 1, 5);
  const std::size_t n_out = Uniform(rng, 1, 5);
  Tensor r = RandomTensor({b, n_out}, rng);
  return {[r](const std::vector<Tensor> &in) {
            return Project(Linear(in[0], in[1], in[2]), r);
          },
          {RandomTensor({b, n_in}, rng), RandomTensor({n_out, n_in}, rng),
           RandomTensor({n_out}, rng)}};
}

Trial LstmTrial(Rng &rng) {
  const std::size_t b = Uniform(rng, 1, 3), n_in = Uniform(rng, 1, 4);
  const std::size_t hidden = Uniform(rng, 1, 4), steps = Uniform(rng, 1, 4);
  LstmLayer layer(n_in, hidden, rng);
  std::vector<NamedTensor> params;
  layer.CollectParameters("lstm", &params);
  std::vector<Tensor> inputs;
  for (auto &p : params) {
    // Move the biases away from their structured initial values as well.
    auto d = p.tensor.mutable_data();
    std::normal_distribution<double> dist(0.0, 0.5);
    for (double &x : d) x += dist(rng);
    inputs.push_back(p.tensor);
  }
  std::vector<Tensor> weights;
  for (std::size_t t = 0; t < steps; ++t) {
    inputs.push_back(RandomTensor({b, n_in}, rng));
    weights.push_back(RandomTensor({b, hidden}, rng));
  }
  const std::size_t n_params = params.size();
  return {[layer, weights, n_params](const std::vector<Tensor> &in) {
            std::vector<Tensor> xs(in.begin() + static_cast<std::ptrdiff_t>(n_params),
                                   in.end());
            auto hs = layer.Forward(xs);
            Tensor total = Project(hs[0], weights[0]);
            for (std::size_t t = 1; t < hs.size(); ++t)
              total = Add(total, Project(hs[t], weights[t]));
            return total;
          },
          inputs};
}

Trial SoftmaxTrial(Rng &rng) {
  const std::size_t b = Uniform(rng, 1, 5), c = Uniform(rng, 2, 5);
  std::vector<int> targets(b);
  for (int &t : targets) t = static_cast<int>(Uniform(rng, 0, c - 1));
  std::vector<double> weights;
  if (Uniform(rng, 0, 1) == 1) {
    std::uniform_real_distribution<double> w(0.5, 2.0);
    for (std::size_t i = 0; i < c; ++i) weights.push_back(w(rng));
  }
  Tensor logits = RandomTensor({b, c}, rng);
  for (double &x : logits.mutable_data()) x *= 3.0;
  return {[targets, weights](const std::vector<Tensor> &in) {
            return SoftmaxCrossEntropy(in[0], targets, weights).loss;
          },
          {logits}};
}

Trial ModelGradTrial(Rng &rng) {
  const ModelConfig config = TinyModelConfig();
  auto model = std::make_shared<CldnnModel>(CldnnModel::Build(config, rng));
  std::vector<FrameSequence> batch;
  std::vector<int> targets;
  std::normal_distribution<double> dist(0.0, 1.0);
  for (std::size_t b = 0; b < 3; ++b) {
    FrameSequence s;
    s.num_frames = config.seq_len;
    s.frame_length = config.frame_len;
    s.frames.resize(s.num_frames * s.frame_length);
    for (double &x : s.frames) x = dist(rng);
    batch.push_back(std::move(s));
    targets.push_back(static_cast<int>(b % static_cast<std::size_t>(kNumClasses)));
  }
  const std::uint64_t mask_seed = rng();
  std::vector<Tensor> inputs;
  for (const auto &p : model->Parameters()) inputs.push_back(p.tensor);
  return {[model, batch, targets, mask_seed](const std::vector<Tensor> &) {
            Rng masks(mask_seed);
            Tensor logits = model->Forward(batch, Mode::kTrain, &masks);
            return SoftmaxCrossEntropy(logits, targets).loss;
          },
          inputs};
}

using TrialFactory = std::function<Trial(Rng &)>;

const std::map<std::string, TrialFactory> &Factories() {
  static const std::map<std::string, TrialFactory> factories = {
      {"conv1d", ConvTrial},       {"maxpool", PoolTrial},
      {"batchnorm", BatchNormTrial}, {"dropout", DropoutTrial},
      {"linear", LinearTrial},     {"lstm", LstmTrial},
      {"softmax_ce", SoftmaxTrial}, {"cldnn", ModelGradTrial},
  };
  return factories;
}

}  // namespace

ModelConfig TinyModelConfig() {
  ModelConfig c;
  c.n_time_filters = 12;
  c.time_kernel = 20;
  c.time_stride = 10;
  c.frame_len = 40;
  c.freq_maps = 3;
  c.freq_kernel = 4;
  c.freq_pool = 3;
  c.lstm_size = 4;
  c.dnn_hidden = 5;
  c.seq_len = 3;
  return c;
}

std::vector<std::string> GradientCheckNames() {
  return {"conv1d", "maxpool", "batchnorm", "dropout",
          "linear", "lstm",    "softmax_ce", "cldnn"};
}

GradientCheckSummary RunGradientCheck(const std::string &name,
                                      const GradientSuiteOptions &options) {
  const auto &factories = Factories();
  auto it = factories.find(name);
  if (it == factories.end()) {
    std::string known;
    for (const auto &n : GradientCheckNames()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown gradient check '" + name + "' (known: " + known + ")");
  }
  const bool whole_model = name == "cldnn";
  GradientCheckSummary summary;
  summary.name = name;
  summary.tolerance = whole_model ? options.model_tolerance : options.layer_tolerance;
  for (std::size_t s = 0; s < options.seeds; ++s) {
    Rng rng = DeriveRng(options.base_seed, s);
    Trial trial = it->second(rng);
    GradCheckOptions gc;
    gc.seed = options.base_seed + s;
    if (whole_model) gc.max_coordinates_per_input = options.model_coordinates;
    const GradCheckResult r = GradCheck(trial.f, trial.inputs, gc);
    summary.max_relative_error = std::max(summary.max_relative_error, r.max_relative_error);
    summary.coordinates += r.coordinates_checked;
    ++summary.trials;
  }
  summary.passed = summary.max_relative_error < summary.tolerance;
  return summary;
}

std::vector<GradientCheckSummary> RunGradientSuite(const GradientSuiteOptions &options) {
  std::vector<GradientCheckSummary> out;
  for (const auto &name : GradientCheckNames()) out.push_back(RunGradientCheck(name, options));
  return out;
}

}  // namespace rawspoof
