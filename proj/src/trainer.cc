// src/trainer.cc

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

#include "rawspoof/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "rawspoof/errors.h"
#include "rawspoof/parallel.h"

namespace rawspoof {

AdadeltaState AdadeltaState::For(std::span<const NamedTensor> params, double rho,
                                 double eps) {
  AdadeltaState state;
  state.rho = rho;
  state.eps = eps;
  for (const auto &p : params) {
    state.sq_grad.emplace_back(p.tensor.size(), 0.0);
    state.sq_update.emplace_back(p.tensor.size(), 0.0);
  }
  return state;
}

void AdadeltaUpdate(std::span<double> param, std::span<const double> grad,
                    std::span<double> sq_grad, std::span<double> sq_update,
                    double rho, double eps) {
  if (grad.size() != param.size() || sq_grad.size() != param.size() ||
      sq_update.size() != param.size())
    throw ShapeError("adadelta: parameter, gradient and accumulator sizes differ");
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = grad[i];
    sq_grad[i] = rho * sq_grad[i] + (1.0 - rho) * g * g;
    const double dx = -(std::sqrt(sq_update[i] + eps) / std::sqrt(sq_grad[i] + eps)) * g;
    sq_update[i] = rho * sq_update[i] + (1.0 - rho) * dx * dx;
    param[i] += dx;
  }
}

void AdadeltaStep(std::span<const NamedTensor> params, AdadeltaState *state) {
  if (state->sq_grad.size() != params.size())
    throw ShapeError("adadelta state tracks " + std::to_string(state->sq_grad.size()) +
                     " tensors but " + std::to_string(params.size()) + " were given");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Tensor &t = params[i].tensor;
    if (!t.has_grad()) throw ShapeError("parameter " + params[i].name + " has no gradient");
    if (state->sq_grad[i].size() != t.size())
      throw ShapeError("adadelta accumulator shape differs for " + params[i].name);
    for (double g : t.grad())
      if (!std::isfinite(g))
        throw NumericError("non-finite gradient in parameter " + params[i].name);
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor t = params[i].tensor;
    AdadeltaUpdate(t.mutable_data(), t.grad(), state->sq_grad[i], state->sq_update[i],
                   state->rho, state->eps);
  }
}

void TrainConfig::Register(ConfigFields *fields) {
  fields->Add("batch_size", &batch_size);
  fields->Add("max_epochs", &max_epochs);
  fields->Add("seed", &seed);
  fields->Add("patience", &patience);
  fields->Add("adadelta_rho", &rho);
  fields->Add("adadelta_eps", &eps);
  fields->Add("class_weights", &class_weights);
  fields->Add("workers", &workers);
}

void TrainConfig::Validate() const {
  if (batch_size < 2) throw ConfigError("batch_size must be >= 2 (batch normalization)");
  if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (patience < 1) throw ConfigError("patience must be >= 1");
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("adadelta_rho must lie in (0, 1)");
  if (!(eps > 0.0)) throw ConfigError("adadelta_eps must be > 0");
  if (!class_weights.empty()) {
    if (class_weights.size() != static_cast<std::size_t>(kNumClasses))
      throw ConfigError("class_weights needs " + std::to_string(kNumClasses) + " values");
    for (double w : class_weights)
      if (!(w > 0.0)) throw ConfigError("class_weights must be positive");
  }
}

PreparedUtterance PrepareUtterance(const Utterance &utt, const ModelConfig &config) {
  PreparedUtterance p;
  p.id = utt.id;
  p.label = utt.label;
  p.category = utt.category;
  const std::vector<double> normalized = Normalize(utt.samples);
  p.frames = Frame(normalized, config.frame_len, config.hop());
  if (p.frames.empty())
    throw DataError("utterance " + utt.id + " (" + std::to_string(utt.samples.size()) +
                    " samples) is shorter than one " + std::to_string(config.frame_len) +
                    "-sample frame");
  return p;
}

std::vector<PreparedUtterance> PrepareSplit(const Manifest &manifest, Split split,
                                            const ModelConfig &config,
                                            std::size_t workers) {
  const auto records = manifest.InSplit(split);
  std::vector<PreparedUtterance> out(records.size());
  ParallelFor(records.size(), workers, [&](std::size_t i) {
    out[i] = PrepareUtterance(LoadUtterance(manifest, *records[i]), config);
  });
  return out;
}

namespace {

std::vector<std::vector<double>> AllLogits(const CldnnModel &model,
                                           std::span<const PreparedUtterance> utts,
                                           std::size_t workers) {
  std::vector<std::vector<double>> logits(utts.size());
  ParallelFor(utts.size(), workers, [&](std::size_t i) {
    logits[i] = model.Logits(MakeEvalSequence(utts[i].frames, utts[i].id));
  });
  return logits;
}

ScoreRecord MakeRecord(const PreparedUtterance &u, std::span<const double> logits) {
  ScoreRecord r;
  r.utterance_id = u.id;
  r.score = GenuineScore(logits);
  r.truth = u.label == Label::kGenuine ? Truth::kGenuine : Truth::kAttack;
  r.category = u.category;
  return r;
}

}  // namespace

std::vector<ScoreRecord> ScoreUtterances(const CldnnModel &model,
                                         std::span<const PreparedUtterance> utts,
                                         std::size_t workers) {
  const auto logits = AllLogits(model, utts, workers);
  std::vector<ScoreRecord> out;
  out.reserve(utts.size());
  for (std::size_t i = 0; i < utts.size(); ++i) out.push_back(MakeRecord(utts[i], logits[i]));
  return out;
}

DevResult EvaluateDev(const CldnnModel &model, std::span<const PreparedUtterance> dev,
                      std::size_t workers) {
  const auto logits = AllLogits(model, dev, workers);
  std::vector<ScoreRecord> records;
  double loss = 0.0;
  for (std::size_t i = 0; i < dev.size(); ++i) {
    records.push_back(MakeRecord(dev[i], logits[i]));
    // Binary cross-entropy of genuine versus any attack class.
    const auto lsm = LogSoftmax(logits[i]);
    if (dev[i].label == Label::kGenuine) {
      loss -= lsm[0];
    } else {
      const double m = *std::max_element(lsm.begin() + 1, lsm.end());
      double acc = 0.0;
      for (std::size_t c = 1; c < lsm.size(); ++c) acc += std::exp(lsm[c] - m);
      loss -= m + std::log(acc);
    }
  }
  const ThresholdChoice choice = SelectThreshold(records);
  DevResult r;
  r.far = choice.far;
  r.frr = choice.frr;
  r.metric = choice.metric;
  r.loss = loss / static_cast<double>(dev.size());
  return r;
}

std::string FormatHistoryLine(const EpochRecord &record) {
  nlohmann::ordered_json j;
  j["epoch"] = record.epoch;
  j["loss"] = record.loss;
  j["dev_far"] = record.dev.far;
  j["dev_frr"] = record.dev.frr;
  j["dev_metric"] = record.dev.metric;
  j["dev_loss"] = record.dev.loss;
  return j.dump();
}

TrainResult Train(CldnnModel &model, std::span<const PreparedUtterance> train,
                  std::span<const PreparedUtterance> dev, const TrainConfig &config,
                  const TrainHooks &hooks) {
  config.Validate();
  if (train.empty()) throw DataError("training set is empty");
  if (dev.empty() && !hooks.dev_evaluator) throw DataError("dev set is empty");

  TrainResult result;
  {
    std::vector<bool> seen(kNumClasses, false);
    for (const auto &u : train) seen[static_cast<std::size_t>(u.label)] = true;
    for (int c = 0; c < kNumClasses; ++c)
      if (!seen[static_cast<std::size_t>(c)])
        result.warnings.push_back(std::string("class ") +
                                  std::string(LabelName(static_cast<Label>(c))) +
                                  " has no training utterances");
  }

  const std::size_t seq_len = model.config().seq_len;
  const auto params = model.Parameters();
  AdadeltaState state = AdadeltaState::For(params, config.rho, config.eps);
  Rng rng = DeriveRng(config.seed, 1);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  double best_metric = 0.0, best_loss = 0.0;
  bool have_best = false;
  std::size_t since_improvement = 0;
  const auto start = std::chrono::steady_clock::now();

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size, ++batch_index) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      std::vector<FrameSequence> batch;
      std::vector<int> targets;
      for (std::size_t i = begin; i < end; ++i) {
        const PreparedUtterance &u = train[order[i]];
        batch.push_back(MakeTrainingSequence(u.frames, seq_len, rng, u.id));
        targets.push_back(static_cast<int>(u.label));
      }
      Tape tape;
      Tensor logits = model.ForwardTrain(batch, rng);
      auto ce = SoftmaxCrossEntropy(logits, targets, config.class_weights);
      const double loss = ce.loss.item();
      if (!std::isfinite(loss))
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(batch_index));
      tape.Backward(ce.loss);
      AdadeltaStep(params, &state);
      for (const auto &p : params) p.tensor.zero_grad();
      loss_sum += loss * static_cast<double>(end - begin);
    }

    EpochRecord record;
    record.epoch = epoch;
    record.loss = loss_sum / static_cast<double>(train.size());
    record.dev = hooks.dev_evaluator ? hooks.dev_evaluator(model, epoch)
                                     : EvaluateDev(model, dev, config.workers);
    record.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.history.push_back(record);
    if (hooks.on_epoch) hooks.on_epoch(record);

    const bool improved =
        !have_best || record.dev.metric < best_metric ||
        (record.dev.metric == best_metric && record.dev.loss < best_loss);
    if (improved) {
      have_best = true;
      best_metric = record.dev.metric;
      best_loss = record.dev.loss;
      since_improvement = 0;
      result.best.model = model.Clone();
      result.best.meta = {epoch, config.seed, 100.0 * record.dev.metric};
    } else if (++since_improvement >= config.patience) {
      result.stopped_early = epoch < config.max_epochs;
      break;
    }
  }
  return result;
}

}  // namespace rawspoof
