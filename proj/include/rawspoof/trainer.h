// rawspoof/trainer.h

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

#ifndef RAWSPOOF_TRAINER_H_
#define RAWSPOOF_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rawspoof/cldnn.h"
#include "rawspoof/config.h"
#include "rawspoof/dataset.h"
#include "rawspoof/metrics.h"

namespace rawspoof {

/// Decayed squared gradients and squared updates, one vector per parameter
/// tensor, both starting at zero.
struct AdadeltaState {
  double rho = 0.95;
  double eps = 1e-6;
  std::vector<std::vector<double>> sq_grad;
  std::vector<std::vector<double>> sq_update;

  static AdadeltaState For(std::span<const NamedTensor> params, double rho = 0.95,
                           double eps = 1e-6);
};

/// One Adadelta update of a flat parameter block:
///   E[g^2]  <- rho E[g^2] + (1 - rho) g^2
///   dx      <- -sqrt(E[dx^2] + eps) / sqrt(E[g^2] + eps) * g
///   E[dx^2] <- rho E[dx^2] + (1 - rho) dx^2
///   x       <- x + dx
void AdadeltaUpdate(std::span<double> param, std::span<const double> grad,
                    std::span<double> sq_grad, std::span<double> sq_update,
                    double rho, double eps);

/// Applies AdadeltaUpdate to every parameter using its accumulated gradient.
/// All gradients are checked first; a non-finite value aborts the whole step
/// with a NumericError naming the parameter, leaving everything unchanged.
void AdadeltaStep(std::span<const NamedTensor> params, AdadeltaState *state);

struct TrainConfig {
  std::size_t batch_size = 32;
  std::size_t max_epochs = 50;
  std::uint64_t seed = 0;
  std::size_t patience = 8;
  double rho = 0.95;
  double eps = 1e-6;
  std::vector<double> class_weights;  // empty means uniform
  std::size_t workers = 0;            // data preparation and dev scoring

  void Register(ConfigFields *fields);
  void Validate() const;
};

/// An utterance after normalization and framing.
struct PreparedUtterance {
  std::string id;
  Label label = Label::kGenuine;
  std::string category;
  std::vector<std::vector<double>> frames;
};

/// Loads, normalizes and frames every record of `split` in manifest order.
/// Throws DataError for utterances shorter than one frame.
std::vector<PreparedUtterance> PrepareSplit(const Manifest &manifest, Split split,
                                            const ModelConfig &config,
                                            std::size_t workers = 0);

PreparedUtterance PrepareUtterance(const Utterance &utt, const ModelConfig &config);

/// Eval-mode whole-utterance scores, in input order.
std::vector<ScoreRecord> ScoreUtterances(const CldnnModel &model,
                                         std::span<const PreparedUtterance> utts,
                                         std::size_t workers = 0);

struct DevResult {
  double far = 0.0;     // fractions at the dev-optimal threshold
  double frr = 0.0;
  double metric = 0.0;  // (far + frr) / 2
  double loss = 0.0;    // mean genuine-vs-attack cross-entropy, whole utterances
};

DevResult EvaluateDev(const CldnnModel &model, std::span<const PreparedUtterance> dev,
                      std::size_t workers = 0);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double loss = 0.0;      // mean training cross-entropy over the epoch
  DevResult dev;
  double elapsed_seconds = 0.0;
};

/// One JSON object per line; elapsed time is left out so that the history
/// of a seeded run is byte-for-byte reproducible.
std::string FormatHistoryLine(const EpochRecord &record);

struct TrainHooks {
  /// Replaces EvaluateDev when set (used to script dev behaviour in tests).
  std::function<DevResult(const CldnnModel &, std::size_t epoch)> dev_evaluator;
  /// Called after every epoch.
  std::function<void(const EpochRecord &)> on_epoch;
};

struct TrainResult {
  Checkpoint best;
  std::vector<EpochRecord> history;
  std::vector<std::string> warnings;
  bool stopped_early = false;
};

/**
   Trains `model` in place.  Each epoch shuffles the training utterances,
   draws one random seq_len-frame window from each, and minimizes the mean
   (optionally class-weighted) cross-entropy over consecutive batches.  The
   dev set is scored after every epoch.  An epoch improves on the best so far
   if its dev metric is lower, or equal with a lower dev loss; the best model
   is kept, and training stops after `patience` epochs without improvement
   or at max_epochs.  All randomness comes from config.seed.
 */
TrainResult Train(CldnnModel &model, std::span<const PreparedUtterance> train,
                  std::span<const PreparedUtterance> dev, const TrainConfig &config,
                  const TrainHooks &hooks = {});

}  // namespace rawspoof

#endif  // RAWSPOOF_TRAINER_H_
