// rawspoof/cldnn.h

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

#ifndef RAWSPOOF_CLDNN_H_
#define RAWSPOOF_CLDNN_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rawspoof/config.h"
#include "rawspoof/dataset.h"
#include "rawspoof/nn.h"
#include "rawspoof/random.h"

namespace rawspoof {

/// Hyperparameters of the raw-waveform CLDNN.  Defaults are the smaller
/// CLDNN-2 setup.
struct ModelConfig {
  std::size_t n_time_filters = 39;
  std::size_t time_kernel = 400;  // samples
  std::size_t time_stride = 160;  // samples (10 ms)
  std::size_t frame_len = 560;    // N
  std::size_t frame_hop = 0;      // 0 means frame_len (non-overlapping)
  std::size_t freq_maps = 128;
  std::size_t freq_kernel = 8;
  std::size_t freq_pool = 3;
  std::size_t lstm_size = 128;
  std::size_t lstm_layers = 2;
  std::size_t dnn_hidden = 256;
  std::size_t n_classes = 4;
  double dropout_p = 0.5;
  std::size_t seq_len = 25;  // S during training
  double bn_momentum = 0.1;
  double bn_eps = 1e-5;

  static ModelConfig Cldnn1();
  static ModelConfig Cldnn2();

  void Register(ConfigFields *fields);
  /// Throws ConfigError if the shape chain cannot be built.
  void Validate() const;

  std::size_t hop() const { return frame_hop == 0 ? frame_len : frame_hop; }
  /// Time-convolution positions inside one frame; also the time-pool width.
  std::size_t TimePositions() const;
  std::size_t FreqConvLength() const;
  std::size_t FreqPooledLength() const;
  /// Flattened per-frame feature size fed to the first LSTM.
  std::size_t FrameFeatureDim() const;
};

/**
   Raw-waveform CLDNN.  Each N-sample frame passes through

     time conv (1 -> 39 filters, kernel 400, stride 160) -> BN -> ReLU
       -> max-pool over all conv positions (one value per filter)
     freq conv over the 39 pooled values (1 -> freq_maps, kernel 8) -> BN
       -> ReLU -> non-overlapping max-pool (3) -> flatten

   The per-frame vectors of a sequence feed two LSTM layers (dropout after
   each); the last time-step's hidden state goes through one ReLU hidden
   layer (with dropout) to four output logits ordered GENUINE, SS, VC, RE.
 */
class CldnnModel {
 public:
  CldnnModel() = default;

  static CldnnModel Build(const ModelConfig &config, Rng &rng);

  const ModelConfig &config() const { return config_; }

  /// F x N frames -> F x FrameFeatureDim() features.  In kTrain mode the
  /// batch-norm statistics of both convolutions are appended to `stats`.
  Tensor FrameFeatures(const Tensor &frames, Mode mode,
                       std::vector<BatchStats> *stats = nullptr) const;

  /// Eval-mode feature vector of one frame.
  std::vector<double> ForwardFrame(std::span<const double> frame) const;

  /// Logits (B x 4) for B sequences of equal length.  kTrain applies
  /// dropout drawn from `rng` and reports batch-norm statistics.
  Tensor Forward(std::span<const FrameSequence> batch, Mode mode, Rng *rng,
                 std::vector<BatchStats> *stats = nullptr) const;

  /// Training forward: Forward(kTrain) followed by the running-statistic
  /// update of both batch-norm layers.
  Tensor ForwardTrain(std::span<const FrameSequence> batch, Rng &rng);

  /// Eval-mode logits for one sequence of any length.
  std::vector<double> Logits(const FrameSequence &sequence) const;
  /// log P(GENUINE | sequence); larger means more genuine.
  double Score(const FrameSequence &sequence) const;

  /// Trainable tensors, in a fixed order with stable names.
  std::vector<NamedTensor> Parameters() const;
  /// Batch-norm running statistics.
  std::vector<NamedTensor> Buffers() const;
  std::size_t ParameterCount() const;

  /// Independent deep copy.
  CldnnModel Clone() const;

  /// Human-readable shape chain, one stage per line.
  std::string ShapeSummary() const;

 private:
  ModelConfig config_;
  Conv1dLayer time_conv_;
  BatchNormLayer time_bn_;
  Conv1dLayer freq_conv_;
  BatchNormLayer freq_bn_;
  LstmLayer lstm1_, lstm2_;
  DropoutLayer drop_lstm1_, drop_lstm2_, drop_dnn_;
  LinearLayer dnn_hidden_;
  LinearLayer output_;
};

/// log-softmax of the GENUINE logit (index 0).
double GenuineScore(std::span<const double> logits);

struct CheckpointMeta {
  std::size_t epoch = 0;
  std::uint64_t seed = 0;
  double dev_metric = 0.0;
};

struct Checkpoint {
  CldnnModel model;
  CheckpointMeta meta;
};

/// Parameters and running statistics are stored at single precision.
void SaveCheckpoint(const CldnnModel &model, const CheckpointMeta &meta,
                    const std::filesystem::path &path);
Checkpoint LoadCheckpoint(const std::filesystem::path &path);

}  // namespace rawspoof

#endif  // RAWSPOOF_CLDNN_H_
