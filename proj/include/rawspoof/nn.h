// rawspoof/nn.h

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

#ifndef RAWSPOOF_NN_H_
#define RAWSPOOF_NN_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rawspoof/random.h"
#include "rawspoof/tensor.h"

namespace rawspoof {

enum class Mode { kTrain, kEval };

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

// ---------------------------------------------------------------------------
// Differentiable building blocks.  Batched inputs put the batch on axis 0;
// convolution, pooling and batch norm take (batch x channels x length).

/// Valid (unpadded) 1-D convolution:
///   out[b][o][t] = bias[o] + sum_{c,k} weight[o][c][k] * x[b][c][t*stride + k]
Tensor Conv1d(const Tensor &x, const Tensor &weight, const Tensor &bias,
              std::size_t stride);

/// Non-overlapping max pooling along the last axis.  The trailing
/// length % width samples are dropped; ties route the gradient to the lowest
/// index in the block.
Tensor MaxPool1d(const Tensor &x, std::size_t width);

/// Per-channel moments of one training batch (biased variance).
struct BatchStats {
  std::vector<double> mean;
  std::vector<double> var;
  std::size_t count = 0;
};

/// Normalizes each channel (axis 1) with statistics over all other axes.
/// Input is (batch x channels) or (batch x channels x length).
Tensor BatchNormTrain(const Tensor &x, const Tensor &gamma, const Tensor &beta,
                      double eps, BatchStats *stats);

/// Affine normalization with fixed statistics; no dependence on the batch.
Tensor BatchNormEval(const Tensor &x, const Tensor &gamma, const Tensor &beta,
                     std::span<const double> mean, std::span<const double> var,
                     double eps);

/// y = x W^T + b for x (batch x in), W (out x in), b (out).
Tensor Linear(const Tensor &x, const Tensor &weight, const Tensor &bias);

/// Inverted-dropout mask: each entry is 0 with probability p, else 1/(1-p).
Tensor DropoutMask(const Shape &shape, double p, Rng &rng);

struct SoftmaxCrossEntropyResult {
  Tensor loss;                        // one element
  std::vector<double> probabilities;  // batch x classes, row-major
};

/// Mean (optionally class-weighted) cross-entropy of softmax(logits) against
/// integer targets.  Uses a max-shifted log-sum-exp.
SoftmaxCrossEntropyResult SoftmaxCrossEntropy(
    const Tensor &logits, std::span<const int> targets,
    std::span<const double> class_weights = {});

/// Stable log-softmax of one logit row.
std::vector<double> LogSoftmax(std::span<const double> logits);

// ---------------------------------------------------------------------------
// Layers.  Forward passes are const; the only training-time mutation is
// BatchNormLayer::UpdateRunningStats, applied by the owner after a forward.

class Conv1dLayer {
 public:
  Conv1dLayer() = default;
  Conv1dLayer(std::size_t in_channels, std::size_t out_channels,
              std::size_t kernel_width, std::size_t stride, Rng &rng);

  Tensor Forward(const Tensor &x) const;
  std::size_t OutputLength(std::size_t input_length) const;

  std::size_t in_channels() const { return weight_.dim(1); }
  std::size_t out_channels() const { return weight_.dim(0); }
  std::size_t kernel_width() const { return weight_.dim(2); }
  std::size_t stride() const { return stride_; }
  const Tensor &weight() const { return weight_; }
  const Tensor &bias() const { return bias_; }

  void CollectParameters(const std::string &prefix,
                         std::vector<NamedTensor> *out) const;

 private:
  Tensor weight_;  // out x in x kernel
  Tensor bias_;
  std::size_t stride_ = 1;
};

class BatchNormLayer {
 public:
  BatchNormLayer() = default;
  explicit BatchNormLayer(std::size_t channels, double momentum = 0.1,
                          double eps = 1e-5);

  /// In kTrain mode normalizes with batch statistics and, when `stats` is
  /// non-null, reports them for a later UpdateRunningStats().  Throws if the
  /// batch holds a single value per channel.  kEval uses running statistics.
  Tensor Forward(const Tensor &x, Mode mode, BatchStats *stats = nullptr) const;

  /// running <- (1 - momentum) * running + momentum * batch, with the
  /// unbiased batch variance.
  void UpdateRunningStats(const BatchStats &stats);

  std::size_t channels() const { return gamma_.size(); }
  const Tensor &gamma() const { return gamma_; }
  const Tensor &beta() const { return beta_; }
  const Tensor &running_mean() const { return running_mean_; }
  const Tensor &running_var() const { return running_var_; }
  double momentum() const { return momentum_; }
  double eps() const { return eps_; }

  void CollectParameters(const std::string &prefix,
                         std::vector<NamedTensor> *out) const;
  void CollectBuffers(const std::string &prefix,
                      std::vector<NamedTensor> *out) const;

 private:
  Tensor gamma_, beta_;
  Tensor running_mean_, running_var_;
  double momentum_ = 0.1;
  double eps_ = 1e-5;
};

class LinearLayer {
 public:
  LinearLayer() = default;
  LinearLayer(std::size_t in_features, std::size_t out_features, Rng &rng);

  Tensor Forward(const Tensor &x) const { return Linear(x, weight_, bias_); }

  std::size_t in_features() const { return weight_.dim(1); }
  std::size_t out_features() const { return weight_.dim(0); }
  const Tensor &weight() const { return weight_; }
  const Tensor &bias() const { return bias_; }

  void CollectParameters(const std::string &prefix,
                         std::vector<NamedTensor> *out) const;

 private:
  Tensor weight_;  // out x in
  Tensor bias_;
};

/**
   Single-direction LSTM.  Gate rows of the stacked weights are ordered
   input, forget, cell candidate, output:

     z_t = W_ih x_t + b_ih + W_hh h_{t-1} + b_hh
     i = sigmoid(z_i), f = sigmoid(z_f), g = tanh(z_g), o = sigmoid(z_o)
     c_t = f * c_{t-1} + i * g,   h_t = o * tanh(c_t)

   with h_0 = c_0 = 0 for every sequence.
 */
class LstmLayer {
 public:
  LstmLayer() = default;
  LstmLayer(std::size_t input_size, std::size_t hidden_size, Rng &rng);

  /// Each input is (batch x input_size); returns every time-step's hidden
  /// state (batch x hidden_size).
  std::vector<Tensor> Forward(std::span<const Tensor> inputs) const;

  std::size_t input_size() const { return weight_ih_.dim(1); }
  std::size_t hidden_size() const { return weight_hh_.dim(1); }
  const Tensor &weight_ih() const { return weight_ih_; }
  const Tensor &weight_hh() const { return weight_hh_; }
  const Tensor &bias_ih() const { return bias_ih_; }
  const Tensor &bias_hh() const { return bias_hh_; }

  void CollectParameters(const std::string &prefix,
                         std::vector<NamedTensor> *out) const;

 private:
  Tensor weight_ih_;  // 4H x in
  Tensor weight_hh_;  // 4H x H
  Tensor bias_ih_;
  Tensor bias_hh_;
};

class DropoutLayer {
 public:
  explicit DropoutLayer(double p = 0.5);

  /// Fresh mask per call in kTrain mode (requires `rng`); identity in kEval.
  Tensor Forward(const Tensor &x, Mode mode, Rng *rng) const;

  double p() const { return p_; }

 private:
  double p_;
};

}  // namespace rawspoof

#endif  // RAWSPOOF_NN_H_
