// src/nn.cc

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

#include "rawspoof/nn.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rawspoof/errors.h"

namespace rawspoof {

namespace {

Tensor UniformTensor(const Shape &shape, double bound, Rng &rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  Tensor t(shape);
  for (double &v : t.mutable_data()) v = dist(rng);
  return t;
}

// (batch, channels, length) view of a rank-2 or rank-3 tensor.
struct ChannelView {
  std::size_t batch, channels, length;
};

ChannelView ChannelsOf(const Tensor &x, const char *op) {
  if (x.rank() == 2) return {x.dim(0), x.dim(1), 1};
  if (x.rank() == 3) return {x.dim(0), x.dim(1), x.dim(2)};
  throw ShapeError(std::string(op) + ": expected (batch x channels [x length]), got " +
                   ShapeString(x.shape()));
}

}  // namespace

Tensor Conv1d(const Tensor &x, const Tensor &weight, const Tensor &bias,
              std::size_t stride) {
  if (x.rank() != 3 || weight.rank() != 3 || bias.rank() != 1 ||
      x.dim(1) != weight.dim(1) || bias.dim(0) != weight.dim(0))
    throw ShapeError("conv1d: incompatible shapes x=" + ShapeString(x.shape()) +
                     " weight=" + ShapeString(weight.shape()) +
                     " bias=" + ShapeString(bias.shape()));
  if (stride == 0) throw ShapeError("conv1d: stride must be >= 1");
  const std::size_t batch = x.dim(0), in_ch = x.dim(1), in_len = x.dim(2);
  const std::size_t out_ch = weight.dim(0), kernel = weight.dim(2);
  if (in_len < kernel)
    throw ShapeError("conv1d: input length " + std::to_string(in_len) +
                     " shorter than kernel width " + std::to_string(kernel));
  const std::size_t out_len = (in_len - kernel) / stride + 1;

  Tensor out({batch, out_ch, out_len});
  auto o = out.mutable_data();
  auto xd = x.data(), wd = weight.data(), bd = bias.data();
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t oc = 0; oc < out_ch; ++oc) {
      double *orow = &o[(b * out_ch + oc) * out_len];
      for (std::size_t t = 0; t < out_len; ++t) {
        double acc = bd[oc];
        for (std::size_t c = 0; c < in_ch; ++c) {
          const double *xs = &xd[(b * in_ch + c) * in_len + t * stride];
          const double *ws = &wd[(oc * in_ch + c) * kernel];
          for (std::size_t k = 0; k < kernel; ++k) acc += ws[k] * xs[k];
        }
        orow[t] = acc;
      }
    }
  }

  if (Tape::ShouldRecord({&x, &weight, &bias})) {
    Tape::Record(out, [x, weight, bias, stride, batch, in_ch, in_len, out_ch,
                       kernel, out_len](std::span<const double> g) mutable {
      auto xd = x.data(), wd = weight.data();
      if (bias.requires_grad()) {
        auto gb = bias.mutable_grad();
        for (std::size_t b = 0; b < batch; ++b)
          for (std::size_t oc = 0; oc < out_ch; ++oc)
            for (std::size_t t = 0; t < out_len; ++t)
              gb[oc] += g[(b * out_ch + oc) * out_len + t];
      }
      if (weight.requires_grad()) {
        auto gw = weight.mutable_grad();
        for (std::size_t b = 0; b < batch; ++b)
          for (std::size_t oc = 0; oc < out_ch; ++oc)
            for (std::size_t t = 0; t < out_len; ++t) {
              const double go = g[(b * out_ch + oc) * out_len + t];
              if (go == 0.0) continue;
              for (std::size_t c = 0; c < in_ch; ++c) {
                const double *xs = &xd[(b * in_ch + c) * in_len + t * stride];
                double *gws = &gw[(oc * in_ch + c) * kernel];
                for (std::size_t k = 0; k < kernel; ++k) gws[k] += go * xs[k];
              }
            }
      }
      if (x.requires_grad()) {
        auto gx = x.mutable_grad();
        for (std::size_t b = 0; b < batch; ++b)
          for (std::size_t oc = 0; oc < out_ch; ++oc)
            for (std::size_t t = 0; t < out_len; ++t) {
              const double go = g[(b * out_ch + oc) * out_len + t];
              if (go == 0.0) continue;
              for (std::size_t c = 0; c < in_ch; ++c) {
                double *gxs = &gx[(b * in_ch + c) * in_len + t * stride];
                const double *ws = &wd[(oc * in_ch + c) * kernel];
                for (std::size_t k = 0; k < kernel; ++k) gxs[k] += go * ws[k];
              }
            }
      }
    });
  }
  return out;
}

Tensor MaxPool1d(const Tensor &x, std::size_t width) {
  if (x.rank() != 3)
    throw ShapeError("maxpool: expected (batch x channels x length), got " +
                     ShapeString(x.shape()));
  if (width == 0) throw ShapeError("maxpool: width must be >= 1");
  const std::size_t rows = x.dim(0) * x.dim(1), len = x.dim(2);
  if (len < width)
    throw ShapeError("maxpool: length " + std::to_string(len) +
                     " shorter than pool width " + std::to_string(width));
  const std::size_t out_len = len / width;
  Tensor out({x.dim(0), x.dim(1), out_len});
  std::vector<std::size_t> argmax(rows * out_len);
  auto xd = x.data();
  auto o = out.mutable_data();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t p = 0; p < out_len; ++p) {
      std::size_t best = r * len + p * width;
      for (std::size_t k = 1; k < width; ++k) {
        const std::size_t idx = r * len + p * width + k;
        if (xd[idx] > xd[best]) best = idx;  // strict: first index wins ties
      }
      argmax[r * out_len + p] = best;
      o[r * out_len + p] = xd[best];
    }
  }
  if (Tape::ShouldRecord({&x})) {
    Tape::Record(out, [x, argmax = std::move(argmax)](
                          std::span<const double> g) mutable {
      auto gx = x.mutable_grad();
      for (std::size_t i = 0; i < g.size(); ++i) gx[argmax[i]] += g[i];
    });
  }
  return out;
}

Tensor BatchNormTrain(const Tensor &x, const Tensor &gamma, const Tensor &beta,
                      double eps, BatchStats *stats) {
  const ChannelView v = ChannelsOf(x, "batchnorm");
  if (gamma.size() != v.channels || beta.size() != v.channels)
    throw ShapeError("batchnorm: " + std::to_string(v.channels) +
                     " channels but gamma/beta have " +
                     std::to_string(gamma.size()) + "/" +
                     std::to_string(beta.size()));
  const std::size_t n = v.batch * v.length;
  if (n < 2)
    throw ShapeError("batchnorm: training mode needs more than one value per "
                     "channel (batch x length = 1); use eval mode or a larger "
                     "batch");
  auto xd = x.data(), gd = gamma.data(), bd = beta.data();
  std::vector<double> mean(v.channels, 0.0), var(v.channels, 0.0);
  for (std::size_t b = 0; b < v.batch; ++b)
    for (std::size_t c = 0; c < v.channels; ++c)
      for (std::size_t t = 0; t < v.length; ++t)
        mean[c] += xd[(b * v.channels + c) * v.length + t];
  for (double &m : mean) m /= static_cast<double>(n);
  for (std::size_t b = 0; b < v.batch; ++b)
    for (std::size_t c = 0; c < v.channels; ++c)
      for (std::size_t t = 0; t < v.length; ++t) {
        const double d = xd[(b * v.channels + c) * v.length + t] - mean[c];
        var[c] += d * d;
      }
  for (double &s : var) s /= static_cast<double>(n);

  std::vector<double> inv_std(v.channels);
  for (std::size_t c = 0; c < v.channels; ++c)
    inv_std[c] = 1.0 / std::sqrt(var[c] + eps);

  Tensor out(x.shape());
  std::vector<double> xhat(x.size());
  auto o = out.mutable_data();
  for (std::size_t b = 0; b < v.batch; ++b)
    for (std::size_t c = 0; c < v.channels; ++c)
      for (std::size_t t = 0; t < v.length; ++t) {
        const std::size_t i = (b * v.channels + c) * v.length + t;
        xhat[i] = (xd[i] - mean[c]) * inv_std[c];
        o[i] = gd[c] * xhat[i] + bd[c];
      }
  if (stats != nullptr) {
    stats->mean = mean;
    stats->var = var;
    stats->count = n;
  }

  if (Tape::ShouldRecord({&x, &gamma, &beta})) {
    Tape::Record(out, [x, gamma, beta, v, n, xhat = std::move(xhat),
                       inv_std = std::move(inv_std)](
                          std::span<const double> g) mutable {
      std::vector<double> sum_g(v.channels, 0.0), sum_gx(v.channels, 0.0);
      for (std::size_t b = 0; b < v.batch; ++b)
        for (std::size_t c = 0; c < v.channels; ++c)
          for (std::size_t t = 0; t < v.length; ++t) {
            const std::size_t i = (b * v.channels + c) * v.length + t;
            sum_g[c] += g[i];
            sum_gx[c] += g[i] * xhat[i];
          }
      if (gamma.requires_grad()) {
        auto gg = gamma.mutable_grad();
        for (std::size_t c = 0; c < v.channels; ++c) gg[c] += sum_gx[c];
      }
      if (beta.requires_grad()) {
        auto gb = beta.mutable_grad();
        for (std::size_t c = 0; c < v.channels; ++c) gb[c] += sum_g[c];
      }
      if (x.requires_grad()) {
        auto gx = x.mutable_grad();
        auto gd = gamma.data();
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t b = 0; b < v.batch; ++b)
          for (std::size_t c = 0; c < v.channels; ++c) {
            const double scale = gd[c] * inv_std[c];
            const double mg = sum_g[c] * inv_n, mgx = sum_gx[c] * inv_n;
            for (std::size_t t = 0; t < v.length; ++t) {
              const std::size_t i = (b * v.channels + c) * v.length + t;
              gx[i] += scale * (g[i] - mg - xhat[i] * mgx);
            }
          }
      }
    });
  }
  return out;
}

Tensor BatchNormEval(const Tensor &x, const Tensor &gamma, const Tensor &beta,
                     std::span<const double> mean, std::span<const double> var,
                     double eps) {
  const ChannelView v = ChannelsOf(x, "batchnorm");
  if (gamma.size() != v.channels || beta.size() != v.channels ||
      mean.size() != v.channels || var.size() != v.channels)
    throw ShapeError("batchnorm: parameter sizes do not match " +
                     std::to_string(v.channels) + " channels");
  // y = scale * x + shift per channel.
  std::vector<double> scale(v.channels), inv_std(v.channels), shift(v.channels);
  auto gd = gamma.data(), bd = beta.data();
  for (std::size_t c = 0; c < v.channels; ++c) {
    inv_std[c] = 1.0 / std::sqrt(var[c] + eps);
    scale[c] = gd[c] * inv_std[c];
    shift[c] = bd[c] - scale[c] * mean[c];
  }
  Tensor out(x.shape());
  auto xd = x.data();
  auto o = out.mutable_data();
  for (std::size_t b = 0; b < v.batch; ++b)
    for (std::size_t c = 0; c < v.channels; ++c)
      for (std::size_t t = 0; t < v.length; ++t) {
        const std::size_t i = (b * v.channels + c) * v.length + t;
        o[i] = scale[c] * xd[i] + shift[c];
      }
  if (Tape::ShouldRecord({&x, &gamma, &beta})) {
    std::vector<double> m(mean.begin(), mean.end());
    Tape::Record(out, [x, gamma, beta, v, scale, inv_std, m](
                          std::span<const double> g) mutable {
      auto xd = x.data();
      for (std::size_t b = 0; b < v.batch; ++b)
        for (std::size_t c = 0; c < v.channels; ++c)
          for (std::size_t t = 0; t < v.length; ++t) {
            const std::size_t i = (b * v.channels + c) * v.length + t;
            if (x.requires_grad()) x.mutable_grad()[i] += g[i] * scale[c];
            if (gamma.requires_grad())
              gamma.mutable_grad()[c] += g[i] * (xd[i] - m[c]) * inv_std[c];
            if (beta.requires_grad()) beta.mutable_grad()[c] += g[i];
          }
    });
  }
  return out;
}

Tensor Linear(const Tensor &x, const Tensor &weight, const Tensor &bias) {
  if (x.rank() != 2 || weight.rank() != 2 || bias.rank() != 1 ||
      x.dim(1) != weight.dim(1) || bias.dim(0) != weight.dim(0))
    throw ShapeError("linear: incompatible shapes x=" + ShapeString(x.shape()) +
                     " weight=" + ShapeString(weight.shape()) +
                     " bias=" + ShapeString(bias.shape()));
  const std::size_t batch = x.dim(0), in = x.dim(1), out_dim = weight.dim(0);
  Tensor out({batch, out_dim});
  auto o = out.mutable_data();
  auto xd = x.data(), wd = weight.data(), bd = bias.data();
  for (std::size_t b = 0; b < batch; ++b) {
    const double *xr = &xd[b * in];
    for (std::size_t j = 0; j < out_dim; ++j) {
      const double *wr = &wd[j * in];
      double acc = bd[j];
      for (std::size_t i = 0; i < in; ++i) acc += wr[i] * xr[i];
      o[b * out_dim + j] = acc;
    }
  }
  if (Tape::ShouldRecord({&x, &weight, &bias})) {
    Tape::Record(out, [x, weight, bias, batch, in, out_dim](
                          std::span<const double> g) mutable {
      auto xd = x.data(), wd = weight.data();
      if (bias.requires_grad()) {
        auto gb = bias.mutable_grad();
        for (std::size_t b = 0; b < batch; ++b)
          for (std::size_t j = 0; j < out_dim; ++j) gb[j] += g[b * out_dim + j];
      }
      if (weight.requires_grad()) {
        auto gw = weight.mutable_grad();
        for (std::size_t b = 0; b < batch; ++b) {
          const double *xr = &xd[b * in];
          for (std::size_t j = 0; j < out_dim; ++j) {
            const double go = g[b * out_dim + j];
            if (go == 0.0) continue;
            double *gwr = &gw[j * in];
            for (std::size_t i = 0; i < in; ++i) gwr[i] += go * xr[i];
          }
        }
      }
      if (x.requires_grad()) {
        auto gx = x.mutable_grad();
        for (std::size_t b = 0; b < batch; ++b) {
          double *gxr = &gx[b * in];
          for (std::size_t j = 0; j < out_dim; ++j) {
            const double go = g[b * out_dim + j];
            if (go == 0.0) continue;
            const double *wr = &wd[j * in];
            for (std::size_t i = 0; i < in; ++i) gxr[i] += go * wr[i];
          }
        }
      }
    });
  }
  return out;
}

Tensor DropoutMask(const Shape &shape, double p, Rng &rng) {
  if (!(p >= 0.0 && p < 1.0))
    throw ConfigError("dropout probability must lie in [0, 1), got " +
                      std::to_string(p));
  Tensor mask(shape);
  std::bernoulli_distribution drop(p);
  const double keep_scale = 1.0 / (1.0 - p);
  for (double &m : mask.mutable_data()) m = drop(rng) ? 0.0 : keep_scale;
  return mask;
}

std::vector<double> LogSoftmax(std::span<const double> logits) {
  const auto top = std::max_element(logits.begin(), logits.end());
  const double mx = *top;
  // The max term contributes exactly 1; log1p keeps a confident row's
  // small remainder from being rounded away.
  double rest = 0.0;
  for (auto it = logits.begin(); it != logits.end(); ++it)
    if (it != top) rest += std::exp(*it - mx);
  const double tail = std::log1p(rest);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = (logits[i] - mx) - tail;
  return out;
}

SoftmaxCrossEntropyResult SoftmaxCrossEntropy(
    const Tensor &logits, std::span<const int> targets,
    std::span<const double> class_weights) {
  if (logits.rank() != 2)
    throw ShapeError("softmax cross-entropy: logits must be (batch x classes), got " +
                     ShapeString(logits.shape()));
  const std::size_t batch = logits.dim(0), classes = logits.dim(1);
  if (targets.size() != batch)
    throw ShapeError("softmax cross-entropy: " + std::to_string(targets.size()) +
                     " targets for a batch of " + std::to_string(batch));
  if (!class_weights.empty() && class_weights.size() != classes)
    throw ShapeError("softmax cross-entropy: class weight vector has " +
                     std::to_string(class_weights.size()) + " entries for " +
                     std::to_string(classes) + " classes");
  for (int t : targets)
    if (t < 0 || static_cast<std::size_t>(t) >= classes)
      throw DataError("softmax cross-entropy: target index " + std::to_string(t) +
                      " outside [0, " + std::to_string(classes) + ")");

  SoftmaxCrossEntropyResult result;
  result.probabilities.resize(batch * classes);
  std::vector<double> row_weight(batch, 1.0);
  double total_weight = 0.0, loss = 0.0;
  auto ld = logits.data();
  for (std::size_t b = 0; b < batch; ++b) {
    auto logp = LogSoftmax(ld.subspan(b * classes, classes));
    for (std::size_t c = 0; c < classes; ++c)
      result.probabilities[b * classes + c] = std::exp(logp[c]);
    if (!class_weights.empty()) row_weight[b] = class_weights[targets[b]];
    total_weight += row_weight[b];
    loss -= row_weight[b] * logp[targets[b]];
  }
  if (!(total_weight > 0.0))
    throw NumericError("softmax cross-entropy: total class weight is zero");
  result.loss = Tensor::Scalar(loss / total_weight);

  if (Tape::ShouldRecord({&logits})) {
    std::vector<int> t(targets.begin(), targets.end());
    Tape::Record(result.loss,
                 [logits, probs = result.probabilities, t, row_weight,
                  total_weight, classes](std::span<const double> g) mutable {
                   auto gl = logits.mutable_grad();
                   for (std::size_t b = 0; b < t.size(); ++b) {
                     const double w = g[0] * row_weight[b] / total_weight;
                     for (std::size_t c = 0; c < classes; ++c) {
                       const double onehot =
                           static_cast<int>(c) == t[b] ? 1.0 : 0.0;
                       gl[b * classes + c] += w * (probs[b * classes + c] - onehot);
                     }
                   }
                 });
  }
  return result;
}

// ---------------------------------------------------------------------------

Conv1dLayer::Conv1dLayer(std::size_t in_channels, std::size_t out_channels,
                         std::size_t kernel_width, std::size_t stride, Rng &rng)
    : stride_(stride) {
  if (kernel_width == 0 || stride == 0)
    throw ConfigError("conv1d layer needs kernel_width >= 1 and stride >= 1");
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_channels * kernel_width));
  weight_ = UniformTensor({out_channels, in_channels, kernel_width}, bound, rng);
  bias_ = UniformTensor({out_channels}, bound, rng);
  weight_.set_requires_grad(true);
  bias_.set_requires_grad(true);
}

Tensor Conv1dLayer::Forward(const Tensor &x) const {
  return Conv1d(x, weight_, bias_, stride_);
}

std::size_t Conv1dLayer::OutputLength(std::size_t input_length) const {
  if (input_length < kernel_width()) return 0;
  return (input_length - kernel_width()) / stride_ + 1;
}

void Conv1dLayer::CollectParameters(const std::string &prefix,
                                    std::vector<NamedTensor> *out) const {
  out->push_back({prefix + ".weight", weight_});
  out->push_back({prefix + ".bias", bias_});
}

BatchNormLayer::BatchNormLayer(std::size_t channels, double momentum, double eps)
    : gamma_({channels}, 1.0),
      beta_({channels}, 0.0),
      running_mean_({channels}, 0.0),
      running_var_({channels}, 1.0),
      momentum_(momentum),
      eps_(eps) {
  gamma_.set_requires_grad(true);
  beta_.set_requires_grad(true);
}

Tensor BatchNormLayer::Forward(const Tensor &x, Mode mode,
                               BatchStats *stats) const {
  if (mode == Mode::kTrain) return BatchNormTrain(x, gamma_, beta_, eps_, stats);
  return BatchNormEval(x, gamma_, beta_, running_mean_.data(),
                       running_var_.data(), eps_);
}

void BatchNormLayer::UpdateRunningStats(const BatchStats &stats) {
  if (stats.mean.size() != channels() || stats.var.size() != channels())
    throw ShapeError("batchnorm: statistics do not match channel count");
  const double unbias = stats.count > 1
                            ? static_cast<double>(stats.count) /
                                  static_cast<double>(stats.count - 1)
                            : 1.0;
  auto rm = running_mean_.mutable_data();
  auto rv = running_var_.mutable_data();
  for (std::size_t c = 0; c < channels(); ++c) {
    rm[c] = (1.0 - momentum_) * rm[c] + momentum_ * stats.mean[c];
    rv[c] = (1.0 - momentum_) * rv[c] + momentum_ * stats.var[c] * unbias;
  }
}

void BatchNormLayer::CollectParameters(const std::string &prefix,
                                       std::vector<NamedTensor> *out) const {
  out->push_back({prefix + ".gamma", gamma_});
  out->push_back({prefix + ".beta", beta_});
}

void BatchNormLayer::CollectBuffers(const std::string &prefix,
                                    std::vector<NamedTensor> *out) const {
  out->push_back({prefix + ".running_mean", running_mean_});
  out->push_back({prefix + ".running_var", running_var_});
}

LinearLayer::LinearLayer(std::size_t in_features, std::size_t out_features,
                         Rng &rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_features));
  weight_ = UniformTensor({out_features, in_features}, bound, rng);
  bias_ = UniformTensor({out_features}, bound, rng);
  weight_.set_requires_grad(true);
  bias_.set_requires_grad(true);
}

void LinearLayer::CollectParameters(const std::string &prefix,
                                    std::vector<NamedTensor> *out) const {
  out->push_back({prefix + ".weight", weight_});
  out->push_back({prefix + ".bias", bias_});
}

LstmLayer::LstmLayer(std::size_t input_size, std::size_t hidden_size, Rng &rng) {
  weight_ih_ = UniformTensor({4 * hidden_size, input_size},
                             1.0 / std::sqrt(static_cast<double>(input_size)), rng);
  weight_hh_ = UniformTensor({4 * hidden_size, hidden_size},
                             1.0 / std::sqrt(static_cast<double>(hidden_size)), rng);
  bias_ih_ = Tensor({4 * hidden_size}, 0.0);
  bias_hh_ = Tensor({4 * hidden_size}, 0.0);
  auto forget = bias_ih_.mutable_data().subspan(hidden_size, hidden_size);
  std::fill(forget.begin(), forget.end(), 1.0);
  for (Tensor *t : {&weight_ih_, &weight_hh_, &bias_ih_, &bias_hh_})
    t->set_requires_grad(true);
}

std::vector<Tensor> LstmLayer::Forward(std::span<const Tensor> inputs) const {
  if (inputs.empty()) throw ShapeError("lstm: empty input sequence");
  const std::size_t batch = inputs[0].dim(0), h = hidden_size();
  Tensor hidden({batch, h}, 0.0), cell({batch, h}, 0.0);
  std::vector<Tensor> outputs;
  outputs.reserve(inputs.size());
  for (const Tensor &x : inputs) {
    Tensor z = Add(Linear(x, weight_ih_, bias_ih_),
                   Linear(hidden, weight_hh_, bias_hh_));
    Tensor in_gate = Sigmoid(Slice(z, 1, 0, h));
    Tensor forget_gate = Sigmoid(Slice(z, 1, h, 2 * h));
    Tensor candidate = Tanh(Slice(z, 1, 2 * h, 3 * h));
    Tensor out_gate = Sigmoid(Slice(z, 1, 3 * h, 4 * h));
    cell = Add(Mul(forget_gate, cell), Mul(in_gate, candidate));
    hidden = Mul(out_gate, Tanh(cell));
    outputs.push_back(hidden);
  }
  return outputs;
}

void LstmLayer::CollectParameters(const std::string &prefix,
                                  std::vector<NamedTensor> *out) const {
  out->push_back({prefix + ".weight_ih", weight_ih_});
  out->push_back({prefix + ".weight_hh", weight_hh_});
  out->push_back({prefix + ".bias_ih", bias_ih_});
  out->push_back({prefix + ".bias_hh", bias_hh_});
}

DropoutLayer::DropoutLayer(double p) : p_(p) {
  if (!(p >= 0.0 && p < 1.0))
    throw ConfigError("dropout probability must lie in [0, 1), got " +
                      std::to_string(p));
}

Tensor DropoutLayer::Forward(const Tensor &x, Mode mode, Rng *rng) const {
  if (mode == Mode::kEval || p_ == 0.0) return x;
  if (rng == nullptr) throw Error("dropout in training mode needs an rng");
  return Mul(x, DropoutMask(x.shape(), p_, *rng));
}

}  // namespace rawspoof
