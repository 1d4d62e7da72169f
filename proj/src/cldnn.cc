// src/cldnn.cc

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

#include "rawspoof/cldnn.h"

#include <algorithm>
#include <sstream>

#include "rawspoof/errors.h"
#include "rawspoof/record_file.h"

namespace rawspoof {

ModelConfig ModelConfig::Cldnn1() {
  ModelConfig c;
  c.freq_maps = 256;
  c.lstm_size = 256;
  c.dnn_hidden = 512;
  return c;
}

ModelConfig ModelConfig::Cldnn2() {
  ModelConfig c;
  c.freq_maps = 128;
  c.lstm_size = 128;
  c.dnn_hidden = 256;
  return c;
}

void ModelConfig::Register(ConfigFields *fields) {
  fields->Add("n_time_filters", &n_time_filters);
  fields->Add("time_kernel", &time_kernel);
  fields->Add("time_stride", &time_stride);
  fields->Add("frame_len", &frame_len);
  fields->Add("frame_hop", &frame_hop);
  fields->Add("freq_maps", &freq_maps);
  fields->Add("freq_kernel", &freq_kernel);
  fields->Add("freq_pool", &freq_pool);
  fields->Add("lstm_size", &lstm_size);
  fields->Add("lstm_layers", &lstm_layers);
  fields->Add("dnn_hidden", &dnn_hidden);
  fields->Add("n_classes", &n_classes);
  fields->Add("dropout_p", &dropout_p);
  fields->Add("seq_len", &seq_len);
  fields->Add("bn_momentum", &bn_momentum);
  fields->Add("bn_eps", &bn_eps);
}

void ModelConfig::Validate() const {
  auto fail = [](const std::string &msg) { throw ConfigError("model config: " + msg); };
  if (n_time_filters == 0 || time_kernel == 0 || time_stride == 0 ||
      frame_len == 0 || freq_maps == 0 || freq_kernel == 0 || freq_pool == 0 ||
      lstm_size == 0 || dnn_hidden == 0 || seq_len == 0)
    fail("all sizes must be >= 1");
  if (n_classes != 4) fail("n_classes must be 4 (genuine, SS, VC, RE)");
  if (lstm_layers != 2) fail("lstm_layers is fixed at 2");
  if (frame_len < time_kernel)
    fail("frame_len " + std::to_string(frame_len) + " shorter than time_kernel " +
         std::to_string(time_kernel));
  if (freq_kernel > n_time_filters)
    fail("freq_kernel " + std::to_string(freq_kernel) + " exceeds the " +
         std::to_string(n_time_filters) + " time filters");
  if (FreqConvLength() < freq_pool)
    fail("frequency conv output length " + std::to_string(FreqConvLength()) +
         " shorter than freq_pool " + std::to_string(freq_pool));
  if (!(dropout_p >= 0.0 && dropout_p < 1.0)) fail("dropout_p must lie in [0, 1)");
  if (!(bn_momentum > 0.0 && bn_momentum <= 1.0)) fail("bn_momentum must lie in (0, 1]");
  if (!(bn_eps > 0.0)) fail("bn_eps must be positive");
}

std::size_t ModelConfig::TimePositions() const {
  return (frame_len - time_kernel) / time_stride + 1;
}

std::size_t ModelConfig::FreqConvLength() const {
  return n_time_filters - freq_kernel + 1;
}

std::size_t ModelConfig::FreqPooledLength() const {
  return FreqConvLength() / freq_pool;
}

std::size_t ModelConfig::FrameFeatureDim() const {
  return freq_maps * FreqPooledLength();
}

CldnnModel CldnnModel::Build(const ModelConfig &config, Rng &rng) {
  config.Validate();
  CldnnModel m;
  m.config_ = config;
  m.time_conv_ = Conv1dLayer(1, config.n_time_filters, config.time_kernel,
                             config.time_stride, rng);
  m.time_bn_ = BatchNormLayer(config.n_time_filters, config.bn_momentum, config.bn_eps);
  m.freq_conv_ = Conv1dLayer(1, config.freq_maps, config.freq_kernel, 1, rng);
  m.freq_bn_ = BatchNormLayer(config.freq_maps, config.bn_momentum, config.bn_eps);
  m.lstm1_ = LstmLayer(config.FrameFeatureDim(), config.lstm_size, rng);
  m.lstm2_ = LstmLayer(config.lstm_size, config.lstm_size, rng);
  m.drop_lstm1_ = DropoutLayer(config.dropout_p);
  m.drop_lstm2_ = DropoutLayer(config.dropout_p);
  m.drop_dnn_ = DropoutLayer(config.dropout_p);
  m.dnn_hidden_ = LinearLayer(config.lstm_size, config.dnn_hidden, rng);
  m.output_ = LinearLayer(config.dnn_hidden, config.n_classes, rng);
  return m;
}

Tensor CldnnModel::FrameFeatures(const Tensor &frames, Mode mode,
                                 std::vector<BatchStats> *stats) const {
  if (frames.rank() != 2 || frames.dim(1) != config_.frame_len)
    throw ShapeError("frame features: expected (frames x " +
                     std::to_string(config_.frame_len) + "), got " +
                     ShapeString(frames.shape()));
  const std::size_t count = frames.dim(0);
  BatchStats time_stats, freq_stats;
  const bool train = mode == Mode::kTrain;

  Tensor x = Reshape(frames, {count, 1, config_.frame_len});
  x = time_conv_.Forward(x);
  x = time_bn_.Forward(x, mode, train ? &time_stats : nullptr);
  x = Relu(x);
  x = MaxPool1d(x, config_.TimePositions());  // count x 39 x 1
  x = Reshape(x, {count, 1, config_.n_time_filters});
  x = freq_conv_.Forward(x);
  x = freq_bn_.Forward(x, mode, train ? &freq_stats : nullptr);
  x = Relu(x);
  x = MaxPool1d(x, config_.freq_pool);
  x = Reshape(x, {count, config_.FrameFeatureDim()});
  if (train && stats != nullptr) {
    stats->push_back(std::move(time_stats));
    stats->push_back(std::move(freq_stats));
  }
  return x;
}

std::vector<double> CldnnModel::ForwardFrame(std::span<const double> frame) const {
  if (frame.size() != config_.frame_len)
    throw ShapeError("frame has " + std::to_string(frame.size()) +
                     " samples, model expects " + std::to_string(config_.frame_len));
  Tensor in({1, config_.frame_len}, std::vector<double>(frame.begin(), frame.end()));
  Tensor f = FrameFeatures(in, Mode::kEval);
  return {f.data().begin(), f.data().end()};
}

Tensor CldnnModel::Forward(std::span<const FrameSequence> batch, Mode mode,
                           Rng *rng, std::vector<BatchStats> *stats) const {
  if (batch.empty()) throw ShapeError("forward: empty batch");
  const std::size_t b_count = batch.size();
  const std::size_t steps = batch[0].num_frames;
  if (steps == 0) throw DataError("forward: empty sequence " + batch[0].utterance_id);
  const std::size_t n = config_.frame_len;
  for (const auto &seq : batch) {
    if (seq.num_frames != steps)
      throw ShapeError("forward: sequences in one batch must share a length");
    if (seq.frame_length != n)
      throw ShapeError("forward: sequence " + seq.utterance_id + " has frame length " +
                       std::to_string(seq.frame_length) + ", model expects " +
                       std::to_string(n));
    if (seq.frames.size() != steps * n)
      throw ShapeError("forward: sequence " + seq.utterance_id + " is malformed");
  }
  if (mode == Mode::kTrain && steps != config_.seq_len)
    throw ShapeError("forward: training sequences must have S = " +
                     std::to_string(config_.seq_len) + ", got " + std::to_string(steps));

  // Time-major rows: row t * B + b holds frame t of sequence b, so each
  // time-step is one contiguous slice.
  Tensor frames({steps * b_count, n});
  auto fd = frames.mutable_data();
  for (std::size_t t = 0; t < steps; ++t)
    for (std::size_t b = 0; b < b_count; ++b) {
      auto src = batch[b].frame(t);
      std::copy(src.begin(), src.end(), &fd[(t * b_count + b) * n]);
    }
  Tensor features = FrameFeatures(frames, mode, stats);

  std::vector<Tensor> inputs;
  inputs.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t)
    inputs.push_back(Slice(features, 0, t * b_count, (t + 1) * b_count));
  std::vector<Tensor> h1 = lstm1_.Forward(inputs);
  for (Tensor &h : h1) h = drop_lstm1_.Forward(h, mode, rng);
  std::vector<Tensor> h2 = lstm2_.Forward(h1);
  Tensor last = drop_lstm2_.Forward(h2.back(), mode, rng);
  Tensor hidden = Relu(dnn_hidden_.Forward(last));
  hidden = drop_dnn_.Forward(hidden, mode, rng);
  return output_.Forward(hidden);
}

Tensor CldnnModel::ForwardTrain(std::span<const FrameSequence> batch, Rng &rng) {
  std::vector<BatchStats> stats;
  Tensor logits = Forward(batch, Mode::kTrain, &rng, &stats);
  time_bn_.UpdateRunningStats(stats.at(0));
  freq_bn_.UpdateRunningStats(stats.at(1));
  return logits;
}

std::vector<double> CldnnModel::Logits(const FrameSequence &sequence) const {
  Tensor logits = Forward(std::span<const FrameSequence>(&sequence, 1), Mode::kEval,
                          nullptr);
  return {logits.data().begin(), logits.data().end()};
}

double CldnnModel::Score(const FrameSequence &sequence) const {
  return GenuineScore(Logits(sequence));
}

std::vector<NamedTensor> CldnnModel::Parameters() const {
  std::vector<NamedTensor> p;
  time_conv_.CollectParameters("time_conv", &p);
  time_bn_.CollectParameters("time_bn", &p);
  freq_conv_.CollectParameters("freq_conv", &p);
  freq_bn_.CollectParameters("freq_bn", &p);
  lstm1_.CollectParameters("lstm1", &p);
  lstm2_.CollectParameters("lstm2", &p);
  dnn_hidden_.CollectParameters("dnn_hidden", &p);
  output_.CollectParameters("output", &p);
  return p;
}

std::vector<NamedTensor> CldnnModel::Buffers() const {
  std::vector<NamedTensor> b;
  time_bn_.CollectBuffers("time_bn", &b);
  freq_bn_.CollectBuffers("freq_bn", &b);
  return b;
}

std::size_t CldnnModel::ParameterCount() const {
  std::size_t n = 0;
  for (const auto &p : Parameters()) n += p.tensor.size();
  return n;
}

namespace {

void CopyValues(const std::vector<NamedTensor> &from, std::vector<NamedTensor> &to) {
  for (std::size_t i = 0; i < from.size(); ++i) {
    auto src = from[i].tensor.data();
    auto dst = to[i].tensor.mutable_data();
    std::copy(src.begin(), src.end(), dst.begin());
  }
}

}  // namespace

CldnnModel CldnnModel::Clone() const {
  Rng scratch(0);
  CldnnModel copy = Build(config_, scratch);
  auto dst_params = copy.Parameters();
  CopyValues(Parameters(), dst_params);
  auto dst_buffers = copy.Buffers();
  CopyValues(Buffers(), dst_buffers);
  return copy;
}

std::string CldnnModel::ShapeSummary() const {
  const ModelConfig &c = config_;
  std::ostringstream os;
  os << "frame            " << c.frame_len << " samples\n"
     << "time conv        " << c.n_time_filters << " x 1 x " << c.time_kernel
     << " stride " << c.time_stride << " -> " << c.n_time_filters << " x "
     << c.TimePositions() << "\n"
     << "time max-pool    width " << c.TimePositions() << " -> " << c.n_time_filters
     << "\n"
     << "freq conv        " << c.freq_maps << " x 1 x " << c.freq_kernel << " -> "
     << c.freq_maps << " x " << c.FreqConvLength() << "\n"
     << "freq max-pool    width " << c.freq_pool << " -> " << c.freq_maps << " x "
     << c.FreqPooledLength() << " = " << c.FrameFeatureDim() << "\n"
     << "lstm1            " << c.FrameFeatureDim() << " -> " << c.lstm_size << "\n"
     << "lstm2            " << c.lstm_size << " -> " << c.lstm_size << "\n"
     << "dnn              " << c.lstm_size << " -> " << c.dnn_hidden << "\n"
     << "output           " << c.dnn_hidden << " -> " << c.n_classes << "\n"
     << "parameters       " << ParameterCount() << "\n";
  return os.str();
}

double GenuineScore(std::span<const double> logits) {
  if (logits.empty()) throw ShapeError("score: empty logit vector");
  return LogSoftmax(logits)[static_cast<int>(Label::kGenuine)];
}

void SaveCheckpoint(const CldnnModel &model, const CheckpointMeta &meta,
                    const std::filesystem::path &path) {
  ModelConfig config = model.config();
  ConfigFields fields;
  config.Register(&fields);
  RecordFile file;
  file.text = "kind=cldnn\n[model]\n" + fields.ToText() + "[meta]\nepoch=" +
              std::to_string(meta.epoch) + "\nseed=" + std::to_string(meta.seed) +
              "\ndev_metric=" + FormatDouble(meta.dev_metric) + "\n";
  for (const auto &p : model.Parameters())
    file.arrays.push_back(ToNamedArray(p.name, p.tensor));
  for (const auto &b : model.Buffers())
    file.arrays.push_back(ToNamedArray(b.name, b.tensor));
  WriteRecordFile(path, file);
}

Checkpoint LoadCheckpoint(const std::filesystem::path &path) {
  RecordFile file = ReadRecordFile(path);
  auto sections = SplitSections(file.text);
  if (sections[""].find("kind=cldnn") == std::string::npos)
    throw DataError(path.string() + ": not a CLDNN checkpoint");
  ModelConfig config;
  {
    ConfigFields fields;
    config.Register(&fields);
    fields.Parse(sections["model"], path.string() + " [model]");
  }
  CheckpointMeta meta;
  {
    ConfigFields fields;
    fields.Add("epoch", &meta.epoch);
    fields.Add("seed", &meta.seed);
    fields.Add("dev_metric", &meta.dev_metric);
    fields.Parse(sections["meta"], path.string() + " [meta]");
  }

  Rng scratch(0);
  Checkpoint ckpt{CldnnModel::Build(config, scratch), meta};
  auto assign = [&](const std::vector<NamedTensor> &targets) {
    for (const auto &t : targets) {
      const NamedArray *a = file.Find(t.name);
      if (a == nullptr)
        throw DataError(path.string() + ": missing parameter " + t.name);
      if (a->shape != t.tensor.shape())
        throw DataError(path.string() + ": shape mismatch for parameter " + t.name +
                        ": file has " + ShapeString(a->shape) + ", config needs " +
                        ShapeString(t.tensor.shape()));
      Tensor dst = t.tensor;
      auto d = dst.mutable_data();
      for (std::size_t i = 0; i < d.size(); ++i) d[i] = a->values[i];
    }
  };
  auto params = ckpt.model.Parameters();
  auto buffers = ckpt.model.Buffers();
  assign(params);
  assign(buffers);
  if (file.arrays.size() != params.size() + buffers.size())
    throw DataError(path.string() + ": unexpected extra records in checkpoint");
  return ckpt;
}

}  // namespace rawspoof
