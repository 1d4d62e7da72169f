// tests/trainer_test.cc

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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.h"
#include "rawspoof/errors.h"
#include "rawspoof/gradient_suite.h"
#include "rawspoof/run_config.h"
#include "rawspoof/trainer.h"

namespace rawspoof {
namespace {

TEST(Adadelta, FirstStepByHand) {
  std::vector<double> x{0.0}, g{1.0}, eg{0.0}, ed{0.0};
  AdadeltaUpdate(x, g, eg, ed, 0.95, 1e-6);
  EXPECT_NEAR(eg[0], 0.05, 1e-15);
  const double delta = -std::sqrt(1e-6) / std::sqrt(0.050001);
  EXPECT_NEAR(x[0], delta, 1e-15);
  EXPECT_NEAR(x[0], -0.0044721, 1e-7);
  EXPECT_NEAR(ed[0], 0.05 * delta * delta, 1e-18);
}

TEST(Adadelta, ZeroGradientLeavesParameterAndDecaysAccumulator) {
  std::vector<double> x{1.5, -2.0}, g{0.0, 0.0}, eg{0.4, 0.2}, ed{0.1, 0.3};
  AdadeltaUpdate(x, g, eg, ed, 0.95, 1e-6);
  EXPECT_EQ(x, (std::vector<double>{1.5, -2.0}));
  EXPECT_DOUBLE_EQ(eg[0], 0.95 * 0.4);
  EXPECT_DOUBLE_EQ(eg[1], 0.95 * 0.2);
  EXPECT_DOUBLE_EQ(ed[0], 0.95 * 0.1);
}

TEST(Adadelta, QuadraticTrajectoryMatchesOracle) {
  const double a = 3.0, c = 1.25, x0 = -2.0;
  const auto expect = oracle::AdadeltaQuadratic(x0, a, c, 0.95, 1e-6, 20);
  std::vector<double> x{x0}, eg{0.0}, ed{0.0};
  for (int i = 0; i < 20; ++i) {
    std::vector<double> g{a * (x[0] - c)};
    AdadeltaUpdate(x, g, eg, ed, 0.95, 1e-6);
    EXPECT_NEAR(x[0], expect.x[i], 1e-12) << "step " << i;
    EXPECT_NEAR(eg[0], expect.sq_grad[i], 1e-12);
    EXPECT_NEAR(ed[0], expect.sq_update[i], 1e-12);
  }
}

TEST(Adadelta, StepAbortsOnNonFiniteGradient) {
  Tensor a({2}, {1.0, 2.0}), b({1}, {3.0});
  a.set_requires_grad(true);
  b.set_requires_grad(true);
  a.mutable_grad()[0] = 0.5;
  b.mutable_grad()[0] = std::numeric_limits<double>::quiet_NaN();
  std::vector<NamedTensor> params{{"layer.a", a}, {"layer.b", b}};
  AdadeltaState state = AdadeltaState::For(params);
  try {
    AdadeltaStep(params, &state);
    FAIL() << "expected NumericError";
  } catch (const NumericError &e) {
    EXPECT_NE(std::string(e.what()).find("layer.b"), std::string::npos);
  }
  // Nothing moved, including the finite parameter.
  EXPECT_EQ(a.data()[0], 1.0);
  EXPECT_EQ(state.sq_grad[0][0], 0.0);
}

TEST(TrainConfig, Validation) {
  TrainConfig c;
  EXPECT_NO_THROW(c.Validate());
  c.batch_size = 1;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = TrainConfig{};
  c.rho = 1.0;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = TrainConfig{};
  c.class_weights = {1, 2};
  EXPECT_THROW(c.Validate(), ConfigError);
}

std::vector<PreparedUtterance> RandomUtterances(std::size_t per_class, std::size_t frames,
                                                std::size_t frame_len, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> n;
  std::vector<PreparedUtterance> out;
  for (int c = 0; c < kNumClasses; ++c)
    for (std::size_t i = 0; i < per_class; ++i) {
      PreparedUtterance u;
      u.id = "u" + std::to_string(c) + "_" + std::to_string(i);
      u.label = static_cast<Label>(c);
      u.category = c == 0 ? "" : "cat" + std::to_string(c);
      for (std::size_t f = 0; f < frames; ++f) {
        std::vector<double> frame(frame_len);
        // Class-dependent offset makes the task learnable.
        for (double &v : frame) v = n(rng) + 0.8 * c;
        u.frames.push_back(frame);
      }
      out.push_back(u);
    }
  return out;
}

TEST(Train, PatienceStopsAfterNonImprovingEpoch) {
  Rng rng(1);
  CldnnModel model = CldnnModel::Build(TinyModelConfig(), rng);
  const auto train = RandomUtterances(2, 4, 40, 2);
  TrainConfig config;
  config.batch_size = 4;
  config.max_epochs = 10;
  config.patience = 1;
  TrainHooks hooks;
  hooks.dev_evaluator = [](const CldnnModel &, std::size_t epoch) {
    DevResult r;
    r.metric = epoch == 1 ? 0.2 : 0.3;
    r.loss = 1.0;
    return r;
  };
  const TrainResult result = Train(model, train, {}, config, hooks);
  EXPECT_EQ(result.history.size(), 2u);
  EXPECT_TRUE(result.stopped_early);
  EXPECT_EQ(result.best.meta.epoch, 1u);
  EXPECT_DOUBLE_EQ(result.best.meta.dev_metric, 20.0);
}

TEST(Train, DevLossBreaksMetricTies) {
  Rng rng(1);
  CldnnModel model = CldnnModel::Build(TinyModelConfig(), rng);
  const auto train = RandomUtterances(2, 4, 40, 2);
  TrainConfig config;
  config.batch_size = 4;
  config.max_epochs = 4;
  config.patience = 4;
  TrainHooks hooks;
  const std::vector<double> losses{0.9, 0.5, 0.7, 0.5};
  hooks.dev_evaluator = [&](const CldnnModel &, std::size_t epoch) {
    DevResult r;
    r.metric = 0.1;
    r.loss = losses[epoch - 1];
    return r;
  };
  std::vector<std::size_t> seen;
  hooks.on_epoch = [&](const EpochRecord &rec) { seen.push_back(rec.epoch); };
  const TrainResult result = Train(model, train, {}, config, hooks);
  EXPECT_EQ(result.best.meta.epoch, 2u);
  EXPECT_EQ(seen, (std::vector<std::size_t>{1, 2, 3, 4}));
  EXPECT_FALSE(result.stopped_early);
}

TEST(Train, SeededRunsAreBitIdentical) {
  const auto train = RandomUtterances(3, 5, 40, 4);
  const auto dev = RandomUtterances(2, 4, 40, 5);
  TrainConfig config;
  config.batch_size = 4;
  config.max_epochs = 3;
  config.seed = 17;
  std::vector<std::string> lines[2];
  for (int run = 0; run < 2; ++run) {
    Rng rng(config.seed);
    CldnnModel model = CldnnModel::Build(TinyModelConfig(), rng);
    const TrainResult r = Train(model, train, dev, config);
    for (const auto &rec : r.history) lines[run].push_back(FormatHistoryLine(rec));
  }
  EXPECT_EQ(lines[0], lines[1]);
  EXPECT_EQ(lines[0].size(), 3u);
}

TEST(Train, LossFallsOnLearnableData) {
  const auto train = RandomUtterances(6, 5, 40, 6);
  TrainConfig config;
  config.batch_size = 8;
  config.max_epochs = 15;
  config.patience = 15;
  ModelConfig mc = TinyModelConfig();
  mc.dropout_p = 0.0;
  Rng rng(3);
  CldnnModel model = CldnnModel::Build(mc, rng);
  const TrainResult r = Train(model, train, train, config);
  EXPECT_LT(r.history.back().loss, r.history.front().loss);
}

TEST(Train, WarnsAboutMissingClasses) {
  auto train = RandomUtterances(2, 4, 40, 7);
  train.erase(std::remove_if(train.begin(), train.end(),
                             [](const auto &u) { return u.label == Label::kVC; }),
              train.end());
  TrainConfig config;
  config.batch_size = 4;
  config.max_epochs = 1;
  Rng rng(1);
  CldnnModel model = CldnnModel::Build(TinyModelConfig(), rng);
  const TrainResult r = Train(model, train, train, config);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("VC"), std::string::npos);
}

TEST(EvaluateDev, BinaryLossAndMetric) {
  Rng rng(2);
  const CldnnModel model = CldnnModel::Build(TinyModelConfig(), rng);
  const auto dev = RandomUtterances(2, 3, 40, 9);
  const DevResult r = EvaluateDev(model, dev, 1);
  const auto scores = ScoreUtterances(model, dev, 1);
  double loss = 0.0;
  for (std::size_t i = 0; i < dev.size(); ++i) {
    const double p = std::exp(scores[i].score);
    loss -= dev[i].label == Label::kGenuine ? std::log(p) : std::log1p(-p);
  }
  EXPECT_NEAR(r.loss, loss / static_cast<double>(dev.size()), 1e-9);
  EXPECT_DOUBLE_EQ(r.metric, (r.far + r.frr) / 2);
}

TEST(History, FormatIsOrderedJson) {
  EpochRecord rec;
  rec.epoch = 3;
  rec.loss = 0.5;
  rec.dev = {0.25, 0.0, 0.125, 1.5};
  rec.elapsed_seconds = 12.0;
  EXPECT_EQ(FormatHistoryLine(rec),
            R"({"epoch":3,"loss":0.5,"dev_far":0.25,"dev_frr":0.0,"dev_metric":0.125,"dev_loss":1.5})");
}

TEST(RunConfig, PresetThenOverrides) {
  const RunConfig c = ParseRunConfig("preset=cldnn1\nlstm_size=16\nmax_epochs=3\n");
  EXPECT_EQ(c.model.freq_maps, 256u);
  EXPECT_EQ(c.model.lstm_size, 16u);
  EXPECT_EQ(c.train.max_epochs, 3u);
  // The preset applies first even if it appears late.
  const RunConfig d = ParseRunConfig("lstm_size=16\npreset=cldnn2\n");
  EXPECT_EQ(d.model.lstm_size, 16u);
  EXPECT_EQ(d.model.freq_maps, 128u);
}

TEST(RunConfig, Errors) {
  EXPECT_THROW(ParseRunConfig("preset=cldnn9\n"), ConfigError);
  EXPECT_THROW(ParseRunConfig("no_such_key=1\n"), ConfigError);
  EXPECT_THROW(ParseRunConfig("seq_len=abc\n"), ConfigError);
  EXPECT_THROW(ParseRunConfig("dropout_p=1.5\n"), ConfigError);
  EXPECT_THROW(ParseRunConfig("gmm_num_components=0\n"), ConfigError);
}

TEST(RunConfig, ToTextReparses) {
  RunConfig c = ParseRunConfig("freq_maps=16\nclass_weights=1,2,3,4\nfeat_cmvn=false\n");
  const RunConfig d = ParseRunConfig(c.ToText());
  EXPECT_EQ(d.model.freq_maps, 16u);
  EXPECT_EQ(d.train.class_weights, (std::vector<double>{1, 2, 3, 4}));
  EXPECT_FALSE(d.features.cmvn);
}

}  // namespace
}  // namespace rawspoof
