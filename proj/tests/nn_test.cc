// tests/nn_test.cc

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
#include <random>

#include "oracles.h"
#include "rawspoof/errors.h"
#include "rawspoof/gradient_suite.h"
#include "rawspoof/nn.h"

namespace rawspoof {
namespace {

std::vector<double> Values(const Tensor &t) { return {t.data().begin(), t.data().end()}; }

Tensor Filled(Shape shape, Rng &rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Tensor t(std::move(shape));
  for (double &v : t.mutable_data()) v = n(rng);
  return t;
}

TEST(Conv1d, HandSum) {
  Tensor x({1, 1, 3}, {1, 2, 3});
  Tensor w({1, 1, 2}, {1, 1});
  Tensor b({1}, {0.0});
  EXPECT_EQ(Values(Conv1d(x, w, b, 1)), (std::vector<double>{3, 5}));
}

TEST(Conv1d, DeltaKernelCopiesPrefix) {
  Tensor x({1, 1, 6}, {4, -1, 2, 8, 0, 3});
  Tensor w({1, 1, 3}, {1, 0, 0});
  Tensor b({1}, {0.0});
  EXPECT_EQ(Values(Conv1d(x, w, b, 1)), (std::vector<double>{4, -1, 2, 8}));
}

TEST(Conv1d, RawWaveformGeometryHasTwoPositions) {
  Rng rng(1);
  Tensor x = Filled({1, 1, 560}, rng);
  Tensor w = Filled({39, 1, 400}, rng);
  Tensor b = Filled({39}, rng);
  Tensor y = Conv1d(x, w, b, 160);
  EXPECT_EQ(y.shape(), (Shape{1, 39, 2}));
  const auto expect = oracle::Conv1d(Values(x), 1, 1, 560, Values(w), 39, 400, Values(b), 160);
  for (std::size_t i = 0; i < expect.size(); ++i) EXPECT_NEAR(y.data()[i], expect[i], 1e-12);
}

TEST(Conv1d, MatchesNaiveLoopsOnRandomShapes) {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<std::size_t> small(1, 4), kern(1, 9), strd(1, 5),
        extra(0, 30);
    const std::size_t batch = small(rng), in = small(rng), out = small(rng);
    const std::size_t k = kern(rng), stride = strd(rng), len = k + extra(rng);
    Tensor x = Filled({batch, in, len}, rng);
    Tensor w = Filled({out, in, k}, rng);
    Tensor b = Filled({out}, rng);
    const auto y = Values(Conv1d(x, w, b, stride));
    const auto expect =
        oracle::Conv1d(Values(x), batch, in, len, Values(w), out, k, Values(b), stride);
    ASSERT_EQ(y.size(), expect.size()) << "trial " << trial;
    for (std::size_t i = 0; i < y.size(); ++i)
      ASSERT_NEAR(y[i], expect[i], 1e-12) << "trial " << trial;
  }
}

TEST(Conv1d, RejectsShortInputAndChannelMismatch) {
  Tensor b({1}, 0.0);
  EXPECT_THROW(Conv1d(Tensor({1, 1, 3}), Tensor({1, 1, 4}), b, 1), ShapeError);
  EXPECT_THROW(Conv1d(Tensor({1, 2, 8}), Tensor({1, 1, 4}), b, 1), ShapeError);
}

TEST(Conv1dLayer, OutputLength) {
  Rng rng(0);
  Conv1dLayer layer(1, 39, 400, 160, rng);
  EXPECT_EQ(layer.OutputLength(560), 2u);
  EXPECT_EQ(layer.OutputLength(720), 3u);
}

TEST(MaxPool, Examples) {
  EXPECT_EQ(Values(MaxPool1d(Tensor({1, 1, 4}, {1, 3, 2, 5}), 2)),
            (std::vector<double>{3, 5}));
  EXPECT_EQ(Values(MaxPool1d(Tensor({1, 1, 5}, {1, 9, 2, 5, 4}), 5)),
            (std::vector<double>{9}));
  // Trailing remainder is dropped.
  EXPECT_EQ(Values(MaxPool1d(Tensor({1, 1, 5}, {1, 3, 2, 5, 99}), 2)),
            (std::vector<double>{3, 5}));
  EXPECT_THROW(MaxPool1d(Tensor({1, 1, 2}), 3), ShapeError);
}

TEST(MaxPool, TieRoutesGradientToFirstIndex) {
  Tape tape;
  Tensor x({1, 1, 2}, {2.0, 2.0});
  x.set_requires_grad(true);
  Tensor y = MaxPool1d(x, 2);
  EXPECT_EQ(y.data()[0], 2.0);
  tape.Backward(Sum(y));
  EXPECT_EQ(Values(Tensor({2}, {x.grad()[0], x.grad()[1]})), (std::vector<double>{1, 0}));
}

TEST(BatchNorm, TrainModeStandardizes) {
  // Channel values with mean 7 and population variance 4.
  Tensor x({4, 1, 2}, {5, 9, 5, 9, 5, 9, 5, 9});
  Tensor g({1}, 1.0), b({1}, 0.0);
  BatchStats stats;
  Tensor y = BatchNormTrain(x, g, b, 1e-12, &stats);
  EXPECT_NEAR(stats.mean[0], 7.0, 1e-12);
  EXPECT_NEAR(stats.var[0], 4.0, 1e-12);
  EXPECT_EQ(stats.count, 8u);
  double mean = 0, sq = 0;
  for (double v : y.data()) mean += v;
  mean /= 8;
  for (double v : y.data()) sq += (v - mean) * (v - mean);
  EXPECT_NEAR(mean, 0.0, 1e-12);
  EXPECT_NEAR(sq / 8, 1.0, 1e-9);
}

TEST(BatchNorm, SingleValuePerChannelIsRejectedInTrainMode) {
  BatchNormLayer bn(3);
  EXPECT_THROW(bn.Forward(Tensor({1, 3}), Mode::kTrain), Error);
  EXPECT_NO_THROW(bn.Forward(Tensor({1, 3}), Mode::kEval));
}

TEST(BatchNorm, RunningStatisticsUseUnbiasedVariance) {
  BatchNormLayer bn(1, 0.5);
  BatchStats stats;
  bn.Forward(Tensor({2, 1}, {1.0, 3.0}), Mode::kTrain, &stats);
  bn.UpdateRunningStats(stats);
  EXPECT_DOUBLE_EQ(bn.running_mean().data()[0], 0.5 * 0.0 + 0.5 * 2.0);
  // Population variance 1, unbiased 2; running starts at 1.
  EXPECT_DOUBLE_EQ(bn.running_var().data()[0], 0.5 * 1.0 + 0.5 * 2.0);
}

TEST(BatchNorm, EvalModeIsBatchIndependent) {
  Rng rng(5);
  BatchNormLayer bn(2);
  Tensor one({1, 2}, {0.3, -0.4});
  Tensor many({3, 2}, {0.3, -0.4, 9, 9, -7, 2});
  const auto a = Values(bn.Forward(one, Mode::kEval));
  const auto b = Values(bn.Forward(many, Mode::kEval));
  EXPECT_EQ(a[0], b[0]);
  EXPECT_EQ(a[1], b[1]);
}

TEST(Lstm, ZeroWeightsGiveZeroHiddens) {
  Rng rng(9);
  LstmLayer lstm(3, 4, rng);
  for (const Tensor *t : {&lstm.weight_ih(), &lstm.weight_hh(), &lstm.bias_ih(), &lstm.bias_hh()}) {
    Tensor handle = *t;
    for (double &v : handle.mutable_data()) v = 0.0;
  }
  std::vector<Tensor> inputs{Filled({2, 3}, rng), Filled({2, 3}, rng), Filled({2, 3}, rng)};
  for (const Tensor &h : lstm.Forward(inputs))
    for (double v : h.data()) EXPECT_EQ(v, 0.0);
}

TEST(Lstm, SingleStepMatchesGateEquations) {
  Rng rng(21);
  LstmLayer lstm(2, 1, rng);
  Tensor x({1, 2}, {0.7, -0.3});
  const std::vector<Tensor> in{x};
  const double h = lstm.Forward(in)[0].data()[0];
  auto sig = [](double z) { return 1.0 / (1.0 + std::exp(-z)); };
  double z[4];
  for (int g = 0; g < 4; ++g)
    z[g] = lstm.weight_ih().data()[2 * g] * 0.7 - lstm.weight_ih().data()[2 * g + 1] * 0.3 +
           lstm.bias_ih().data()[g] + lstm.bias_hh().data()[g];
  const double c = sig(z[0]) * std::tanh(z[2]);
  EXPECT_NEAR(h, sig(z[3]) * std::tanh(c), 1e-14);
}

TEST(Dropout, EvalModeIsExactPassthrough) {
  Rng rng(3);
  DropoutLayer drop(0.5);
  Tensor x = Filled({4, 5}, rng);
  Tensor y = drop.Forward(x, Mode::kEval, nullptr);
  EXPECT_EQ(Values(x), Values(y));
}

TEST(Dropout, MaskValuesAndRate) {
  Rng rng(8);
  Tensor mask = DropoutMask({20000}, 0.25, rng);
  std::size_t zeros = 0;
  for (double v : mask.data()) {
    if (v == 0.0) ++zeros;
    else EXPECT_DOUBLE_EQ(v, 1.0 / 0.75);
  }
  EXPECT_NEAR(static_cast<double>(zeros) / 20000.0, 0.25, 0.02);
}

TEST(Linear, ComputesAffineMap) {
  Tensor x({1, 2}, {1, 2});
  Tensor w({3, 2}, {1, 0, 0, 1, 1, 1});
  Tensor b({3}, {0.5, 0.5, 0.5});
  EXPECT_EQ(Values(Linear(x, w, b)), (std::vector<double>{1.5, 2.5, 3.5}));
}

TEST(SoftmaxCrossEntropy, UniformLogits) {
  const std::vector<int> targets{2};
  auto r = SoftmaxCrossEntropy(Tensor({1, 4}, 0.0), targets);
  EXPECT_NEAR(r.loss.item(), std::log(4.0), 1e-15);
  for (double p : r.probabilities) EXPECT_DOUBLE_EQ(p, 0.25);
}

TEST(SoftmaxCrossEntropy, LargeLogitIsStable) {
  const std::vector<int> targets{0};
  auto r = SoftmaxCrossEntropy(Tensor({1, 4}, {1000, 0, 0, 0}), targets);
  EXPECT_TRUE(std::isfinite(r.loss.item()));
  EXPECT_NEAR(r.loss.item(), 0.0, 1e-12);
}

TEST(SoftmaxCrossEntropy, ClassWeightsAreNormalizedMean) {
  const std::vector<int> targets{0, 1};
  const std::vector<double> weights{1.0, 3.0, 1.0, 1.0};
  Tensor logits({2, 4}, {2, 0, 0, 0, 0, 0, 0, 0});
  auto r = SoftmaxCrossEntropy(logits, targets, weights);
  const double l0 = -LogSoftmax(std::vector<double>{2, 0, 0, 0})[0];
  const double l1 = std::log(4.0);
  EXPECT_NEAR(r.loss.item(), (l0 + 3.0 * l1) / 4.0, 1e-14);
}

TEST(SoftmaxCrossEntropy, RejectsBadTargets) {
  const std::vector<int> bad{4};
  EXPECT_THROW(SoftmaxCrossEntropy(Tensor({1, 4}), bad), Error);
}

TEST(GradientSuite, EveryLayerPassesOnReducedSeeds) {
  GradientSuiteOptions opts;
  opts.seeds = 3;
  for (const auto &summary : RunGradientSuite(opts)) {
    EXPECT_TRUE(summary.passed) << summary.name << " " << summary.max_relative_error;
    EXPECT_GT(summary.coordinates, 0u) << summary.name;
  }
}

TEST(GradientSuite, UnknownNameIsConfigError) {
  EXPECT_THROW(RunGradientCheck("nope"), ConfigError);
}

}  // namespace
}  // namespace rawspoof
