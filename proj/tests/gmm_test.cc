// tests/gmm_test.cc

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
#include <numbers>
#include <random>

#include "oracles.h"
#include "rawspoof/errors.h"
#include "rawspoof/gmm.h"
#include "test_util.h"

namespace rawspoof {
namespace {

FeatureMatrix Gaussian(std::size_t rows, std::size_t cols, Rng &rng, double mean = 0.0,
                       double sd = 1.0) {
  std::normal_distribution<double> n(mean, sd);
  FeatureMatrix m(rows, cols);
  for (double &v : m.data) v = n(rng);
  return m;
}

DiagonalGmm RandomGmm(std::size_t k, std::size_t d, Rng &rng) {
  std::uniform_real_distribution<double> u(0.2, 1.0);
  std::normal_distribution<double> n;
  std::vector<double> w(k), mu(k * d), var(k * d);
  double total = 0;
  for (double &v : w) total += (v = u(rng));
  for (double &v : w) v /= total;
  for (double &v : mu) v = 2.0 * n(rng);
  for (double &v : var) v = 0.2 + u(rng);
  return DiagonalGmm(w, mu, var, d);
}

TEST(DiagonalGmm, DensityAtMeanOfStandardGaussian) {
  const std::size_t d = 5;
  DiagonalGmm g({1.0}, std::vector<double>(d, 0.7), std::vector<double>(d, 1.0), d);
  const std::vector<double> x(d, 0.7);
  EXPECT_NEAR(g.FrameLogLikelihood(x), -0.5 * d * std::log(2 * std::numbers::pi), 1e-13);
}

TEST(DiagonalGmm, MatchesNaiveDensity) {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const DiagonalGmm g = RandomGmm(6, 4, rng);
    const FeatureMatrix x = Gaussian(10, 4, rng, 0.0, 3.0);
    for (std::size_t t = 0; t < x.rows; ++t)
      EXPECT_NEAR(g.FrameLogLikelihood(x.row(t)),
                  oracle::GmmLogDensity(g.weights(), g.means(), g.variances(),
                                        x.row(t).data(), 4),
                  1e-10);
  }
}

TEST(DiagonalGmm, ComponentTermsSumToTotal) {
  Rng rng(2);
  const DiagonalGmm g = RandomGmm(3, 2, rng);
  std::vector<double> x{0.3, -0.1}, comp(3);
  const double total = g.ComponentLogLikelihoods(x, comp);
  double acc = 0;
  for (double c : comp) acc += std::exp(c);
  EXPECT_NEAR(std::log(acc), total, 1e-13);
}

TEST(DiagonalGmm, RejectsInvalidParameters) {
  EXPECT_THROW(DiagonalGmm({0.5, 0.6}, {0, 0}, {1, 1}, 1), NumericError);
  EXPECT_THROW(DiagonalGmm({1.0}, {0}, {0.0}, 1), NumericError);
  EXPECT_THROW(DiagonalGmm({1.0}, {0, 0}, {1.0}, 2), Error);
}

TEST(Em, SingleComponentEqualsSampleMoments) {
  Rng rng(3);
  const FeatureMatrix x = Gaussian(500, 3, rng, 1.0, 2.0);
  Rng fit_rng(4);
  const EmResult r = FitGmm(x, 1, 1, 1e-3, fit_rng);
  for (std::size_t d = 0; d < 3; ++d) {
    double mean = 0, var = 0;
    for (std::size_t t = 0; t < 500; ++t) mean += x.at(t, d);
    mean /= 500;
    for (std::size_t t = 0; t < 500; ++t) var += (x.at(t, d) - mean) * (x.at(t, d) - mean);
    var /= 500;
    EXPECT_NEAR(r.gmm.means()[d], mean, 1e-10);
    EXPECT_NEAR(r.gmm.variances()[d], var, 1e-10);
  }
  EXPECT_DOUBLE_EQ(r.gmm.weights()[0], 1.0);
}

TEST(Em, RecoversTwoWellSeparatedComponents) {
  Rng rng(5);
  std::normal_distribution<double> left(-2.0, 0.5), right(2.0, 0.5);
  FeatureMatrix x(2000, 1);
  for (std::size_t t = 0; t < 2000; ++t) x.at(t, 0) = t % 2 ? left(rng) : right(rng);
  Rng fit_rng(6);
  const EmResult r = FitGmm(x, 2, 30, 1e-3, fit_rng);
  std::vector<double> means = r.gmm.means();
  std::sort(means.begin(), means.end());
  EXPECT_NEAR(means[0], -2.0, 0.1);
  EXPECT_NEAR(means[1], 2.0, 0.1);
  EXPECT_NEAR(r.gmm.weights()[0], 0.5, 0.05);
}

TEST(Em, LogLikelihoodNeverDecreases) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(100 + seed);
    FeatureMatrix x = Gaussian(300, 3, rng);
    // A second cluster makes the problem non-trivial.
    for (std::size_t t = 0; t < 100; ++t)
      for (std::size_t d = 0; d < 3; ++d) x.at(t, d) += 4.0;
    Rng fit_rng(seed);
    const EmResult r = FitGmm(x, 4, 15, 1e-3, fit_rng);
    ASSERT_EQ(r.loglik_trace.size(), 16u);
    for (std::size_t i = 1; i < r.loglik_trace.size(); ++i)
      EXPECT_GE(r.loglik_trace[i], r.loglik_trace[i - 1] - 1e-8) << "seed " << seed;
  }
}

TEST(Em, IndependentOfWorkerCount) {
  Rng rng(7);
  const FeatureMatrix x = Gaussian(3000, 4, rng);
  Rng a(8), b(8);
  const EmResult r1 = FitGmm(x, 5, 4, 1e-3, a, 1);
  const EmResult r2 = FitGmm(x, 5, 4, 1e-3, b, 3);
  EXPECT_EQ(r1.gmm.means(), r2.gmm.means());
  EXPECT_EQ(r1.gmm.variances(), r2.gmm.variances());
  EXPECT_EQ(r1.loglik_trace, r2.loglik_trace);
}

TEST(Em, VarianceFloorHolds) {
  // Identical frames in one dimension would otherwise collapse variance.
  Rng rng(9);
  FeatureMatrix x = Gaussian(200, 2, rng);
  for (std::size_t t = 0; t < 100; ++t) x.at(t, 1) = 0.5;
  double mean = 0, var = 0;
  for (std::size_t t = 0; t < 200; ++t) mean += x.at(t, 1);
  mean /= 200;
  for (std::size_t t = 0; t < 200; ++t) var += (x.at(t, 1) - mean) * (x.at(t, 1) - mean);
  var /= 200;
  Rng fit_rng(1);
  const EmResult r = FitGmm(x, 4, 20, 0.01, fit_rng);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_GE(r.gmm.variances()[k * 2 + 1], 0.01 * var * (1 - 1e-12));
}

TEST(Em, TooFewFramesIsDataError) {
  Rng rng(1);
  EXPECT_THROW(FitGmm(Gaussian(3, 2, rng), 4, 5, 1e-3, rng), DataError);
}

TEST(Llr, IdenticalModelsGiveExactZero) {
  Rng rng(10);
  const DiagonalGmm g = RandomGmm(4, 3, rng);
  const FeatureMatrix x = Gaussian(50, 3, rng);
  EXPECT_EQ(LlrScore(x, g, g), 0.0);
  EXPECT_EQ(LlrScore(x, g, g, false), 0.0);
}

TEST(Llr, AntisymmetricAndSigned) {
  Rng rng(11);
  const DiagonalGmm near({1.0}, {0, 0}, {1, 1}, 2);
  const DiagonalGmm far({1.0}, {6, 6}, {1, 1}, 2);
  const FeatureMatrix x = Gaussian(40, 2, rng);
  EXPECT_EQ(LlrScore(x, near, far), -LlrScore(x, far, near));
  EXPECT_GT(LlrScore(x, near, far), 0.0);
  const DiagonalGmm a = RandomGmm(3, 2, rng), b = RandomGmm(5, 2, rng);
  EXPECT_EQ(LlrScore(x, a, b), -LlrScore(x, b, a));
}

TEST(Llr, AveragingDividesByFrameCount) {
  Rng rng(12);
  const DiagonalGmm a = RandomGmm(2, 2, rng), b = RandomGmm(2, 2, rng);
  const FeatureMatrix x = Gaussian(25, 2, rng);
  EXPECT_NEAR(LlrScore(x, a, b, false), 25.0 * LlrScore(x, a, b, true), 1e-9);
}

TEST(Llr, Errors) {
  Rng rng(13);
  const DiagonalGmm a = RandomGmm(2, 2, rng), b = RandomGmm(2, 3, rng);
  EXPECT_THROW(LlrScore(Gaussian(4, 2, rng), a, b), ShapeError);
  FeatureMatrix bad = Gaussian(4, 2, rng);
  bad.at(1, 1) = std::nan("");
  EXPECT_THROW(AverageLogLikelihood(a, bad), NumericError);
}

TEST(GmmBaseline, SaveLoadRoundTrip) {
  TempDir dir;
  Rng rng(14);
  GmmBaseline m;
  m.gmm.num_components = 3;
  m.features.delta_window = 3;
  m.genuine = RandomGmm(3, 39, rng);
  m.spoof = RandomGmm(3, 39, rng);
  SaveGmmBaseline(m, dir.path() / "gmm.bin");
  const GmmBaseline back = LoadGmmBaseline(dir.path() / "gmm.bin");
  EXPECT_EQ(back.features.delta_window, 3u);
  EXPECT_EQ(back.gmm.num_components, 3u);
  for (std::size_t i = 0; i < m.genuine.means().size(); ++i) {
    EXPECT_NEAR(back.genuine.means()[i], m.genuine.means()[i], 1e-6 * (1 + std::abs(m.genuine.means()[i])));
    EXPECT_NEAR(back.spoof.variances()[i], m.spoof.variances()[i], 1e-6);
  }
  double total = 0;
  for (double w : back.genuine.weights()) total += w;
  EXPECT_NEAR(total, 1.0, 1e-12);
  const FeatureMatrix x = Gaussian(20, 39, rng);
  EXPECT_NEAR(LlrScore(x, back.genuine, back.spoof), LlrScore(x, m.genuine, m.spoof), 1e-3);
}

TEST(GmmBaseline, LoadRejectsOtherFiles) {
  TempDir dir;
  WriteString(dir.path() / "x", "junk");
  EXPECT_THROW(LoadGmmBaseline(dir.path() / "x"), DataError);
}

}  // namespace
}  // namespace rawspoof
