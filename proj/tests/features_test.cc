// tests/features_test.cc

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
#include <complex>
#include <numbers>
#include <random>

#include "rawspoof/errors.h"
#include "rawspoof/features.h"
#include "rawspoof/random.h"

namespace rawspoof {
namespace {

std::vector<double> Noise(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> d(0.0, 0.1);
  std::vector<double> x(n);
  for (double &v : x) v = d(rng);
  return x;
}

// Static cepstra of one frame by a direct O(n^2) DFT with its own
// filterbank, Hamming window and DCT.
std::vector<double> OracleStatics(const double *x, std::size_t window, std::size_t nfft,
                                  std::size_t bins, std::size_t ceps) {
  const double pi = std::numbers::pi;
  std::vector<double> frame(nfft, 0.0);
  double energy = 0.0;
  for (std::size_t i = 0; i < window; ++i) {
    energy += x[i] * x[i];
    frame[i] = x[i] * (0.54 - 0.46 * std::cos(2 * pi * i / (window - 1.0)));
  }
  std::vector<double> power(nfft / 2 + 1);
  for (std::size_t k = 0; k < power.size(); ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t n = 0; n < nfft; ++n)
      acc += frame[n] * std::polar(1.0, -2 * pi * static_cast<double>(k * n) / nfft);
    power[k] = std::norm(acc);
  }
  auto mel = [](double f) { return 1127.0 * std::log(1.0 + f / 700.0); };
  auto inv = [](double m) { return 700.0 * (std::exp(m / 1127.0) - 1.0); };
  std::vector<double> logmel(bins);
  for (std::size_t m = 0; m < bins; ++m) {
    const double step = mel(8000.0) / (bins + 1.0);
    const double lo = inv(step * m), mid = inv(step * (m + 1)), hi = inv(step * (m + 2));
    double e = 0.0;
    for (std::size_t k = 0; k < power.size(); ++k) {
      const double f = 16000.0 * k / nfft;
      double w = 0.0;
      if (f > lo && f <= mid) w = (f - lo) / (mid - lo);
      if (f > mid && f < hi) w = (hi - f) / (hi - mid);
      e += w * power[k];
    }
    logmel[m] = std::log(std::max(e, 1e-10));
  }
  std::vector<double> out;
  for (std::size_t n = 1; n <= ceps; ++n) {
    double c = 0.0;
    for (std::size_t m = 0; m < bins; ++m)
      c += logmel[m] * std::cos(pi * n * (m + 0.5) / bins);
    out.push_back(c * std::sqrt(2.0 / bins));
  }
  out.push_back(std::log(std::max(energy, 1e-10)));
  return out;
}

TEST(FeatureConfig, FramingArithmetic) {
  FeatureConfig c;
  EXPECT_EQ(c.WindowSamples(), 400u);
  EXPECT_EQ(c.ShiftSamples(), 160u);
  EXPECT_EQ(c.Dim(), 39u);
  EXPECT_EQ(c.NumFrames(16000), 98u);
  EXPECT_EQ(c.NumFrames(399), 0u);
  EXPECT_EQ(c.NumFrames(400), 1u);
}

TEST(Features, OneSecondGives98By39) {
  const FeatureMatrix f = ExtractFeatures(Noise(16000, 1), FeatureConfig{});
  EXPECT_EQ(f.rows, 98u);
  EXPECT_EQ(f.cols, 39u);
  for (double v : f.data) ASSERT_TRUE(std::isfinite(v));
}

TEST(Features, ShortInputIsDataError) {
  EXPECT_THROW(ExtractFeatures(Noise(399, 1), FeatureConfig{}), DataError);
}

TEST(Features, StaticsMatchDirectDft) {
  const auto x = Noise(2000, 2);
  const FeatureConfig c;
  const FeatureMatrix s = ComputeStaticCepstra(x, c);
  ASSERT_EQ(s.cols, 13u);
  for (std::size_t t : {std::size_t{0}, std::size_t{3}, s.rows - 1}) {
    const auto expect = OracleStatics(&x[t * 160], 400, 512, 26, 12);
    for (std::size_t d = 0; d < 13; ++d) EXPECT_NEAR(s.at(t, d), expect[d], 1e-8) << t << "," << d;
  }
}

TEST(Features, SilenceIsFloored) {
  const FeatureMatrix s = ComputeStaticCepstra(std::vector<double>(800, 0.0), FeatureConfig{});
  for (std::size_t t = 0; t < s.rows; ++t) {
    EXPECT_DOUBLE_EQ(s.at(t, 12), std::log(1e-10));
    for (std::size_t d = 0; d < 12; ++d) EXPECT_NEAR(s.at(t, d), 0.0, 1e-9);
  }
}

TEST(Cmvn, ZeroMeanUnitVarianceAndConstantColumns) {
  FeatureMatrix f(4, 2);
  const double col0[] = {1, 2, 3, 6};
  for (std::size_t r = 0; r < 4; ++r) {
    f.at(r, 0) = col0[r];
    f.at(r, 1) = 5.0;
  }
  ApplyCmvn(&f);
  double mean = 0, var = 0;
  for (std::size_t r = 0; r < 4; ++r) mean += f.at(r, 0);
  for (std::size_t r = 0; r < 4; ++r) var += f.at(r, 0) * f.at(r, 0);
  EXPECT_NEAR(mean, 0.0, 1e-12);
  EXPECT_NEAR(var / 4, 1.0, 1e-12);
  for (std::size_t r = 0; r < 4; ++r) EXPECT_EQ(f.at(r, 1), 0.0);
}

TEST(Deltas, ConstantTrackHasZeroDeltas) {
  FeatureMatrix f(10, 3);
  for (double &v : f.data) v = 4.2;
  const FeatureMatrix d = ComputeDeltas(f, 2);
  const FeatureMatrix dd = ComputeDeltas(d, 2);
  for (double v : d.data) EXPECT_EQ(v, 0.0);
  for (double v : dd.data) EXPECT_EQ(v, 0.0);
}

TEST(Deltas, LinearRampInteriorSlopeAndClampedEdges) {
  FeatureMatrix f(8, 1);
  for (std::size_t t = 0; t < 8; ++t) f.at(t, 0) = 3.0 * t;
  const FeatureMatrix d = ComputeDeltas(f, 2);
  for (std::size_t t = 2; t < 6; ++t) EXPECT_NEAR(d.at(t, 0), 3.0, 1e-12);
  // t = 0: (1*(3-0) + 2*(6-0)) / 10 with the frame before clamped to t = 0.
  EXPECT_NEAR(d.at(0, 0), 1.5, 1e-12);
  EXPECT_NEAR(d.at(7, 0), 1.5, 1e-12);
}

TEST(Features, LayoutIsStaticsThenDeltas) {
  const auto x = Noise(6000, 3);
  const FeatureConfig c;
  const FeatureMatrix full = ExtractFeatures(x, c);
  FeatureMatrix s = ComputeStaticCepstra(x, c);
  ApplyCmvn(&s);
  const FeatureMatrix d = ComputeDeltas(s, 2), dd = ComputeDeltas(d, 2);
  for (std::size_t t = 0; t < full.rows; ++t)
    for (std::size_t k = 0; k < 13; ++k) {
      EXPECT_EQ(full.at(t, k), s.at(t, k));
      EXPECT_EQ(full.at(t, 13 + k), d.at(t, k));
      EXPECT_EQ(full.at(t, 26 + k), dd.at(t, k));
    }
}

TEST(FeatureMatrix, AppendChecksColumns) {
  FeatureMatrix a(2, 3), b(1, 3), c(1, 4);
  a.Append(b);
  EXPECT_EQ(a.rows, 3u);
  EXPECT_THROW(a.Append(c), ShapeError);
}

TEST(FeatureConfig, Validation) {
  FeatureConfig c;
  c.num_ceps = 26;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = FeatureConfig{};
  c.shift_ms = 0.0;
  EXPECT_THROW(c.Validate(), ConfigError);
}

}  // namespace
}  // namespace rawspoof
