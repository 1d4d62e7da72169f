// src/features.cc

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

#include "rawspoof/features.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>

#include "rawspoof/dataset.h"
#include "rawspoof/errors.h"

namespace rawspoof {

namespace {

// FFTW planning is not thread-safe; plans are created once per size under a
// lock and executed through the thread-safe new-array interface.
fftw_plan PlanFor(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, fftw_plan> plans;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = plans.find(n);
  if (it != plans.end()) return it->second;
  std::vector<double> in(n);
  std::vector<std::complex<double>> out(n / 2 + 1);
  fftw_plan plan = fftw_plan_dft_r2c_1d(
      static_cast<int>(n), in.data(), reinterpret_cast<fftw_complex *>(out.data()),
      FFTW_ESTIMATE | FFTW_UNALIGNED);
  plans[n] = plan;
  return plan;
}

std::size_t NextPowerOfTwo(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// num_bins x (fft_size / 2 + 1) triangular weights spanning 0 .. Nyquist.
std::vector<std::vector<double>> MelFilterbank(std::size_t num_bins,
                                               std::size_t fft_size) {
  const std::size_t spectrum = fft_size / 2 + 1;
  const double nyquist = kSampleRate / 2.0;
  const double mel_hi = HzToMel(nyquist);
  std::vector<double> centers(num_bins + 2);
  for (std::size_t i = 0; i < centers.size(); ++i)
    centers[i] = MelToHz(mel_hi * static_cast<double>(i) /
                         static_cast<double>(num_bins + 1));
  std::vector<std::vector<double>> bank(num_bins, std::vector<double>(spectrum, 0.0));
  for (std::size_t m = 0; m < num_bins; ++m) {
    const double lo = centers[m], mid = centers[m + 1], hi = centers[m + 2];
    for (std::size_t k = 0; k < spectrum; ++k) {
      const double f = static_cast<double>(k) * kSampleRate / static_cast<double>(fft_size);
      if (f > lo && f <= mid) bank[m][k] = (f - lo) / (mid - lo);
      else if (f > mid && f < hi) bank[m][k] = (hi - f) / (hi - mid);
    }
  }
  return bank;
}

}  // namespace

void FeatureMatrix::Append(const FeatureMatrix &other) {
  if (other.rows == 0) return;
  if (rows == 0 && cols == 0) cols = other.cols;
  if (other.cols != cols)
    throw ShapeError("feature append: " + std::to_string(other.cols) +
                     " columns vs " + std::to_string(cols));
  data.insert(data.end(), other.data.begin(), other.data.end());
  rows += other.rows;
}

void FeatureConfig::Register(ConfigFields *fields) {
  fields->Add("feat_window_ms", &window_ms);
  fields->Add("feat_shift_ms", &shift_ms);
  fields->Add("feat_num_mel_bins", &num_mel_bins);
  fields->Add("feat_num_ceps", &num_ceps);
  fields->Add("feat_delta_window", &delta_window);
  fields->Add("feat_cmvn", &cmvn);
}

void FeatureConfig::Validate() const {
  if (WindowSamples() == 0 || ShiftSamples() == 0)
    throw ConfigError("feature window and shift must be at least one sample");
  if (num_ceps == 0 || num_ceps >= num_mel_bins)
    throw ConfigError("feat_num_ceps must lie in [1, feat_num_mel_bins)");
  if (delta_window == 0) throw ConfigError("feat_delta_window must be >= 1");
}

std::size_t FeatureConfig::WindowSamples() const {
  return static_cast<std::size_t>(std::lround(window_ms * kSampleRate / 1000.0));
}

std::size_t FeatureConfig::ShiftSamples() const {
  return static_cast<std::size_t>(std::lround(shift_ms * kSampleRate / 1000.0));
}

std::size_t FeatureConfig::NumFrames(std::size_t num_samples) const {
  const std::size_t window = WindowSamples();
  if (num_samples < window) return 0;
  return (num_samples - window) / ShiftSamples() + 1;
}

FeatureMatrix ComputeStaticCepstra(std::span<const double> samples,
                                   const FeatureConfig &config) {
  config.Validate();
  const std::size_t window = config.WindowSamples();
  const std::size_t shift = config.ShiftSamples();
  const std::size_t frames = config.NumFrames(samples.size());
  if (frames == 0)
    throw DataError("utterance of " + std::to_string(samples.size()) +
                    " samples is shorter than one " + std::to_string(window) +
                    "-sample analysis window");
  const std::size_t fft_size = NextPowerOfTwo(window);
  const std::size_t spectrum = fft_size / 2 + 1;
  const std::size_t bins = config.num_mel_bins;
  const auto bank = MelFilterbank(bins, fft_size);

  std::vector<double> hamming(window);
  for (std::size_t i = 0; i < window; ++i)
    hamming[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                        static_cast<double>(window - 1));
  // dct[n][m] = sqrt(2/M) cos(pi n (m + 0.5) / M), n = 1..num_ceps.
  std::vector<std::vector<double>> dct(config.num_ceps, std::vector<double>(bins));
  const double dct_scale = std::sqrt(2.0 / static_cast<double>(bins));
  for (std::size_t n = 0; n < config.num_ceps; ++n)
    for (std::size_t m = 0; m < bins; ++m)
      dct[n][m] = dct_scale * std::cos(std::numbers::pi * static_cast<double>(n + 1) *
                                       (static_cast<double>(m) + 0.5) /
                                       static_cast<double>(bins));

  fftw_plan plan = PlanFor(fft_size);
  std::vector<double> buf(fft_size);
  std::vector<std::complex<double>> spec(spectrum);
  std::vector<double> log_mel(bins);
  FeatureMatrix out(frames, config.StaticDim());
  for (std::size_t f = 0; f < frames; ++f) {
    const double *x = &samples[f * shift];
    double energy = 0.0;
    std::fill(buf.begin(), buf.end(), 0.0);
    for (std::size_t i = 0; i < window; ++i) {
      energy += x[i] * x[i];
      buf[i] = x[i] * hamming[i];
    }
    fftw_execute_dft_r2c(plan, buf.data(), reinterpret_cast<fftw_complex *>(spec.data()));
    for (std::size_t m = 0; m < bins; ++m) {
      double e = 0.0;
      for (std::size_t k = 0; k < spectrum; ++k)
        if (bank[m][k] != 0.0) e += bank[m][k] * std::norm(spec[k]);
      log_mel[m] = std::log(std::max(e, 1e-10));
    }
    auto row = out.row(f);
    for (std::size_t n = 0; n < config.num_ceps; ++n) {
      double c = 0.0;
      for (std::size_t m = 0; m < bins; ++m) c += dct[n][m] * log_mel[m];
      row[n] = c;
    }
    row[config.num_ceps] = std::log(std::max(energy, 1e-10));
  }
  return out;
}

void ApplyCmvn(FeatureMatrix *features) {
  const std::size_t t = features->rows;
  if (t == 0) return;
  for (std::size_t c = 0; c < features->cols; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < t; ++r) mean += features->at(r, c);
    mean /= static_cast<double>(t);
    double var = 0.0;
    for (std::size_t r = 0; r < t; ++r) {
      double &v = features->at(r, c);
      v -= mean;
      var += v * v;
    }
    const double stddev = std::sqrt(var / static_cast<double>(t));
    if (stddev < 1e-8) continue;
    for (std::size_t r = 0; r < t; ++r) features->at(r, c) /= stddev;
  }
}

FeatureMatrix ComputeDeltas(const FeatureMatrix &features, std::size_t window) {
  FeatureMatrix out(features.rows, features.cols);
  if (features.rows == 0) return out;
  double denom = 0.0;
  for (std::size_t n = 1; n <= window; ++n) denom += 2.0 * static_cast<double>(n * n);
  const auto last = static_cast<std::ptrdiff_t>(features.rows) - 1;
  for (std::size_t t = 0; t < features.rows; ++t) {
    for (std::size_t n = 1; n <= window; ++n) {
      const auto ti = static_cast<std::ptrdiff_t>(t);
      const auto ni = static_cast<std::ptrdiff_t>(n);
      const auto ahead = static_cast<std::size_t>(std::min(ti + ni, last));
      const auto behind = static_cast<std::size_t>(std::max<std::ptrdiff_t>(ti - ni, 0));
      for (std::size_t c = 0; c < features.cols; ++c)
        out.at(t, c) += static_cast<double>(n) *
                        (features.at(ahead, c) - features.at(behind, c));
    }
    for (std::size_t c = 0; c < features.cols; ++c) out.at(t, c) /= denom;
  }
  return out;
}

FeatureMatrix ExtractFeatures(std::span<const double> samples,
                              const FeatureConfig &config) {
  FeatureMatrix statics = ComputeStaticCepstra(samples, config);
  if (config.cmvn) ApplyCmvn(&statics);
  const FeatureMatrix delta = ComputeDeltas(statics, config.delta_window);
  const FeatureMatrix delta2 = ComputeDeltas(delta, config.delta_window);
  const std::size_t d = statics.cols;
  FeatureMatrix out(statics.rows, 3 * d);
  for (std::size_t t = 0; t < statics.rows; ++t) {
    auto row = out.row(t);
    std::copy_n(statics.row(t).begin(), d, row.begin());
    std::copy_n(delta.row(t).begin(), d, row.begin() + d);
    std::copy_n(delta2.row(t).begin(), d, row.begin() + 2 * d);
  }
  return out;
}

}  // namespace rawspoof
