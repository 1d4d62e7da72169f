// rawspoof/features.h

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

#ifndef RAWSPOOF_FEATURES_H_
#define RAWSPOOF_FEATURES_H_

#include <cstddef>
#include <span>
#include <vector>

#include "rawspoof/config.h"

namespace rawspoof {

/// Dense row-major matrix of per-frame feature vectors.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  std::span<double> row(std::size_t i) {
    return std::span<double>(data).subspan(i * cols, cols);
  }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data).subspan(i * cols, cols);
  }
  double &at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  /// Appends the rows of `other` (same column count).
  void Append(const FeatureMatrix &other);
};

/// Cepstral front-end: 25 ms Hamming windows every 10 ms, 12 MFCCs plus
/// log-energy, per-utterance CMVN on the statics, then deltas and
/// delta-deltas, for 39 dimensions.  No voice-activity detection.
struct FeatureConfig {
  double window_ms = 25.0;
  double shift_ms = 10.0;
  std::size_t num_mel_bins = 26;
  std::size_t num_ceps = 12;     // c1..c12; c0 is replaced by log-energy
  std::size_t delta_window = 2;  // +-2 frame regression
  bool cmvn = true;

  void Register(ConfigFields *fields);
  void Validate() const;

  std::size_t WindowSamples() const;
  std::size_t ShiftSamples() const;
  std::size_t StaticDim() const { return num_ceps + 1; }
  std::size_t Dim() const { return 3 * StaticDim(); }
  /// floor((L - window) / shift) + 1, or 0 if L < window.
  std::size_t NumFrames(std::size_t num_samples) const;
};

/// Throws DataError if `samples` is shorter than one window.
FeatureMatrix ExtractFeatures(std::span<const double> samples,
                              const FeatureConfig &config);

/// Static cepstra (MFCC c1..c12 followed by log-energy), before CMVN.
FeatureMatrix ComputeStaticCepstra(std::span<const double> samples,
                                   const FeatureConfig &config);

/// Per-column mean and variance normalization in place; columns with
/// standard deviation below 1e-8 are only mean-centred.
void ApplyCmvn(FeatureMatrix *features);

/// Regression deltas over +-window frames with edge replication.
FeatureMatrix ComputeDeltas(const FeatureMatrix &features, std::size_t window);

}  // namespace rawspoof

#endif  // RAWSPOOF_FEATURES_H_
