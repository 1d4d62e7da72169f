// rawspoof/gradient_suite.h

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

#ifndef RAWSPOOF_GRADIENT_SUITE_H_
#define RAWSPOOF_GRADIENT_SUITE_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rawspoof/cldnn.h"

namespace rawspoof {

struct GradientSuiteOptions {
  std::size_t seeds = 20;
  double layer_tolerance = 1e-4;
  double model_tolerance = 1e-3;
  /// Sampled weights per parameter tensor in the whole-model check.
  std::size_t model_coordinates = 8;
  std::uint64_t base_seed = 2016;
};

struct GradientCheckSummary {
  std::string name;
  std::size_t trials = 0;
  std::size_t coordinates = 0;
  double max_relative_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// conv1d, maxpool, batchnorm, dropout, linear, lstm, softmax_ce, cldnn.
std::vector<std::string> GradientCheckNames();

/// Finite-difference check of one building block over `options.seeds`
/// random shapes and inputs.  Each trial reduces the block's output to a
/// scalar with a fixed random weighting.  "cldnn" checks the cross-entropy
/// of a small complete model on sampled weights of every parameter tensor,
/// with dropout masks held fixed.  Throws ConfigError for an unknown name.
GradientCheckSummary RunGradientCheck(const std::string &name,
                                      const GradientSuiteOptions &options = {});

/// Every check in GradientCheckNames() order.
std::vector<GradientCheckSummary> RunGradientSuite(
    const GradientSuiteOptions &options = {});

/// Compact model geometry used by the whole-model check and by tests.
ModelConfig TinyModelConfig();

}  // namespace rawspoof

#endif  // RAWSPOOF_GRADIENT_SUITE_H_
