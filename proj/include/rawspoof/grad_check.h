// rawspoof/grad_check.h

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

#ifndef RAWSPOOF_GRAD_CHECK_H_
#define RAWSPOOF_GRAD_CHECK_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "rawspoof/tensor.h"

namespace rawspoof {

using ScalarFunction = std::function<Tensor(const std::vector<Tensor> &)>;

struct GradCheckOptions {
  double eps = 1e-4;
  /// When nonzero, only this many randomly chosen coordinates of each input
  /// are perturbed.
  std::size_t max_coordinates_per_input = 0;
  std::uint64_t seed = 0;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t worst_input = 0;
  std::size_t worst_coordinate = 0;
  std::size_t coordinates_checked = 0;
};

/**
   Compares the tape gradient of the scalar function `f` with central
   differences (f(x+eps) - f(x-eps)) / (2 eps), coordinate by coordinate.
   The error at one coordinate is |analytic - numeric| / max(1, |analytic|,
   |numeric|).  `f` must be deterministic; any randomness (dropout masks)
   has to be fixed by the caller.  Every input is treated as a leaf and has
   its gradient reset.  Throws NumericError naming the coordinate if `f`
   produces a non-finite value.
 */
GradCheckResult GradCheck(const ScalarFunction &f, std::vector<Tensor> inputs,
                          const GradCheckOptions &options = {});

}  // namespace rawspoof

#endif  // RAWSPOOF_GRAD_CHECK_H_
