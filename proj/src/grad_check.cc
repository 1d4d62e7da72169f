// src/grad_check.cc

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

#include "rawspoof/grad_check.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "rawspoof/errors.h"

namespace rawspoof {

namespace {

double EvaluateScalar(const ScalarFunction &f, const std::vector<Tensor> &inputs,
                      std::size_t input, std::size_t coordinate) {
  Tensor y = f(inputs);
  if (y.size() != 1)
    throw ShapeError("gradient check needs a scalar function, got shape " +
                     ShapeString(y.shape()));
  double v = y.item();
  if (!std::isfinite(v))
    throw NumericError("gradient check: non-finite function value while "
                       "perturbing input " + std::to_string(input) +
                       " coordinate " + std::to_string(coordinate));
  return v;
}

}  // namespace

GradCheckResult GradCheck(const ScalarFunction &f, std::vector<Tensor> inputs,
                          const GradCheckOptions &options) {
  for (Tensor &t : inputs) {
    t.set_requires_grad(true);
    t.zero_grad();
  }
  std::vector<std::vector<double>> analytic;
  {
    Tape tape;
    Tensor loss = f(inputs);
    if (loss.size() != 1 || !std::isfinite(loss.item()))
      throw NumericError("gradient check: function value at the base point is "
                         "not a finite scalar");
    tape.Backward(loss);
    for (const Tensor &t : inputs)
      analytic.emplace_back(t.grad().begin(), t.grad().end());
  }

  std::mt19937_64 rng(options.seed);
  GradCheckResult result;
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    Tensor &x = inputs[n];
    std::vector<std::size_t> coords(x.size());
    std::iota(coords.begin(), coords.end(), 0);
    if (options.max_coordinates_per_input > 0 &&
        coords.size() > options.max_coordinates_per_input) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(options.max_coordinates_per_input);
      std::sort(coords.begin(), coords.end());
    }
    for (std::size_t i : coords) {
      auto xd = x.mutable_data();
      const double saved = xd[i];
      xd[i] = saved + options.eps;
      const double plus = EvaluateScalar(f, inputs, n, i);
      xd[i] = saved - options.eps;
      const double minus = EvaluateScalar(f, inputs, n, i);
      xd[i] = saved;
      const double numeric = (plus - minus) / (2.0 * options.eps);
      const double a = analytic[n][i];
      if (!std::isfinite(a))
        throw NumericError("gradient check: non-finite analytic gradient at "
                           "input " + std::to_string(n) + " coordinate " +
                           std::to_string(i));
      const double err = std::abs(a - numeric) /
                         std::max({1.0, std::abs(a), std::abs(numeric)});
      ++result.coordinates_checked;
      if (err > result.max_relative_error) {
        result.max_relative_error = err;
        result.worst_input = n;
        result.worst_coordinate = i;
      }
    }
  }
  return result;
}

}  // namespace rawspoof
