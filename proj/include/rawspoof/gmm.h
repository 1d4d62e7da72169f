// rawspoof/gmm.h

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

#ifndef RAWSPOOF_GMM_H_
#define RAWSPOOF_GMM_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "rawspoof/config.h"
#include "rawspoof/features.h"
#include "rawspoof/random.h"

namespace rawspoof {

/// Diagonal-covariance Gaussian mixture.  `means` and `variances` are
/// K x D row-major.
class DiagonalGmm {
 public:
  DiagonalGmm() = default;
  DiagonalGmm(std::vector<double> weights, std::vector<double> means,
              std::vector<double> variances, std::size_t dim);

  std::size_t num_components() const { return weights_.size(); }
  std::size_t dim() const { return dim_; }
  const std::vector<double> &weights() const { return weights_; }
  const std::vector<double> &means() const { return means_; }
  const std::vector<double> &variances() const { return variances_; }

  /// Throws NumericError unless weights form a simplex (1e-10) with positive
  /// entries and every variance is positive and finite.
  void Validate() const;

  /// log sum_k w_k N(x; mu_k, diag(var_k)), evaluated with log-sum-exp.
  double FrameLogLikelihood(std::span<const double> x) const;

  /// Writes log w_k + log N(x; mu_k, var_k) for every component into `out`
  /// and returns their log-sum-exp.
  double ComponentLogLikelihoods(std::span<const double> x,
                                 std::span<double> out) const;

 private:
  void Precompute();

  std::vector<double> weights_, means_, variances_;
  std::size_t dim_ = 0;
  // log w_k - 0.5 * sum_d log(2 pi var_kd), and 1 / var.
  std::vector<double> log_norm_, inv_var_;
};

struct GmmConfig {
  std::size_t num_components = 512;
  std::size_t em_iterations = 20;
  double var_floor_ratio = 1e-3;
  bool average_frames = true;  // false sums frame log-likelihoods instead

  void Register(ConfigFields *fields);
  void Validate() const;
};

struct EmResult {
  DiagonalGmm gmm;
  /// Total data log-likelihood before the first update and after every
  /// iteration, so iterations + 1 entries.
  std::vector<double> loglik_trace;
  std::size_t reseeded_components = 0;
};

/**
   Fits a K-component mixture by EM.  Means start at K distinct frames drawn
   at random, variances at the global per-dimension variance, weights at
   1/K.  Variances are floored at var_floor_ratio times the global variance.
   A component whose responsibility mass falls below 1e-10 is re-seeded at
   the worst-explained remaining frame with the global variance.  The E-step
   runs over fixed frame blocks and reduces in block order, so the result
   does not depend on `workers`.
 */
EmResult FitGmm(const FeatureMatrix &data, std::size_t num_components,
                std::size_t iterations, double var_floor_ratio, Rng &rng,
                std::size_t workers = 1);

/// Mean (or, with average = false, summed) frame log-likelihood.
double AverageLogLikelihood(const DiagonalGmm &gmm, const FeatureMatrix &features,
                            bool average = true);

/// Log-likelihood ratio score, genuine minus spoof; higher means more
/// genuine.  Both models must share the feature dimension.
double LlrScore(const FeatureMatrix &features, const DiagonalGmm &genuine,
                const DiagonalGmm &spoof, bool average = true);

struct GmmBaseline {
  FeatureConfig features;
  GmmConfig gmm;
  DiagonalGmm genuine;
  DiagonalGmm spoof;
};

void SaveGmmBaseline(const GmmBaseline &model, const std::filesystem::path &path);
GmmBaseline LoadGmmBaseline(const std::filesystem::path &path);

}  // namespace rawspoof

#endif  // RAWSPOOF_GMM_H_
