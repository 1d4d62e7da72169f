// src/gmm.cc

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

#include "rawspoof/gmm.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "rawspoof/errors.h"
#include "rawspoof/parallel.h"
#include "rawspoof/record_file.h"

namespace rawspoof {

DiagonalGmm::DiagonalGmm(std::vector<double> weights, std::vector<double> means,
                         std::vector<double> variances, std::size_t dim)
    : weights_(std::move(weights)),
      means_(std::move(means)),
      variances_(std::move(variances)),
      dim_(dim) {
  const std::size_t k = weights_.size();
  if (k == 0 || dim_ == 0) throw ShapeError("GMM needs at least one component and dimension");
  if (means_.size() != k * dim_ || variances_.size() != k * dim_)
    throw ShapeError("GMM means/variances must be " + std::to_string(k) + " x " +
                     std::to_string(dim_));
  Validate();
  Precompute();
}

void DiagonalGmm::Validate() const {
  double total = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    if (!(weights_[k] > 0.0) || !std::isfinite(weights_[k]))
      throw NumericError("GMM weight " + std::to_string(k) + " is not positive");
    total += weights_[k];
  }
  if (std::abs(total - 1.0) > 1e-10)
    throw NumericError("GMM weights sum to " + FormatDouble(total));
  for (std::size_t i = 0; i < variances_.size(); ++i)
    if (!(variances_[i] > 0.0) || !std::isfinite(variances_[i]))
      throw NumericError("GMM variance " + std::to_string(i) + " is not positive");
  for (double m : means_)
    if (!std::isfinite(m)) throw NumericError("GMM mean is not finite");
}

void DiagonalGmm::Precompute() {
  const std::size_t k = weights_.size();
  log_norm_.assign(k, 0.0);
  inv_var_.resize(variances_.size());
  const double log_2pi = std::log(2.0 * std::numbers::pi);
  for (std::size_t c = 0; c < k; ++c) {
    double s = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) {
      const double v = variances_[c * dim_ + d];
      s += log_2pi + std::log(v);
      inv_var_[c * dim_ + d] = 1.0 / v;
    }
    log_norm_[c] = std::log(weights_[c]) - 0.5 * s;
  }
}

double DiagonalGmm::ComponentLogLikelihoods(std::span<const double> x,
                                            std::span<double> out) const {
  if (x.size() != dim_)
    throw ShapeError("feature dimension " + std::to_string(x.size()) +
                     " does not match GMM dimension " + std::to_string(dim_));
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < weights_.size(); ++c) {
    const double *mu = &means_[c * dim_];
    const double *iv = &inv_var_[c * dim_];
    double q = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) {
      const double z = x[d] - mu[d];
      q += z * z * iv[d];
    }
    out[c] = log_norm_[c] - 0.5 * q;
    best = std::max(best, out[c]);
  }
  double acc = 0.0;
  for (std::size_t c = 0; c < weights_.size(); ++c) acc += std::exp(out[c] - best);
  return best + std::log(acc);
}

double DiagonalGmm::FrameLogLikelihood(std::span<const double> x) const {
  std::vector<double> scratch(weights_.size());
  return ComponentLogLikelihoods(x, scratch);
}

void GmmConfig::Register(ConfigFields *fields) {
  fields->Add("gmm_num_components", &num_components);
  fields->Add("gmm_em_iterations", &em_iterations);
  fields->Add("gmm_var_floor_ratio", &var_floor_ratio);
  fields->Add("gmm_average_frames", &average_frames);
}

void GmmConfig::Validate() const {
  if (num_components == 0) throw ConfigError("gmm_num_components must be >= 1");
  if (!(var_floor_ratio > 0.0)) throw ConfigError("gmm_var_floor_ratio must be > 0");
}

namespace {

constexpr std::size_t kBlockFrames = 1024;

struct EmStats {
  std::vector<double> mass;    // K
  std::vector<double> first;   // K x D, centred on the global mean
  std::vector<double> second;  // K x D
  double loglik = 0.0;
};

// Sufficient statistics of `data` under `gmm`, accumulated per block and
// summed in block order.  frame_ll receives every frame's log-likelihood.
EmStats EStep(const DiagonalGmm &gmm, const FeatureMatrix &data,
              const std::vector<double> &global_mean, std::size_t workers,
              std::vector<double> *frame_ll) {
  const std::size_t k = gmm.num_components(), dim = gmm.dim();
  const std::size_t blocks = (data.rows + kBlockFrames - 1) / kBlockFrames;
  std::vector<EmStats> partial(blocks);
  frame_ll->assign(data.rows, 0.0);
  ParallelFor(blocks, workers, [&](std::size_t b) {
    EmStats &s = partial[b];
    s.mass.assign(k, 0.0);
    s.first.assign(k * dim, 0.0);
    s.second.assign(k * dim, 0.0);
    std::vector<double> lp(k), centred(dim);
    const std::size_t end = std::min(data.rows, (b + 1) * kBlockFrames);
    for (std::size_t t = b * kBlockFrames; t < end; ++t) {
      auto x = data.row(t);
      const double ll = gmm.ComponentLogLikelihoods(x, lp);
      (*frame_ll)[t] = ll;
      s.loglik += ll;
      for (std::size_t d = 0; d < dim; ++d) centred[d] = x[d] - global_mean[d];
      for (std::size_t c = 0; c < k; ++c) {
        const double g = std::exp(lp[c] - ll);
        if (g == 0.0) continue;
        s.mass[c] += g;
        double *f = &s.first[c * dim];
        double *q = &s.second[c * dim];
        for (std::size_t d = 0; d < dim; ++d) {
          f[d] += g * centred[d];
          q[d] += g * centred[d] * centred[d];
        }
      }
    }
  });
  EmStats total;
  total.mass.assign(k, 0.0);
  total.first.assign(k * dim, 0.0);
  total.second.assign(k * dim, 0.0);
  for (const auto &s : partial) {
    total.loglik += s.loglik;
    for (std::size_t i = 0; i < k; ++i) total.mass[i] += s.mass[i];
    for (std::size_t i = 0; i < k * dim; ++i) {
      total.first[i] += s.first[i];
      total.second[i] += s.second[i];
    }
  }
  return total;
}

}  // namespace

EmResult FitGmm(const FeatureMatrix &data, std::size_t num_components,
                std::size_t iterations, double var_floor_ratio, Rng &rng,
                std::size_t workers) {
  const std::size_t k = num_components, dim = data.cols, t = data.rows;
  if (k == 0) throw ConfigError("GMM needs at least one component");
  if (dim == 0 || t == 0) throw DataError("no training frames for GMM");
  if (t < k)
    throw DataError("GMM with " + std::to_string(k) + " components needs at least as "
                    "many frames, got " + std::to_string(t));
  for (double v : data.data)
    if (!std::isfinite(v)) throw NumericError("non-finite value in GMM training features");

  std::vector<double> mean(dim, 0.0), var(dim, 0.0), floor(dim);
  for (std::size_t r = 0; r < t; ++r)
    for (std::size_t d = 0; d < dim; ++d) mean[d] += data.at(r, d);
  for (double &m : mean) m /= static_cast<double>(t);
  for (std::size_t r = 0; r < t; ++r)
    for (std::size_t d = 0; d < dim; ++d) {
      const double z = data.at(r, d) - mean[d];
      var[d] += z * z;
    }
  for (std::size_t d = 0; d < dim; ++d) {
    var[d] /= static_cast<double>(t);
    floor[d] = std::max(var_floor_ratio * var[d], 1e-12);
    var[d] = std::max(var[d], floor[d]);
  }

  // K distinct frames by a partial Fisher-Yates shuffle.
  std::vector<std::size_t> order(t);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, t - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  std::vector<double> weights(k, 1.0 / static_cast<double>(k));
  std::vector<double> means(k * dim), vars(k * dim);
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t d = 0; d < dim; ++d) {
      means[c * dim + d] = data.at(order[c], d);
      vars[c * dim + d] = var[d];
    }

  EmResult result;
  result.gmm = DiagonalGmm(weights, means, vars, dim);
  std::vector<double> frame_ll;
  EmStats stats = EStep(result.gmm, data, mean, workers, &frame_ll);
  result.loglik_trace.push_back(stats.loglik);

  for (std::size_t it = 0; it < iterations; ++it) {
    std::vector<std::size_t> empty;
    for (std::size_t c = 0; c < k; ++c) {
      if (stats.mass[c] < 1e-10) {
        empty.push_back(c);
        continue;
      }
      for (std::size_t d = 0; d < dim; ++d) {
        const double m1 = stats.first[c * dim + d] / stats.mass[c];
        const double m2 = stats.second[c * dim + d] / stats.mass[c];
        means[c * dim + d] = mean[d] + m1;
        vars[c * dim + d] = std::max(m2 - m1 * m1, floor[d]);
      }
      weights[c] = stats.mass[c];
    }
    if (!empty.empty()) {
      // Worst-explained frames first; each empty component takes the next.
      std::vector<std::size_t> worst(t);
      std::iota(worst.begin(), worst.end(), 0);
      std::partial_sort(worst.begin(), worst.begin() + static_cast<std::ptrdiff_t>(empty.size()),
                        worst.end(), [&](std::size_t a, std::size_t b) {
                          return frame_ll[a] < frame_ll[b] ||
                                 (frame_ll[a] == frame_ll[b] && a < b);
                        });
      for (std::size_t e = 0; e < empty.size(); ++e) {
        const std::size_t c = empty[e];
        for (std::size_t d = 0; d < dim; ++d) {
          means[c * dim + d] = data.at(worst[e], d);
          vars[c * dim + d] = var[d];
        }
        weights[c] = 1.0;  // one frame's worth of mass
      }
      result.reseeded_components += empty.size();
    }
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<double> normalized(k);
    for (std::size_t c = 0; c < k; ++c) normalized[c] = weights[c] / total;
    result.gmm = DiagonalGmm(normalized, means, vars, dim);
    stats = EStep(result.gmm, data, mean, workers, &frame_ll);
    result.loglik_trace.push_back(stats.loglik);
  }
  return result;
}

double AverageLogLikelihood(const DiagonalGmm &gmm, const FeatureMatrix &features,
                            bool average) {
  if (features.rows == 0) throw DataError("no frames to score");
  if (features.cols != gmm.dim())
    throw ShapeError("feature dimension " + std::to_string(features.cols) +
                     " does not match GMM dimension " + std::to_string(gmm.dim()));
  std::vector<double> scratch(gmm.num_components());
  double sum = 0.0;
  for (std::size_t t = 0; t < features.rows; ++t) {
    auto x = features.row(t);
    for (double v : x)
      if (!std::isfinite(v))
        throw NumericError("non-finite feature value in frame " + std::to_string(t));
    sum += gmm.ComponentLogLikelihoods(x, scratch);
  }
  return average ? sum / static_cast<double>(features.rows) : sum;
}

double LlrScore(const FeatureMatrix &features, const DiagonalGmm &genuine,
                const DiagonalGmm &spoof, bool average) {
  if (genuine.dim() != spoof.dim())
    throw ShapeError("genuine and spoof GMMs differ in dimension (" +
                     std::to_string(genuine.dim()) + " vs " +
                     std::to_string(spoof.dim()) + ")");
  return AverageLogLikelihood(genuine, features, average) -
         AverageLogLikelihood(spoof, features, average);
}

namespace {

void AppendGmm(const std::string &prefix, const DiagonalGmm &gmm, RecordFile *file) {
  auto add = [&](const std::string &name, const std::vector<double> &v, Shape shape) {
    NamedArray a{prefix + "." + name, std::move(shape), {}};
    a.values.assign(v.begin(), v.end());
    file->arrays.push_back(std::move(a));
  };
  const std::size_t k = gmm.num_components(), d = gmm.dim();
  add("weights", gmm.weights(), {k});
  add("means", gmm.means(), {k, d});
  add("variances", gmm.variances(), {k, d});
}

DiagonalGmm ReadGmm(const std::string &prefix, const RecordFile &file,
                    const std::string &source) {
  auto get = [&](const std::string &name) -> const NamedArray & {
    const NamedArray *a = file.Find(prefix + "." + name);
    if (a == nullptr) throw DataError(source + ": missing parameter " + prefix + "." + name);
    return *a;
  };
  const NamedArray &w = get("weights");
  const NamedArray &m = get("means");
  const NamedArray &v = get("variances");
  if (w.shape.size() != 1 || m.shape.size() != 2 || v.shape != m.shape ||
      m.shape[0] != w.shape[0])
    throw DataError(source + ": inconsistent shapes for GMM " + prefix);
  // Weights are stored in single precision; restore the exact simplex.
  std::vector<double> weights(w.values.begin(), w.values.end());
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double &x : weights) x /= total;
  return DiagonalGmm(std::move(weights),
                     std::vector<double>(m.values.begin(), m.values.end()),
                     std::vector<double>(v.values.begin(), v.values.end()), m.shape[1]);
}

}  // namespace

void SaveGmmBaseline(const GmmBaseline &model, const std::filesystem::path &path) {
  FeatureConfig features = model.features;
  GmmConfig gmm = model.gmm;
  ConfigFields ff, gf;
  features.Register(&ff);
  gmm.Register(&gf);
  RecordFile file;
  file.text = "kind=gmm\n[features]\n" + ff.ToText() + "[gmm]\n" + gf.ToText();
  AppendGmm("genuine", model.genuine, &file);
  AppendGmm("spoof", model.spoof, &file);
  WriteRecordFile(path, file);
}

GmmBaseline LoadGmmBaseline(const std::filesystem::path &path) {
  RecordFile file = ReadRecordFile(path);
  auto sections = SplitSections(file.text);
  if (sections[""].find("kind=gmm") == std::string::npos)
    throw DataError(path.string() + ": not a GMM baseline model file");
  GmmBaseline model;
  {
    ConfigFields fields;
    model.features.Register(&fields);
    fields.Parse(sections["features"], path.string() + " [features]");
  }
  {
    ConfigFields fields;
    model.gmm.Register(&fields);
    fields.Parse(sections["gmm"], path.string() + " [gmm]");
  }
  model.genuine = ReadGmm("genuine", file, path.string());
  model.spoof = ReadGmm("spoof", file, path.string());
  if (model.genuine.dim() != model.features.Dim() || model.spoof.dim() != model.features.Dim())
    throw DataError(path.string() + ": GMM dimension does not match the feature config");
  return model;
}

}  // namespace rawspoof
