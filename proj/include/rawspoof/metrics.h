// rawspoof/metrics.h

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

#ifndef RAWSPOOF_METRICS_H_
#define RAWSPOOF_METRICS_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace rawspoof {

enum class Truth { kGenuine, kAttack };

struct ScoreRecord {
  std::string utterance_id;
  double score = 0.0;  // higher means more genuine
  Truth truth = Truth::kGenuine;
  std::string category;  // attack category; empty for genuine
};

/// Fraction of attack scores >= threshold.
double FalseAcceptanceRate(std::span<const double> attack_scores, double threshold);
/// Fraction of genuine scores < threshold.
double FalseRejectionRate(std::span<const double> genuine_scores, double threshold);

struct ThresholdChoice {
  double threshold = 0.0;
  double far = 0.0;     // fractions at the threshold
  double frr = 0.0;
  double metric = 0.0;  // (far + frr) / 2
};

/**
   Threshold minimizing (FAR + FRR) / 2 on a development set.  The error is
   piecewise constant between observed scores, so the candidates are the
   distinct observed scores plus one value just below the minimum; this
   sweep is exact.  Among equally good observed scores the smallest wins.
   The below-minimum candidate always ties with the minimum score and is
   therefore never selected.  Throws DataError unless both populations are
   present.
 */
ThresholdChoice SelectThreshold(std::span<const ScoreRecord> dev_records);

struct CategoryMetrics {
  double far = 0.0;   // percent
  double hter = 0.0;  // percent, (far + frr_all) / 2
  std::size_t attack_count = 0;
};

struct MetricsReport {
  double theta_dev = 0.0;
  double dev_metric = 0.0;  // percent
  double far_eval = 0.0;    // percent
  double frr_eval = 0.0;    // percent
  double hter_eval = 0.0;   // percent
  std::size_t genuine_count = 0;
  std::size_t attack_count = 0;
  std::map<std::string, CategoryMetrics> per_category;  // sorted by name
  std::vector<std::string> warnings;
};

/// FAR, FRR and HTER of the evaluation records at the fixed threshold.
MetricsReport ComputeHter(std::span<const ScoreRecord> eval_records, double theta_dev);

/**
   Per-attack-category FAR and HTER at the fixed threshold.  FAR uses only
   the attacks of that category; the FRR term is shared and computed over
   all genuine records.  Categories listed in `expected_categories` that
   have no attack records, and attacks without a category, are omitted with
   a warning rather than reported as zero.
 */
std::map<std::string, CategoryMetrics> PerCategoryReport(
    std::span<const ScoreRecord> eval_records, double theta_dev,
    std::span<const std::string> expected_categories = {},
    std::vector<std::string> *warnings = nullptr);

/// Select the threshold on `dev`, then report HTER and the per-category
/// breakdown on `eval`.
MetricsReport EvaluateProtocol(std::span<const ScoreRecord> dev,
                               std::span<const ScoreRecord> eval,
                               std::span<const std::string> expected_categories = {});

/// Machine-readable report (JSON, keys sorted, full precision).
std::string FormatReportJson(const MetricsReport &report);
/// Human-readable table, percentages to two decimals.
std::string FormatReportTable(const MetricsReport &report);

/// Score file: one `id <TAB> score <TAB> GENUINE|ATTACK <TAB> category` line
/// per utterance, category "-" for genuine.
std::string FormatScores(std::span<const ScoreRecord> records);
std::vector<ScoreRecord> ParseScores(const std::string &text,
                                     const std::string &source = "scores");
void WriteScores(const std::filesystem::path &path, std::span<const ScoreRecord> records);
std::vector<ScoreRecord> ReadScores(const std::filesystem::path &path);

}  // namespace rawspoof

#endif  // RAWSPOOF_METRICS_H_
