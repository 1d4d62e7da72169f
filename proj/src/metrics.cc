// src/metrics.cc

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

#include "rawspoof/metrics.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rawspoof/config.h"
#include "rawspoof/errors.h"

namespace rawspoof {

namespace {

void SplitPopulations(std::span<const ScoreRecord> records,
                      std::vector<double> *genuine, std::vector<double> *attack) {
  for (const auto &r : records) {
    if (!std::isfinite(r.score))
      throw DataError("non-finite score for utterance " + r.utterance_id);
    (r.truth == Truth::kGenuine ? genuine : attack)->push_back(r.score);
  }
}

void RequireBoth(const std::vector<double> &genuine, const std::vector<double> &attack,
                 const char *which) {
  if (genuine.empty())
    throw DataError(std::string(which) + " set has no genuine scores (FRR undefined)");
  if (attack.empty())
    throw DataError(std::string(which) + " set has no attack scores (FAR undefined)");
}

}  // namespace

double FalseAcceptanceRate(std::span<const double> attack_scores, double threshold) {
  if (attack_scores.empty())
    throw DataError("FAR: no attack scores (attack population missing)");
  std::size_t accepted = 0;
  for (double s : attack_scores)
    if (s >= threshold) ++accepted;
  return static_cast<double>(accepted) / static_cast<double>(attack_scores.size());
}

double FalseRejectionRate(std::span<const double> genuine_scores, double threshold) {
  if (genuine_scores.empty())
    throw DataError("FRR: no genuine scores (genuine population missing)");
  std::size_t rejected = 0;
  for (double s : genuine_scores)
    if (s < threshold) ++rejected;
  return static_cast<double>(rejected) / static_cast<double>(genuine_scores.size());
}

ThresholdChoice SelectThreshold(std::span<const ScoreRecord> dev_records) {
  std::vector<double> genuine, attack;
  SplitPopulations(dev_records, &genuine, &attack);
  RequireBoth(genuine, attack, "dev");
  std::sort(genuine.begin(), genuine.end());
  std::sort(attack.begin(), attack.end());
  const double ng = static_cast<double>(genuine.size());
  const double na = static_cast<double>(attack.size());

  // Counts below a threshold come from lower_bound on the sorted lists.
  auto evaluate = [&](double theta) {
    const auto genuine_below = static_cast<std::size_t>(
        std::lower_bound(genuine.begin(), genuine.end(), theta) - genuine.begin());
    const auto attack_below = static_cast<std::size_t>(
        std::lower_bound(attack.begin(), attack.end(), theta) - attack.begin());
    ThresholdChoice c;
    c.threshold = theta;
    c.far = static_cast<double>(attack.size() - attack_below) / na;
    c.frr = static_cast<double>(genuine_below) / ng;
    c.metric = (c.far + c.frr) / 2.0;
    return c;
  };

  std::vector<double> candidates;
  candidates.reserve(genuine.size() + attack.size());
  std::merge(genuine.begin(), genuine.end(), attack.begin(), attack.end(),
             std::back_inserter(candidates));
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  ThresholdChoice best = evaluate(candidates.front());
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    ThresholdChoice c = evaluate(candidates[i]);
    if (c.metric < best.metric) best = c;
  }
  const double below_min = std::nextafter(candidates.front(),
                                          -std::numeric_limits<double>::infinity());
  ThresholdChoice sentinel = evaluate(below_min);
  if (sentinel.metric < best.metric) best = sentinel;
  return best;
}

std::map<std::string, CategoryMetrics> PerCategoryReport(
    std::span<const ScoreRecord> eval_records, double theta_dev,
    std::span<const std::string> expected_categories,
    std::vector<std::string> *warnings) {
  std::vector<double> genuine, attack;
  SplitPopulations(eval_records, &genuine, &attack);
  RequireBoth(genuine, attack, "eval");
  const double frr_pct = 100.0 * FalseRejectionRate(genuine, theta_dev);

  std::map<std::string, std::vector<double>> by_category;
  std::size_t untagged = 0;
  for (const auto &r : eval_records) {
    if (r.truth != Truth::kAttack) continue;
    if (r.category.empty()) {
      ++untagged;
      continue;
    }
    by_category[r.category].push_back(r.score);
  }
  if (untagged > 0 && warnings != nullptr)
    warnings->push_back(std::to_string(untagged) +
                        " attack record(s) without a category omitted from the "
                        "per-category table");
  for (const auto &c : expected_categories) {
    if (!by_category.count(c) && warnings != nullptr)
      warnings->push_back("category " + c + " has no eval attacks; omitted");
  }

  std::map<std::string, CategoryMetrics> out;
  for (const auto &[name, scores] : by_category) {
    CategoryMetrics m;
    m.far = 100.0 * FalseAcceptanceRate(scores, theta_dev);
    m.hter = (m.far + frr_pct) / 2.0;
    m.attack_count = scores.size();
    out[name] = m;
  }
  return out;
}

MetricsReport ComputeHter(std::span<const ScoreRecord> eval_records, double theta_dev) {
  std::vector<double> genuine, attack;
  SplitPopulations(eval_records, &genuine, &attack);
  RequireBoth(genuine, attack, "eval");
  MetricsReport report;
  report.theta_dev = theta_dev;
  report.far_eval = 100.0 * FalseAcceptanceRate(attack, theta_dev);
  report.frr_eval = 100.0 * FalseRejectionRate(genuine, theta_dev);
  report.hter_eval = (report.far_eval + report.frr_eval) / 2.0;
  report.genuine_count = genuine.size();
  report.attack_count = attack.size();
  return report;
}

MetricsReport EvaluateProtocol(std::span<const ScoreRecord> dev,
                               std::span<const ScoreRecord> eval,
                               std::span<const std::string> expected_categories) {
  const ThresholdChoice choice = SelectThreshold(dev);
  MetricsReport report = ComputeHter(eval, choice.threshold);
  report.dev_metric = 100.0 * choice.metric;
  report.per_category = PerCategoryReport(eval, choice.threshold,
                                          expected_categories, &report.warnings);
  return report;
}

std::string FormatReportJson(const MetricsReport &report) {
  nlohmann::json j;
  j["theta_dev"] = report.theta_dev;
  j["dev_metric"] = report.dev_metric;
  j["far_eval"] = report.far_eval;
  j["frr_eval"] = report.frr_eval;
  j["hter_eval"] = report.hter_eval;
  j["counts"] = {{"genuine", report.genuine_count}, {"attack", report.attack_count}};
  nlohmann::json cats = nlohmann::json::object();
  for (const auto &[name, m] : report.per_category)
    cats[name] = {{"far", m.far}, {"hter", m.hter}, {"attack_count", m.attack_count}};
  j["per_category"] = cats;
  j["warnings"] = report.warnings;
  return j.dump(2) + "\n";
}

std::string FormatReportTable(const MetricsReport &report) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof(line), "theta_dev  %.6g   (dev (FAR+FRR)/2 = %.2f%%)\n",
                report.theta_dev, report.dev_metric);
  os << line;
  std::snprintf(line, sizeof(line),
                "eval       FAR %.2f%%  FRR %.2f%%  HTER %.2f%%  (%zu genuine, %zu attack)\n",
                report.far_eval, report.frr_eval, report.hter_eval,
                report.genuine_count, report.attack_count);
  os << line;
  os << "category               attacks      FAR     HTER\n";
  for (const auto &[name, m] : report.per_category) {
    std::snprintf(line, sizeof(line), "%-20s %9zu %7.2f%% %7.2f%%\n", name.c_str(),
                  m.attack_count, m.far, m.hter);
    os << line;
  }
  for (const auto &w : report.warnings) os << "warning: " << w << '\n';
  return os.str();
}

std::string FormatScores(std::span<const ScoreRecord> records) {
  std::string out;
  for (const auto &r : records) {
    out += r.utterance_id + '\t' + FormatDouble(r.score) + '\t' +
           (r.truth == Truth::kGenuine ? "GENUINE" : "ATTACK") + '\t' +
           (r.category.empty() ? std::string("-") : r.category) + '\n';
  }
  return out;
}

std::vector<ScoreRecord> ParseScores(const std::string &text, const std::string &source) {
  std::vector<ScoreRecord> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::string where = source + ":" + std::to_string(line_no);
    std::vector<std::string> f;
    std::size_t start = 0;
    while (true) {
      auto tab = line.find('\t', start);
      f.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (f.size() != 4)
      throw DataError(where + ": expected 4 tab-separated fields, got " +
                      std::to_string(f.size()));
    ScoreRecord r;
    r.utterance_id = f[0];
    auto [ptr, ec] = std::from_chars(f[1].data(), f[1].data() + f[1].size(), r.score);
    if (ec != std::errc() || ptr != f[1].data() + f[1].size() || !std::isfinite(r.score))
      throw DataError(where + ": bad score '" + f[1] + "'");
    if (f[2] == "GENUINE") r.truth = Truth::kGenuine;
    else if (f[2] == "ATTACK") r.truth = Truth::kAttack;
    else throw DataError(where + ": unknown truth '" + f[2] + "'");
    r.category = f[3] == "-" ? std::string() : f[3];
    out.push_back(std::move(r));
  }
  return out;
}

void WriteScores(const std::filesystem::path &path, std::span<const ScoreRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << FormatScores(records);
}

std::vector<ScoreRecord> ReadScores(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseScores(buf.str(), path.string());
}

}  // namespace rawspoof
