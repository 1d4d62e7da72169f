// tools/rawspoof.cc

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

// Command-line front end: corpus synthesis, CLDNN training and evaluation,
// single-file scoring, gradient checking and the GMM baseline.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rawspoof/cldnn.h"
#include "rawspoof/dataset.h"
#include "rawspoof/errors.h"
#include "rawspoof/features.h"
#include "rawspoof/gmm.h"
#include "rawspoof/gradient_suite.h"
#include "rawspoof/metrics.h"
#include "rawspoof/parallel.h"
#include "rawspoof/run_config.h"
#include "rawspoof/synth.h"
#include "rawspoof/trainer.h"

namespace rs = rawspoof;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

struct Options {
  std::string spec, out, manifest, config, model, report, scores, wav, layer,
      history, preset;
  std::optional<std::uint64_t> seed;
  std::size_t workers = 0;
  std::size_t seeds = 20;
};

void PrintBlock(const std::string &title, const std::string &body) {
  std::cout << "# " << title << "\n" << body;
  if (!body.empty() && body.back() != '\n') std::cout << '\n';
  std::cout.flush();
}

rs::RunConfig ResolveConfig(const Options &opt) {
  rs::RunConfig config = opt.config.empty() ? rs::RunConfig{} : rs::LoadRunConfig(opt.config);
  if (!opt.preset.empty()) {
    if (!opt.config.empty())
      throw rs::ConfigError("--preset and --config are exclusive; put preset= in the file");
    rs::ApplyPreset(opt.preset, &config);
  }
  if (opt.seed) config.train.seed = *opt.seed;
  if (opt.workers) config.train.workers = opt.workers;
  config.Validate();
  return config;
}

void RequireSplit(const rs::Manifest &m, rs::Split split, const std::string &message) {
  if (!m.HasSplit(split)) throw rs::DataError(message);
}

// Attack categories mentioned anywhere in the manifest, so that categories
// missing from the eval split are reported as such.
std::vector<std::string> ManifestCategories(const rs::Manifest &m) {
  std::set<std::string> names;
  for (const auto &r : m.records)
    if (r.label != rs::Label::kGenuine && !r.category.empty()) names.insert(r.category);
  return {names.begin(), names.end()};
}

void WriteText(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw rs::DataError("cannot write " + path);
  out << text;
  if (!out) throw rs::DataError("write failed for " + path);
}

void Report(const std::vector<rs::ScoreRecord> &dev, const std::vector<rs::ScoreRecord> &eval,
            const rs::Manifest &manifest, const Options &opt) {
  if (!opt.scores.empty()) {
    std::vector<rs::ScoreRecord> all(dev);
    all.insert(all.end(), eval.begin(), eval.end());
    rs::WriteScores(opt.scores, all);
  }
  const auto categories = ManifestCategories(manifest);
  const rs::MetricsReport report = rs::EvaluateProtocol(dev, eval, categories);
  WriteText(opt.report, rs::FormatReportJson(report));
  std::cout << rs::FormatReportTable(report);
}

int RunSynth(const Options &opt) {
  rs::SynthSpec spec;
  if (!opt.spec.empty()) spec = rs::ParseSynthSpec(rs::ReadTextFile(opt.spec), opt.spec);
  spec.Validate();
  const std::uint64_t seed = opt.seed.value_or(0);
  rs::ConfigFields fields;
  spec.Register(&fields);
  PrintBlock("synth spec", fields.ToText() + "seed=" + std::to_string(seed) + "\n");
  const rs::Manifest m = rs::GenerateSyntheticCorpus(spec, seed, opt.out, opt.workers);
  std::cout << "wrote " << m.records.size() << " utterances and "
            << (std::filesystem::path(opt.out) / "manifest.tsv").string() << "\n";
  return kExitOk;
}

int RunTrain(const Options &opt) {
  rs::RunConfig config = ResolveConfig(opt);
  PrintBlock("resolved config", config.ToText());
  const rs::Manifest manifest = rs::LoadManifest(opt.manifest);
  RequireSplit(manifest, rs::Split::kTrain, "train split required for training");
  RequireSplit(manifest, rs::Split::kDev, "dev split required for model selection");
  const auto train = rs::PrepareSplit(manifest, rs::Split::kTrain, config.model,
                                      config.train.workers);
  const auto dev = rs::PrepareSplit(manifest, rs::Split::kDev, config.model,
                                    config.train.workers);

  rs::Rng init = rs::DeriveRng(config.train.seed, 0);
  rs::CldnnModel model = rs::CldnnModel::Build(config.model, init);
  PrintBlock("model", model.ShapeSummary() +
                          "parameters: " + std::to_string(model.ParameterCount()) + "\n");

  const std::string history_path = opt.history.empty() ? opt.out + ".history.jsonl" : opt.history;
  std::ofstream history(history_path, std::ios::binary);
  if (!history) throw rs::DataError("cannot write " + history_path);

  rs::TrainHooks hooks;
  hooks.on_epoch = [&](const rs::EpochRecord &r) {
    const std::string line = rs::FormatHistoryLine(r);
    history << line << '\n';
    history.flush();
    char elapsed[32];
    std::snprintf(elapsed, sizeof(elapsed), "%.1f", r.elapsed_seconds);
    std::cout << line << "  elapsed_s=" << elapsed << std::endl;
  };
  rs::TrainResult result = rs::Train(model, train, dev, config.train, hooks);
  for (const auto &w : result.warnings) std::cerr << "warning: " << w << "\n";
  rs::SaveCheckpoint(result.best.model, result.best.meta, opt.out);
  std::cout << "best epoch " << result.best.meta.epoch << " (dev metric "
            << rs::FormatDouble(result.best.meta.dev_metric) << "%)"
            << (result.stopped_early ? ", stopped early" : "") << "; wrote " << opt.out
            << "\n";
  return kExitOk;
}

int RunEval(const Options &opt) {
  const rs::Checkpoint ckpt = rs::LoadCheckpoint(opt.model);
  rs::ModelConfig mc = ckpt.model.config();
  rs::ConfigFields fields;
  mc.Register(&fields);
  PrintBlock("checkpoint config", fields.ToText() + "workers=" + std::to_string(opt.workers) + "\n");
  const rs::Manifest manifest = rs::LoadManifest(opt.manifest);
  RequireSplit(manifest, rs::Split::kDev, "dev split required for threshold selection");
  RequireSplit(manifest, rs::Split::kEval, "eval split required for evaluation");
  const auto dev = rs::PrepareSplit(manifest, rs::Split::kDev, mc, opt.workers);
  const auto eval = rs::PrepareSplit(manifest, rs::Split::kEval, mc, opt.workers);
  Report(rs::ScoreUtterances(ckpt.model, dev, opt.workers),
         rs::ScoreUtterances(ckpt.model, eval, opt.workers), manifest, opt);
  return kExitOk;
}

int RunScore(const Options &opt) {
  const rs::Checkpoint ckpt = rs::LoadCheckpoint(opt.model);
  rs::Utterance utt;
  utt.id = opt.wav;
  utt.samples = rs::ReadWav(opt.wav).samples;
  const rs::PreparedUtterance p = rs::PrepareUtterance(utt, ckpt.model.config());
  std::cout << rs::FormatDouble(ckpt.model.Score(rs::MakeEvalSequence(p.frames, p.id)))
            << "\n";
  return kExitOk;
}

int RunGradcheck(const Options &opt) {
  rs::GradientSuiteOptions options;
  options.seeds = opt.seeds;
  std::cout << "# gradient suite: seeds=" << options.seeds
            << " layer_tolerance=" << rs::FormatDouble(options.layer_tolerance)
            << " model_tolerance=" << rs::FormatDouble(options.model_tolerance)
            << " model_coordinates=" << options.model_coordinates << "\n";
  std::vector<std::string> names =
      opt.layer.empty() ? rs::GradientCheckNames() : std::vector<std::string>{opt.layer};
  bool ok = true;
  for (const auto &name : names) {
    const auto s = rs::RunGradientCheck(name, options);
    char line[160];
    std::snprintf(line, sizeof(line), "%-11s trials=%zu coords=%zu max_rel_err=%.3e tol=%.0e %s\n",
                  s.name.c_str(), s.trials, s.coordinates, s.max_relative_error,
                  s.tolerance, s.passed ? "PASS" : "FAIL");
    std::cout << line << std::flush;
    ok = ok && s.passed;
  }
  return ok ? kExitOk : kExitNumeric;
}

// Features of every record in `split`, in manifest order.
std::vector<rs::FeatureMatrix> SplitFeatures(const rs::Manifest &m, rs::Split split,
                                             const rs::FeatureConfig &fc,
                                             std::size_t workers,
                                             std::vector<const rs::ManifestRecord *> *records) {
  *records = m.InSplit(split);
  std::vector<rs::FeatureMatrix> out(records->size());
  rs::ParallelFor(records->size(), workers, [&](std::size_t i) {
    const rs::Utterance utt = rs::LoadUtterance(m, *(*records)[i]);
    try {
      out[i] = rs::ExtractFeatures(utt.samples, fc);
    } catch (const rs::DataError &e) {
      throw rs::DataError(utt.id + ": " + e.what());
    }
  });
  return out;
}

int RunGmmTrain(const Options &opt) {
  rs::RunConfig config = ResolveConfig(opt);
  PrintBlock("resolved config", config.ToText());
  const rs::Manifest manifest = rs::LoadManifest(opt.manifest);
  RequireSplit(manifest, rs::Split::kTrain, "train split required for training");
  std::vector<const rs::ManifestRecord *> records;
  const auto feats = SplitFeatures(manifest, rs::Split::kTrain, config.features,
                                   config.train.workers, &records);
  rs::FeatureMatrix genuine, spoof;
  for (std::size_t i = 0; i < feats.size(); ++i)
    (records[i]->label == rs::Label::kGenuine ? genuine : spoof).Append(feats[i]);
  if (genuine.rows == 0) throw rs::DataError("no genuine training utterances");
  if (spoof.rows == 0) throw rs::DataError("no spoofed training utterances");

  rs::GmmBaseline model;
  model.features = config.features;
  model.gmm = config.gmm;
  auto fit = [&](const char *name, const rs::FeatureMatrix &data, std::uint64_t stream) {
    rs::Rng rng = rs::DeriveRng(config.train.seed, stream);
    rs::EmResult r = rs::FitGmm(data, config.gmm.num_components, config.gmm.em_iterations,
                                config.gmm.var_floor_ratio, rng, config.train.workers);
    std::cout << name << ": " << data.rows << " frames, K=" << config.gmm.num_components
              << ", avg loglik " << rs::FormatDouble(r.loglik_trace.front() / data.rows)
              << " -> " << rs::FormatDouble(r.loglik_trace.back() / data.rows)
              << ", reseeded " << r.reseeded_components << "\n";
    return r.gmm;
  };
  model.genuine = fit("genuine", genuine, 10);
  model.spoof = fit("spoof", spoof, 11);
  rs::SaveGmmBaseline(model, opt.out);
  std::cout << "wrote " << opt.out << "\n";
  return kExitOk;
}

int RunGmmEval(const Options &opt) {
  const rs::GmmBaseline model = rs::LoadGmmBaseline(opt.model);
  {
    rs::FeatureConfig fc = model.features;
    rs::GmmConfig gc = model.gmm;
    rs::ConfigFields fields;
    fc.Register(&fields);
    gc.Register(&fields);
    PrintBlock("model config", fields.ToText() + "workers=" + std::to_string(opt.workers) + "\n");
  }
  const rs::Manifest manifest = rs::LoadManifest(opt.manifest);
  RequireSplit(manifest, rs::Split::kDev, "dev split required for threshold selection");
  RequireSplit(manifest, rs::Split::kEval, "eval split required for evaluation");
  auto score = [&](rs::Split split) {
    std::vector<const rs::ManifestRecord *> records;
    const auto feats = SplitFeatures(manifest, split, model.features, opt.workers, &records);
    std::vector<rs::ScoreRecord> out(feats.size());
    rs::ParallelFor(feats.size(), opt.workers, [&](std::size_t i) {
      out[i].utterance_id = records[i]->id;
      out[i].score = rs::LlrScore(feats[i], model.genuine, model.spoof,
                                  model.gmm.average_frames);
      out[i].truth = records[i]->label == rs::Label::kGenuine ? rs::Truth::kGenuine
                                                              : rs::Truth::kAttack;
      out[i].category = records[i]->category;
    });
    return out;
  };
  Report(score(rs::Split::kDev), score(rs::Split::kEval), manifest, opt);
  return kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Spoofing detection with a raw-waveform CLDNN and a GMM baseline"};
  app.require_subcommand(1);
  Options opt;

  auto *synth = app.add_subcommand("synth", "Generate a synthetic labelled corpus");
  synth->add_option("--spec", opt.spec, "Corpus spec (key=value); defaults if omitted");
  synth->add_option("--out", opt.out, "Output directory")->required();
  synth->add_option("--seed", opt.seed, "Random seed");
  synth->add_option("--workers", opt.workers, "Worker threads (0 = all cores)");

  auto *train = app.add_subcommand("train", "Train a CLDNN");
  train->add_option("--manifest", opt.manifest, "Manifest TSV")->required();
  train->add_option("--config", opt.config, "Run config (key=value)");
  train->add_option("--preset", opt.preset, "Model preset: cldnn1 or cldnn2");
  train->add_option("--out", opt.out, "Checkpoint to write")->required();
  train->add_option("--seed", opt.seed, "Random seed (overrides the config)");
  train->add_option("--history", opt.history, "History file (default <out>.history.jsonl)");
  train->add_option("--workers", opt.workers, "Worker threads (0 = all cores)");

  auto *eval = app.add_subcommand("eval", "Select a threshold on DEV and report on EVAL");
  eval->add_option("--model", opt.model, "Checkpoint")->required();
  eval->add_option("--manifest", opt.manifest, "Manifest TSV")->required();
  eval->add_option("--report", opt.report, "JSON report to write")->required();
  eval->add_option("--scores", opt.scores, "Also write DEV and EVAL scores here");
  eval->add_option("--workers", opt.workers, "Worker threads (0 = all cores)");

  auto *score = app.add_subcommand("score", "Print the genuine log-probability of one file");
  score->add_option("--model", opt.model, "Checkpoint")->required();
  score->add_option("--wav", opt.wav, "16 kHz mono PCM WAV")->required();

  auto *gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient suite");
  gradcheck->add_option("--layer", opt.layer, "Run only this check");
  gradcheck->add_option("--seeds", opt.seeds, "Random trials per check");

  auto *gmm_train = app.add_subcommand("gmm-train", "Train the GMM baseline");
  gmm_train->add_option("--manifest", opt.manifest, "Manifest TSV")->required();
  gmm_train->add_option("--config", opt.config, "Run config (key=value)");
  gmm_train->add_option("--out", opt.out, "Model file to write")->required();
  gmm_train->add_option("--seed", opt.seed, "Random seed (overrides the config)");
  gmm_train->add_option("--workers", opt.workers, "Worker threads (0 = all cores)");

  auto *gmm_eval = app.add_subcommand("gmm-eval", "Evaluate the GMM baseline");
  gmm_eval->add_option("--model", opt.model, "GMM model file")->required();
  gmm_eval->add_option("--manifest", opt.manifest, "Manifest TSV")->required();
  gmm_eval->add_option("--report", opt.report, "JSON report to write")->required();
  gmm_eval->add_option("--scores", opt.scores, "Also write DEV and EVAL scores here");
  gmm_eval->add_option("--workers", opt.workers, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*synth) return RunSynth(opt);
    if (*train) return RunTrain(opt);
    if (*eval) return RunEval(opt);
    if (*score) return RunScore(opt);
    if (*gradcheck) return RunGradcheck(opt);
    if (*gmm_train) return RunGmmTrain(opt);
    if (*gmm_eval) return RunGmmEval(opt);
  } catch (const rs::ConfigError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const rs::NumericError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
