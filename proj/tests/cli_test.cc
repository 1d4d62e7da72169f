// tests/cli_test.cc

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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <string>

#include "json.hpp"
#include "rawspoof/dataset.h"
#include "test_util.h"

namespace rawspoof {
namespace {

struct Outcome {
  int code = -1;
  std::string output;
};

Outcome Cli(const TempDir &dir, const std::string &args) {
  const auto log = dir.path() / "cli.log";
  const std::string cmd = std::string(RAWSPOOF_CLI) + " " + args + " > '" + log.string() +
                          "' 2>&1";
  const int status = std::system(cmd.c_str());
  Outcome o;
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.output = ReadString(log);
  return o;
}

// A small corpus and model configuration shared by the pipeline tests.
class CliPipeline : public ::testing::Test {
 protected:
  void SetUp() override {
    const std::string d = dir_.path().string();
    WriteString(dir_.path() / "spec.cfg",
                "train_per_class=2\ndev_per_class=1\neval_per_class=1\nduration_s=0.5\n");
    WriteString(dir_.path() / "model.cfg",
                "freq_maps=4\nlstm_size=4\ndnn_hidden=4\nseq_len=5\nbatch_size=4\n"
                "max_epochs=2\ngmm_num_components=2\ngmm_em_iterations=2\n");
    ASSERT_EQ(Cli(dir_, "synth --spec " + d + "/spec.cfg --out " + d + "/corpus --seed 3").code, 0);
  }
  std::string P(const std::string &name) const { return (dir_.path() / name).string(); }
  TempDir dir_;
};

TEST(Cli, UsageErrorsExitOne) {
  TempDir dir;
  EXPECT_EQ(Cli(dir, "").code, 1);
  EXPECT_EQ(Cli(dir, "frobnicate").code, 1);
  EXPECT_EQ(Cli(dir, "train --bogus-flag").code, 1);
  EXPECT_EQ(Cli(dir, "--help").code, 0);
  EXPECT_EQ(Cli(dir, "gradcheck --layer nonsense").code, 1);
}

TEST(Cli, MissingInputsExitTwo) {
  TempDir dir;
  const std::string d = dir.path().string();
  EXPECT_EQ(Cli(dir, "train --manifest " + d + "/none.tsv --out " + d + "/m").code, 2);
  EXPECT_EQ(Cli(dir, "eval --model " + d + "/none --manifest " + d + "/none.tsv --report " + d +
                         "/r.json").code,
            2);
  EXPECT_EQ(Cli(dir, "score --model " + d + "/none --wav " + d + "/x.wav").code, 2);
}

TEST(Cli, GradcheckPassesOnOneLayer) {
  TempDir dir;
  const Outcome o = Cli(dir, "gradcheck --layer conv1d --seeds 2");
  EXPECT_EQ(o.code, 0) << o.output;
  EXPECT_NE(o.output.find("conv1d"), std::string::npos);
}

TEST_F(CliPipeline, TrainEvalScore) {
  Outcome o = Cli(dir_, "train --manifest " + P("corpus/manifest.tsv") + " --config " +
                            P("model.cfg") + " --out " + P("m.ckpt") + " --seed 1");
  ASSERT_EQ(o.code, 0) << o.output;
  EXPECT_NE(o.output.find("parameters"), std::string::npos);
  const std::string history = ReadString(P("m.ckpt.history.jsonl"));
  EXPECT_EQ(std::count(history.begin(), history.end(), '\n'), 2);

  o = Cli(dir_, "eval --model " + P("m.ckpt") + " --manifest " + P("corpus/manifest.tsv") +
                    " --report " + P("r.json") + " --scores " + P("s.tsv"));
  ASSERT_EQ(o.code, 0) << o.output;
  const auto report = nlohmann::json::parse(ReadString(P("r.json")));
  EXPECT_TRUE(report.contains("hter_eval"));
  EXPECT_TRUE(report.contains("theta_dev"));
  EXPECT_FALSE(ReadString(P("s.tsv")).empty());

  const Manifest m = LoadManifest(P("corpus/manifest.tsv"));
  o = Cli(dir_, "score --model " + P("m.ckpt") + " --wav " + m.Resolve(m.records[0]).string());
  ASSERT_EQ(o.code, 0) << o.output;
  EXPECT_LE(std::stod(o.output), 0.0);
}

TEST_F(CliPipeline, EvalWithoutDevSplit) {
  ASSERT_EQ(Cli(dir_, "train --manifest " + P("corpus/manifest.tsv") + " --config " +
                          P("model.cfg") + " --out " + P("m.ckpt")).code,
            0);
  const Manifest m = LoadManifest(P("corpus/manifest.tsv"));
  Manifest no_dev;
  no_dev.root = m.root;
  for (const auto &r : m.records)
    if (r.split != Split::kDev) no_dev.records.push_back(r);
  SaveManifest(no_dev, P("corpus/nodev.tsv"));
  const Outcome o = Cli(dir_, "eval --model " + P("m.ckpt") + " --manifest " +
                                  P("corpus/nodev.tsv") + " --report " + P("r.json"));
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.output.find("dev split required for threshold selection"), std::string::npos)
      << o.output;
}

TEST_F(CliPipeline, BadConfigKeyIsUsageError) {
  WriteString(dir_.path() / "bad.cfg", "no_such_key=3\n");
  EXPECT_EQ(Cli(dir_, "train --manifest " + P("corpus/manifest.tsv") + " --config " +
                          P("bad.cfg") + " --out " + P("m.ckpt")).code,
            1);
}

TEST_F(CliPipeline, GmmTrainAndEval) {
  Outcome o = Cli(dir_, "gmm-train --manifest " + P("corpus/manifest.tsv") + " --config " +
                            P("model.cfg") + " --out " + P("gmm.bin") + " --seed 2");
  ASSERT_EQ(o.code, 0) << o.output;
  o = Cli(dir_, "gmm-eval --model " + P("gmm.bin") + " --manifest " +
                    P("corpus/manifest.tsv") + " --report " + P("g.json"));
  ASSERT_EQ(o.code, 0) << o.output;
  EXPECT_TRUE(nlohmann::json::parse(ReadString(P("g.json"))).contains("hter_eval"));
  // A GMM file is not a CLDNN checkpoint.
  EXPECT_EQ(Cli(dir_, "eval --model " + P("gmm.bin") + " --manifest " +
                          P("corpus/manifest.tsv") + " --report " + P("x.json")).code,
            2);
}

}  // namespace
}  // namespace rawspoof
