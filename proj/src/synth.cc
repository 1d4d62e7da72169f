// src/synth.cc

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

#include "rawspoof/synth.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "rawspoof/errors.h"
#include "rawspoof/parallel.h"

namespace rawspoof {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kRate = static_cast<double>(kSampleRate);

double Uniform(Rng &rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Syllable-rate envelope: low-passed noise, half-wave rectified, so the
// signal alternates between voiced stretches and silent pauses.
std::vector<double> NoiseEnvelope(std::size_t n, Rng &rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double alpha = 1.0 - std::exp(-kTwoPi * 4.0 / kRate);
  std::vector<double> env(n);
  double state = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    state += alpha * (gauss(rng) * 40.0 - state);
    env[i] = state;
  }
  double peak = 1e-12;
  for (double v : env) peak = std::max(peak, v);
  for (double &v : env) v = std::max(0.0, v) / peak;
  return env;
}

std::vector<double> GenuineSignal(std::size_t n, Rng &rng) {
  const double f0 = Uniform(rng, 100.0, 220.0);
  const double vib_rate = Uniform(rng, 4.0, 7.0);
  const double vib_depth = Uniform(rng, 0.01, 0.03);
  const int harmonics = static_cast<int>(3800.0 / (f0 * (1.0 + vib_depth)));
  std::vector<double> phase0(harmonics);
  for (double &p : phase0) p = Uniform(rng, 0.0, kTwoPi);
  const auto env = NoiseEnvelope(n, rng);

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> out(n);
  double phase = 0.0;
  double n1 = 0.0, n2 = 0.0, n3 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / kRate;
    const double f = f0 * (1.0 + vib_depth * std::sin(kTwoPi * vib_rate * t));
    phase += kTwoPi * f / kRate;
    double v = 0.0;
    for (int k = 1; k <= harmonics; ++k)
      v += std::sin(k * phase + phase0[k - 1]) / k;
    // 4-tap moving average nulls 4 kHz and above-band content of the noise.
    const double w = gauss(rng);
    const double band_noise = 0.25 * (w + n1 + n2 + n3);
    n3 = n2;
    n2 = n1;
    n1 = w;
    out[i] = env[i] * (v + 0.05 * band_noise);
  }
  return out;
}

std::vector<double> PureTones(std::size_t n, Rng &rng) {
  const int tones = std::uniform_int_distribution<int>(1, 3)(rng);
  std::vector<double> freq(tones), amp(tones), phase(tones);
  for (int k = 0; k < tones; ++k) {
    freq[k] = Uniform(rng, 300.0, 3000.0);
    amp[k] = Uniform(rng, 0.5, 1.0);
    phase[k] = Uniform(rng, 0.0, kTwoPi);
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / kRate;
    for (int k = 0; k < tones; ++k)
      out[i] += amp[k] * std::sin(kTwoPi * freq[k] * t + phase[k]);
  }
  return out;
}

std::vector<double> Chirps(std::size_t n, Rng &rng) {
  const double f_lo = Uniform(rng, 200.0, 500.0);
  const double f_hi = Uniform(rng, 2000.0, 3500.0);
  const double period = Uniform(rng, 0.2, 0.5);
  double phase = Uniform(rng, 0.0, kTwoPi);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / kRate;
    const double frac = std::fmod(t, period) / period;
    phase += kTwoPi * (f_lo + (f_hi - f_lo) * frac) / kRate;
    out[i] = std::sin(phase);
  }
  return out;
}

std::vector<double> Replayed(std::size_t n, Rng &rng) {
  const auto source = GenuineSignal(n, rng);
  const auto delay = static_cast<std::size_t>(Uniform(rng, 320.0, 960.0));
  const double gain = Uniform(rng, 0.4, 0.7);
  std::vector<double> out(source);
  for (std::size_t i = delay; i < n; ++i) out[i] += gain * source[i - delay];
  double power = 0.0;
  for (double v : out) power += v * v;
  const double rms = std::sqrt(power / static_cast<double>(n));
  const double snr_db = Uniform(rng, 3.0, 10.0);
  std::normal_distribution<double> noise(0.0, rms * std::pow(10.0, -snr_db / 20.0));
  for (double &v : out) v += noise(rng);
  return out;
}

const char *const kSsCategories[] = {"SS-LP-LP", "SS-LP-HQ-LP"};
const char *const kVcCategories[] = {"VC-LP-LP", "VC-LP-HQ-LP"};
const char *const kReCategories[] = {"RE-LP-LP", "RE-PH1-LP", "RE-PH2-LP",
                                     "RE-PH2-PH3"};

std::string CategoryFor(Label label, std::size_t index) {
  switch (label) {
    case Label::kGenuine: return {};
    case Label::kSS: return kSsCategories[index % 2];
    case Label::kVC: return kVcCategories[index % 2];
    case Label::kRE: return kReCategories[index % 4];
  }
  return {};
}

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char &c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

void SynthSpec::Register(ConfigFields *fields) {
  fields->Add("train_per_class", &train_per_class);
  fields->Add("dev_per_class", &dev_per_class);
  fields->Add("eval_per_class", &eval_per_class);
  fields->Add("duration_s", &duration_s);
}

void SynthSpec::Validate() const {
  if (!(duration_s > 0.0))
    throw ConfigError("duration_s must be positive");
  if (train_per_class + dev_per_class + eval_per_class == 0)
    throw ConfigError("synthetic spec produces no utterances");
}

SynthSpec ParseSynthSpec(std::string_view text, std::string_view source) {
  SynthSpec spec;
  ConfigFields fields;
  spec.Register(&fields);
  fields.Parse(text, source);
  spec.Validate();
  return spec;
}

std::vector<double> SynthesizeSignal(Label label, std::size_t num_samples,
                                     Rng &rng) {
  std::vector<double> s;
  switch (label) {
    case Label::kGenuine: s = GenuineSignal(num_samples, rng); break;
    case Label::kSS: s = PureTones(num_samples, rng); break;
    case Label::kVC: s = Chirps(num_samples, rng); break;
    case Label::kRE: s = Replayed(num_samples, rng); break;
  }
  double peak = 1e-12;
  for (double v : s) peak = std::max(peak, std::abs(v));
  for (double &v : s) v *= 0.5 / peak;
  return s;
}

Manifest GenerateSyntheticCorpus(const SynthSpec &spec, std::uint64_t seed,
                                 const std::filesystem::path &out_dir,
                                 std::size_t workers) {
  spec.Validate();
  Manifest manifest;
  manifest.root = out_dir;
  const std::pair<Split, std::size_t> splits[] = {
      {Split::kTrain, spec.train_per_class},
      {Split::kDev, spec.dev_per_class},
      {Split::kEval, spec.eval_per_class}};
  for (const auto &[split, count] : splits) {
    for (Label label : {Label::kGenuine, Label::kSS, Label::kVC, Label::kRE}) {
      for (std::size_t i = 0; i < count; ++i) {
        char id[96];
        std::snprintf(id, sizeof(id), "%s_%s_%04zu",
                      Lower(SplitName(split)).c_str(),
                      Lower(LabelName(label)).c_str(), i);
        ManifestRecord rec;
        rec.id = id;
        rec.path = "wav/" + Lower(SplitName(split)) + "/" + rec.id + ".wav";
        rec.split = split;
        rec.label = label;
        rec.category = CategoryFor(label, i);
        manifest.records.push_back(std::move(rec));
      }
    }
  }

  std::error_code ec;
  for (const char *dir : {"wav/train", "wav/dev", "wav/eval"}) {
    std::filesystem::create_directories(out_dir / dir, ec);
    if (ec) throw DataError("cannot create " + (out_dir / dir).string() + ": " +
                            ec.message());
  }
  const auto num_samples =
      static_cast<std::size_t>(std::llround(spec.duration_s * kRate));
  ParallelFor(manifest.records.size(), workers, [&](std::size_t k) {
    const ManifestRecord &rec = manifest.records[k];
    Rng rng = DeriveRng(seed, k);
    WriteWav(manifest.Resolve(rec), SynthesizeSignal(rec.label, num_samples, rng));
  });
  SaveManifest(manifest, out_dir / "manifest.tsv");
  return manifest;
}

}  // namespace rawspoof
