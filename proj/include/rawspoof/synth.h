// rawspoof/synth.h

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

#ifndef RAWSPOOF_SYNTH_H_
#define RAWSPOOF_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "rawspoof/config.h"
#include "rawspoof/dataset.h"
#include "rawspoof/random.h"

namespace rawspoof {

/// Size of a synthetic corpus: utterances per class in each split.
struct SynthSpec {
  std::size_t train_per_class = 10;
  std::size_t dev_per_class = 10;
  std::size_t eval_per_class = 10;
  double duration_s = 1.0;

  void Register(ConfigFields *fields);
  void Validate() const;
};

SynthSpec ParseSynthSpec(std::string_view text, std::string_view source = "spec");

/**
   One synthetic waveform of class `label`, peak-scaled to 0.5:
     GENUINE  harmonic series under a syllable-rate envelope with silent
              pauses, band-limited below 4 kHz
     SS       a sum of steady pure tones
     VC       repeating linear chirps
     RE       a genuine-style signal with an echo and broadband noise added
   The families are separable by construction; they stand in for real
   speech only to exercise the pipeline end to end.
 */
std::vector<double> SynthesizeSignal(Label label, std::size_t num_samples,
                                     Rng &rng);

/// Writes WAV files under `out_dir`/wav/<split>/ and `out_dir`/manifest.tsv.
/// File k draws from DeriveRng(seed, k), so output is byte-identical for a
/// given seed regardless of `workers`.
Manifest GenerateSyntheticCorpus(const SynthSpec &spec, std::uint64_t seed,
                                 const std::filesystem::path &out_dir,
                                 std::size_t workers = 1);

}  // namespace rawspoof

#endif  // RAWSPOOF_SYNTH_H_
