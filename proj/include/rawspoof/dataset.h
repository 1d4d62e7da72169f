// rawspoof/dataset.h

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

#ifndef RAWSPOOF_DATASET_H_
#define RAWSPOOF_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rawspoof/random.h"

namespace rawspoof {

inline constexpr int kSampleRate = 16000;
inline constexpr int kNumClasses = 4;

/// Class index order is also the output-neuron order of the network.
enum class Label : int { kGenuine = 0, kSS = 1, kVC = 2, kRE = 3 };
enum class Split { kTrain, kDev, kEval };

std::string_view LabelName(Label label);
std::string_view SplitName(Split split);
/// Parse "GENUINE"/"SS"/"VC"/"RE" and "TRAIN"/"DEV"/"EVAL"; nullopt if unknown.
std::optional<Label> ParseLabel(std::string_view token);
std::optional<Split> ParseSplit(std::string_view token);

struct Utterance {
  std::string id;
  std::vector<double> samples;
  int sample_rate = kSampleRate;
  Label label = Label::kGenuine;
  std::string category;  // empty for genuine
  Split split = Split::kTrain;
};

/// Throws DataError unless the utterance satisfies its invariants.
void ValidateUtterance(const Utterance &utt);

struct WavAudio {
  std::vector<double> samples;  // in [-1, 1)
  int sample_rate = 0;
};

/// Decodes a RIFF/WAVE PCM 16-bit mono 16 kHz file image.
WavAudio ParseWav(std::span<const std::uint8_t> bytes);
WavAudio ReadWav(const std::filesystem::path &path);
/// Encodes samples as PCM 16-bit mono, clipping to the int16 range.
std::vector<std::uint8_t> EncodeWav(std::span<const double> samples,
                                    int sample_rate = kSampleRate);
void WriteWav(const std::filesystem::path &path, std::span<const double> samples,
              int sample_rate = kSampleRate);

/// Zero mean and unit (population) standard deviation over the whole vector.
/// If the standard deviation is below 1e-8 the mean-subtracted vector is
/// returned unscaled.
std::vector<double> Normalize(std::span<const double> samples);

/// Consecutive pieces of `length` samples starting every `hop` samples
/// (hop defaults to `length`, i.e. non-overlapping).  A trailing piece shorter
/// than `length` is dropped; an input shorter than `length` yields nothing.
std::vector<std::vector<double>> Frame(std::span<const double> samples,
                                       std::size_t length, std::size_t hop = 0);

/// S x N block of frames in row-major order, fed to the network as x_1..x_S.
struct FrameSequence {
  std::string utterance_id;
  std::size_t num_frames = 0;    // S
  std::size_t frame_length = 0;  // N
  std::vector<double> frames;    // S * N

  std::span<const double> frame(std::size_t t) const {
    return std::span<const double>(frames).subspan(t * frame_length, frame_length);
  }
};

/// A window of exactly `seq_len` frames.  With at least `seq_len` frames the
/// window start is drawn uniformly; with fewer, the frames are repeated
/// cyclically up to `seq_len`.  Throws DataError on an empty frame list.
FrameSequence MakeTrainingSequence(
    const std::vector<std::vector<double>> &frames, std::size_t seq_len,
    Rng &rng, std::string utterance_id = {});

/// The whole utterance as one sequence (S = frame count).
FrameSequence MakeEvalSequence(const std::vector<std::vector<double>> &frames,
                               std::string utterance_id = {});

struct ManifestRecord {
  std::string id;
  std::string path;  // relative to the manifest's root
  Split split = Split::kTrain;
  Label label = Label::kGenuine;
  std::string category;  // empty for genuine ("-" in the file)
};

/**
   Dataset index.  On disk it is UTF-8 text with one tab-separated record per
   line,

     id <TAB> path <TAB> split <TAB> label <TAB> category

   with category "-" for genuine rows, and '#' starting comment lines.
   Relative paths resolve against the directory holding the manifest.
 */
struct Manifest {
  std::filesystem::path root;
  std::vector<ManifestRecord> records;

  std::filesystem::path Resolve(const ManifestRecord &record) const;
  std::vector<const ManifestRecord *> InSplit(Split split) const;
  bool HasSplit(Split split) const;
};

Manifest ParseManifest(std::string_view text, const std::filesystem::path &root,
                       std::string_view source = "manifest");
Manifest LoadManifest(const std::filesystem::path &path);
std::string FormatManifest(const Manifest &manifest);
void SaveManifest(const Manifest &manifest, const std::filesystem::path &path);

/// Reads the audio of one manifest record into a validated Utterance.
Utterance LoadUtterance(const Manifest &manifest, const ManifestRecord &record);

}  // namespace rawspoof

#endif  // RAWSPOOF_DATASET_H_
