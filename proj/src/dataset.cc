// src/dataset.cc

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

#include "rawspoof/dataset.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_set>

#include "rawspoof/errors.h"

namespace rawspoof {

namespace {

std::uint32_t ReadU32(std::span<const std::uint8_t> b, std::size_t pos) {
  return static_cast<std::uint32_t>(b[pos]) |
         static_cast<std::uint32_t>(b[pos + 1]) << 8 |
         static_cast<std::uint32_t>(b[pos + 2]) << 16 |
         static_cast<std::uint32_t>(b[pos + 3]) << 24;
}

std::uint16_t ReadU16(std::span<const std::uint8_t> b, std::size_t pos) {
  return static_cast<std::uint16_t>(b[pos] | b[pos + 1] << 8);
}

void PutU32(std::vector<std::uint8_t> *out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void PutU16(std::vector<std::uint8_t> *out, std::uint16_t v) {
  out->push_back(static_cast<std::uint8_t>(v));
  out->push_back(static_cast<std::uint8_t>(v >> 8));
}

bool TagIs(std::span<const std::uint8_t> b, std::size_t pos, const char *tag) {
  return std::equal(tag, tag + 4, b.begin() + pos);
}

std::vector<std::string> SplitTabs(const std::string &line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

}  // namespace

std::string_view LabelName(Label label) {
  switch (label) {
    case Label::kGenuine: return "GENUINE";
    case Label::kSS: return "SS";
    case Label::kVC: return "VC";
    case Label::kRE: return "RE";
  }
  return "?";
}

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "TRAIN";
    case Split::kDev: return "DEV";
    case Split::kEval: return "EVAL";
  }
  return "?";
}

std::optional<Label> ParseLabel(std::string_view token) {
  for (Label l : {Label::kGenuine, Label::kSS, Label::kVC, Label::kRE})
    if (LabelName(l) == token) return l;
  return std::nullopt;
}

std::optional<Split> ParseSplit(std::string_view token) {
  for (Split s : {Split::kTrain, Split::kDev, Split::kEval})
    if (SplitName(s) == token) return s;
  return std::nullopt;
}

void ValidateUtterance(const Utterance &utt) {
  if (utt.sample_rate != kSampleRate)
    throw DataError("utterance " + utt.id + ": sample rate " +
                    std::to_string(utt.sample_rate) + " Hz, expected 16000");
  if (utt.samples.empty())
    throw DataError("utterance " + utt.id + " has no samples");
  const bool genuine = utt.label == Label::kGenuine;
  if (genuine != utt.category.empty())
    throw DataError("utterance " + utt.id +
                    (genuine ? ": genuine utterance carries an attack category"
                             : ": attack utterance lacks a category"));
}

WavAudio ParseWav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || !TagIs(bytes, 0, "RIFF") || !TagIs(bytes, 8, "WAVE"))
    throw DataError("malformed WAV header: missing RIFF/WAVE signature");
  bool have_fmt = false;
  WavAudio audio;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t chunk_size = ReadU32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (chunk_size > bytes.size() - body)
      throw DataError("malformed WAV header: chunk extends past end of file");
    if (TagIs(bytes, pos, "fmt ")) {
      if (chunk_size < 16) throw DataError("malformed WAV header: short fmt chunk");
      const std::uint16_t format = ReadU16(bytes, body);
      const std::uint16_t channels = ReadU16(bytes, body + 2);
      const std::uint32_t rate = ReadU32(bytes, body + 4);
      const std::uint16_t bits = ReadU16(bytes, body + 14);
      if (format != 1)
        throw DataError("unsupported encoding: WAV format tag " +
                        std::to_string(format) + " (only PCM is accepted)");
      if (bits != 16)
        throw DataError("unsupported encoding: " + std::to_string(bits) +
                        "-bit samples (only 16-bit PCM is accepted)");
      if (channels != 1)
        throw DataError("unsupported channel count: " + std::to_string(channels));
      if (rate != static_cast<std::uint32_t>(kSampleRate))
        throw DataError("unsupported sample rate: " + std::to_string(rate) +
                        " Hz (expected 16000)");
      audio.sample_rate = static_cast<int>(rate);
      have_fmt = true;
    } else if (TagIs(bytes, pos, "data")) {
      if (!have_fmt)
        throw DataError("malformed WAV header: data chunk before fmt chunk");
      const std::size_t count = chunk_size / 2;
      audio.samples.resize(count);
      for (std::size_t i = 0; i < count; ++i) {
        const auto v = static_cast<std::int16_t>(ReadU16(bytes, body + 2 * i));
        audio.samples[i] = static_cast<double>(v) / 32768.0;
      }
      return audio;
    }
    pos = body + chunk_size + (chunk_size & 1);
  }
  throw DataError(have_fmt ? "malformed WAV header: no data chunk"
                           : "malformed WAV header: no fmt chunk");
}

WavAudio ReadWav(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return ParseWav(bytes);
  } catch (const DataError &e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> EncodeWav(std::span<const double> samples,
                                    int sample_rate) {
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  for (char c : std::string_view("RIFF")) out.push_back(static_cast<std::uint8_t>(c));
  PutU32(&out, 36 + data_bytes);
  for (char c : std::string_view("WAVEfmt ")) out.push_back(static_cast<std::uint8_t>(c));
  PutU32(&out, 16);
  PutU16(&out, 1);  // PCM
  PutU16(&out, 1);  // mono
  PutU32(&out, static_cast<std::uint32_t>(sample_rate));
  PutU32(&out, static_cast<std::uint32_t>(sample_rate) * 2);
  PutU16(&out, 2);
  PutU16(&out, 16);
  for (char c : std::string_view("data")) out.push_back(static_cast<std::uint8_t>(c));
  PutU32(&out, data_bytes);
  for (double s : samples) {
    const double scaled = std::round(s * 32768.0);
    const auto v = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    PutU16(&out, static_cast<std::uint16_t>(v));
  }
  return out;
}

void WriteWav(const std::filesystem::path &path, std::span<const double> samples,
              int sample_rate) {
  const auto bytes = EncodeWav(samples, sample_rate);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("error writing " + path.string());
}

std::vector<double> Normalize(std::span<const double> samples) {
  if (samples.empty()) throw DataError("normalize: empty sample vector");
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= n;
  std::vector<double> out(samples.size());
  double var = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out[i] = samples[i] - mean;
    var += out[i] * out[i];
  }
  const double stddev = std::sqrt(var / n);
  if (stddev < 1e-8) return out;
  for (double &v : out) v /= stddev;
  return out;
}

std::vector<std::vector<double>> Frame(std::span<const double> samples,
                                       std::size_t length, std::size_t hop) {
  if (length == 0) throw ConfigError("frame length must be >= 1");
  if (hop == 0) hop = length;
  std::vector<std::vector<double>> frames;
  for (std::size_t start = 0; start + length <= samples.size(); start += hop)
    frames.emplace_back(samples.begin() + start, samples.begin() + start + length);
  return frames;
}

namespace {

FrameSequence Assemble(const std::vector<std::vector<double>> &frames,
                       std::span<const std::size_t> order, std::string id) {
  FrameSequence seq;
  seq.utterance_id = std::move(id);
  seq.num_frames = order.size();
  seq.frame_length = frames.front().size();
  seq.frames.reserve(seq.num_frames * seq.frame_length);
  for (std::size_t idx : order) {
    if (frames[idx].size() != seq.frame_length)
      throw DataError("frames of utterance " + seq.utterance_id +
                      " have inconsistent lengths");
    seq.frames.insert(seq.frames.end(), frames[idx].begin(), frames[idx].end());
  }
  return seq;
}

}  // namespace

FrameSequence MakeTrainingSequence(
    const std::vector<std::vector<double>> &frames, std::size_t seq_len,
    Rng &rng, std::string utterance_id) {
  if (frames.empty())
    throw DataError("utterance shorter than one frame" +
                    (utterance_id.empty() ? std::string() : ": " + utterance_id));
  if (seq_len == 0) throw ConfigError("sequence length must be >= 1");
  std::vector<std::size_t> order(seq_len);
  if (frames.size() >= seq_len) {
    std::uniform_int_distribution<std::size_t> start_dist(0, frames.size() - seq_len);
    const std::size_t start = start_dist(rng);
    for (std::size_t t = 0; t < seq_len; ++t) order[t] = start + t;
  } else {
    for (std::size_t t = 0; t < seq_len; ++t) order[t] = t % frames.size();
  }
  return Assemble(frames, order, std::move(utterance_id));
}

FrameSequence MakeEvalSequence(const std::vector<std::vector<double>> &frames,
                               std::string utterance_id) {
  if (frames.empty())
    throw DataError("utterance shorter than one frame" +
                    (utterance_id.empty() ? std::string() : ": " + utterance_id));
  std::vector<std::size_t> order(frames.size());
  for (std::size_t t = 0; t < order.size(); ++t) order[t] = t;
  return Assemble(frames, order, std::move(utterance_id));
}

std::filesystem::path Manifest::Resolve(const ManifestRecord &record) const {
  return root / record.path;
}

std::vector<const ManifestRecord *> Manifest::InSplit(Split split) const {
  std::vector<const ManifestRecord *> out;
  for (const auto &r : records)
    if (r.split == split) out.push_back(&r);
  return out;
}

bool Manifest::HasSplit(Split split) const {
  return std::any_of(records.begin(), records.end(),
                     [split](const ManifestRecord &r) { return r.split == split; });
}

Manifest ParseManifest(std::string_view text, const std::filesystem::path &root,
                       std::string_view source) {
  Manifest manifest;
  manifest.root = root;
  std::unordered_set<std::string> ids;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    auto fields = SplitTabs(line);
    if (fields.size() != 5)
      throw DataError(where + ": expected 5 tab-separated fields, got " +
                      std::to_string(fields.size()));
    ManifestRecord rec;
    rec.id = fields[0];
    rec.path = fields[1];
    if (rec.id.empty()) throw DataError(where + ": empty id");
    if (!ids.insert(rec.id).second)
      throw DataError(where + ": duplicate id '" + rec.id + "'");
    const std::filesystem::path p(rec.path);
    if (rec.path.empty() || p.is_absolute())
      throw DataError(where + ": path '" + rec.path +
                      "' must be relative to the manifest directory");
    for (const auto &part : p)
      if (part == "..")
        throw DataError(where + ": path '" + rec.path + "' escapes the manifest root");
    auto split = ParseSplit(fields[2]);
    if (!split) throw DataError(where + ": unknown split '" + fields[2] + "'");
    auto label = ParseLabel(fields[3]);
    if (!label) throw DataError(where + ": unknown label '" + fields[3] + "'");
    rec.split = *split;
    rec.label = *label;
    rec.category = fields[4] == "-" ? std::string() : fields[4];
    if (rec.category.empty() && fields[4] != "-")
      throw DataError(where + ": empty category (use '-' for genuine)");
    if ((rec.label == Label::kGenuine) != rec.category.empty())
      throw DataError(where + (rec.label == Label::kGenuine
                                   ? ": genuine record must have category '-'"
                                   : ": attack record needs a category"));
    manifest.records.push_back(std::move(rec));
  }
  return manifest;
}

Manifest LoadManifest(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseManifest(buf.str(), path.parent_path(), path.string());
}

std::string FormatManifest(const Manifest &manifest) {
  std::string out = "# id\tpath\tsplit\tlabel\tcategory\n";
  for (const auto &r : manifest.records) {
    out += r.id + '\t' + r.path + '\t' + std::string(SplitName(r.split)) + '\t' +
           std::string(LabelName(r.label)) + '\t' +
           (r.category.empty() ? std::string("-") : r.category) + '\n';
  }
  return out;
}

void SaveManifest(const Manifest &manifest, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write manifest " + path.string());
  out << FormatManifest(manifest);
}

Utterance LoadUtterance(const Manifest &manifest, const ManifestRecord &record) {
  WavAudio audio = ReadWav(manifest.Resolve(record));
  Utterance utt;
  utt.id = record.id;
  utt.samples = std::move(audio.samples);
  utt.sample_rate = audio.sample_rate;
  utt.label = record.label;
  utt.category = record.category;
  utt.split = record.split;
  ValidateUtterance(utt);
  return utt;
}

}  // namespace rawspoof
