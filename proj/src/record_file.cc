// src/record_file.cc

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

#include "rawspoof/record_file.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "rawspoof/errors.h"

namespace rawspoof {

namespace {

void PutU32(std::vector<std::uint8_t> *out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool AtEnd() const { return pos_ == bytes_.size(); }
  std::size_t Remaining() const { return bytes_.size() - pos_; }

  std::uint32_t U32(const std::string &what) {
    Need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }

  std::string Bytes(std::size_t n, const std::string &what) {
    Need(n, what);
    std::string s(reinterpret_cast<const char *>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  void Need(std::size_t n, const std::string &what) const {
    if (Remaining() < n) throw DataError("truncated model file: " + what);
  }

  const std::uint8_t *Current() const { return bytes_.data() + pos_; }
  void Skip(std::size_t n) { pos_ += n; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

const NamedArray *RecordFile::Find(const std::string &name) const {
  for (const auto &a : arrays)
    if (a.name == name) return &a;
  return nullptr;
}

std::vector<std::uint8_t> EncodeRecordFile(const RecordFile &file) {
  std::vector<std::uint8_t> out = {'S', 'P', 'G', 'D'};
  PutU32(&out, kRecordFileVersion);
  PutU32(&out, static_cast<std::uint32_t>(file.text.size()));
  out.insert(out.end(), file.text.begin(), file.text.end());
  for (const auto &a : file.arrays) {
    if (a.values.size() != NumElements(a.shape))
      throw ShapeError("record " + a.name + ": payload does not match shape " +
                       ShapeString(a.shape));
    PutU32(&out, static_cast<std::uint32_t>(a.name.size()));
    out.insert(out.end(), a.name.begin(), a.name.end());
    PutU32(&out, static_cast<std::uint32_t>(a.shape.size()));
    for (std::size_t d : a.shape) PutU32(&out, static_cast<std::uint32_t>(d));
    for (float f : a.values) PutU32(&out, std::bit_cast<std::uint32_t>(f));
  }
  return out;
}

RecordFile DecodeRecordFile(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  if (in.Bytes(4, "magic") != "SPGD")
    throw DataError("not a model file (bad magic bytes)");
  const std::uint32_t version = in.U32("version");
  if (version != kRecordFileVersion)
    throw DataError("model file version " + std::to_string(version) +
                    " is not supported (expected " +
                    std::to_string(kRecordFileVersion) + ")");
  RecordFile file;
  file.text = in.Bytes(in.U32("config length"), "config block");
  while (!in.AtEnd()) {
    const std::uint32_t name_len = in.U32("record name length");
    NamedArray a;
    a.name = in.Bytes(name_len, "record name");
    const std::uint32_t rank = in.U32("rank of " + a.name);
    if (rank == 0 || rank > 8)
      throw DataError("record " + a.name + ": invalid rank " + std::to_string(rank));
    for (std::uint32_t r = 0; r < rank; ++r) {
      const std::uint32_t d = in.U32("dims of " + a.name);
      if (d == 0) throw DataError("record " + a.name + ": zero-sized dimension");
      a.shape.push_back(d);
    }
    const std::size_t count = NumElements(a.shape);
    if (in.Remaining() / 4 < count)
      throw DataError("truncated payload for parameter " + a.name + ": need " +
                      std::to_string(count) + " floats, " +
                      std::to_string(in.Remaining() / 4) + " available");
    a.values.resize(count);
    for (std::size_t i = 0; i < count; ++i)
      a.values[i] = std::bit_cast<float>(in.U32(a.name));
    file.arrays.push_back(std::move(a));
  }
  return file;
}

void WriteRecordFile(const std::filesystem::path &path, const RecordFile &file) {
  const auto bytes = EncodeRecordFile(file);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("error writing " + path.string());
}

RecordFile ReadRecordFile(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return DecodeRecordFile(bytes);
  } catch (const DataError &e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

NamedArray ToNamedArray(const std::string &name, const Tensor &tensor) {
  NamedArray a;
  a.name = name;
  a.shape = tensor.shape();
  a.values.reserve(tensor.size());
  for (double v : tensor.data()) a.values.push_back(static_cast<float>(v));
  return a;
}

}  // namespace rawspoof
