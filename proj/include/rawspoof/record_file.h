// rawspoof/record_file.h

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

#ifndef RAWSPOOF_RECORD_FILE_H_
#define RAWSPOOF_RECORD_FILE_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rawspoof/tensor.h"

namespace rawspoof {

inline constexpr std::uint32_t kRecordFileVersion = 1;

/**
   Binary container shared by model checkpoints and GMM model files.
   All integers are little-endian u32:

     "SPGD" | version | text_len | text[text_len]
     then, until end of file, one record per named array:
       name_len | name | rank | dims[rank] | float32 payload[prod(dims)]

   The text block carries the structured configuration ("[section]" headers
   followed by key=value lines).
 */
struct NamedArray {
  std::string name;
  Shape shape;
  std::vector<float> values;
};

struct RecordFile {
  std::string text;
  std::vector<NamedArray> arrays;

  const NamedArray *Find(const std::string &name) const;
};

std::vector<std::uint8_t> EncodeRecordFile(const RecordFile &file);
RecordFile DecodeRecordFile(std::span<const std::uint8_t> bytes);
void WriteRecordFile(const std::filesystem::path &path, const RecordFile &file);
RecordFile ReadRecordFile(const std::filesystem::path &path);

NamedArray ToNamedArray(const std::string &name, const Tensor &tensor);

}  // namespace rawspoof

#endif  // RAWSPOOF_RECORD_FILE_H_
