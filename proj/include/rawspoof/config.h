// rawspoof/config.h

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

#ifndef RAWSPOOF_CONFIG_H_
#define RAWSPOOF_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rawspoof {

/**
   Binds flat `key=value` text onto typed struct members.  Config structs
   register their members with Add(); Parse() then assigns values, rejecting
   unknown keys and malformed values with a ConfigError that names the source
   line.  ToText() prints every registered key, so a run can log its fully
   resolved configuration, defaults included.
 */
class ConfigFields {
 public:
  using Target = std::variant<int *, std::size_t *, double *,
                              bool *, std::string *, std::vector<double> *>;

  void Add(std::string key, Target target);

  void Set(std::string_view key, std::string_view value,
           std::string_view where = "config");
  void Parse(std::string_view text, std::string_view source = "config");
  std::string ToText() const;
  bool Has(std::string_view key) const;

 private:
  struct Field {
    std::string key;
    Target target;
  };
  std::vector<Field> fields_;
};

std::string FormatDouble(double value);

/// Splits "[name]" sections; lines before the first header go to "".
std::map<std::string, std::string> SplitSections(std::string_view text);

std::string ReadTextFile(const std::string &path);

}  // namespace rawspoof

#endif  // RAWSPOOF_CONFIG_H_
