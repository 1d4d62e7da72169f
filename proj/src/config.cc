// src/config.cc

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

#include "rawspoof/config.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "rawspoof/errors.h"

namespace rawspoof {

namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T ParseNumber(std::string_view text, std::string_view key, std::string_view where) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError(std::string(where) + ": bad value '" + std::string(text) +
                      "' for key '" + std::string(key) + "'");
  return value;
}

}  // namespace

std::string FormatDouble(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void ConfigFields::Add(std::string key, Target target) {
  fields_.push_back({std::move(key), target});
}

bool ConfigFields::Has(std::string_view key) const {
  for (const auto &f : fields_)
    if (f.key == key) return true;
  return false;
}

void ConfigFields::Set(std::string_view key, std::string_view value,
                       std::string_view where) {
  for (auto &f : fields_) {
    if (f.key != key) continue;
    std::visit(
        [&](auto *target) {
          using T = std::remove_pointer_t<decltype(target)>;
          if constexpr (std::is_same_v<T, std::string>) {
            *target = std::string(value);
          } else if constexpr (std::is_same_v<T, bool>) {
            if (value == "true" || value == "1") *target = true;
            else if (value == "false" || value == "0") *target = false;
            else
              throw ConfigError(std::string(where) + ": bad boolean '" +
                                std::string(value) + "' for key '" +
                                std::string(key) + "'");
          } else if constexpr (std::is_same_v<T, std::vector<double>>) {
            target->clear();
            std::size_t start = 0;
            while (start <= value.size()) {
              auto comma = value.find(',', start);
              auto item = Trim(value.substr(start, comma - start));
              if (!item.empty()) target->push_back(ParseNumber<double>(item, key, where));
              if (comma == std::string_view::npos) break;
              start = comma + 1;
            }
          } else {
            *target = ParseNumber<T>(value, key, where);
          }
        },
        f.target);
    return;
  }
  throw ConfigError(std::string(where) + ": unknown key '" + std::string(key) + "'");
}

void ConfigFields::Parse(std::string_view text, std::string_view source) {
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto line = Trim(text.substr(pos, nl == std::string_view::npos ? nl : nl - pos));
    ++line_no;
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    if (line.empty() || line[0] == '#') continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(where + ": expected key=value, got '" + std::string(line) + "'");
    Set(Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)), where);
  }
}

std::string ConfigFields::ToText() const {
  std::ostringstream os;
  for (const auto &f : fields_) {
    os << f.key << '=';
    std::visit(
        [&](auto *target) {
          using T = std::remove_pointer_t<decltype(target)>;
          if constexpr (std::is_same_v<T, double>) {
            os << FormatDouble(*target);
          } else if constexpr (std::is_same_v<T, bool>) {
            os << (*target ? "true" : "false");
          } else if constexpr (std::is_same_v<T, std::vector<double>>) {
            for (std::size_t i = 0; i < target->size(); ++i)
              os << (i ? "," : "") << FormatDouble((*target)[i]);
          } else {
            os << *target;
          }
        },
        f.target);
    os << '\n';
  }
  return os.str();
}

std::map<std::string, std::string> SplitSections(std::string_view text) {
  std::map<std::string, std::string> sections;
  std::string current;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto raw = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    auto line = Trim(raw);
    if (line.size() >= 2 && line.front() == '[' && line.back() == ']') {
      current = std::string(line.substr(1, line.size() - 2));
      sections[current];
      continue;
    }
    sections[current] += std::string(raw) + '\n';
  }
  return sections;
}

std::string ReadTextFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace rawspoof
