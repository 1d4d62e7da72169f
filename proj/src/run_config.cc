// src/run_config.cc

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

#include "rawspoof/run_config.h"

#include "rawspoof/errors.h"

namespace rawspoof {

void RunConfig::Register(ConfigFields *fields) {
  model.Register(fields);
  train.Register(fields);
  features.Register(fields);
  gmm.Register(fields);
}

void RunConfig::Validate() const {
  model.Validate();
  train.Validate();
  features.Validate();
  gmm.Validate();
}

std::string RunConfig::ToText() {
  ConfigFields fields;
  Register(&fields);
  return fields.ToText();
}

void ApplyPreset(std::string_view name, RunConfig *config) {
  if (name == "cldnn1") config->model = ModelConfig::Cldnn1();
  else if (name == "cldnn2") config->model = ModelConfig::Cldnn2();
  else throw ConfigError("unknown preset '" + std::string(name) + "' (use cldnn1 or cldnn2)");
}

RunConfig ParseRunConfig(std::string_view text, std::string_view source) {
  RunConfig config;
  ConfigFields fields;
  config.Register(&fields);
  std::string preset;
  fields.Add("preset", &preset);
  // The preset must be known before the other model keys override it, so
  // parse twice: once to find it, once for real on the reset config.
  {
    RunConfig scratch;
    ConfigFields probe;
    scratch.Register(&probe);
    probe.Add("preset", &preset);
    probe.Parse(text, source);
  }
  if (!preset.empty()) ApplyPreset(preset, &config);
  fields.Parse(text, source);
  config.Validate();
  return config;
}

RunConfig LoadRunConfig(const std::string &path) {
  return ParseRunConfig(ReadTextFile(path), path);
}

}  // namespace rawspoof
