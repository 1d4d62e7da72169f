// rawspoof/run_config.h

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

#ifndef RAWSPOOF_RUN_CONFIG_H_
#define RAWSPOOF_RUN_CONFIG_H_

#include <string>
#include <string_view>

#include "rawspoof/cldnn.h"
#include "rawspoof/features.h"
#include "rawspoof/gmm.h"
#include "rawspoof/trainer.h"

namespace rawspoof {

/// Every tunable of a run in one flat key=value namespace.  A `preset`
/// key (cldnn1 or cldnn2) may appear first in the file; it resets the model
/// block before the remaining keys apply.
struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  FeatureConfig features;
  GmmConfig gmm;

  void Register(ConfigFields *fields);
  void Validate() const;
  /// All keys with their resolved values, defaults included.
  std::string ToText();
};

/// Applies a named model preset; throws ConfigError for an unknown name.
void ApplyPreset(std::string_view name, RunConfig *config);

RunConfig ParseRunConfig(std::string_view text, std::string_view source = "config");
RunConfig LoadRunConfig(const std::string &path);

}  // namespace rawspoof

#endif  // RAWSPOOF_RUN_CONFIG_H_
