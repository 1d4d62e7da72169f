// rawspoof/random.h

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

#ifndef RAWSPOOF_RANDOM_H_
#define RAWSPOOF_RANDOM_H_

#include <cstdint>
#include <random>

namespace rawspoof {

/// The one generator type used for every stochastic choice (initialization,
/// windows, dropout masks, shuffling, synthesis), so a seed pins a run.
using Rng = std::mt19937_64;

/// Independent stream for item `index` of a seeded job.
inline Rng DeriveRng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

}  // namespace rawspoof

#endif  // RAWSPOOF_RANDOM_H_
