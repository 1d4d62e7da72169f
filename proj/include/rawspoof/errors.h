// rawspoof/errors.h

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

#ifndef RAWSPOOF_ERRORS_H_
#define RAWSPOOF_ERRORS_H_

#include <stdexcept>
#include <string>

namespace rawspoof {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or missing input data: audio, manifests, score files, checkpoints.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or command-line usage.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Incompatible tensor shapes passed to an operation.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values, failed gradient checks, and similar numeric failures.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace rawspoof

#endif  // RAWSPOOF_ERRORS_H_
