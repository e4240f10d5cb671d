// Copyright 2026 The Sketchvoice Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SKETCHVOICE_ERRORS_H_
#define SKETCHVOICE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace sketchvoice {

// Base class for every error raised by the library. Callers that only care
// about success/failure can catch this; the subclasses carry the category.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed caller input (bad shapes, empty sequences, invalid polylines).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Phoneme durations that do not fit the frame series they index.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

// Phoneme symbol outside the inventory.
class VocabularyError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration, statistics or checkpoint contents.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// File and format problems.
class IoError : public Error {
 public:
  using Error::Error;
};

// Training diverged or produced non-finite values.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace sketchvoice

#endif  // SKETCHVOICE_ERRORS_H_
