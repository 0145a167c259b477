/*
 * Copyright 2026 The prefsort Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PREFSORT_ERRORS_H_
#define PREFSORT_ERRORS_H_

#include <stdexcept>
#include <string>

namespace prefsort {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input: bad files, mismatched element sets,
// inconsistent tournaments, out-of-range parameters.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Parse failure with a location. `line` is 1-based; 0 means unknown.
class ParseError : public InvalidInput {
 public:
  ParseError(const std::string& message, int line = 0)
      : InvalidInput(line > 0 ? "line " + std::to_string(line) + ": " + message
                              : message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Input that is well formed but for which the requested quantity is
// undefined, e.g. a mixed-pairs normalizer on a partition with one class.
class DegenerateInput : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// Two computations that must agree exactly did not. Always a bug.
class IdentityViolation : public Error {
 public:
  using Error::Error;
};

// A configured size or work cap was exceeded.
class ResourceLimitExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace prefsort

#endif  // PREFSORT_ERRORS_H_
