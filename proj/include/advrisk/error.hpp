// Copyright 2026 The advrisk Authors
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

#ifndef ADVRISK_ERROR_HPP_
#define ADVRISK_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace advrisk {

// Base class for every error raised by the library. The CLI maps each
// subclass onto a distinct process exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on arguments was violated (bad dimension, tau <= 0, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Input data could not be read or parsed.
class DataError : public Error {
 public:
  using Error::Error;
};

// The LP solver did not return an optimal solution.
class LpError : public Error {
 public:
  using Error::Error;
};

// An enumeration would exceed its configured hard cap.
class EnumerationCapExceeded : public Error {
 public:
  using Error::Error;
};

// A result violated an invariant the library guarantees.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace advrisk

#endif  // ADVRISK_ERROR_HPP_
