// Copyright 2020 The Authors.
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

#ifndef ARO_ERRORS_HPP
#define ARO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace aro {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent instance data. The message names the field.
class InstanceError : public Error {
 public:
  using Error::Error;
};

/// An exhaustive computation would exceed its configured size cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// A solver was asked to do something it does not support, or failed.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace aro

#endif  // ARO_ERRORS_HPP
