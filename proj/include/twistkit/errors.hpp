// Copyright (c) 2026 The twistkit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0.txt
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace twistkit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A frequency spectrum is not bounded below by a positive constant.
class AdmissibilityError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input (labels, alignment, sizes, config files).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An operation was asked of the wrong kind of symmetry.
class KindError : public Error {
 public:
  using Error::Error;
};

/// Materializing the requested space or operator would exceed the budget.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain (e.g. beta <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A structural identity that must hold numerically did not.
class InternalConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Input violates a documented precondition (e.g. boundary compliance).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace twistkit
