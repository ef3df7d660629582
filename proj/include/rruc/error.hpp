// Copyright 2026 The RRUC Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace rruc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Least-squares fit without enough distinct abscissae.
class DegenerateFitError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

/// Gap against a non-positive reference objective.
class UndefinedGapError : public Error {
 public:
  using Error::Error;
};

/// Malformed fleet, demand, snapshot or config file.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// An internal invariant failed; carries the period when raised by the simulator.
class ContractViolation : public Error {
 public:
  explicit ContractViolation(const std::string& what, long period = -1)
      : Error(period < 0 ? what : "period " + std::to_string(period) + ": " + what),
        period_(period) {}

  long period() const noexcept { return period_; }

 private:
  long period_;
};

}  // namespace rruc
