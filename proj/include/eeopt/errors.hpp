// Copyright 2026 The eeopt Authors
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

namespace eeopt {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidScenario : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The requested common-rate split cannot be decoded by both users.
class SplitExceedsCommonRate : public Error {
 public:
  using Error::Error;
};

class PowerBudgetViolation : public Error {
 public:
  using Error::Error;
};

/// The conic backend cannot represent a constraint class.
class BackendUnsupported : public Error {
 public:
  using Error::Error;
};

class DegenerateChannel : public Error {
 public:
  using Error::Error;
};

/// A convex subproblem of the SCA loop did not solve to optimality.
class SubproblemFailure : public Error {
 public:
  SubproblemFailure(int iteration, const std::string& what)
      : Error("subproblem failed at iteration " + std::to_string(iteration) +
              ": " + what),
        iteration_(iteration) {}

  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

class GridTooLarge : public Error {
 public:
  using Error::Error;
};

}  // namespace eeopt
