// Copyright 2026 The cpfmem Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cpfmem {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on user-provided values does not hold.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Evaluation requested outside the domain covered by tabulated data.
class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

// The conditioning event of a conditional probability has zero probability.
class ConditioningError : public Error {
 public:
  using Error::Error;
};

// G(t) passes through zero, so ln G(t) and the derived rates diverge.
class ZeroCrossingError : public Error {
 public:
  ZeroCrossingError(const std::string& what, std::size_t index)
      : Error(what), index_(index) {}

  // First grid index at or after the crossing.
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class NonUnitaryMapError : public Error {
 public:
  using Error::Error;
};

class ZeroProbabilityBranchError : public Error {
 public:
  using Error::Error;
};

// Inputs fall outside the regime an operation supports (e.g. complex G for
// the real channel-angle parameterization).
class UnsupportedRegimeError : public Error {
 public:
  using Error::Error;
};

// An analytic bound that should always hold was violated.
class InternalConsistencyError : public Error {
 public:
  using Error::Error;
};

// A counts table carries no events.
class NoDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace cpfmem
