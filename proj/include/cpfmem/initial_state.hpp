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

#include <cmath>
#include <complex>

#include "cpfmem/errors.hpp"

namespace cpfmem {

// Qubit preparation a|up> + b|down>, environment in its vacuum.
class InitialState {
 public:
  static constexpr double kNormTolerance = 1e-12;

  InitialState(std::complex<double> a, std::complex<double> b) : a_(a), b_(b) {
    const double norm = std::norm(a) + std::norm(b);
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > kNormTolerance)
      throw ValidationError("initial state: |a|^2 + |b|^2 must equal 1");
  }

  // sqrt(p)|up> + sqrt(1-p)|down>
  static InitialState from_p(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("initial state: p must lie in [0, 1]");
    return InitialState(std::sqrt(p), std::sqrt(1.0 - p));
  }

  std::complex<double> a() const { return a_; }
  std::complex<double> b() const { return b_; }

  // Excited-state population |a|^2.
  double p() const { return std::norm(a_); }

  // a b*
  std::complex<double> coherence() const { return a_ * std::conj(b_); }

 private:
  std::complex<double> a_;
  std::complex<double> b_;
};

}  // namespace cpfmem
