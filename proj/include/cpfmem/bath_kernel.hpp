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

// Environment correlation f(t): the memory kernel that carries all of the
// bath physics. Two families are supported, the exponential (Lorentzian
// spectral density) closed form and tabulated samples.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cpfmem/csv.hpp"
#include "cpfmem/errors.hpp"

namespace cpfmem {

using complex = std::complex<double>;

// f(t) = (gamma / 2 tau_c) exp(-|t| / tau_c)
struct Lorentzian {
  double gamma;  // decay rate, 1/time
  double tau_c;  // correlation time
};

// Samples of f on an ascending grid starting at t = 0. Linear interpolation
// between samples, no extrapolation.
struct Tabulated {
  std::vector<double> times;
  std::vector<complex> values;
};

class BathKernel {
 public:
  static BathKernel lorentzian(double gamma, double tau_c) {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
      throw ValidationError("lorentzian kernel: gamma must be finite and > 0");
    if (!(tau_c > 0.0) || !std::isfinite(tau_c))
      throw ValidationError("lorentzian kernel: tau_c must be finite and > 0");
    return BathKernel(Lorentzian{gamma, tau_c});
  }

  static BathKernel tabulated(std::vector<double> times, std::vector<complex> values) {
    if (times.size() != values.size())
      throw ValidationError("tabulated kernel: times and values differ in length");
    if (times.size() < 2)
      throw ValidationError("tabulated kernel: at least 2 samples required");
    if (times.front() != 0.0)
      throw ValidationError("tabulated kernel: first sample must be at t = 0");
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (!std::isfinite(times[i]) || !std::isfinite(values[i].real()) ||
          !std::isfinite(values[i].imag()))
        throw ValidationError("tabulated kernel: non-finite sample at row " + std::to_string(i));
      if (i > 0 && !(times[i] > times[i - 1]))
        throw ValidationError("tabulated kernel: times must be strictly ascending (row " +
                              std::to_string(i) + ")");
    }
    return BathKernel(Tabulated{std::move(times), std::move(values)});
  }

  complex operator()(double t) const {
    if (const auto* l = std::get_if<Lorentzian>(&kind_)) {
      return {l->gamma / (2.0 * l->tau_c) * std::exp(-std::abs(t) / l->tau_c), 0.0};
    }
    const auto& tab = std::get<Tabulated>(kind_);
    if (!(t >= 0.0)) throw OutOfRangeError("tabulated kernel: t must be >= 0");
    const double last = tab.times.back();
    // Grid arithmetic (i * h) may overshoot the last sample by a few ulps.
    if (t > last) {
      if (t > last * (1.0 + 1e-12)) {
        throw OutOfRangeError("tabulated kernel: t = " + csv::format_number(t) +
                              " beyond last sample " + csv::format_number(last));
      }
      return tab.values.back();
    }
    const auto it = std::upper_bound(tab.times.begin(), tab.times.end(), t);
    if (it == tab.times.end()) return tab.values.back();
    const auto hi = static_cast<std::size_t>(it - tab.times.begin());
    const auto lo = hi - 1;
    const double w = (t - tab.times[lo]) / (tab.times[hi] - tab.times[lo]);
    return (1.0 - w) * tab.values[lo] + w * tab.values[hi];
  }

  const Lorentzian* as_lorentzian() const { return std::get_if<Lorentzian>(&kind_); }
  const Tabulated* as_tabulated() const { return std::get_if<Tabulated>(&kind_); }

  // Largest t at which the kernel may be evaluated.
  double max_time() const {
    if (as_lorentzian()) return std::numeric_limits<double>::infinity();
    return as_tabulated()->times.back();
  }

  std::optional<double> correlation_time() const {
    if (const auto* l = as_lorentzian()) return l->tau_c;
    return std::nullopt;
  }

 private:
  explicit BathKernel(std::variant<Lorentzian, Tabulated> kind) : kind_(std::move(kind)) {}

  std::variant<Lorentzian, Tabulated> kind_;
};

inline complex eval_kernel(const BathKernel& k, double t) { return k(t); }

// Lorentzian kernel with its correlation time shrunk by epsilon. The integrated
// weight gamma/2 is unchanged, so epsilon -> 0 approaches a delta function.
inline BathKernel markovian_limit_kernel(double gamma, double tau_c, double epsilon) {
  if (!(epsilon > 0.0)) throw ValidationError("markovian_limit_kernel: epsilon must be > 0");
  if (!(gamma > 0.0) || !(tau_c > 0.0))
    throw ValidationError("markovian_limit_kernel: gamma and tau_c must be > 0");
  return BathKernel::lorentzian(gamma, tau_c * epsilon);
}

// Reads "time,re[,im]" rows after a mandatory header line. Times are
// multiplied by time_scale; values by value_scale.
inline BathKernel load_kernel_csv(std::istream& in, double time_scale = 1.0,
                                  double value_scale = 1.0) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t columns = 0;
  std::vector<double> times;
  std::vector<complex> values;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = csv::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = csv::split(body);
    if (!have_header) {
      if (fields.size() < 2 || fields.size() > 3)
        throw ValidationError("kernel csv: header must have 2 or 3 columns (line " +
                              std::to_string(line_no) + ")");
      if (csv::parse_double(fields[0]))
        throw ValidationError("kernel csv: header row required (line " +
                              std::to_string(line_no) + " is numeric)");
      columns = fields.size();
      have_header = true;
      continue;
    }
    if (fields.size() != columns)
      throw ValidationError("kernel csv: expected " + std::to_string(columns) +
                            " columns at line " + std::to_string(line_no));
    std::vector<double> nums;
    for (auto f : fields) {
      auto v = csv::parse_double(f);
      if (!v)
        throw ValidationError("kernel csv: malformed number '" + std::string(f) + "' at line " +
                              std::to_string(line_no));
      nums.push_back(*v);
    }
    times.push_back(nums[0] * time_scale);
    values.emplace_back(nums[1] * value_scale, columns == 3 ? nums[2] * value_scale : 0.0);
  }
  if (!have_header) throw ValidationError("kernel csv: empty input");
  return BathKernel::tabulated(std::move(times), std::move(values));
}

inline BathKernel load_kernel_csv(const std::string& path, double time_scale = 1.0,
                                  double value_scale = 1.0) {
  std::ifstream in(path);
  if (!in) throw ValidationError("kernel csv: cannot open '" + path + "'");
  return load_kernel_csv(in, time_scale, value_scale);
}

}  // namespace cpfmem
