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

// Samples G(t), G(tau) and G(t, tau) on an output grid, either from the
// exponential-kernel closed forms or from the numerical solvers.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "cpfmem/bath_kernel.hpp"
#include "cpfmem/errors.hpp"
#include "cpfmem/propagator.hpp"

namespace cpfmem {

enum class PropagatorMethod { closed_form, volterra };

// Uniform output grid t_i = i * t_max / steps. With equal_times only the
// diagonal tau = t is produced, otherwise the full product grid.
struct TimeGrid {
  double t_max = 5.0;
  std::size_t steps = 50;
  bool equal_times = true;

  double step() const { return t_max / static_cast<double>(steps); }

  void validate() const {
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ValidationError("grid: t_max must be > 0");
    if (steps < 1) throw ValidationError("grid: need at least 2 points (steps >= 1)");
  }
};

struct PropagatorSample {
  double t = 0.0;
  double tau = 0.0;
  complex G_t;
  complex G_tau;
  complex G_two;
};

class Dynamics {
 public:
  // fine_step <= 0 picks a solver step automatically.
  Dynamics(BathKernel kernel, PropagatorMethod method, double fine_step = 0.0)
      : kernel_(std::move(kernel)), method_(method), fine_step_(fine_step) {
    if (method_ == PropagatorMethod::closed_form && !kernel_.as_lorentzian())
      throw ValidationError("closed-form propagator requires a Lorentzian kernel");
  }

  const BathKernel& kernel() const { return kernel_; }
  PropagatorMethod method() const { return method_; }

  std::vector<PropagatorSample> sample(const TimeGrid& grid, unsigned threads = 1) const {
    grid.validate();
    const double dt = grid.step();
    const std::size_t n = grid.steps + 1;
    std::vector<PropagatorSample> out;

    if (method_ == PropagatorMethod::closed_form) {
      const auto& l = *kernel_.as_lorentzian();
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (grid.equal_times && i != j) continue;
          const double t = static_cast<double>(i) * dt;
          const double tau = static_cast<double>(j) * dt;
          out.push_back({t, tau, lorentzian_G(l.gamma, l.tau_c, t),
                         lorentzian_G(l.gamma, l.tau_c, tau),
                         lorentzian_G_two_time(l.gamma, l.tau_c, t, tau)});
        }
      }
      return out;
    }

    const std::size_t refine = refinement(dt);
    const double h = dt / static_cast<double>(refine);
    const auto G = solve_volterra(kernel_, grid.t_max, h);
    const auto GG = compute_G_two_time(kernel_, G, grid.t_max, grid.t_max, dt, dt, threads);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (grid.equal_times && i != j) continue;
        out.push_back({static_cast<double>(i) * dt, static_cast<double>(j) * dt,
                       G.values[i * refine], G.values[j * refine], GG(i, j)});
      }
    }
    return out;
  }

  // Fine solver grid aligned to the output step, no coarser than the default.
  PropagatorGrid propagator(double t_max, double output_step) const {
    const std::size_t refine = refinement(output_step);
    const double h = output_step / static_cast<double>(refine);
    if (method_ == PropagatorMethod::closed_form) {
      const auto& l = *kernel_.as_lorentzian();
      return sample_lorentzian_G(l.gamma, l.tau_c, t_max, h);
    }
    return solve_volterra(kernel_, t_max, h);
  }

  std::size_t refinement(double output_step) const {
    double target = fine_step_;
    if (!(target > 0.0)) {
      if (const auto* l = kernel_.as_lorentzian()) {
        target = default_time_step(l->gamma, l->tau_c);
      } else {
        const auto& tab = *kernel_.as_tabulated();
        target = tab.times[1] - tab.times[0];
      }
    }
    return static_cast<std::size_t>(std::max(1.0, std::ceil(output_step / target - 1e-9)));
  }

 private:
  BathKernel kernel_;
  PropagatorMethod method_;
  double fine_step_;
};

}  // namespace cpfmem
