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

// Wave-vector propagator G(t), the two-time convolution G(t, tau), the
// reduced density matrix and the rate functions derived from ln G.
//
// G solves the integro-differential equation
//
//   dG/dt = -int_0^t f(t - s) G(s) ds,   G(0) = 1,
//
// and the two-time object is the double convolution
//
//   G(t, tau) = int_0^t dt' int_0^tau dtau' f(tau' + t') G(t - t') G(tau - tau').

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "cpfmem/bath_kernel.hpp"
#include "cpfmem/csv.hpp"
#include "cpfmem/errors.hpp"
#include "cpfmem/initial_state.hpp"

namespace cpfmem {

// G(t_i) at t_i = i * t_step, i = 0..n.
struct PropagatorGrid {
  double t_step = 0.0;
  std::vector<complex> values;
  std::vector<std::string> warnings;

  std::size_t size() const { return values.size(); }
  double time(std::size_t i) const { return static_cast<double>(i) * t_step; }
  double t_max() const { return values.empty() ? 0.0 : time(values.size() - 1); }
  complex operator[](std::size_t i) const { return values[i]; }
};

// G(t_i, tau_j) at t_i = i * t_step, tau_j = j * tau_step, stored row-major.
struct TwoTimeGrid {
  double t_step = 0.0;
  double tau_step = 0.0;
  std::size_t n_t = 0;    // number of t samples
  std::size_t n_tau = 0;  // number of tau samples
  std::vector<complex> values;

  complex operator()(std::size_t i, std::size_t j) const { return values[i * n_tau + j]; }
  complex& operator()(std::size_t i, std::size_t j) { return values[i * n_tau + j]; }
};

struct RateFunctions {
  double t_step = 0.0;
  std::vector<double> gamma_t;  // decay rate
  std::vector<double> omega_t;  // frequency shift
};

// Qubit density matrix in the {up, down} basis.
struct DensityMatrix {
  complex uu, ud, du, dd;

  double trace() const { return (uu + dd).real(); }

  bool is_hermitian(double tol = 1e-12) const {
    return std::abs(uu.imag()) <= tol && std::abs(dd.imag()) <= tol &&
           std::abs(ud - std::conj(du)) <= tol;
  }

  // Ascending eigenvalues of the Hermitian part.
  std::pair<double, double> eigenvalues() const {
    const double mean = 0.5 * (uu.real() + dd.real());
    const double half_gap = 0.5 * (uu.real() - dd.real());
    const double r = std::sqrt(half_gap * half_gap + std::norm(ud));
    return {mean - r, mean + r};
  }
};

struct VolterraOptions {
  // Reject steps coarser than tau_c / 4 instead of attaching a warning.
  bool strict = false;
};

// min(tau_c, 1/gamma) / 100
inline double default_time_step(double gamma, double tau_c) {
  return std::min(tau_c, 1.0 / gamma) / 100.0;
}

namespace detail {

inline std::size_t steps_covering(double t_max, double t_step) {
  return static_cast<std::size_t>(std::ceil(t_max / t_step - 1e-9));
}

// Integer ratio coarse/fine, or 0 if not an integer multiple.
inline std::size_t stride_of(double coarse, double fine) {
  const double r = coarse / fine;
  const double n = std::round(r);
  if (n < 1.0 || std::abs(r - n) > 1e-9 * std::max(1.0, n)) return 0;
  return static_cast<std::size_t>(n);
}

inline void check_kernel_covers(const BathKernel& k, double t) {
  if (t > k.max_time() * (1.0 + 1e-12))
    throw OutOfRangeError("kernel does not cover t = " + csv::format_number(t));
}

}  // namespace detail

// Second-order product-integration of the propagator equation on a fixed
// grid: the memory integral uses the trapezoid rule on the G samples and the
// time step is the trapezoid (Crank-Nicolson) rule, implicit in G_n.
inline PropagatorGrid solve_volterra(const BathKernel& kernel, double t_max, double t_step,
                                     VolterraOptions options = {}) {
  if (!(t_step > 0.0) || !std::isfinite(t_step))
    throw ValidationError("solve_volterra: t_step must be > 0");
  if (!(t_max >= t_step)) throw ValidationError("solve_volterra: t_max must be >= t_step");

  PropagatorGrid grid;
  grid.t_step = t_step;
  if (auto tau_c = kernel.correlation_time(); tau_c && t_step > *tau_c / 4.0) {
    const std::string msg = "time step " + csv::format_number(t_step) +
                            " is coarser than tau_c/4 = " + csv::format_number(*tau_c / 4.0);
    if (options.strict) throw ValidationError("solve_volterra: " + msg);
    grid.warnings.push_back(msg);
  }

  const std::size_t n = detail::steps_covering(t_max, t_step);
  detail::check_kernel_covers(kernel, static_cast<double>(n) * t_step);

  std::vector<complex> f(n + 1);
  for (std::size_t i = 0; i <= n; ++i) f[i] = kernel(static_cast<double>(i) * t_step);

  const double h = t_step;
  std::vector<complex>& g = grid.values;
  g.assign(n + 1, complex{});
  g[0] = 1.0;
  complex memory_prev{0.0, 0.0};  // int_0^{t_{k-1}} f(t_{k-1} - s) G(s) ds
  const complex implicit_factor = 1.0 + 0.25 * h * h * f[0];
  for (std::size_t k = 1; k <= n; ++k) {
    // Trapezoid sum without the (unknown) j = k endpoint.
    complex partial = 0.5 * f[k] * g[0];
    for (std::size_t j = 1; j < k; ++j) partial += f[k - j] * g[j];
    partial *= h;
    g[k] = (g[k - 1] - 0.5 * h * (memory_prev + partial)) / implicit_factor;
    memory_prev = partial + 0.5 * h * f[0] * g[k];
  }
  return grid;
}

// Closed form for the exponential kernel, chi = sqrt(1 - 2 gamma tau_c):
//   G(t) = e^{-t/2tau_c} [cosh(t chi / 2tau_c) + sinh(t chi / 2tau_c) / chi].
// Imaginary chi is evaluated through cos/sin; chi -> 0 through its limit.
inline complex lorentzian_G(double gamma, double tau_c, double t) {
  if (!(gamma > 0.0) || !(tau_c > 0.0)) throw ValidationError("lorentzian_G: gamma, tau_c > 0");
  if (!(t >= 0.0)) throw ValidationError("lorentzian_G: t must be >= 0");
  const double x = t / (2.0 * tau_c);
  const double chi2 = 1.0 - 2.0 * gamma * tau_c;
  if (std::abs(chi2) < 1e-10) return std::exp(-x) * (1.0 + x);
  if (chi2 > 0.0) {
    const double chi = std::sqrt(chi2);
    const double one_minus_chi = 2.0 * gamma * tau_c / (1.0 + chi);
    // Exponential form avoids cosh/sinh overflow at large t.
    return 0.5 * ((1.0 + 1.0 / chi) * std::exp(-x * one_minus_chi) +
                  (1.0 - 1.0 / chi) * std::exp(-x * (1.0 + chi)));
  }
  const double w = std::sqrt(-chi2);
  return std::exp(-x) * (std::cos(w * x) + std::sin(w * x) / w);
}

// Closed form of the two-time convolution for the exponential kernel:
//   G(t, tau) = (2 gamma tau_c / chi^2) e^{-(t+tau)/2tau_c} sinh(t chi/2tau_c) sinh(tau chi/2tau_c).
inline complex lorentzian_G_two_time(double gamma, double tau_c, double t, double tau) {
  if (!(gamma > 0.0) || !(tau_c > 0.0))
    throw ValidationError("lorentzian_G_two_time: gamma, tau_c > 0");
  if (!(t >= 0.0) || !(tau >= 0.0))
    throw ValidationError("lorentzian_G_two_time: t, tau must be >= 0");
  const double x = t / (2.0 * tau_c);
  const double y = tau / (2.0 * tau_c);
  const double strength = 2.0 * gamma * tau_c;
  const double chi2 = 1.0 - strength;
  if (std::abs(chi2) < 1e-10) return strength * x * y * std::exp(-x - y);
  if (chi2 > 0.0) {
    const double chi = std::sqrt(chi2);
    const double one_minus_chi = strength / (1.0 + chi);
    // e^{-x} sinh(x chi)
    auto damped_sinh = [&](double u) {
      return 0.5 * (std::exp(-u * one_minus_chi) - std::exp(-u * (1.0 + chi)));
    };
    return strength / chi2 * damped_sinh(x) * damped_sinh(y);
  }
  const double w2 = -chi2;
  const double w = std::sqrt(w2);
  return strength / w2 * std::exp(-x - y) * std::sin(w * x) * std::sin(w * y);
}

// Samples the exponential-kernel closed form onto a grid.
inline PropagatorGrid sample_lorentzian_G(double gamma, double tau_c, double t_max,
                                          double t_step) {
  if (!(t_step > 0.0)) throw ValidationError("sample_lorentzian_G: t_step must be > 0");
  PropagatorGrid grid;
  grid.t_step = t_step;
  const std::size_t n = detail::steps_covering(t_max, t_step);
  grid.values.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i)
    grid.values.push_back(lorentzian_G(gamma, tau_c, static_cast<double>(i) * t_step));
  return grid;
}

// Tensor-product trapezoid quadrature of the double convolution, reusing the
// solved G grid. Output steps must be integer multiples of G.t_step; the
// quadrature always runs on the fine G grid. Columns are split across
// `threads` workers.
inline TwoTimeGrid compute_G_two_time(const BathKernel& kernel, const PropagatorGrid& G,
                                      double t_max, double tau_max, double t_step,
                                      double tau_step, unsigned threads = 1) {
  if (G.size() < 2) throw ValidationError("compute_G_two_time: propagator grid too small");
  if (!(t_max >= 0.0) || !(tau_max >= 0.0))
    throw ValidationError("compute_G_two_time: t_max, tau_max must be >= 0");
  const std::size_t st = detail::stride_of(t_step, G.t_step);
  const std::size_t stau = detail::stride_of(tau_step, G.t_step);
  if (st == 0 || stau == 0)
    throw ValidationError(
        "compute_G_two_time: requested steps must be integer multiples of the G grid step");

  const std::size_t n_t = detail::steps_covering(t_max, t_step) + 1;
  const std::size_t n_tau = detail::steps_covering(tau_max, tau_step) + 1;
  const std::size_t fine_t = (n_t - 1) * st;
  const std::size_t fine_tau = (n_tau - 1) * stau;
  if (std::max(fine_t, fine_tau) >= G.size())
    throw ValidationError("compute_G_two_time: G grid does not cover the requested range");

  const double h = G.t_step;
  detail::check_kernel_covers(kernel, static_cast<double>(fine_t + fine_tau) * h);
  std::vector<complex> f(fine_t + fine_tau + 1);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = kernel(static_cast<double>(k) * h);

  TwoTimeGrid out;
  out.t_step = static_cast<double>(st) * h;
  out.tau_step = static_cast<double>(stau) * h;
  out.n_t = n_t;
  out.n_tau = n_tau;
  out.values.assign(n_t * n_tau, complex{});

  auto trapezoid_weight = [](std::size_t l, std::size_t n) { return (l == 0 || l == n) ? 0.5 : 1.0; };

  // Column j: inner[m] = sum_l w_l f(l + m) G(J - l) over tau', then the outer
  // sum over t' for every requested row.
  auto fill_column = [&](std::size_t j) {
    const std::size_t J = j * stau;
    if (J == 0) return;  // empty tau' range
    std::vector<complex> inner(fine_t + 1);
    for (std::size_t m = 0; m <= fine_t; ++m) {
      complex acc{};
      for (std::size_t l = 0; l <= J; ++l) acc += trapezoid_weight(l, J) * f[l + m] * G.values[J - l];
      inner[m] = acc;
    }
    for (std::size_t i = 1; i < n_t; ++i) {
      const std::size_t I = i * st;
      complex acc{};
      for (std::size_t m = 0; m <= I; ++m) acc += trapezoid_weight(m, I) * inner[m] * G.values[I - m];
      out(i, j) = acc * h * h;
    }
  };

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_tau)));
  if (threads == 1) {
    for (std::size_t j = 0; j < n_tau; ++j) fill_column(j);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t j = w; j < n_tau; j += threads) fill_column(j);
      });
    }
  }
  return out;
}

// Same as above with the output on the G grid itself.
inline TwoTimeGrid compute_G_two_time(const BathKernel& kernel, const PropagatorGrid& G,
                                      double t_max, double tau_max) {
  return compute_G_two_time(kernel, G, t_max, tau_max, G.t_step, G.t_step);
}

// rho_t = [[|a|^2|G|^2, a b* G], [a* b G*, 1 - |a|^2|G|^2]]
inline DensityMatrix rho_t(const InitialState& state, complex G_val) {
  if (!(std::abs(G_val) <= 1.0 + 1e-9)) throw ValidationError("rho_t: |G| must be <= 1");
  const double excited = std::norm(state.a()) * std::norm(G_val);
  return DensityMatrix{excited, state.a() * std::conj(state.b()) * G_val,
                       std::conj(state.a()) * state.b() * std::conj(G_val), 1.0 - excited};
}

// gamma(t) + i omega(t) = -d/dt ln G(t), by central differences (second-order
// one-sided at the ends). The phase of ln G is unwrapped along the grid.
inline RateFunctions rates_from_G(const PropagatorGrid& G) {
  const std::size_t n = G.size();
  if (n < 2) throw ValidationError("rates_from_G: need at least 2 samples");
  std::vector<complex> log_g(n);
  double phase_offset = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const complex g = G.values[i];
    if (!(std::abs(g) > 1e-12))
      throw ZeroCrossingError("rates_from_G: G vanishes at index " + std::to_string(i), i);
    if (i > 0) {
      // A jump of more than pi/2 between samples means G passed through (or
      // next to) the origin, where ln G is singular.
      const double step_phase = std::arg(g / G.values[i - 1]);
      if (std::abs(step_phase) > 0.5 * std::numbers::pi)
        throw ZeroCrossingError("rates_from_G: G crosses zero before index " + std::to_string(i),
                                i);
      const double raw = std::arg(g) + phase_offset;
      const double prev = log_g[i - 1].imag();
      phase_offset += 2.0 * std::numbers::pi * std::round((prev - raw) / (2.0 * std::numbers::pi));
    }
    log_g[i] = complex(std::log(std::abs(g)), std::arg(g) + phase_offset);
  }

  const double h = G.t_step;
  RateFunctions r;
  r.t_step = h;
  r.gamma_t.resize(n);
  r.omega_t.resize(n);
  auto store = [&](std::size_t i, complex d) {
    r.gamma_t[i] = -d.real();
    r.omega_t[i] = -d.imag();
  };
  if (n == 2) {
    const complex d = (log_g[1] - log_g[0]) / h;
    store(0, d);
    store(1, d);
    return r;
  }
  store(0, (-3.0 * log_g[0] + 4.0 * log_g[1] - log_g[2]) / (2.0 * h));
  for (std::size_t i = 1; i + 1 < n; ++i) store(i, (log_g[i + 1] - log_g[i - 1]) / (2.0 * h));
  store(n - 1, (3.0 * log_g[n - 1] - 4.0 * log_g[n - 2] + log_g[n - 3]) / (2.0 * h));
  return r;
}

// G(t) = exp(-int_0^t (gamma + i omega) ds), cumulative trapezoid.
inline PropagatorGrid reconstruct_from_rates(const RateFunctions& rates) {
  PropagatorGrid g;
  g.t_step = rates.t_step;
  const std::size_t n = rates.gamma_t.size();
  g.values.resize(n);
  complex integral{};
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      const complex lo(rates.gamma_t[i - 1], rates.omega_t[i - 1]);
      const complex hi(rates.gamma_t[i], rates.omega_t[i]);
      integral += 0.5 * rates.t_step * (lo + hi);
    }
    g.values[i] = std::exp(-integral);
  }
  return g;
}

struct BackflowProbabilities {
  double p_survive;   // P(up, t | up, 0) = |G(t)|^2
  double p_reexcite;  // P(up, t+tau | down, t; up, 0) = |G(t,tau)|^2 / (1 - |G(t)|^2)
};

inline BackflowProbabilities backflow_probabilities(complex G_t, complex G_two) {
  const double survive = std::norm(G_t);
  if (!(survive < 1.0))
    throw ConditioningError("backflow_probabilities: |G(t)| >= 1, decay never observed");
  double reexcite = std::norm(G_two) / (1.0 - survive);
  if (reexcite > 1.0 + 1e-9)
    throw InternalConsistencyError("backflow_probabilities: re-excitation probability exceeds 1");
  reexcite = std::min(reexcite, 1.0);
  return {survive, reexcite};
}

inline void write_csv(std::ostream& os, const PropagatorGrid& G) {
  csv::RowWriter row(os);
  row << "t" << "re" << "im";
  row.end();
  for (std::size_t i = 0; i < G.size(); ++i) {
    row << G.time(i) << G.values[i].real() << G.values[i].imag();
    row.end();
  }
}

inline void write_csv(std::ostream& os, const TwoTimeGrid& G) {
  csv::RowWriter row(os);
  row << "t" << "tau" << "re" << "im";
  row.end();
  for (std::size_t i = 0; i < G.n_t; ++i) {
    for (std::size_t j = 0; j < G.n_tau; ++j) {
      row << static_cast<double>(i) * G.t_step << static_cast<double>(j) * G.tau_step
          << G(i, j).real() << G(i, j).imag();
      row.end();
    }
  }
}

}  // namespace cpfmem
