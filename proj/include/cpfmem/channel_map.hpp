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

// Explicit system (x) environment statevector simulation of the measurement
// sequence X -> U(t) -> Y -> U(tau) -> Z. The bosonic bath is encoded as a
// two-level environment {|0>, |1>} (no excitation / one excitation), which
// reproduces every reduced statistic of the single-excitation dynamics.
//
// U(t), amplitude damping with cos(2 theta) = G(t):
//   |d0> -> |d0>
//   |u0> -> cos(2 theta)|u0> + sin(2 theta)|d1>
//
// U(tau), extended damping with cos(2 theta~) = G(tau) and
// sin(2 theta~') = -G(t,tau) / sqrt(1 - G(t)^2):
//   |d0> -> |d0>
//   |u0> -> cos(2 theta~)|u0>  + sin(2 theta~)|d1>
//   |d1> -> sin(2 theta~')|u0> + cos(2 theta~')|d1>
//
// The last two lines are only unitary together when the angles form one
// rotation; the intermediate z measurement guarantees that every branch is
// supported on just one of |u0>, |d1>, so each branch is norm preserving.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>
#include <string>

#include "cpfmem/cpf_analytic.hpp"
#include "cpfmem/csv.hpp"
#include "cpfmem/errors.hpp"
#include "cpfmem/initial_state.hpp"

namespace cpfmem {

struct ChannelAngles {
  double theta = 0.0;
  double theta_tilde = 0.0;
  double theta_tilde_prime = 0.0;
};

// Sign of the re-excitation amplitude sin(2 theta~'). `negative` follows the
// amplitude -G(t,tau)/sqrt(1 - G(t)^2) of the exact solution; `positive` is
// kept to demonstrate which observables depend on the choice.
enum class ReexcitationSign { negative, positive };

inline ChannelAngles angles_from_propagator(std::complex<double> G_t, std::complex<double> G_tau,
                                            std::complex<double> G_two,
                                            ReexcitationSign sign = ReexcitationSign::negative) {
  constexpr double kImagTol = 1e-9;
  if (std::abs(G_t.imag()) > kImagTol || std::abs(G_tau.imag()) > kImagTol ||
      std::abs(G_two.imag()) > kImagTol)
    throw UnsupportedRegimeError("channel angles require real propagator values");
  auto clamp_unit = [](double v, const char* what) {
    if (std::abs(v) > 1.0 + 1e-9)
      throw InternalConsistencyError(std::string("channel angles: |") + what + "| > 1");
    return std::clamp(v, -1.0, 1.0);
  };
  const double gt = clamp_unit(G_t.real(), "G(t)");
  const double gtau = clamp_unit(G_tau.real(), "G(tau)");

  ChannelAngles ang;
  ang.theta = 0.5 * std::acos(gt);
  ang.theta_tilde = 0.5 * std::acos(gtau);
  const double decayed = 1.0 - gt * gt;
  if (decayed <= 1e-14) {
    // No decay yet: G(t,tau) vanishes with the empty integration range.
    if (std::abs(G_two.real()) > 1e-9)
      throw InternalConsistencyError("channel angles: G(t,tau) != 0 while G(t) = 1");
    ang.theta_tilde_prime = 0.0;
    return ang;
  }
  const double signed_two = sign == ReexcitationSign::negative ? -G_two.real() : G_two.real();
  const double s = clamp_unit(signed_two / std::sqrt(decayed), "sin(2 theta~')");
  ang.theta_tilde_prime = 0.5 * std::asin(s);
  return ang;
}

enum class Axis { x, y, z };

inline Axis outer_axis(MeasurementScheme scheme) {
  switch (scheme) {
    case MeasurementScheme::zzz: return Axis::z;
    case MeasurementScheme::xzx: return Axis::x;
    case MeasurementScheme::yzy: return Axis::y;
  }
  return Axis::z;
}

// Amplitudes over {|d0>, |u0>, |d1>, |u1>} (system (x) environment).
struct JointState {
  static constexpr std::size_t down0 = 0, up0 = 1, down1 = 2, up1 = 3;
  std::array<std::complex<double>, 4> amp{};

  static JointState from_initial(const InitialState& s) {
    JointState j;
    j.amp[up0] = s.a();
    j.amp[down0] = s.b();
    return j;
  }

  static JointState basis(std::size_t k) {
    JointState j;
    j.amp[k] = 1.0;
    return j;
  }

  double norm() const {
    double n = 0.0;
    for (const auto& c : amp) n += std::norm(c);
    return n;
  }
};

namespace detail {

inline void require_single_excitation(const JointState& s) {
  if (std::abs(s.amp[JointState::up1]) > 1e-12)
    throw ValidationError("channel map: state leaves the single-excitation sector");
}

}  // namespace detail

inline JointState apply_U_t(const JointState& s, double theta) {
  detail::require_single_excitation(s);
  const double c = std::cos(2.0 * theta);
  const double sn = std::sin(2.0 * theta);
  JointState out = s;
  out.amp[JointState::up0] = c * s.amp[JointState::up0] - sn * s.amp[JointState::down1];
  out.amp[JointState::down1] = sn * s.amp[JointState::up0] + c * s.amp[JointState::down1];
  return out;
}

inline JointState apply_U_tau(const JointState& s, double theta_tilde, double theta_tilde_prime) {
  detail::require_single_excitation(s);
  const auto u0 = s.amp[JointState::up0];
  const auto d1 = s.amp[JointState::down1];
  // Columns (cos 2t~, sin 2t~) and (sin 2t~', cos 2t~') are orthogonal iff
  // sin(2 t~ + 2 t~') = 0.
  const double overlap = std::sin(2.0 * theta_tilde + 2.0 * theta_tilde_prime);
  if (std::abs(overlap) > 1e-9 && std::abs(u0) > 1e-12 && std::abs(d1) > 1e-12)
    throw NonUnitaryMapError("U(tau): angles do not form a rotation on a mixed |u0>,|d1> input");
  const double ct = std::cos(2.0 * theta_tilde), st = std::sin(2.0 * theta_tilde);
  const double cp = std::cos(2.0 * theta_tilde_prime), sp = std::sin(2.0 * theta_tilde_prime);
  JointState out = s;
  out.amp[JointState::up0] = ct * u0 + sp * d1;
  out.amp[JointState::down1] = st * u0 + cp * d1;
  return out;
}

// Eigenvector of the system observable along `axis` with eigenvalue `outcome`,
// as (up, down) amplitudes.
inline std::array<std::complex<double>, 2> eigenvector(Axis axis, Outcome outcome) {
  const double r = std::numbers::sqrt2 / 2.0;
  const double sgn = value(outcome);
  switch (axis) {
    case Axis::z:
      return outcome == Outcome::plus ? std::array<std::complex<double>, 2>{1.0, 0.0}
                                      : std::array<std::complex<double>, 2>{0.0, 1.0};
    case Axis::x: return {r, sgn * r};
    case Axis::y: return {r, std::complex<double>(0.0, sgn * r)};
  }
  return {1.0, 0.0};
}

struct Projection {
  double prob;
  JointState collapsed;
};

// Born probability of a system projector (identity on the environment).
inline double projection_probability(const JointState& s, Axis axis, Outcome outcome) {
  const auto v = eigenvector(axis, outcome);
  double p = 0.0;
  for (std::size_t env = 0; env < 2; ++env) {
    const auto up = s.amp[2 * env + 1];
    const auto down = s.amp[2 * env];
    p += std::norm(std::conj(v[0]) * up + std::conj(v[1]) * down);
  }
  return p;
}

inline Projection project(const JointState& s, Axis axis, Outcome outcome) {
  const auto v = eigenvector(axis, outcome);
  JointState out;
  double p = 0.0;
  for (std::size_t env = 0; env < 2; ++env) {
    const auto overlap = std::conj(v[0]) * s.amp[2 * env + 1] + std::conj(v[1]) * s.amp[2 * env];
    out.amp[2 * env + 1] = overlap * v[0];
    out.amp[2 * env] = overlap * v[1];
    p += std::norm(overlap);
  }
  if (p < 1e-14) throw ZeroProbabilityBranchError("project: outcome has zero probability");
  const double inv = 1.0 / std::sqrt(p);
  for (auto& c : out.amp) c *= inv;
  return {p, out};
}

// P(x, y, z) over the eight outcome paths.
struct JointProbabilities {
  std::array<double, 8> p{};

  static constexpr std::size_t index(Outcome x, Outcome y, Outcome z) {
    return (x == Outcome::plus ? 0 : 4) + (y == Outcome::plus ? 0 : 2) + (z == Outcome::plus ? 0 : 1);
  }
  double operator()(Outcome x, Outcome y, Outcome z) const { return p[index(x, y, z)]; }
  double& operator()(Outcome x, Outcome y, Outcome z) { return p[index(x, y, z)]; }

  double total() const {
    double s = 0.0;
    for (double v : p) s += v;
    return s;
  }

  double p_y(Outcome y) const {
    double s = 0.0;
    for (Outcome x : kOutcomes)
      for (Outcome z : kOutcomes) s += (*this)(x, y, z);
    return s;
  }
};

// Exhaustive enumeration of the measurement sequence. Zero-probability
// branches contribute 0.
inline JointProbabilities simulate_sequence(const InitialState& state, MeasurementScheme scheme,
                                            const ChannelAngles& angles) {
  JointProbabilities joint;
  const Axis outer = outer_axis(scheme);
  const JointState initial = JointState::from_initial(state);
  for (Outcome x : kOutcomes) {
    const double px = projection_probability(initial, outer, x);
    if (px < 1e-14) continue;
    // The projected system state is re-prepared with the environment in |0>.
    const auto after_x = project(initial, outer, x).collapsed;
    const auto evolved = apply_U_t(after_x, angles.theta);
    for (Outcome y : kOutcomes) {
      const double py = projection_probability(evolved, Axis::z, y);
      if (py < 1e-14) continue;
      const auto after_y = project(evolved, Axis::z, y).collapsed;
      const auto final_state = apply_U_tau(after_y, angles.theta_tilde, angles.theta_tilde_prime);
      for (Outcome z : kOutcomes)
        joint(x, y, z) = px * py * projection_probability(final_state, outer, z);
    }
  }
  return joint;
}

// P(z, x | y) = P(x, y, z) / P(y)
inline ProbabilityTable conditional_table(const JointProbabilities& joint,
                                          MeasurementScheme scheme, Outcome y) {
  const double py = joint.p_y(y);
  if (!(py > 1e-14)) throw ConditioningError("conditional_table: P(y) vanishes");
  ProbabilityTable tbl;
  tbl.scheme = scheme;
  tbl.y = y;
  for (Outcome z : kOutcomes)
    for (Outcome x : kOutcomes) tbl(z, x) = joint(x, y, z) / py;
  return tbl;
}

// Conditional tables written directly in the angle variables.
inline ProbabilityTable build_table_from_angles(MeasurementScheme scheme,
                                                const InitialState& state,
                                                const ChannelAngles& ang, Outcome y) {
  const double s2t = std::sin(2.0 * ang.theta), c2t = std::cos(2.0 * ang.theta);
  const double s2tt = std::sin(2.0 * ang.theta_tilde), c2tt = std::cos(2.0 * ang.theta_tilde);
  const double s2tp = std::sin(2.0 * ang.theta_tilde_prime);
  const double c2tp = std::cos(2.0 * ang.theta_tilde_prime);
  const double a2 = std::norm(state.a()), b2 = std::norm(state.b());
  ProbabilityTable tbl;
  tbl.scheme = scheme;
  tbl.y = y;
  if (scheme == MeasurementScheme::zzz) {
    if (y == Outcome::plus) {
      tbl(Outcome::plus, Outcome::plus) = c2tt * c2tt;
      tbl(Outcome::minus, Outcome::plus) = s2tt * s2tt;
      return tbl;
    }
    const double denom = s2t * s2t * a2 + b2;
    if (!(denom > 1e-12)) throw ConditioningError("angle table: P(y = -1) vanishes");
    tbl(Outcome::plus, Outcome::plus) = s2t * s2t * s2tp * s2tp * a2 / denom;
    tbl(Outcome::minus, Outcome::plus) = s2t * s2t * c2tp * c2tp * a2 / denom;
    tbl(Outcome::minus, Outcome::minus) = b2 / denom;
    return tbl;
  }
  const double bias = scheme == MeasurementScheme::xzx ? 2.0 * state.coherence().real()
                                                        : -2.0 * state.coherence().imag();
  const double interference = y == Outcome::plus ? 0.0 : 2.0 * s2t * s2tp / (2.0 - c2t * c2t);
  for (Outcome x : kOutcomes) {
    const double quarter = 0.25 * (1.0 + value(x) * bias);
    for (Outcome z : kOutcomes) tbl(z, x) = quarter * (1.0 + value(z) * value(x) * interference);
  }
  return tbl;
}

// y = -1 correlations in angle form:
//   zzz: {4|a|^2|b|^2 / [sin^2(2t)|a|^2 + |b|^2]^2} sin^2(2t) sin^2(2t~')
//   xzx: {(1 - [2 Re(a b*)]^2) / (1 - cos^2(2t)/2)} sin(2t) sin(2t~')
inline CpfResult cpf_from_angles(MeasurementScheme scheme, const InitialState& state,
                                 const ChannelAngles& ang) {
  const double s2t = std::sin(2.0 * ang.theta), c2t = std::cos(2.0 * ang.theta);
  const double s2tp = std::sin(2.0 * ang.theta_tilde_prime);
  CpfResult r;
  r.scheme = scheme;
  r.y = Outcome::minus;
  if (scheme == MeasurementScheme::zzz) {
    const double a2 = std::norm(state.a()), b2 = std::norm(state.b());
    const double denom = s2t * s2t * a2 + b2;
    if (!(denom > 1e-12)) throw ConditioningError("cpf_from_angles: P(y = -1) vanishes");
    r.value = 4.0 * a2 * b2 / (denom * denom) * s2t * s2t * s2tp * s2tp;
    return r;
  }
  const double bias = scheme == MeasurementScheme::xzx ? 2.0 * state.coherence().real()
                                                        : 2.0 * state.coherence().imag();
  r.value = (1.0 - bias * bias) / (1.0 - 0.5 * c2t * c2t) * s2t * s2tp;
  return r;
}

inline void write_csv(std::ostream& os, const JointProbabilities& joint) {
  csv::RowWriter row(os);
  row << "x" << "y" << "z" << "probability";
  row.end();
  for (Outcome x : kOutcomes)
    for (Outcome y : kOutcomes)
      for (Outcome z : kOutcomes) {
        row << static_cast<int>(x) << static_cast<int>(y) << static_cast<int>(z) << joint(x, y, z);
        row.end();
      }
}

}  // namespace cpfmem
