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

// Exact conditional past-future (CPF) correlations.
//
// Three projective measurements X -> Y -> Z are taken at times 0, t, t + tau.
// The intermediate one is always along z; X and Z share the scheme's
// direction. Conditioned on the intermediate outcome y,
//
//   C_pf(t, tau)|_y = <O_z O_x>_y - <O_z>_y <O_x>_y.
//
// Two routes are provided and must agree: the full conditional tables
// P(z, x | y), reduced by cpf_from_table, and the closed forms cpf_zzz /
// cpf_xzx / cpf_yzy.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <string_view>

#include "cpfmem/errors.hpp"
#include "cpfmem/initial_state.hpp"

namespace cpfmem {

enum class MeasurementScheme { zzz, xzx, yzy };

// Measurement outcome; the observable value is the enumerator's integer.
enum class Outcome : int { minus = -1, plus = 1 };

inline constexpr std::array<Outcome, 2> kOutcomes{Outcome::plus, Outcome::minus};

inline constexpr double value(Outcome o) { return static_cast<double>(static_cast<int>(o)); }

inline Outcome outcome_from_int(int v) {
  if (v == 1) return Outcome::plus;
  if (v == -1) return Outcome::minus;
  throw ValidationError("outcome must be +1 or -1, got " + std::to_string(v));
}

inline std::string_view to_string(MeasurementScheme s) {
  switch (s) {
    case MeasurementScheme::zzz: return "zzz";
    case MeasurementScheme::xzx: return "xzx";
    case MeasurementScheme::yzy: return "yzy";
  }
  return "?";
}

inline MeasurementScheme scheme_from_string(std::string_view s) {
  if (s == "zzz" || s == "ZZZ") return MeasurementScheme::zzz;
  if (s == "xzx" || s == "XZX") return MeasurementScheme::xzx;
  if (s == "yzy" || s == "YZY") return MeasurementScheme::yzy;
  throw ValidationError("unknown measurement scheme '" + std::string(s) + "'");
}

// P(z, x | y) for one scheme and one conditioning outcome.
struct ProbabilityTable {
  static constexpr double kSumTolerance = 1e-10;

  MeasurementScheme scheme = MeasurementScheme::zzz;
  Outcome y = Outcome::minus;
  std::array<double, 4> entries{};  // see index()

  static constexpr std::size_t index(Outcome z, Outcome x) {
    return (z == Outcome::plus ? 0 : 2) + (x == Outcome::plus ? 0 : 1);
  }

  double operator()(Outcome z, Outcome x) const { return entries[index(z, x)]; }
  double& operator()(Outcome z, Outcome x) { return entries[index(z, x)]; }

  // P(z | y)
  double future_marginal(Outcome z) const { return (*this)(z, Outcome::plus) + (*this)(z, Outcome::minus); }
  // P(x | y)
  double past_marginal(Outcome x) const { return (*this)(Outcome::plus, x) + (*this)(Outcome::minus, x); }

  double sum() const { return entries[0] + entries[1] + entries[2] + entries[3]; }

  void validate() const {
    for (double p : entries) {
      if (!(p >= -kSumTolerance && p <= 1.0 + kSumTolerance))
        throw ValidationError("probability table: entry outside [0, 1]");
    }
    if (std::abs(sum() - 1.0) > kSumTolerance)
      throw ValidationError("probability table: entries do not sum to 1");
  }
};

struct CpfResult {
  double value = 0.0;
  Outcome y = Outcome::minus;
  MeasurementScheme scheme = MeasurementScheme::zzz;
  double t = 0.0;
  double tau = 0.0;
};

// <O_z O_x>_y - <O_z>_y <O_x>_y
inline CpfResult cpf_from_table(const ProbabilityTable& tbl) {
  tbl.validate();
  double zx = 0.0, mean_z = 0.0, mean_x = 0.0;
  for (Outcome z : kOutcomes) {
    for (Outcome x : kOutcomes) zx += value(z) * value(x) * tbl(z, x);
    mean_z += value(z) * tbl.future_marginal(z);
  }
  for (Outcome x : kOutcomes) mean_x += value(x) * tbl.past_marginal(x);
  CpfResult r;
  r.value = zx - mean_z * mean_x;
  r.y = tbl.y;
  r.scheme = tbl.scheme;
  return r;
}

namespace detail {

inline constexpr double kConditioningFloor = 1e-12;

// (1 - |G(t)|^2)|a|^2 + |b|^2 = P(y = -1) for the z-z-z scheme.
inline double zzz_decay_weight(const InitialState& s, std::complex<double> G_t) {
  return (1.0 - std::norm(G_t)) * std::norm(s.a()) + std::norm(s.b());
}

inline void require_bound(std::complex<double> G_t, std::complex<double> G_two) {
  if (std::norm(G_two) > 1.0 - std::norm(G_t) + 1e-9)
    throw InternalConsistencyError("|G(t,tau)|^2 exceeds 1 - |G(t)|^2");
}

inline void clamp_entries(ProbabilityTable& tbl) {
  for (double& p : tbl.entries) {
    if (p < 0.0 && p > -1e-12) p = 0.0;
  }
}

}  // namespace detail

// Probability of the intermediate outcome y (marginal over x).
inline double conditioning_probability(MeasurementScheme scheme, const InitialState& state,
                                       std::complex<double> G_t, Outcome y) {
  double p_up = 0.0;
  if (scheme == MeasurementScheme::zzz) {
    p_up = std::norm(state.a()) * std::norm(G_t);
  } else {
    // After an equatorial projection the excited population is 1/2.
    p_up = 0.5 * std::norm(G_t);
  }
  return y == Outcome::plus ? p_up : 1.0 - p_up;
}

inline ProbabilityTable build_table_zzz(const InitialState& state, std::complex<double> G_t,
                                        std::complex<double> G_tau, std::complex<double> G_two,
                                        Outcome y) {
  ProbabilityTable tbl;
  tbl.scheme = MeasurementScheme::zzz;
  tbl.y = y;
  const double a2 = std::norm(state.a());
  const double b2 = std::norm(state.b());
  if (y == Outcome::plus) {
    if (!(a2 * std::norm(G_t) > detail::kConditioningFloor))
      throw ConditioningError("zzz table: P(y = +1) vanishes");
    // y = +1 implies x = +1 and the system restarts in |up>.
    tbl(Outcome::plus, Outcome::plus) = std::norm(G_tau);
    tbl(Outcome::minus, Outcome::plus) = 1.0 - std::norm(G_tau);
    return tbl;
  }
  detail::require_bound(G_t, G_two);
  const double denom = detail::zzz_decay_weight(state, G_t);
  if (!(denom > detail::kConditioningFloor))
    throw ConditioningError("zzz table: P(y = -1) vanishes");
  const double g2 = std::norm(G_two);
  tbl(Outcome::plus, Outcome::plus) = g2 * a2 / denom;
  tbl(Outcome::minus, Outcome::plus) = (1.0 - g2 - std::norm(G_t)) * a2 / denom;
  tbl(Outcome::minus, Outcome::minus) = b2 / denom;
  detail::clamp_entries(tbl);
  return tbl;
}

namespace detail {

// Shared by the two equatorial schemes: P(x) = (1 + x * bias) / 2 and, for
// y = -1, P(z | -, x) = (1 - z x kappa) / 2 with kappa = 2 Re G(t,tau) / (2 - |G(t)|^2).
inline ProbabilityTable equatorial_table(MeasurementScheme scheme, double bias,
                                         std::complex<double> G_t, std::complex<double> G_two,
                                         Outcome y) {
  ProbabilityTable tbl;
  tbl.scheme = scheme;
  tbl.y = y;
  double kappa = 0.0;
  if (y == Outcome::plus) {
    if (!(0.5 * std::norm(G_t) > kConditioningFloor))
      throw ConditioningError("equatorial table: P(y = +1) vanishes");
  } else {
    require_bound(G_t, G_two);
    kappa = 2.0 * G_two.real() / (2.0 - std::norm(G_t));
    if (std::abs(kappa) > 1.0 + 1e-9)
      throw InternalConsistencyError("equatorial table: interference term out of range");
  }
  for (Outcome x : kOutcomes) {
    const double p_x = 0.5 * (1.0 + value(x) * bias);
    for (Outcome z : kOutcomes) tbl(z, x) = 0.5 * p_x * (1.0 - value(z) * value(x) * kappa);
  }
  clamp_entries(tbl);
  return tbl;
}

}  // namespace detail

// P(z,x|+) = |a + x b|^2 / 4,
// P(z,x|-) = (|a + x b|^2 / 4) [1 - z x (G(t,tau) + G*(t,tau)) / (2 - |G(t)|^2)].
inline ProbabilityTable build_table_xzx(const InitialState& state, std::complex<double> G_t,
                                        std::complex<double> G_two, Outcome y) {
  // |a + x b|^2 = 1 + 2 x Re(a b*)
  return detail::equatorial_table(MeasurementScheme::xzx, 2.0 * state.coherence().real(), G_t,
                                  G_two, y);
}

// Projectors onto (|up> +- i|down>)/sqrt(2); |a - i x b|^2 = 1 - 2 x Im(a b*).
inline ProbabilityTable build_table_yzy(const InitialState& state, std::complex<double> G_t,
                                        std::complex<double> G_two, Outcome y) {
  return detail::equatorial_table(MeasurementScheme::yzy, -2.0 * state.coherence().imag(), G_t,
                                  G_two, y);
}

inline ProbabilityTable build_table(MeasurementScheme scheme, const InitialState& state,
                                    std::complex<double> G_t, std::complex<double> G_tau,
                                    std::complex<double> G_two, Outcome y) {
  switch (scheme) {
    case MeasurementScheme::zzz: return build_table_zzz(state, G_t, G_tau, G_two, y);
    case MeasurementScheme::xzx: return build_table_xzx(state, G_t, G_two, y);
    case MeasurementScheme::yzy: return build_table_yzy(state, G_t, G_two, y);
  }
  throw ValidationError("unknown scheme");
}

// y = -1:  {4|a|^2|b|^2 / [(1 - |G(t)|^2)|a|^2 + |b|^2]^2} |G(t,tau)|^2
inline CpfResult cpf_zzz(const InitialState& state, std::complex<double> G_t,
                         std::complex<double> G_two) {
  const double denom = detail::zzz_decay_weight(state, G_t);
  if (!(denom > detail::kConditioningFloor)) throw ConditioningError("cpf_zzz: P(y = -1) vanishes");
  CpfResult r;
  r.scheme = MeasurementScheme::zzz;
  r.y = Outcome::minus;
  r.value = 4.0 * std::norm(state.a()) * std::norm(state.b()) / (denom * denom) * std::norm(G_two);
  return r;
}

namespace detail {

inline CpfResult equatorial_cpf(MeasurementScheme scheme, double bias, std::complex<double> G_t,
                                std::complex<double> G_two) {
  CpfResult r;
  r.scheme = scheme;
  r.y = Outcome::minus;
  r.value = -(1.0 - bias * bias) / (1.0 - 0.5 * std::norm(G_t)) * G_two.real();
  return r;
}

}  // namespace detail

// y = -1:  -{(1 - [2 Re(a b*)]^2) / (1 - |G(t)|^2 / 2)} Re G(t,tau)
inline CpfResult cpf_xzx(const InitialState& state, std::complex<double> G_t,
                         std::complex<double> G_two) {
  return detail::equatorial_cpf(MeasurementScheme::xzx, 2.0 * state.coherence().real(), G_t,
                                G_two);
}

// y = -1:  -{(1 - [2 Im(a b*)]^2) / (1 - |G(t)|^2 / 2)} Re G(t,tau)
inline CpfResult cpf_yzy(const InitialState& state, std::complex<double> G_t,
                         std::complex<double> G_two) {
  return detail::equatorial_cpf(MeasurementScheme::yzy, 2.0 * state.coherence().imag(), G_t,
                                G_two);
}

// Conditioned on an excited intermediate outcome the correlation vanishes
// identically in every scheme.
inline CpfResult cpf_y_plus(MeasurementScheme scheme) {
  CpfResult r;
  r.scheme = scheme;
  r.y = Outcome::plus;
  r.value = 0.0;
  return r;
}

// Closed form for any scheme and outcome.
inline CpfResult cpf_closed_form(MeasurementScheme scheme, const InitialState& state,
                                 std::complex<double> G_t, std::complex<double> G_two,
                                 Outcome y) {
  if (y == Outcome::plus) return cpf_y_plus(scheme);
  switch (scheme) {
    case MeasurementScheme::zzz: return cpf_zzz(state, G_t, G_two);
    case MeasurementScheme::xzx: return cpf_xzx(state, G_t, G_two);
    case MeasurementScheme::yzy: return cpf_yzy(state, G_t, G_two);
  }
  throw ValidationError("unknown scheme");
}

}  // namespace cpfmem
