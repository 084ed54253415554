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

// Finite-statistics model of the photonic CPF estimator: independent Poisson
// coincidence counts per (z, x) cell and an interferometric visibility that
// scales the coherent part of the conditional probabilities.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include "cpfmem/cpf_analytic.hpp"
#include "cpfmem/dynamics.hpp"
#include "cpfmem/errors.hpp"
#include "cpfmem/initial_state.hpp"

namespace cpfmem {

// How the total coincidence budget is spread over a sweep.
enum class CountBudget {
  per_point,  // every (t, tau) point receives total_counts
  per_sweep,  // total_counts is shared evenly by all points of the sweep
};

struct ExperimentConfig {
  double total_counts = 10000.0;  // expected coincidences, see budget
  double visibility = 1.0;
  std::size_t replicas = 200;
  std::uint64_t seed = 0;
  CountBudget budget = CountBudget::per_sweep;

  void validate() const {
    if (!(total_counts > 0.0) || !std::isfinite(total_counts))
      throw ValidationError("experiment: total_counts must be > 0");
    if (!(visibility >= 0.0 && visibility <= 1.0))
      throw ValidationError("experiment: visibility must lie in [0, 1]");
    if (replicas < 1) throw ValidationError("experiment: replicas must be >= 1");
  }
};

struct CountsTable {
  MeasurementScheme scheme = MeasurementScheme::zzz;
  Outcome y = Outcome::minus;
  std::array<std::uint64_t, 4> counts{};  // ProbabilityTable::index layout

  std::uint64_t operator()(Outcome z, Outcome x) const { return counts[ProbabilityTable::index(z, x)]; }
  std::uint64_t& operator()(Outcome z, Outcome x) { return counts[ProbabilityTable::index(z, x)]; }

  std::uint64_t total() const { return counts[0] + counts[1] + counts[2] + counts[3]; }
};

// For the equatorial schemes each entry is split into its incoherent part
// P(x|y)/2 and the interference remainder, and only the remainder is scaled:
//   P_V(z, x | y) = P(x|y)/2 + V [P(z, x | y) - P(x|y)/2].
// The z-z-z scheme involves no interference and is returned unchanged.
inline ProbabilityTable apply_visibility(const ProbabilityTable& tbl, double visibility) {
  if (!(visibility >= 0.0 && visibility <= 1.0))
    throw ValidationError("apply_visibility: V must lie in [0, 1]");
  tbl.validate();
  if (tbl.scheme == MeasurementScheme::zzz) return tbl;
  ProbabilityTable out = tbl;
  for (Outcome x : kOutcomes) {
    const double incoherent = 0.5 * tbl.past_marginal(x);
    for (Outcome z : kOutcomes) out(z, x) = incoherent + visibility * (tbl(z, x) - incoherent);
  }
  return out;
}

// Engine for one (stream, point, replica) triple, derived from the run seed.
inline std::mt19937_64 replica_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t point,
                                      std::uint64_t replica) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), lo(stream), hi(stream), lo(point), hi(point),
                    lo(replica), hi(replica)};
  return std::mt19937_64(seq);
}

// Independent Poisson draw per cell with mean expected_total * P(z, x | y).
inline CountsTable sample_counts(const ProbabilityTable& tbl, double expected_total,
                                 std::mt19937_64& rng) {
  if (!(expected_total >= 0.0)) throw ValidationError("sample_counts: negative count budget");
  CountsTable c;
  c.scheme = tbl.scheme;
  c.y = tbl.y;
  for (std::size_t k = 0; k < 4; ++k) {
    const double mean = expected_total * tbl.entries[k];
    if (!(mean > 0.0)) continue;
    std::poisson_distribution<std::uint64_t> dist(mean);
    c.counts[k] = dist(rng);
  }
  return c;
}

inline CountsTable sample_counts(const ProbabilityTable& tbl, const ExperimentConfig& cfg,
                                 std::mt19937_64& rng) {
  cfg.validate();
  return sample_counts(tbl, cfg.total_counts, rng);
}

// P(z, x | y) = N_zx / sum N, then the CPF of the normalized table.
inline CpfResult estimate_cpf(const CountsTable& counts) {
  const auto total = counts.total();
  if (total == 0) throw NoDataError("estimate_cpf: no coincidences recorded");
  ProbabilityTable tbl;
  tbl.scheme = counts.scheme;
  tbl.y = counts.y;
  for (std::size_t k = 0; k < 4; ++k)
    tbl.entries[k] = static_cast<double>(counts.counts[k]) / static_cast<double>(total);
  return cpf_from_table(tbl);
}

struct NoisePoint {
  double t = 0.0;
  double tau = 0.0;
  double ideal = std::numeric_limits<double>::quiet_NaN();
  double degraded_ideal = std::numeric_limits<double>::quiet_NaN();
  double mc_mean = std::numeric_limits<double>::quiet_NaN();
  double mc_std = std::numeric_limits<double>::quiet_NaN();
  double expected_counts = 0.0;  // N_point * P(y)
  std::size_t n_valid = 0;       // replicas that recorded at least one event
  bool flagged = false;          // conditioning impossible or fewer than 2 valid replicas
  std::vector<double> replica_values;
};

// For every sample point: the ideal CPF, its visibility-degraded value and
// Monte Carlo statistics of the estimator. Counts for the conditioning
// outcome y have expected total N_point * P(y), where N_point follows the
// configured budget. Replicas are seeded from
// (seed, stream, point index, replica index), so results do not depend on
// the thread count.
inline std::vector<NoisePoint> run_noise_study(const InitialState& state, MeasurementScheme scheme,
                                               Outcome y, std::span<const PropagatorSample> points,
                                               const ExperimentConfig& cfg, unsigned threads = 1,
                                               std::uint64_t stream = 0) {
  cfg.validate();
  std::vector<NoisePoint> out(points.size());
  const double point_budget = cfg.budget == CountBudget::per_sweep && !points.empty()
                                  ? cfg.total_counts / static_cast<double>(points.size())
                                  : cfg.total_counts;

  auto run_point = [&](std::size_t k) {
    const auto& s = points[k];
    NoisePoint& np = out[k];
    np.t = s.t;
    np.tau = s.tau;
    ProbabilityTable ideal_tbl;
    try {
      ideal_tbl = build_table(scheme, state, s.G_t, s.G_tau, s.G_two, y);
    } catch (const ConditioningError&) {
      np.flagged = true;
      return;
    }
    const auto degraded_tbl = apply_visibility(ideal_tbl, cfg.visibility);
    np.ideal = cpf_from_table(ideal_tbl).value;
    np.degraded_ideal = cpf_from_table(degraded_tbl).value;
    np.expected_counts = point_budget * conditioning_probability(scheme, state, s.G_t, y);

    np.replica_values.reserve(cfg.replicas);
    for (std::size_t r = 0; r < cfg.replicas; ++r) {
      auto rng = replica_engine(cfg.seed, stream, k, r);
      const auto counts = sample_counts(degraded_tbl, np.expected_counts, rng);
      if (counts.total() == 0) continue;
      np.replica_values.push_back(estimate_cpf(counts).value);
    }
    np.n_valid = np.replica_values.size();
    if (np.n_valid >= 1) {
      double sum = 0.0;
      for (double v : np.replica_values) sum += v;
      np.mc_mean = sum / static_cast<double>(np.n_valid);
    }
    if (np.n_valid >= 2) {
      double ss = 0.0;
      for (double v : np.replica_values) ss += (v - np.mc_mean) * (v - np.mc_mean);
      np.mc_std = std::sqrt(ss / static_cast<double>(np.n_valid - 1));
    } else {
      np.flagged = true;
    }
  };

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, points.size()))));
  if (threads == 1) {
    for (std::size_t k = 0; k < points.size(); ++k) run_point(k);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < points.size(); k += threads) run_point(k);
      });
  }
  return out;
}

inline std::vector<NoisePoint> run_noise_study(const InitialState& state, MeasurementScheme scheme,
                                               Outcome y, const Dynamics& dynamics,
                                               const TimeGrid& grid, const ExperimentConfig& cfg,
                                               unsigned threads = 1, std::uint64_t stream = 0) {
  const auto samples = dynamics.sample(grid, threads);
  return run_noise_study(state, scheme, y, samples, cfg, threads, stream);
}

}  // namespace cpfmem
