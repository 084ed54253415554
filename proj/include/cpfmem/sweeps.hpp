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

// Dataset producers behind the command-line tool. Each writes a "# " header
// block (artifact version, command, config echo) followed by a CSV table.
// Output depends only on the config, never on the thread count or clock.

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "cpfmem/channel_map.hpp"
#include "cpfmem/cpf_analytic.hpp"
#include "cpfmem/csv.hpp"
#include "cpfmem/dynamics.hpp"
#include "cpfmem/experiment_sim.hpp"
#include "cpfmem/propagator.hpp"
#include "cpfmem/run_config.hpp"
#include "cpfmem/version.hpp"

namespace cpfmem {

inline void write_header(std::ostream& os, std::string_view command, const RunConfig& cfg) {
  os << "# cpfmem " << kVersion << '\n';
  os << "# command: " << command << '\n';
  os << "# config: " << cfg.echo.dump() << '\n';
}

namespace detail {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// One (scheme, gamma * tau_c, p) curve with gamma = 1.
struct CurveSpec {
  MeasurementScheme scheme;
  double gamma_tau_c;
  double p;
};

inline Dynamics unit_gamma_dynamics(double gamma_tau_c, const RunConfig& cfg) {
  return Dynamics(BathKernel::lorentzian(1.0, gamma_tau_c),
                  cfg.method.value_or(PropagatorMethod::closed_form), cfg.fine_step);
}

inline TimeGrid diagonal(TimeGrid g) {
  g.equal_times = true;
  return g;
}

template <class F>
double or_nan(F&& f) {
  try {
    return f();
  } catch (const ConditioningError&) {
    return kNaN;
  } catch (const UnsupportedRegimeError&) {
    return kNaN;
  }
}

inline double channel_cpf(MeasurementScheme scheme, const InitialState& state,
                          const PropagatorSample& s, Outcome y) {
  const auto angles = angles_from_propagator(s.G_t, s.G_tau, s.G_two);
  const auto joint = simulate_sequence(state, scheme, angles);
  return cpf_from_table(conditional_table(joint, scheme, y)).value;
}

}  // namespace detail

// C(t, t) for y = -1 on the four reference curves plus a weak-coupling
// pair at gamma * tau_c = 0.01. Uses grid and propagator settings from cfg.
inline void run_figure2(const RunConfig& cfg, std::ostream& os, unsigned threads = 1) {
  using detail::CurveSpec;
  const std::vector<CurveSpec> curves{
      {MeasurementScheme::zzz, 1.0, 0.8},  {MeasurementScheme::zzz, 0.5, 0.8},
      {MeasurementScheme::xzx, 0.5, 1.0},  {MeasurementScheme::xzx, 1.0, 1.0},
      {MeasurementScheme::zzz, 0.01, 0.8}, {MeasurementScheme::xzx, 0.01, 1.0},
  };
  write_header(os, "figure2", cfg);
  csv::RowWriter row(os);
  row << "scheme" << "y" << "p" << "gamma_tau_c" << "t" << "tau" << "cpf_closed" << "cpf_table";
  row.end();
  const auto grid = detail::diagonal(cfg.grid);
  for (const auto& c : curves) {
    const auto state = InitialState::from_p(c.p);
    const auto samples = detail::unit_gamma_dynamics(c.gamma_tau_c, cfg).sample(grid, threads);
    for (const auto& s : samples) {
      const double closed = detail::or_nan(
          [&] { return cpf_closed_form(c.scheme, state, s.G_t, s.G_two, Outcome::minus).value; });
      const double table = detail::or_nan([&] {
        return cpf_from_table(build_table(c.scheme, state, s.G_t, s.G_tau, s.G_two, Outcome::minus))
            .value;
      });
      row << to_string(c.scheme) << -1 << c.p << c.gamma_tau_c << s.t << s.tau << closed << table;
      row.end();
    }
  }
}

// Noise study blocks: x-z-x (gamma * tau_c = 1, p = 1, y = -1) for every
// (N, V) pair, then z-z-z at gamma * tau_c = 0.1 (p = 0.8) and x-z-x with
// y = +1, both at V = 1 for every N. Each block draws from its own stream.
inline void run_appendix_d(const RunConfig& cfg, std::ostream& os, unsigned threads = 1) {
  const auto& noise = cfg.require_noise();
  struct Block {
    MeasurementScheme scheme;
    double gamma_tau_c;
    double p;
    Outcome y;
    double counts;
    double visibility;
  };
  std::vector<Block> blocks;
  for (double n : noise.total_counts)
    for (double v : noise.visibility)
      blocks.push_back({MeasurementScheme::xzx, 1.0, 1.0, Outcome::minus, n, v});
  for (double n : noise.total_counts)
    blocks.push_back({MeasurementScheme::zzz, 0.1, 0.8, Outcome::minus, n, 1.0});
  for (double n : noise.total_counts)
    blocks.push_back({MeasurementScheme::xzx, 1.0, 1.0, Outcome::plus, n, 1.0});

  write_header(os, "appendix-d", cfg);
  csv::RowWriter row(os);
  row << "scheme" << "y" << "p" << "gamma_tau_c" << "N" << "V" << "t" << "ideal"
      << "degraded_ideal" << "mc_mean" << "mc_std" << "n_replicas" << "seed";
  row.end();
  const auto grid = detail::diagonal(cfg.grid);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& blk = blocks[b];
    const auto state = InitialState::from_p(blk.p);
    const auto samples = detail::unit_gamma_dynamics(blk.gamma_tau_c, cfg).sample(grid, threads);
    const auto points = run_noise_study(state, blk.scheme, blk.y, samples,
                                        noise.experiment(blk.counts, blk.visibility), threads, b);
    for (const auto& pt : points) {
      row << to_string(blk.scheme) << static_cast<int>(blk.y) << blk.p << blk.gamma_tau_c
          << blk.counts << blk.visibility << pt.t << pt.ideal << pt.degraded_ideal << pt.mc_mean
          << pt.mc_std << static_cast<unsigned long long>(pt.n_valid)
          << static_cast<unsigned long long>(noise.seed);
      row.end();
    }
  }
}

// Rate-based witness next to the CPF: gamma(t), omega(t), |G(t)|^2 and
// C(t, t) for z-z-z and x-z-x. If G(t) crosses zero the table stops at the
// last sample before the crossing and that row carries a warning.
inline void run_witness_comparison(const RunConfig& cfg, std::ostream& os, unsigned threads = 1) {
  const auto& bath = cfg.require_bath();
  const auto& state = cfg.require_state();
  const auto dyn = cfg.make_dynamics();
  const auto grid = detail::diagonal(cfg.physical_grid());
  const double dt = grid.step();
  const std::size_t refine = dyn.refinement(dt);
  const auto G = dyn.propagator(grid.t_max, dt);

  std::size_t usable = G.size();
  std::string warning;
  RateFunctions rates;
  try {
    rates = rates_from_G(G);
  } catch (const ZeroCrossingError& e) {
    usable = e.index();
    warning = "zero_crossing";
    PropagatorGrid head;
    head.t_step = G.t_step;
    head.values.assign(G.values.begin(), G.values.begin() + static_cast<std::ptrdiff_t>(usable));
    if (usable >= 2) rates = rates_from_G(head);
  }
  std::size_t rows = 0;
  while (rows <= grid.steps && rows * refine < usable && usable >= 2) ++rows;

  const auto samples = dyn.sample(grid, threads);
  write_header(os, "witness", cfg);
  csv::RowWriter row(os);
  row << "t" << "gamma_t" << "omega_t" << "G_abs2" << "cpf_zzz" << "cpf_xzx" << "warning";
  row.end();
  const double rate_unit = cfg.absolute_units ? 1.0 : 1.0 / bath.gamma;
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& s = samples[i];
    const std::size_t k = i * refine;
    const double zzz = detail::or_nan(
        [&] { return cpf_closed_form(MeasurementScheme::zzz, state, s.G_t, s.G_two, cfg.y).value; });
    const double xzx = detail::or_nan(
        [&] { return cpf_closed_form(MeasurementScheme::xzx, state, s.G_t, s.G_two, cfg.y).value; });
    row << cfg.report_time(s.t) << rates.gamma_t[k] * rate_unit << rates.omega_t[k] * rate_unit
        << std::norm(s.G_t) << zzz << xzx << (i + 1 == rows ? std::string_view(warning) : "");
    row.end();
  }
}

// Generic sweep over the configured bath, state, schemes and grid with the
// closed-form, table and channel-map CPF side by side.
inline void run_sweep(const RunConfig& cfg, std::ostream& os, unsigned threads = 1) {
  const auto& bath = cfg.require_bath();
  const auto& state = cfg.require_state();
  const auto samples = cfg.make_dynamics().sample(cfg.physical_grid(), threads);
  write_header(os, "sweep", cfg);
  csv::RowWriter row(os);
  row << "scheme" << "y" << "p" << "gamma_tau_c" << "t" << "tau" << "G_t_re" << "G_t_im"
      << "G_two_re" << "G_two_im" << "cpf_closed" << "cpf_table" << "cpf_channel";
  row.end();
  for (auto scheme : cfg.schemes) {
    for (const auto& s : samples) {
      const double closed = detail::or_nan(
          [&] { return cpf_closed_form(scheme, state, s.G_t, s.G_two, cfg.y).value; });
      const double table = detail::or_nan([&] {
        return cpf_from_table(build_table(scheme, state, s.G_t, s.G_tau, s.G_two, cfg.y)).value;
      });
      const double channel =
          detail::or_nan([&] { return detail::channel_cpf(scheme, state, s, cfg.y); });
      row << to_string(scheme) << static_cast<int>(cfg.y) << state.p() << bath.gamma_tau_c()
          << cfg.report_time(s.t) << cfg.report_time(s.tau) << s.G_t.real() << s.G_t.imag()
          << s.G_two.real() << s.G_two.imag() << closed << table << channel;
      row.end();
    }
  }
}

}  // namespace cpfmem
