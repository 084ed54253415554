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

// End-to-end acceptance checks. Each returns a named verdict with a short
// numeric summary; the command-line `validate` subcommand and the acceptance
// test binary both run this list.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cpfmem/bath_kernel.hpp"
#include "cpfmem/channel_map.hpp"
#include "cpfmem/cpf_analytic.hpp"
#include "cpfmem/dynamics.hpp"
#include "cpfmem/experiment_sim.hpp"
#include "cpfmem/propagator.hpp"
#include "cpfmem/run_config.hpp"
#include "cpfmem/sweeps.hpp"

namespace cpfmem::validation {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

inline const std::vector<MeasurementScheme> kSchemes{MeasurementScheme::zzz, MeasurementScheme::xzx,
                                                     MeasurementScheme::yzy};

// Table, closed form or enumeration; a conditioning failure yields nullopt.
template <class F>
std::optional<double> try_value(F&& f) {
  try {
    return f();
  } catch (const ConditioningError&) {
    return std::nullopt;
  }
}

}  // namespace detail

// Volterra solution against the closed form at t_step = tau_c / 100, plus
// second-order convergence under step halving.
inline CheckResult check_volterra_agreement() {
  CheckResult r{"volterra_vs_closed_form", true, ""};
  std::ostringstream d;
  for (double gtc : {0.1, 0.5, 1.0, 2.0}) {
    const auto kernel = BathKernel::lorentzian(1.0, gtc);
    const double h = gtc / 100.0;
    auto max_err = [&](double step) {
      const auto G = solve_volterra(kernel, 5.0, step);
      double e = 0.0;
      for (std::size_t i = 0; i < G.size(); ++i)
        e = std::max(e, std::abs(G.values[i] - lorentzian_G(1.0, gtc, G.time(i))));
      return e;
    };
    detail::Stopwatch sw;
    const double e1 = max_err(h);
    const double elapsed = sw.seconds();
    const double e2 = max_err(h / 2.0);
    const double ratio = e1 / e2;
    const bool ok = e1 <= 1e-5 && ratio >= 3.5 && elapsed < 1.0;
    r.passed = r.passed && ok;
    d << "gtc=" << gtc << ": err=" << detail::fmt(e1) << " ratio=" << detail::fmt(ratio)
      << " time=" << detail::fmt(elapsed) << "s; ";
  }
  r.detail = d.str();
  return r;
}

// Numerical double convolution against the closed form on a 50 x 50 grid.
inline CheckResult check_two_time_agreement(unsigned threads = 1) {
  CheckResult r{"two_time_vs_closed_form", true, ""};
  std::ostringstream d;
  for (double gtc : {0.1, 0.5, 1.0, 2.0}) {
    detail::Stopwatch sw;
    const auto kernel = BathKernel::lorentzian(1.0, gtc);
    const double out_step = 0.1;
    const double h = out_step / std::ceil(out_step / (gtc / 100.0) - 1e-9);
    const double t_max = 49.0 * out_step;
    const auto G = solve_volterra(kernel, t_max, h);
    const auto GG = compute_G_two_time(kernel, G, t_max, t_max, out_step, out_step, threads);
    const double elapsed = sw.seconds();
    double err = 0.0;
    for (std::size_t i = 0; i < GG.n_t; ++i)
      for (std::size_t j = 0; j < GG.n_tau; ++j)
        err = std::max(err, std::abs(GG(i, j) - lorentzian_G_two_time(1.0, gtc, i * out_step,
                                                                     j * out_step)));
    const bool ok = GG.n_t == 50 && GG.n_tau == 50 && err <= 1e-5 && elapsed < 10.0;
    r.passed = r.passed && ok;
    d << "gtc=" << gtc << ": " << GG.n_t << "x" << GG.n_tau << " err=" << detail::fmt(err)
      << " time=" << detail::fmt(elapsed) << "s; ";
  }
  r.detail = d.str();
  return r;
}

// Channel-map enumeration against the probability tables and closed forms.
inline CheckResult check_oracle_equivalence() {
  CheckResult r{"channel_map_vs_tables", true, ""};
  detail::Stopwatch sw;
  double worst = 0.0;
  std::size_t compared = 0, mismatched = 0;
  for (double gtc : {0.1, 0.5, 1.0, 2.0}) {
    // 5 x 5 grid over [0, 2 pi tau_c]
    std::vector<double> times;
    for (int k = 0; k < 5; ++k) times.push_back(k * std::numbers::pi * gtc / 2.0);
    for (double p : {1.0, 0.8, 0.5}) {
      const auto state = InitialState::from_p(p);
      for (double t : times) {
        for (double tau : times) {
          const auto Gt = lorentzian_G(1.0, gtc, t);
          const auto Gtau = lorentzian_G(1.0, gtc, tau);
          const auto G2 = lorentzian_G_two_time(1.0, gtc, t, tau);
          const auto angles = angles_from_propagator(Gt, Gtau, G2);
          for (auto scheme : detail::kSchemes) {
            const auto joint = simulate_sequence(state, scheme, angles);
            for (Outcome y : kOutcomes) {
              std::optional<ProbabilityTable> a, b;
              try {
                a = conditional_table(joint, scheme, y);
              } catch (const ConditioningError&) {
              }
              try {
                b = build_table(scheme, state, Gt, Gtau, G2, y);
              } catch (const ConditioningError&) {
              }
              // Both paths must agree on whether y can occur at all, up to
              // the difference in their vanishing thresholds.
              if (a.has_value() != b.has_value()) {
                const double py = joint.p_y(y);
                if (py > 1e-10) ++mismatched;
                continue;
              }
              if (!a) continue;
              for (std::size_t k = 0; k < 4; ++k) {
                worst = std::max(worst, std::abs(a->entries[k] - b->entries[k]));
              }
              const double enumerated = cpf_from_table(*a).value;
              const double closed = cpf_closed_form(scheme, state, Gt, G2, y).value;
              worst = std::max(worst, std::abs(enumerated - closed));
              ++compared;
            }
          }
        }
      }
    }
  }
  const double elapsed = sw.seconds();
  r.passed = worst <= 1e-9 && mismatched == 0 && elapsed < 5.0 && compared > 0;
  r.detail = "compared=" + std::to_string(compared) + " max_diff=" + detail::fmt(worst) +
             " conditioning_mismatch=" + std::to_string(mismatched) +
             " time=" + detail::fmt(elapsed) + "s";
  return r;
}

// C(t, tau) conditioned on y = +1 vanishes on every path.
inline CheckResult check_y_plus_nullity() {
  CheckResult r{"y_plus_nullity", true, ""};
  double worst = 0.0;
  std::size_t tested = 0;
  bool closed_exact = true;
  for (double gtc : {0.1, 0.5, 1.0, 2.0}) {
    for (double p : {1.0, 0.8, 0.5, 0.2}) {
      const auto state = InitialState::from_p(p);
      for (int i = 0; i <= 10; ++i) {
        for (int j = 0; j <= 10; ++j) {
          const double t = 0.4 * i, tau = 0.4 * j;
          const auto Gt = lorentzian_G(1.0, gtc, t);
          const auto Gtau = lorentzian_G(1.0, gtc, tau);
          const auto G2 = lorentzian_G_two_time(1.0, gtc, t, tau);
          const auto angles = angles_from_propagator(Gt, Gtau, G2);
          for (auto scheme : detail::kSchemes) {
            closed_exact = closed_exact &&
                           cpf_closed_form(scheme, state, Gt, G2, Outcome::plus).value == 0.0;
            const auto v = detail::try_value([&] {
              return cpf_from_table(conditional_table(simulate_sequence(state, scheme, angles),
                                                      scheme, Outcome::plus))
                  .value;
            });
            if (!v) continue;
            worst = std::max(worst, std::abs(*v));
            ++tested;
          }
        }
      }
    }
  }
  r.passed = closed_exact && worst <= 1e-12 && tested > 0;
  r.detail = "enumerated=" + std::to_string(tested) + " max|cpf|=" + detail::fmt(worst) +
             (closed_exact ? " closed_form=0" : " closed_form!=0");
  return r;
}

// C(0, tau) = C(t, 0) = 0 on the closed-form, table and enumeration paths.
inline CheckResult check_boundary_nullity() {
  CheckResult r{"boundary_nullity", true, ""};
  double worst = 0.0;
  std::size_t tested = 0;
  for (double gtc : {0.1, 0.5, 1.0, 2.0}) {
    for (double p : {1.0, 0.8, 0.5}) {
      const auto state = InitialState::from_p(p);
      for (int k = 0; k <= 20; ++k) {
        const double s = 0.25 * k;
        for (auto [t, tau] : {std::pair{0.0, s}, std::pair{s, 0.0}}) {
          const auto Gt = lorentzian_G(1.0, gtc, t);
          const auto Gtau = lorentzian_G(1.0, gtc, tau);
          const auto G2 = lorentzian_G_two_time(1.0, gtc, t, tau);
          const auto angles = angles_from_propagator(Gt, Gtau, G2);
          for (auto scheme : detail::kSchemes) {
            for (Outcome y : kOutcomes) {
              for (auto v : {detail::try_value([&] {
                               return cpf_closed_form(scheme, state, Gt, G2, y).value;
                             }),
                             detail::try_value([&] {
                               return cpf_from_table(build_table(scheme, state, Gt, Gtau, G2, y))
                                   .value;
                             }),
                             detail::try_value([&] {
                               return cpf_from_table(conditional_table(
                                                         simulate_sequence(state, scheme, angles),
                                                         scheme, y))
                                   .value;
                             })}) {
                if (!v) continue;
                worst = std::max(worst, std::abs(*v));
                ++tested;
              }
            }
          }
        }
      }
    }
  }
  r.passed = worst <= 1e-12 && tested > 0;
  r.detail = "values=" + std::to_string(tested) + " max|cpf|=" + detail::fmt(worst);
  return r;
}

namespace detail {

// sup_t |C(t, t)| over gamma * t in [0, 5] for y = -1.
inline double sup_diagonal_cpf(MeasurementScheme scheme, double p, double gamma_tau_c,
                               std::size_t steps = 2000) {
  const auto state = InitialState::from_p(p);
  double sup = 0.0;
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = 5.0 * static_cast<double>(i) / static_cast<double>(steps);
    const auto Gt = lorentzian_G(1.0, gamma_tau_c, t);
    const auto G2 = lorentzian_G_two_time(1.0, gamma_tau_c, t, t);
    const auto v = try_value([&] { return cpf_closed_form(scheme, state, Gt, G2, Outcome::minus).value; });
    if (v) sup = std::max(sup, std::abs(*v));
  }
  return sup;
}

}  // namespace detail

// Correlations vanish as the kernel approaches a delta function.
inline CheckResult check_markov_limit() {
  CheckResult r{"markov_limit_vanishing", true, ""};
  std::ostringstream d;
  const struct {
    MeasurementScheme scheme;
    double p;
  } cases[] = {{MeasurementScheme::zzz, 0.8}, {MeasurementScheme::xzx, 1.0}};
  for (const auto& c : cases) {
    std::vector<double> sups;
    for (double eps : {0.1, 0.03, 0.01}) {
      const auto k = markovian_limit_kernel(1.0, 1.0, eps);
      sups.push_back(detail::sup_diagonal_cpf(c.scheme, c.p, k.as_lorentzian()->tau_c));
    }
    const bool ok = sups[2] <= 0.01 && sups[0] > sups[1] && sups[1] > sups[2];
    r.passed = r.passed && ok;
    d << to_string(c.scheme) << ": sup=" << detail::fmt(sups[0]) << "," << detail::fmt(sups[1])
      << "," << detail::fmt(sups[2]) << "; ";
  }
  r.detail = d.str();
  return r;
}

// At gamma * tau_c = 1/2 the decay rate never turns negative and |G|^2
// decays monotonically, yet z-z-z correlations reach 0.05.
inline CheckResult check_memory_with_positive_rate() {
  CheckResult r{"memory_despite_positive_rate", true, ""};
  const double gtc = 0.5;
  const double h = 0.0025;
  const auto G = sample_lorentzian_G(1.0, gtc, 5.0, h);
  const auto rates = rates_from_G(G);
  const double min_rate = *std::min_element(rates.gamma_t.begin(), rates.gamma_t.end());
  bool monotone = true;
  for (std::size_t i = 1; i < G.size(); ++i)
    monotone = monotone && std::norm(G.values[i]) <= std::norm(G.values[i - 1]);
  const double peak = detail::sup_diagonal_cpf(MeasurementScheme::zzz, 0.8, gtc);
  r.passed = min_rate >= -1e-9 && monotone && peak >= 0.05;
  r.detail = "min_gamma_t=" + detail::fmt(min_rate) + (monotone ? " |G|^2 monotone" : " |G|^2 NOT monotone") +
             " peak_zzz=" + detail::fmt(peak);
  return r;
}

// z-z-z correlations are non-negative, x-z-x non-positive, and for p = 1
// z-z-z never exceeds x-z-x in magnitude.
inline CheckResult check_sign_structure() {
  CheckResult r{"sign_and_magnitude", true, ""};
  double min_zzz = 0.0, max_xzx = 0.0, worst_gap = 0.0;
  for (double gtc : {0.01, 0.1, 0.5, 1.0, 2.0}) {
    for (int i = 0; i <= 500; ++i) {
      const double t = 0.01 * i;
      const auto Gt = lorentzian_G(1.0, gtc, t);
      const auto G2 = lorentzian_G_two_time(1.0, gtc, t, t);
      const auto zzz = cpf_zzz(InitialState::from_p(0.8), Gt, G2).value;
      const auto xzx = cpf_xzx(InitialState::from_p(1.0), Gt, G2).value;
      min_zzz = std::min(min_zzz, zzz);
      max_xzx = std::max(max_xzx, xzx);
      if (i > 0) {
        const auto zzz1 = cpf_zzz(InitialState::from_p(1.0), Gt, G2).value;
        worst_gap = std::max(worst_gap, std::abs(zzz1) - std::abs(xzx));
      }
    }
  }
  r.passed = min_zzz >= 0.0 && max_xzx <= 0.0 && worst_gap <= 0.0;
  r.detail = "min_zzz=" + detail::fmt(min_zzz) + " max_xzx=" + detail::fmt(max_xzx) +
             " max(|zzz|-|xzx|)@p=1=" + detail::fmt(worst_gap);
  return r;
}

// Finite-count Monte Carlo: unbiased tracking of the ideal curve, 15%
// excursions at the peak, and noise comparable to the signal at
// gamma * tau_c = 0.1. N = 10000 counts for an 11-point sweep.
inline CheckResult check_noise_study(unsigned threads = 1) {
  CheckResult r{"noise_study", true, ""};
  detail::Stopwatch sw;
  ExperimentConfig cfg;
  cfg.total_counts = 10000.0;
  cfg.visibility = 1.0;
  cfg.replicas = 200;
  cfg.seed = 1;
  TimeGrid grid{5.0, 10, true};

  const Dynamics strong(BathKernel::lorentzian(1.0, 1.0), PropagatorMethod::closed_form);
  const auto xzx = run_noise_study(InitialState::from_p(1.0), MeasurementScheme::xzx,
                                   Outcome::minus, strong, grid, cfg, threads, 0);
  std::size_t off_track = 0;
  const NoisePoint* peak = nullptr;
  for (const auto& pt : xzx) {
    if (pt.flagged) {
      ++off_track;
      continue;
    }
    const double se = pt.mc_std / std::sqrt(static_cast<double>(pt.n_valid));
    if (!(std::abs(pt.mc_mean - pt.ideal) <= 2.0 * se)) ++off_track;
    if (!peak || std::abs(pt.ideal) > std::abs(peak->ideal)) peak = &pt;
  }
  std::size_t excursions = 0;
  for (double v : peak->replica_values)
    if (std::abs(v) >= 1.15 * std::abs(peak->ideal) && v * peak->ideal > 0.0) ++excursions;
  const double excursion_rate =
      static_cast<double>(excursions) / static_cast<double>(peak->replica_values.size());

  const Dynamics weak(BathKernel::lorentzian(1.0, 0.1), PropagatorMethod::closed_form);
  const auto zzz = run_noise_study(InitialState::from_p(0.8), MeasurementScheme::zzz,
                                   Outcome::minus, weak, grid, cfg, threads, 1);
  const NoisePoint* zpeak = nullptr;
  for (const auto& pt : zzz)
    if (!pt.flagged && (!zpeak || pt.ideal > zpeak->ideal)) zpeak = &pt;
  const double ratio = std::max(zpeak->ideal, zpeak->mc_std) / std::min(zpeak->ideal, zpeak->mc_std);
  const double elapsed = sw.seconds();

  r.passed = off_track == 0 && excursions > 0 && ratio <= 3.0 && elapsed < 30.0;
  r.detail = "xzx points off 2SE=" + std::to_string(off_track) + "/" + std::to_string(xzx.size()) +
             " peak_ideal=" + detail::fmt(peak->ideal) + " >=15% excursions=" +
             detail::fmt(100.0 * excursion_rate) + "%; zzz peak_ideal=" + detail::fmt(zpeak->ideal) +
             " std=" + detail::fmt(zpeak->mc_std) + " ratio=" + detail::fmt(ratio) +
             " time=" + detail::fmt(elapsed) + "s";
  return r;
}

// Same config and seed give byte-identical datasets, independent of the
// thread count.
inline CheckResult check_determinism() {
  CheckResult r{"determinism", true, ""};
  const auto cfg = parse_run_config_text(std::string_view(R"({
    "bath": {"gamma": 1.0, "tau_c": 0.5},
    "state": {"p": 0.8},
    "schemes": ["zzz", "xzx", "yzy"],
    "grid": {"t_max": 5.0, "steps": 20, "equal_times": true},
    "noise": {"total_counts": 10000, "visibility": [1.0, 0.9], "replicas": 50, "seed": 7}
  })"));
  auto render = [&](unsigned threads) {
    std::ostringstream os;
    run_figure2(cfg, os, threads);
    run_appendix_d(cfg, os, threads);
    run_witness_comparison(cfg, os, threads);
    run_sweep(cfg, os, threads);
    return os.str();
  };
  const auto a = render(1);
  const auto b = render(1);
  const auto c = render(4);
  r.passed = a == b && a == c && !a.empty();
  r.detail = "bytes=" + std::to_string(a.size()) + (a == b ? " rerun identical" : " rerun differs") +
             (a == c ? ", threads=4 identical" : ", threads=4 differs");
  return r;
}

inline std::vector<CheckResult> run_all(unsigned threads = 1) {
  return {check_volterra_agreement(),    check_two_time_agreement(threads),
          check_oracle_equivalence(),    check_y_plus_nullity(),
          check_boundary_nullity(),      check_markov_limit(),
          check_memory_with_positive_rate(), check_sign_structure(),
          check_noise_study(threads),    check_determinism()};
}

}  // namespace cpfmem::validation
