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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "cpfmem/cpf_analytic.hpp"
#include "cpfmem/propagator.hpp"

namespace cpfmem {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr Outcome kPlus = Outcome::plus;
constexpr Outcome kMinus = Outcome::minus;

// gamma tau_c = 1, t = tau = pi tau_c
const complex kGt = lorentzian_G(1.0, 1.0, kPi);
const complex kGtwo = lorentzian_G_two_time(1.0, 1.0, kPi, kPi);

ProbabilityTable make_table(MeasurementScheme s, double pp, double pm, double mp, double mm) {
  ProbabilityTable t;
  t.scheme = s;
  t(kPlus, kPlus) = pp;
  t(kPlus, kMinus) = pm;
  t(kMinus, kPlus) = mp;
  t(kMinus, kMinus) = mm;
  return t;
}

// Sum form: sum_{z,x} [P(z,x) - P(z) P(x)] z x
double sum_form(const ProbabilityTable& t) {
  double c = 0.0;
  for (Outcome z : kOutcomes)
    for (Outcome x : kOutcomes)
      c += (t(z, x) - t.future_marginal(z) * t.past_marginal(x)) * value(z) * value(x);
  return c;
}

TEST(CpfFromTable, IndependentTableGivesZero) {
  const double pz = 0.3, px = 0.8;
  const auto t = make_table(MeasurementScheme::zzz, pz * px, pz * (1 - px), (1 - pz) * px,
                            (1 - pz) * (1 - px));
  EXPECT_NEAR(cpf_from_table(t).value, 0.0, 1e-16);
}

TEST(CpfFromTable, PerfectCorrelation) {
  EXPECT_DOUBLE_EQ(cpf_from_table(make_table(MeasurementScheme::xzx, 0.5, 0.0, 0.0, 0.5)).value, 1.0);
  EXPECT_DOUBLE_EQ(cpf_from_table(make_table(MeasurementScheme::xzx, 0.0, 0.5, 0.5, 0.0)).value, -1.0);
}

TEST(CpfFromTable, RejectsInvalidTables) {
  EXPECT_THROW(cpf_from_table(make_table(MeasurementScheme::zzz, 0.5, 0.5, 0.5, 0.0)), ValidationError);
  EXPECT_THROW(cpf_from_table(make_table(MeasurementScheme::zzz, 1.2, -0.2, 0.0, 0.0)), ValidationError);
}

TEST(CpfFromTable, SumFormIdentity) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 1000; ++n) {
    double w[4], s = 0.0;
    for (double& x : w) s += (x = u(rng));
    const auto t = make_table(MeasurementScheme::zzz, w[0] / s, w[1] / s, w[2] / s, w[3] / s);
    const double c = cpf_from_table(t).value;
    EXPECT_NEAR(c, sum_form(t), 1e-14);
    EXPECT_LE(std::abs(c), 1.0);
  }
}

TEST(ZzzScheme, ExampleValue) {
  const auto s = InitialState::from_p(0.8);
  EXPECT_NEAR(cpf_zzz(s, kGt, kGtwo).value, 0.00512916533310485671, 1e-15);
  EXPECT_NEAR(cpf_from_table(build_table_zzz(s, kGt, kGt, kGtwo, kMinus)).value,
              0.00512916533310485671, 1e-15);
}

TEST(ZzzScheme, PureExcitedPreparation) {
  const auto s = InitialState(1.0, 0.0);
  EXPECT_EQ(cpf_zzz(s, kGt, kGtwo).value, 0.0);
  const auto t = build_table_zzz(s, kGt, kGt, kGtwo, kMinus);
  EXPECT_EQ(t(kPlus, kMinus), 0.0);
  EXPECT_EQ(t(kMinus, kMinus), 0.0);
  EXPECT_NEAR(t(kPlus, kPlus), std::norm(kGtwo) / (1.0 - std::norm(kGt)), 1e-15);
}

TEST(ZzzScheme, NoDecayYet) {
  const auto s = InitialState::from_p(0.8);
  const auto t = build_table_zzz(s, 1.0, 1.0, 0.0, kMinus);
  EXPECT_NEAR(t(kPlus, kMinus) + t(kMinus, kMinus), 1.0, 1e-15);
  EXPECT_EQ(t(kPlus, kPlus), 0.0);
  EXPECT_EQ(t(kMinus, kPlus), 0.0);
  EXPECT_THROW(build_table_zzz(InitialState(1.0, 0.0), 1.0, 1.0, 0.0, kMinus), ConditioningError);
  EXPECT_THROW(cpf_zzz(InitialState(1.0, 0.0), 1.0, 0.0), ConditioningError);
}

TEST(ZzzScheme, ExcitedConditioning) {
  const auto s = InitialState::from_p(0.6);
  const complex g_tau = 0.4;
  const auto t = build_table_zzz(s, 0.7, g_tau, 0.1, kPlus);
  EXPECT_NEAR(t(kPlus, kPlus), 0.16, 1e-15);
  EXPECT_NEAR(t(kMinus, kPlus), 0.84, 1e-15);
  EXPECT_EQ(t(kPlus, kMinus), 0.0);
  EXPECT_EQ(t(kMinus, kMinus), 0.0);
  // <zx>_{+} = 2 |G(tau)|^2 - 1 and the correlation vanishes.
  double zx = 0.0;
  for (Outcome z : kOutcomes)
    for (Outcome x : kOutcomes) zx += value(z) * value(x) * t(z, x);
  EXPECT_NEAR(zx, 2.0 * std::norm(g_tau) - 1.0, 1e-15);
  EXPECT_NEAR(cpf_from_table(t).value, 0.0, 1e-16);
  EXPECT_THROW(build_table_zzz(InitialState(0.0, 1.0), 0.7, g_tau, 0.1, kPlus), ConditioningError);
}

TEST(XzxScheme, ExampleValueAndTable) {
  const auto s = InitialState(1.0, 0.0);
  EXPECT_NEAR(cpf_xzx(s, kGt, kGtwo).value, -0.0883365201073572036, 1e-15);
  const double kappa = 0.0883365201073572036;
  const auto t = build_table_xzx(s, kGt, kGtwo, kMinus);
  for (Outcome z : kOutcomes)
    for (Outcome x : kOutcomes)
      EXPECT_NEAR(t(z, x), 0.25 * (1.0 - value(z) * value(x) * kappa), 1e-15);
}

TEST(XzxScheme, BalancedStateGivesZero) {
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(cpf_xzx(InitialState(r, r), kGt, kGtwo).value, 0.0, 1e-16);
}

TEST(XzxScheme, ExcitedConditioningIgnoresFuture) {
  const auto s = InitialState(complex(0.6, 0.0), complex(0.0, 0.8));
  const auto t = build_table_xzx(s, kGt, kGtwo, kPlus);
  for (Outcome x : kOutcomes) {
    const double expected = 0.25 * std::norm(s.a() + value(x) * s.b());
    EXPECT_NEAR(t(kPlus, x), expected, 1e-15);
    EXPECT_NEAR(t(kMinus, x), expected, 1e-15);
  }
  EXPECT_NEAR(cpf_from_table(t).value, 0.0, 1e-16);
}

TEST(XzxScheme, MarkovLimitFactorizes) {
  const auto s = InitialState::from_p(0.3);
  const auto t = build_table_xzx(s, 0.4, 0.0, kMinus);
  EXPECT_NEAR(cpf_from_table(t).value, 0.0, 1e-16);
  EXPECT_EQ(cpf_xzx(s, 0.4, 0.0).value, 0.0);
}

TEST(XzxScheme, GuardsAgainstInconsistentPropagators) {
  const auto s = InitialState(1.0, 0.0);
  EXPECT_THROW(build_table_xzx(s, 0.9, 0.8, kMinus), InternalConsistencyError);
  EXPECT_THROW(build_table_xzx(s, 0.0, 0.0, kPlus), ConditioningError);
}

TEST(YzyScheme, RealAmplitudesMatchXzx) {
  for (double p : {1.0, 0.8, 0.5, 0.1}) {
    const auto s = InitialState::from_p(p);
    EXPECT_DOUBLE_EQ(cpf_yzy(s, kGt, kGtwo).value,
                     cpf_xzx(InitialState(1.0, 0.0), kGt, kGtwo).value);
  }
  EXPECT_NEAR(cpf_yzy(InitialState(1.0, 0.0), kGt, kGtwo).value, -0.0883365201073572036, 1e-15);
}

TEST(YzyScheme, CircularStateGivesZero) {
  const double r = 1.0 / std::sqrt(2.0);
  const auto s = InitialState(r, complex(0.0, r));
  EXPECT_NEAR(std::abs(2.0 * s.coherence().imag()), 1.0, 1e-15);
  EXPECT_NEAR(cpf_yzy(s, kGt, kGtwo).value, 0.0, 1e-16);
  EXPECT_NEAR(cpf_from_table(build_table_yzy(s, kGt, kGtwo, kMinus)).value, 0.0, 1e-16);
}

TEST(YzyScheme, PastMarginalUsesImaginaryCoherence) {
  const auto s = InitialState(complex(0.6, 0.0), complex(0.0, 0.8));
  const auto t = build_table_yzy(s, kGt, kGtwo, kPlus);
  // <y+|psi> = (a - i b)/sqrt(2)
  EXPECT_NEAR(t.past_marginal(kPlus), 0.5 * std::norm(s.a() - complex(0.0, 1.0) * s.b()), 1e-15);
}

TEST(ExcitedOutcome, AlwaysZero) {
  for (auto scheme : {MeasurementScheme::zzz, MeasurementScheme::xzx, MeasurementScheme::yzy}) {
    const auto r = cpf_y_plus(scheme);
    EXPECT_EQ(r.value, 0.0);
    EXPECT_EQ(r.y, kPlus);
    EXPECT_EQ(r.scheme, scheme);
  }
}

struct Draw {
  InitialState state;
  complex G_t, G_tau, G_two;
};

Draw random_draw(std::mt19937_64& rng, bool complex_state) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  complex a(u(rng), complex_state ? u(rng) - 0.5 : 0.0);
  complex b(u(rng) - 0.5, complex_state ? u(rng) - 0.5 : 0.0);
  const double n = std::sqrt(std::norm(a) + std::norm(b));
  const double gt = 0.02 + 0.96 * u(rng);
  const double bound = std::sqrt(1.0 - gt * gt);
  const double g2 = (2.0 * u(rng) - 1.0) * bound;
  return {InitialState(a / n, b / n), gt, u(rng), g2};
}

TEST(TableVsClosedForm, RandomDrawsRealStates) {
  std::mt19937_64 rng(2024);
  for (int n = 0; n < 1000; ++n) {
    const auto d = random_draw(rng, false);
    for (auto scheme : {MeasurementScheme::zzz, MeasurementScheme::xzx, MeasurementScheme::yzy}) {
      const auto tbl = build_table(scheme, d.state, d.G_t, d.G_tau, d.G_two, kMinus);
      EXPECT_NEAR(tbl.sum(), 1.0, 1e-12);
      EXPECT_NEAR(cpf_from_table(tbl).value, cpf_closed_form(scheme, d.state, d.G_t, d.G_two, kMinus).value,
                  1e-12);
      const auto plus = build_table(scheme, d.state, d.G_t, d.G_tau, d.G_two, kPlus);
      EXPECT_NEAR(cpf_from_table(plus).value, 0.0, 1e-12);
    }
  }
}

TEST(TableVsClosedForm, RandomDrawsComplexStates) {
  std::mt19937_64 rng(77);
  for (int n = 0; n < 1000; ++n) {
    const auto d = random_draw(rng, true);
    for (auto scheme : {MeasurementScheme::zzz, MeasurementScheme::xzx, MeasurementScheme::yzy}) {
      const auto tbl = build_table(scheme, d.state, d.G_t, d.G_tau, d.G_two, kMinus);
      EXPECT_NEAR(cpf_from_table(tbl).value, cpf_closed_form(scheme, d.state, d.G_t, d.G_two, kMinus).value,
                  1e-12);
      EXPECT_NEAR(sum_form(tbl), cpf_from_table(tbl).value, 1e-12);
    }
  }
}

TEST(SignStructure, RandomDraws) {
  std::mt19937_64 rng(99);
  for (int n = 0; n < 1000; ++n) {
    const auto d = random_draw(rng, true);
    EXPECT_GE(cpf_zzz(d.state, d.G_t, d.G_two).value, 0.0);
    if (d.G_two.real() >= 0.0) {
      EXPECT_LE(cpf_xzx(d.state, d.G_t, d.G_two).value, 0.0);
      EXPECT_LE(cpf_yzy(d.state, d.G_t, d.G_two).value, 0.0);
    }
  }
}

TEST(SignStructure, LorentzianDynamics) {
  for (double gtc : {0.1, 0.5, 1.0, 2.0}) {
    for (int i = 1; i <= 100; ++i) {
      for (int j = 0; j <= 100; j += 5) {
        const double t = 0.05 * i, tau = 0.05 * j;
        const auto Gt = lorentzian_G(1.0, gtc, t);
        const auto G2 = lorentzian_G_two_time(1.0, gtc, t, tau);
        const double zzz1 = cpf_zzz(InitialState(1.0, 0.0), Gt, G2).value;
        const double xzx1 = cpf_xzx(InitialState(1.0, 0.0), Gt, G2).value;
        ASSERT_LE(std::abs(zzz1), std::abs(xzx1));
        ASSERT_LE(std::norm(G2), std::abs(G2.real()) + 1e-15);
        ASSERT_GE(cpf_zzz(InitialState::from_p(0.8), Gt, G2).value, 0.0);
      }
    }
  }
}

TEST(BoundaryValues, VanishAtZeroTimes) {
  for (double gtc : {0.1, 1.0}) {
    for (double s : {0.0, 0.5, 2.0}) {
      const auto s08 = InitialState::from_p(0.8);
      EXPECT_EQ(cpf_zzz(s08, lorentzian_G(1.0, gtc, 0.0), lorentzian_G_two_time(1.0, gtc, 0.0, s)).value, 0.0);
      EXPECT_EQ(cpf_zzz(s08, lorentzian_G(1.0, gtc, s), lorentzian_G_two_time(1.0, gtc, s, 0.0)).value, 0.0);
      EXPECT_EQ(cpf_xzx(s08, lorentzian_G(1.0, gtc, 0.0), lorentzian_G_two_time(1.0, gtc, 0.0, s)).value, 0.0);
      EXPECT_EQ(cpf_yzy(s08, lorentzian_G(1.0, gtc, s), lorentzian_G_two_time(1.0, gtc, s, 0.0)).value, 0.0);
    }
  }
}

TEST(WeakCoupling, CorrelationsBelowOnePercent) {
  double sup = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double t = 0.005 * i;
    const auto Gt = lorentzian_G(1.0, 0.01, t);
    const auto G2 = lorentzian_G_two_time(1.0, 0.01, t, t);
    sup = std::max(sup, std::abs(cpf_zzz(InitialState::from_p(0.8), Gt, G2).value));
    sup = std::max(sup, std::abs(cpf_xzx(InitialState::from_p(1.0), Gt, G2).value));
    sup = std::max(sup, std::abs(cpf_yzy(InitialState::from_p(1.0), Gt, G2).value));
  }
  EXPECT_LE(sup, 0.01);
}

TEST(ConditioningProbability, MatchesTableDenominators) {
  const auto s = InitialState::from_p(0.7);
  EXPECT_NEAR(conditioning_probability(MeasurementScheme::zzz, s, 0.5, kPlus), 0.7 * 0.25, 1e-15);
  EXPECT_NEAR(conditioning_probability(MeasurementScheme::zzz, s, 0.5, kMinus), 1.0 - 0.7 * 0.25, 1e-15);
  EXPECT_NEAR(conditioning_probability(MeasurementScheme::xzx, s, 0.5, kPlus), 0.125, 1e-15);
  EXPECT_NEAR(conditioning_probability(MeasurementScheme::yzy, s, 0.5, kMinus), 0.875, 1e-15);
}

TEST(SchemeNames, RoundTrip) {
  for (auto scheme : {MeasurementScheme::zzz, MeasurementScheme::xzx, MeasurementScheme::yzy})
    EXPECT_EQ(scheme_from_string(to_string(scheme)), scheme);
  EXPECT_EQ(scheme_from_string("XZX"), MeasurementScheme::xzx);
  EXPECT_THROW(scheme_from_string("zxz"), ValidationError);
  EXPECT_THROW(outcome_from_int(0), ValidationError);
  EXPECT_EQ(outcome_from_int(-1), kMinus);
}

}  // namespace
}  // namespace cpfmem
