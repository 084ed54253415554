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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cpfmem/run_config.hpp"
#include "cpfmem/sweeps.hpp"

namespace cpfmem {
namespace {

const std::filesystem::path kConfigDir = CPFMEM_CONFIG_DIR;

struct Csv {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::runtime_error("no column " + name);
    return static_cast<std::size_t>(it - header.begin());
  }
  const std::string& text(std::size_t r, const std::string& name) const { return rows[r][column(name)]; }
  double num(std::size_t r, const std::string& name) const { return std::stod(text(r, name)); }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.rfind("# ", 0) == 0) {
      csv.comments.push_back(line);
    } else if (csv.header.empty()) {
      csv.header = split(line);
    } else {
      csv.rows.push_back(split(line));
      EXPECT_EQ(csv.rows.back().size(), csv.header.size()) << line;
    }
  }
  return csv;
}

template <class F>
std::string render(F&& run, const RunConfig& cfg, unsigned threads = 1) {
  std::ostringstream os;
  run(cfg, os, threads);
  return os.str();
}

RunConfig from_text(const std::string& text) { return parse_run_config_text(text, kConfigDir); }

std::string error_of(const std::string& text) {
  try {
    from_text(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

TEST(RunConfig, ShippedConfigsLoad) {
  for (const char* name : {"figure2.json", "appendix_d.json", "witness.json", "sweep_volterra.json",
                           "sweep_tabulated.json"})
    EXPECT_NO_THROW(load_run_config(kConfigDir / name)) << name;
}

TEST(RunConfig, ParsesFields) {
  const auto cfg = load_run_config(kConfigDir / "sweep_volterra.json");
  ASSERT_TRUE(cfg.bath && cfg.bath->lorentzian);
  EXPECT_DOUBLE_EQ(cfg.bath->lorentzian->tau_c, 1.0);
  EXPECT_EQ(cfg.schemes.size(), 3u);
  EXPECT_FALSE(cfg.grid.equal_times);
  EXPECT_EQ(cfg.method, PropagatorMethod::volterra);
  EXPECT_NEAR(std::abs(cfg.state->b() - complex(0.0, 0.6)), 0.0, 1e-15);

  const auto noise = load_run_config(kConfigDir / "appendix_d.json");
  ASSERT_TRUE(noise.noise);
  EXPECT_EQ(noise.noise->visibility, (std::vector<double>{1.0, 0.9, 0.8}));
  EXPECT_EQ(noise.noise->budget, CountBudget::per_sweep);
  EXPECT_EQ(noise.noise->seed, 1u);
}

TEST(RunConfig, ErrorsNameTheField) {
  EXPECT_NE(error_of(R"({"colour": 1})").find("colour"), std::string::npos);
  EXPECT_NE(error_of(R"({"bath": {"tau_c": 1}})").find("bath.gamma"), std::string::npos);
  EXPECT_NE(error_of(R"({"bath": {"gamma": 1, "tau_c": -1}})").find("bath.tau_c"), std::string::npos);
  EXPECT_NE(error_of(R"({"bath": {"kernel_file": "missing.csv"}})").find("bath.kernel_file"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"state": {"p": 1.5}})").find("state"), std::string::npos);
  EXPECT_NE(error_of(R"({"state": {"p": 0.5, "a": [1, 0]}})").find("state"), std::string::npos);
  EXPECT_NE(error_of(R"({"schemes": ["zxz"]})").find("schemes[0]"), std::string::npos);
  EXPECT_NE(error_of(R"({"y": 0})").find("'y'"), std::string::npos);
  EXPECT_NE(error_of(R"({"grid": {"steps": 0}})").find("grid.steps"), std::string::npos);
  EXPECT_NE(error_of(R"({"grid": {"t_max": "5"}})").find("grid.t_max"), std::string::npos);
  EXPECT_NE(error_of(R"({"units": "hours"})").find("units"), std::string::npos);
  EXPECT_NE(error_of(R"({"noise": {"budget": "daily"}})").find("noise.budget"), std::string::npos);
  EXPECT_NE(error_of(R"({"noise": {"visibility": [1.2]}})").find("noise.visibility"), std::string::npos);
  EXPECT_NE(error_of(R"({"bath": {"kernel_file": "lorentzian_kernel.csv"}, "propagator": "closed_form"})")
                .find("propagator"),
            std::string::npos);
  EXPECT_THROW(from_text("{"), ValidationError);
  EXPECT_THROW(load_run_config(kConfigDir / "absent.json"), ValidationError);
}

TEST(RunConfig, MissingSectionsReportedOnUse) {
  const auto cfg = from_text("{}");
  EXPECT_THROW(render(run_sweep, cfg), ValidationError);
  EXPECT_THROW(render(run_appendix_d, cfg), ValidationError);
}

TEST(Output, HeaderEchoesConfig) {
  auto cfg = load_run_config(kConfigDir / "witness.json");
  const auto csv = parse_csv(render(run_witness_comparison, cfg));
  ASSERT_EQ(csv.comments.size(), 3u);
  EXPECT_EQ(csv.comments[0], std::string("# cpfmem ") + kVersion);
  EXPECT_EQ(csv.comments[1], "# command: witness");
  EXPECT_EQ(nlohmann::json::parse(csv.comments[2].substr(std::string("# config: ").size())), cfg.echo);
}

TEST(Sweep, EvaluationPathsAgree) {
  for (const char* name : {"sweep_volterra.json", "sweep_tabulated.json"}) {
    const auto csv = parse_csv(render(run_sweep, load_run_config(kConfigDir / name)));
    ASSERT_FALSE(csv.rows.empty());
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
      const double closed = csv.num(r, "cpf_closed");
      if (std::isnan(closed)) continue;
      EXPECT_NEAR(csv.num(r, "cpf_table"), closed, 1e-9);
      EXPECT_NEAR(csv.num(r, "cpf_channel"), closed, 1e-9);
    }
  }
}

TEST(Sweep, FullGridShape) {
  const auto cfg = load_run_config(kConfigDir / "sweep_volterra.json");
  const auto csv = parse_csv(render(run_sweep, cfg));
  EXPECT_EQ(csv.rows.size(), 3u * 9u * 9u);
  EXPECT_EQ(csv.text(0, "scheme"), "zzz");
  EXPECT_EQ(csv.text(0, "y"), "-1");
}

TEST(Sweep, VolterraMatchesClosedForm) {
  auto cfg = load_run_config(kConfigDir / "sweep_volterra.json");
  const auto numeric = parse_csv(render(run_sweep, cfg));
  cfg.method = PropagatorMethod::closed_form;
  const auto exact = parse_csv(render(run_sweep, cfg));
  ASSERT_EQ(numeric.rows.size(), exact.rows.size());
  for (std::size_t r = 0; r < exact.rows.size(); ++r) {
    EXPECT_NEAR(numeric.num(r, "G_t_re"), exact.num(r, "G_t_re"), 1e-5);
    EXPECT_NEAR(numeric.num(r, "G_two_re"), exact.num(r, "G_two_re"), 1e-5);
    const double c = exact.num(r, "cpf_closed");
    if (!std::isnan(c)) {
      EXPECT_NEAR(numeric.num(r, "cpf_closed"), c, 1e-4);
    }
  }
}

TEST(Sweep, TabulatedKernelMatchesLorentzian) {
  const auto tab = parse_csv(render(run_sweep, load_run_config(kConfigDir / "sweep_tabulated.json")));
  const auto lor = parse_csv(render(run_sweep, from_text(R"({
    "bath": {"gamma": 1.0, "tau_c": 0.5}, "state": {"p": 0.8}, "schemes": ["zzz", "xzx"],
    "grid": {"t_max": 5.0, "steps": 20}})")));
  ASSERT_EQ(tab.rows.size(), lor.rows.size());
  for (std::size_t r = 0; r < tab.rows.size(); ++r) {
    EXPECT_EQ(tab.text(r, "gamma_tau_c"), "nan");
    EXPECT_NEAR(tab.num(r, "G_t_re"), lor.num(r, "G_t_re"), 1e-4);
    const double c = lor.num(r, "cpf_closed");
    if (!std::isnan(c)) {
      EXPECT_NEAR(tab.num(r, "cpf_closed"), c, 1e-3);
    }
  }
}

TEST(Sweep, AbsoluteUnits) {
  const auto scaled = parse_csv(render(run_sweep, from_text(R"({
    "bath": {"gamma": 2.0, "tau_c": 0.25}, "state": {"p": 0.8}, "schemes": ["xzx"],
    "grid": {"t_max": 4.0, "steps": 8}})")));
  const auto absolute = parse_csv(render(run_sweep, from_text(R"({
    "bath": {"gamma": 2.0, "tau_c": 0.25}, "state": {"p": 0.8}, "schemes": ["xzx"],
    "grid": {"t_max": 4.0, "steps": 8}, "units": "absolute"})")));
  const auto unit = parse_csv(render(run_sweep, from_text(R"({
    "bath": {"gamma": 1.0, "tau_c": 0.5}, "state": {"p": 0.8}, "schemes": ["xzx"],
    "grid": {"t_max": 4.0, "steps": 8}})")));
  ASSERT_EQ(scaled.rows.size(), 9u);
  for (std::size_t r = 0; r < 9; ++r) {
    EXPECT_NEAR(scaled.num(r, "t"), 0.5 * static_cast<double>(r), 1e-12);
    EXPECT_NEAR(absolute.num(r, "t"), 0.25 * static_cast<double>(r), 1e-12);
    EXPECT_EQ(scaled.text(r, "cpf_closed"), absolute.text(r, "cpf_closed"));
    if (r > 0) {
      EXPECT_NEAR(scaled.num(r, "cpf_closed"), unit.num(r, "cpf_closed"), 1e-12);
    }
  }
}

TEST(ReferenceCurves, CurvesAndWeakCoupling) {
  const auto csv = parse_csv(render(run_figure2, load_run_config(kConfigDir / "figure2.json")));
  ASSERT_EQ(csv.rows.size(), 6u * 101u);
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    EXPECT_EQ(csv.text(r, "t"), csv.text(r, "tau"));
    const double closed = csv.num(r, "cpf_closed");
    if (std::isnan(closed)) {
      EXPECT_EQ(csv.text(r, "cpf_table"), "nan");
      continue;
    }
    EXPECT_NEAR(csv.num(r, "cpf_table"), closed, 1e-12);
    if (csv.num(r, "gamma_tau_c") == 0.01) {
      EXPECT_LE(std::abs(closed), 0.01);
    }
  }
  EXPECT_EQ(csv.text(0, "cpf_closed"), "0");
  EXPECT_EQ(csv.text(2 * 101, "scheme"), "xzx");
  EXPECT_EQ(csv.text(2 * 101, "cpf_closed"), "0");
}

TEST(ReferenceCurves, SignsOfMemoryCurves) {
  const auto csv = parse_csv(render(run_figure2, load_run_config(kConfigDir / "figure2.json")));
  // Up to the first revival (t = pi for gamma tau_c = 1), x-z-x is negative.
  for (std::size_t r = 1; r < 60; ++r) {
    EXPECT_GE(csv.num(r, "cpf_closed"), 0.0);
    EXPECT_LT(csv.num(3 * 101 + r, "cpf_closed"), 0.0);
  }
}

TEST(NoiseTable, BlockLayout) {
  const auto csv = parse_csv(render(run_appendix_d, load_run_config(kConfigDir / "appendix_d.json"), 4));
  ASSERT_EQ(csv.rows.size(), 5u * 11u);
  EXPECT_EQ(csv.text(0, "V"), "1");
  EXPECT_EQ(csv.text(11, "V"), "0.9");
  EXPECT_EQ(csv.text(33, "scheme"), "zzz");
  EXPECT_EQ(csv.text(44, "y"), "1");
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    EXPECT_EQ(csv.text(r, "seed"), "1");
    const double ideal = csv.num(r, "ideal");
    if (std::isnan(ideal)) continue;
    EXPECT_NEAR(csv.num(r, "degraded_ideal"), ideal * csv.num(r, "V"), 1e-14);
  }
}

TEST(NoiseTable, ExcitedOutcomeSpreadGrowsWithTime) {
  const auto csv = parse_csv(render(run_appendix_d, load_run_config(kConfigDir / "appendix_d.json"), 4));
  double early = 0.0, late = 0.0;
  for (std::size_t k = 1; k <= 3; ++k) early += csv.num(44 + k, "mc_std");
  for (std::size_t k = 8; k <= 10; ++k) late += csv.num(44 + k, "mc_std");
  EXPECT_GT(late, 2.0 * early);
  for (std::size_t k = 0; k < 11; ++k) EXPECT_NEAR(csv.num(44 + k, "ideal"), 0.0, 1e-12);
}

TEST(NoiseTable, SeedOverride) {
  auto cfg = load_run_config(kConfigDir / "appendix_d.json");
  const auto a = parse_csv(render(run_appendix_d, cfg));
  override_seed(cfg, 99);
  const auto b = parse_csv(render(run_appendix_d, cfg));
  EXPECT_EQ(b.text(0, "seed"), "99");
  EXPECT_NE(a.text(5, "mc_mean"), b.text(5, "mc_mean"));
  EXPECT_EQ(a.text(5, "ideal"), b.text(5, "ideal"));
  EXPECT_NE(b.comments[2].find("\"seed\":99"), std::string::npos);
}

TEST(Witness, PositiveRateWithMemory) {
  const auto csv = parse_csv(render(run_witness_comparison, load_run_config(kConfigDir / "witness.json")));
  ASSERT_EQ(csv.rows.size(), 51u);
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    EXPECT_GE(csv.num(r, "gamma_t"), -1e-9);
    EXPECT_EQ(csv.text(r, "warning"), "");
    if (r > 0) {
      EXPECT_GT(csv.num(r, "cpf_zzz"), 0.0);
    }
  }
}

TEST(Witness, MarkovianBathIsQuiet) {
  const auto csv = parse_csv(render(run_witness_comparison, from_text(R"({
    "bath": {"gamma": 1.0, "tau_c": 0.01}, "state": {"p": 0.8}, "grid": {"t_max": 5.0, "steps": 50}})")));
  ASSERT_EQ(csv.rows.size(), 51u);
  for (std::size_t r = 2; r < csv.rows.size(); ++r) {
    EXPECT_NEAR(csv.num(r, "gamma_t"), 0.5, 1e-2);
    EXPECT_LE(std::abs(csv.num(r, "cpf_zzz")), 0.01);
    EXPECT_LE(std::abs(csv.num(r, "cpf_xzx")), 0.01);
  }
}

TEST(Witness, StopsAtZeroCrossing) {
  const auto csv = parse_csv(render(run_witness_comparison, from_text(R"({
    "bath": {"gamma": 1.0, "tau_c": 1.0}, "state": {"p": 0.8}, "grid": {"t_max": 5.0, "steps": 50}})")));
  ASSERT_FALSE(csv.rows.empty());
  ASSERT_LT(csv.rows.size(), 51u);
  EXPECT_EQ(csv.text(csv.rows.size() - 1, "warning"), "zero_crossing");
  EXPECT_LE(csv.num(csv.rows.size() - 1, "t"), 1.5 * std::numbers::pi);
  EXPECT_GT(csv.num(csv.rows.size() - 1, "t"), 1.5 * std::numbers::pi - 0.1);
}

TEST(Determinism, RepeatedAndThreadedRunsMatch) {
  const auto fig = load_run_config(kConfigDir / "figure2.json");
  const auto app = load_run_config(kConfigDir / "appendix_d.json");
  const auto wit = load_run_config(kConfigDir / "witness.json");
  const auto swp = load_run_config(kConfigDir / "sweep_volterra.json");
  EXPECT_EQ(render(run_figure2, fig, 1), render(run_figure2, fig, 3));
  EXPECT_EQ(render(run_appendix_d, app, 1), render(run_appendix_d, app, 1));
  EXPECT_EQ(render(run_appendix_d, app, 1), render(run_appendix_d, app, 4));
  EXPECT_EQ(render(run_witness_comparison, wit, 1), render(run_witness_comparison, wit, 2));
  EXPECT_EQ(render(run_sweep, swp, 1), render(run_sweep, swp, 4));
}

}  // namespace
}  // namespace cpfmem
