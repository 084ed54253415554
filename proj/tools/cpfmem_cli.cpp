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

// cpfmem command-line driver: reproduces the figure datasets from a JSON
// config and runs the acceptance checks.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "cpfmem/cpfmem.hpp"
#include "cpfmem/validation.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
};

using Producer = std::function<void(const cpfmem::RunConfig&, std::ostream&, unsigned)>;

int run_dataset(const Options& opt, const std::string& name, const Producer& produce) {
  auto cfg = cpfmem::load_run_config(opt.config);
  if (opt.seed) cpfmem::override_seed(cfg, *opt.seed);
  const std::filesystem::path dir = opt.out.empty() ? cfg.output : std::filesystem::path(opt.out);
  const auto path = dir / (name + ".csv");
  std::ostringstream buffer;
  produce(cfg, buffer, opt.threads);
  std::filesystem::create_directories(dir);
  // Binary mode keeps LF line endings on every platform.
  std::ofstream os(path, std::ios::binary);
  if (!os) throw cpfmem::ValidationError("cannot write '" + path.string() + "'");
  os << buffer.str();
  os.close();
  if (!os) throw cpfmem::ValidationError("write failed for '" + path.string() + "'");
  std::cout << path.string() << '\n';
  return 0;
}

int run_validate(unsigned threads) {
  int failures = 0;
  const auto results = cpfmem::validation::run_all(threads);
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    std::cout << (r.passed ? "PASS " : "FAIL ") << (i + 1) << ' ' << r.name << ": " << r.detail
              << '\n';
    if (!r.passed) ++failures;
  }
  std::cout << (results.size() - failures) << '/' << results.size() << " checks passed\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional past-future correlations of a decaying two-level system"};
  app.set_version_flag("--version", std::string(cpfmem::kVersion));
  app.require_subcommand(1);

  Options opt;
  opt.threads = std::max(1u, std::thread::hardware_concurrency());
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "Output directory (overrides config 'output')");
    sub->add_option("--seed", opt.seed, "Noise seed (overrides config)");
    sub->add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber);
  };

  struct Command {
    const char* name;
    const char* help;
    Producer produce;
  };
  const Command commands[] = {
      {"figure2", "C(t,t) curves for the figure parameter sets", cpfmem::run_figure2},
      {"appendix-d", "Finite-count and visibility noise study", cpfmem::run_appendix_d},
      {"witness", "Decay rate witness next to the CPF", cpfmem::run_witness_comparison},
      {"sweep", "Generic sweep over the configured bath and state", cpfmem::run_sweep},
  };
  for (const auto& c : commands) add_common(app.add_subcommand(c.name, c.help));

  auto* validate = app.add_subcommand("validate", "Run the acceptance checks");
  validate->add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return run_validate(opt.threads);
    for (const auto& c : commands) {
      if (app.got_subcommand(c.name)) {
        const std::string file = c.name == std::string("appendix-d") ? "appendix_d" : c.name;
        return run_dataset(opt, file, c.produce);
      }
    }
  } catch (const cpfmem::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
