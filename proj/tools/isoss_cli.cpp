// Copyright 2026 The isoss Authors
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

// isoss: batch driver for scenario files.
//
//   isoss simulate --config <file> --out <dir> [--seed <u64>] [--threads <n>]
//   isoss test     --config <file> --out <dir>
//   isoss report   --in <dir>
//
// Exit codes: 0 done, 1 configuration error, 2 I/O error, 3 simulation
// failure. ISOSS_THREADS sets the worker count when --threads is absent.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "isoss/scenario.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitRuntime = 3;

std::string read_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw isoss::IoError("cannot read " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

unsigned thread_count(std::optional<unsigned> flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("ISOSS_THREADS")) {
    try {
      std::size_t used = 0;
      const long v = std::stol(env, &used);
      if (used == std::string(env).size() && v >= 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    throw isoss::ConfigError("", std::string("ISOSS_THREADS must be a non-negative integer, got '") + env + "'");
  }
  return 0;
}

int run_all(const fs::path& config, const fs::path& out, std::optional<std::uint64_t> seed, bool tests) {
  auto scenarios = isoss::parse_config(read_file(config));
  for (auto& sc : scenarios) {
    if (seed) sc.master_seed = *seed;
    const auto dir = out / sc.name;
    const auto result = isoss::run_scenario(sc, dir, {tests});
    std::cout << isoss::render_report(sc.name, result.rows);
  }
  return 0;
}

int report(const fs::path& in) {
  std::vector<fs::path> dirs;
  if (fs::exists(in / "tests.csv")) {
    dirs.push_back(in);
  } else {
    std::error_code ec;
    for (const auto& e : fs::directory_iterator(in, ec)) {
      if (e.is_directory() && fs::exists(e.path() / "tests.csv")) dirs.push_back(e.path());
    }
    if (ec) throw isoss::IoError("cannot list " + in.string() + ": " + ec.message());
    std::sort(dirs.begin(), dirs.end());
  }
  if (dirs.empty()) throw isoss::IoError("no tests.csv under " + in.string());
  for (const auto& d : dirs) {
    std::cout << isoss::render_report(d.filename().string(), isoss::read_tests_csv(d / "tests.csv"));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulate isotropic self-similar Markov processes and test their defining properties"};
  app.require_subcommand(1);

  std::string config, out, in;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;

  auto* simulate = app.add_subcommand("simulate", "simulate scenarios and write paths, jumps and jump statistics");
  simulate->add_option("--config", config, "scenario JSON file")->required();
  simulate->add_option("--out", out, "output directory")->required();
  simulate->add_option("--seed", seed, "master seed for every scenario");
  simulate->add_option("--threads", threads, "worker threads (0 = all cores)");

  auto* test = app.add_subcommand("test", "simulate scenarios and run their hypothesis tests");
  test->add_option("--config", config, "scenario JSON file")->required();
  test->add_option("--out", out, "output directory")->required();

  auto* rep = app.add_subcommand("report", "print the report for previously written tests.csv files");
  rep->add_option("--in", in, "output directory of a previous run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    isoss::check_threads() = thread_count(threads);
    if (*simulate) return run_all(config, out, seed, false);
    if (*test) return run_all(config, out, std::nullopt, true);
    return report(in);
  } catch (const isoss::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const isoss::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
