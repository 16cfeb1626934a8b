// Copyright 2026 The spinmbqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Batch runner behind the spinmbqc command line tool: experiment configs, the grid
// evaluation and the CSV/manifest writers.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinmbqc/dmrg.hpp"
#include "spinmbqc/fidelity.hpp"
#include "spinmbqc/model.hpp"

namespace spinmbqc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitIo = 3;

inline constexpr int kCsvSchemaVersion = 1;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parses "pi/2", "-3*pi/4", "2pi", "1/3", "0.25" and the like.
double parse_number(const std::string& text);

struct GateSpec {
  double theta = 0.0, phi = 0.0, lambda = 0.0;
};

struct ExperimentConfig {
  std::string name;
  ModelKind model = ModelKind::xxz;
  std::vector<std::size_t> L{12};
  std::vector<std::size_t> N{0};
  std::vector<double> alpha{1.0 / 3.0};
  std::vector<double> J{1.0};
  std::vector<double> D{0.0};
  std::vector<GateSpec> gates{GateSpec{}};
  std::vector<Method> methods{Method::expansion};
  DmrgConfig dmrg;
  std::uint64_t seed = 1;
  double tolerance = 1e-6;                   // oracle-check
  double haldane_threshold = kHaldaneThreshold;

  // Every model point of the grid in a fixed order.
  std::vector<HamiltonianSpec> points() const;
  // Canonical JSON text; its hash identifies the run.
  std::string canonical() const;
};

ExperimentConfig parse_config(const std::string& yaml_text);
ExperimentConfig load_config(const std::filesystem::path& path);

std::string sha256_hex(const std::string& bytes);

struct CsvRow {
  std::string model;
  std::size_t L = 0, N = 0;
  double alpha = 0, J = 0, D = 0;
  double theta = 0, phi = 0, lambda = 0;
  std::string method;
  double fidelity = 0;
  std::optional<double> g_corr, g_fail;
  std::array<double, 3> O{0, 0, 0};
  double energy = 0, variance = 0;
  bool converged = false;
  std::uint64_t seed = 0;
  double wall_time_ms = 0;
};

std::string csv_header();
std::string csv_line(const CsvRow& r, bool with_timing);

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::filesystem::path> cache_dir;
  std::size_t jobs = 1;
  bool timing = true;
  bool quiet = false;
};

struct RunSummary {
  std::vector<CsvRow> rows;
  std::size_t cache_hits = 0;
  std::size_t solves = 0;
  double max_oracle_delta = 0.0;
  bool check_failed = false;
  std::filesystem::path csv_path, manifest_path;
};

enum class Command { ground_state, fidelity_rz, fidelity_unitary, scan, oracle_check, aklt_closed_form };

std::string command_name(Command c);

// Evaluates the grid, writes CSV and manifest; throws ConfigError or IoError.
RunSummary run(Command cmd, const ExperimentConfig& cfg, const RunOptions& opt, std::ostream& log);

// Full command line entry point; returns the process exit code.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spinmbqc::cli
