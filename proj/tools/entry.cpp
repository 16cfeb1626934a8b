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

#include <cstdio>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "cli.hpp"

#ifndef SPINMBQC_VERSION
#define SPINMBQC_VERSION "0.0.0"
#endif

namespace spinmbqc::cli {

namespace {

struct Choice {
  const char* name;
  Command cmd;
  const char* help;
};

constexpr Choice kCommands[] = {
    {"ground-state", Command::ground_state, "Ground states, string orders and identity fidelity per model point"},
    {"fidelity-rz", Command::fidelity_rz, "R_z(theta) fidelity on uniform chains"},
    {"fidelity-unitary", Command::fidelity_unitary, "Arbitrary single-qubit unitary fidelity on blocked chains"},
    {"scan", Command::scan, "Fidelity over the configured grid, dispatching on the model"},
    {"oracle-check", Command::oracle_check, "Compare every method against brute-force enumeration"},
    {"aklt-closed-form", Command::aklt_closed_form, "AKLT fidelity against its analytic value"},
};

void print_closed_form(const RunSummary& s, std::ostream& out) {
  out << "L  theta              analytic           computed           method\n";
  const CsvRow* analytic = nullptr;
  // Rows of one gate come out as the method rows followed by the analytic row.
  std::vector<const CsvRow*> pending;
  for (const auto& r : s.rows) {
    if (r.method != "analytic") {
      pending.push_back(&r);
      continue;
    }
    analytic = &r;
    for (const CsvRow* p : pending) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%-2zu %-18.12g %-18.15g %-18.15g %s\n", p->L, p->theta, analytic->fidelity,
                    p->fidelity, p->method.c_str());
      out << buf;
    }
    pending.clear();
  }
}

}  // namespace

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gate fidelity of measurement-based quantum computation on spin-1 chains", "spinmbqc"};
  app.set_version_flag("--version", SPINMBQC_VERSION);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::string cache_dir;
  std::size_t jobs = 1;
  std::optional<std::uint64_t> seed;
  bool no_timing = false, quiet = false;

  for (const auto& c : kCommands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->fallthrough();
    sub->add_option("-c,--config", config_path, "YAML experiment file")->required();
  }
  app.add_option("-o,--out", out_dir, "Output directory for the CSV and manifest");
  app.add_option("--cache", cache_dir, "Directory for cached ground states");
  app.add_option("-j,--jobs", jobs, "Worker threads; 0 uses every core");
  app.add_option("--seed", seed, "Override the DMRG seed of the config");
  app.add_flag("--no-timing", no_timing, "Write zero wall times so reruns are byte-identical");
  app.add_flag("-q,--quiet", quiet, "Suppress progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalidConfig;
  }

  Command cmd = Command::scan;
  for (const auto& c : kCommands)
    if (app.got_subcommand(c.name)) cmd = c.cmd;

  try {
    ExperimentConfig cfg = load_config(config_path);
    if (seed) cfg.seed = *seed;
    RunOptions opt;
    opt.out_dir = out_dir;
    if (!cache_dir.empty()) opt.cache_dir = cache_dir;
    opt.jobs = jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : jobs;
    opt.timing = !no_timing;
    opt.quiet = quiet;

    const RunSummary s = run(cmd, cfg, opt, err);
    if (cmd == Command::aklt_closed_form) print_closed_form(s, out);
    out << "wrote " << s.rows.size() << " rows to " << s.csv_path.string() << " (" << s.solves << " solves, "
        << s.cache_hits << " cache hits)\n";
    if (cmd == Command::oracle_check) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "oracle-check %s: max |delta| = %.3e (tolerance %.1e)\n",
                    s.check_failed ? "FAILED" : "passed", s.max_oracle_delta, cfg.tolerance);
      out << buf;
      return s.check_failed ? kExitCheckFailed : kExitOk;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const std::length_error& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
}

}  // namespace spinmbqc::cli
