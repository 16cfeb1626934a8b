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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "spinmbqc/oracle.hpp"
#include "spinmbqc/serialize.hpp"

#ifndef SPINMBQC_VERSION
#define SPINMBQC_VERSION "0.0.0"
#endif

namespace spinmbqc::cli {

std::string command_name(Command c) {
  switch (c) {
    case Command::ground_state: return "ground-state";
    case Command::fidelity_rz: return "fidelity-rz";
    case Command::fidelity_unitary: return "fidelity-unitary";
    case Command::scan: return "scan";
    case Command::oracle_check: return "oracle-check";
    case Command::aklt_closed_form: return "aklt-closed-form";
  }
  return "?";
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

}  // namespace

std::string csv_header() {
  return "model,L,N,alpha,J,D,theta,phi,lambda,method,fidelity,g_corr,g_fail,O_x,O_y,O_z,energy,variance,"
         "converged,seed,wall_time_ms";
}

std::string csv_line(const CsvRow& r, bool with_timing) {
  std::string s;
  auto add = [&](const std::string& f) {
    if (!s.empty()) s.push_back(',');
    s += f;
  };
  s = r.model;
  add(std::to_string(r.L));
  add(std::to_string(r.N));
  for (double v : {r.alpha, r.J, r.D, r.theta, r.phi, r.lambda}) add(num(v));
  add(r.method);
  add(num(r.fidelity));
  add(r.g_corr ? num(*r.g_corr) : "");
  add(r.g_fail ? num(*r.g_fail) : "");
  for (double v : r.O) add(num(v));
  add(num(r.energy));
  add(num(r.variance));
  add(r.converged ? "true" : "false");
  add(std::to_string(r.seed));
  add(with_timing ? num(std::round(r.wall_time_ms * 1000) / 1000) : "0");
  return s;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Resource {
  Mps<cplx> state;
  double energy = 0, variance = 0;
  bool converged = true;
  bool cache_hit = false;
  bool solved = false;
};

std::string cache_key(const HamiltonianSpec& spec, const ExperimentConfig& cfg) {
  nlohmann::ordered_json j = nlohmann::ordered_json::parse(cfg.canonical())["dmrg"];
  return sha256_hex("spinmbqc-mps-v1|" + spec.key() + "|" + j.dump() + "|seed=" + std::to_string(cfg.seed));
}

std::optional<Resource> load_cached(const std::filesystem::path& dir, const std::string& key, std::ostream& log,
                                    std::mutex& log_mu) {
  const auto mps_path = dir / (key + ".mps");
  const auto meta_path = dir / (key + ".json");
  if (!std::filesystem::exists(mps_path) || !std::filesystem::exists(meta_path)) return std::nullopt;
  try {
    Resource r;
    r.state = load_mps(mps_path);
    std::ifstream in(meta_path);
    const auto meta = nlohmann::json::parse(in);
    r.energy = meta.at("energy").get<double>();
    r.variance = meta.at("variance").get<double>();
    r.converged = meta.at("converged").get<bool>();
    r.cache_hit = true;
    return r;
  } catch (const std::exception& e) {
    std::lock_guard lock(log_mu);
    log << "cache entry " << key << " unreadable (" << e.what() << "), recomputing\n";
    return std::nullopt;
  }
}

void store_cached(const std::filesystem::path& dir, const std::string& key, const Resource& r) {
  // Write under temporary names and rename so concurrent readers never see partial files.
  const std::string tag = ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  const auto mps_tmp = dir / (key + ".mps" + tag);
  const auto meta_tmp = dir / (key + ".json" + tag);
  try {
    save_mps(mps_tmp, r.state);
    nlohmann::ordered_json meta{{"energy", r.energy}, {"variance", r.variance}, {"converged", r.converged}};
    std::ofstream out(meta_tmp);
    out << meta.dump(2) << '\n';
    out.close();
    if (!out) throw IoError("write failed");
    std::filesystem::rename(mps_tmp, dir / (key + ".mps"));
    std::filesystem::rename(meta_tmp, dir / (key + ".json"));
  } catch (const std::exception& e) {
    throw IoError("cannot write cache entry in '" + dir.string() + "': " + e.what());
  }
}

Resource acquire(const HamiltonianSpec& spec, const ExperimentConfig& cfg, const RunOptions& opt, std::ostream& log,
                 std::mutex& log_mu) {
  if (spec.kind == ModelKind::aklt) {
    // The exact valence-bond state; no search needed.
    Resource r;
    r.state = aklt_mps<cplx>(spec.L);
    const auto h = build_mpo<cplx>(spec);
    r.energy = expect_mpo(h, r.state);
    r.variance = variance(h, r.state);
    return r;
  }
  std::string key;
  if (opt.cache_dir) {
    key = cache_key(spec, cfg);
    if (auto hit = load_cached(*opt.cache_dir, key, log, log_mu)) {
      if (!opt.quiet) {
        std::lock_guard lock(log_mu);
        log << "cache hit: " << spec.key() << '\n';
      }
      return *hit;
    }
  }
  DmrgConfig d = cfg.dmrg;
  d.seed = cfg.seed;
  const auto res = ground_state(spec, d);
  Resource r;
  r.state = res.state;
  r.energy = res.energy;
  r.variance = res.variance;
  r.converged = res.converged;
  r.solved = true;
  if (!res.converged && !opt.quiet) {
    std::lock_guard lock(log_mu);
    log << "warning: DMRG did not converge for " << spec.key() << '\n';
  }
  if (opt.cache_dir) store_cached(*opt.cache_dir, key, r);
  return r;
}

bool wants(const ExperimentConfig& cfg, Method m) {
  return std::find(cfg.methods.begin(), cfg.methods.end(), m) != cfg.methods.end();
}

struct PointOutput {
  std::vector<CsvRow> rows;
  bool cache_hit = false, solved = false;
  double max_delta = 0;
  std::vector<std::string> notes;
};

PointOutput evaluate_point(Command cmd, const HamiltonianSpec& spec, const ExperimentConfig& cfg, const RunOptions& opt,
                           std::ostream& log, std::mutex& log_mu) {
  PointOutput out;
  const auto t_solve = Clock::now();
  const Resource res = acquire(spec, cfg, opt, log, log_mu);
  const double solve_ms = ms_since(t_solve);
  out.cache_hit = res.cache_hit;
  out.solved = res.solved;

  const bool blocked = spec.kind == ModelKind::blocked;
  CsvRow base;
  base.model = model_name(spec.kind);
  base.L = spec.L;
  base.N = blocked ? spec.N : 0;
  base.alpha = spec.kind == ModelKind::blbq ? spec.alpha : (spec.kind == ModelKind::aklt ? 1.0 / 3.0 : 0.0);
  base.J = spec.J;
  base.D = spec.D;
  base.O = string_orders(res.state);
  if (!blocked) {
    base.g_corr = g_corr(res.state);
    base.g_fail = g_fail(res.state);
  }
  base.energy = res.energy;
  base.variance = res.variance;
  base.converged = res.converged;
  base.seed = spec.kind == ModelKind::aklt ? 0 : cfg.seed;

  if (cmd == Command::ground_state) {
    CsvRow r = base;
    r.method = "ground_state";
    r.fidelity = 0.25 + 0.25 * (r.O[0] + r.O[1] + r.O[2]);
    r.wall_time_ms = solve_ms;
    out.rows.push_back(r);
    return out;
  }

  std::optional<DenseState> dense;
  const bool need_oracle = wants(cfg, Method::oracle) || cmd == Command::oracle_check;
  if (need_oracle) dense = dense_state(res.state);

  for (const auto& g : cfg.gates) {
    std::optional<double> oracle_value;
    double oracle_ms = 0;
    auto oracle = [&]() {
      if (!oracle_value) {
        const auto t0 = Clock::now();
        const Protocol p = blocked ? Protocol::unitary(g.theta, g.phi, g.lambda) : Protocol::rz(g.theta);
        oracle_value = fidelity_from_rho(enumerate_rho_u(*dense, p), p.gate());
        oracle_ms = ms_since(t0);
      }
      return *oracle_value;
    };
    for (Method m : cfg.methods) {
      CsvRow r = base;
      r.theta = g.theta;
      r.phi = blocked ? g.phi : 0.0;
      r.lambda = blocked ? g.lambda : 0.0;
      r.method = method_name(m);
      const auto t0 = Clock::now();
      double raw = 0;
      switch (m) {
        case Method::expansion:
          raw = blocked ? unitary_fidelity(res.state, g.theta, g.phi, g.lambda).diagnostics.raw_value
                        : rz_fidelity_expansion(res.state, g.theta).diagnostics.raw_value;
          break;
        case Method::haldane_closed_form: {
          const auto rep = rz_fidelity_haldane(res.state, g.theta, cfg.haldane_threshold);
          raw = rep.diagnostics.raw_value;
          if (rep.diagnostics.advisory) out.notes.push_back("advisory: " + spec.key() + " is outside the Haldane phase");
          break;
        }
        case Method::oracle: raw = oracle(); break;
      }
      r.fidelity = std::clamp(raw, 0.0, 1.0);
      r.wall_time_ms = m == Method::oracle ? oracle_ms : ms_since(t0);
      if (cmd == Command::oracle_check && m != Method::oracle) {
        const bool advisory = m == Method::haldane_closed_form &&
                              !(0.25 + 0.25 * (base.O[0] + base.O[1] + base.O[2]) > cfg.haldane_threshold);
        // The closed form only claims validity inside the Haldane phase.
        if (!advisory) out.max_delta = std::max(out.max_delta, std::abs(raw - oracle()));
      }
      out.rows.push_back(r);
    }
    if (cmd == Command::oracle_check && !wants(cfg, Method::oracle)) {
      CsvRow r = base;
      r.theta = g.theta;
      r.phi = blocked ? g.phi : 0.0;
      r.lambda = blocked ? g.lambda : 0.0;
      r.method = method_name(Method::oracle);
      r.fidelity = std::clamp(oracle(), 0.0, 1.0);
      r.wall_time_ms = oracle_ms;
      out.rows.push_back(r);
    }
    if (cmd == Command::aklt_closed_form) {
      CsvRow r = base;
      r.theta = g.theta;
      r.method = "analytic";
      r.fidelity = 1 - (1 - std::cos(g.theta)) / (2 * std::pow(3.0, double(spec.L)));
      out.rows.push_back(r);
    }
  }
  return out;
}

void check_command(Command cmd, const ExperimentConfig& cfg) {
  const bool blocked = cfg.model == ModelKind::blocked;
  switch (cmd) {
    case Command::fidelity_rz:
      if (blocked) throw ConfigError("fidelity-rz needs a uniform chain model (aklt, blbq or xxz)");
      break;
    case Command::fidelity_unitary:
      if (!blocked) throw ConfigError("fidelity-unitary needs model 'blocked'");
      break;
    case Command::aklt_closed_form:
      if (cfg.model != ModelKind::aklt) throw ConfigError("aklt-closed-form needs model 'aklt'");
      break;
    default: break;
  }
  if (cmd != Command::ground_state) {
    for (const auto& g : cfg.gates) {
      if (!blocked && (g.phi != 0 || g.lambda != 0)) {
        throw ConfigError("phi and lambda need model 'blocked'; uniform chains run R_z(theta)");
      }
    }
    if (blocked && wants(cfg, Method::haldane_closed_form)) {
      throw ConfigError("the closed form covers R_z only; use expansion or oracle for blocked chains");
    }
  }
  if (cmd == Command::oracle_check || (cmd != Command::ground_state && wants(cfg, Method::oracle))) {
    for (const auto& spec : cfg.points()) {
      const auto layout = spec.layout();
      if (layout.n_spin1() > 8 || layout.dense_dim() > kDefaultDenseCap) {
        throw ConfigError("oracle enumeration is limited to 8 spin-1 sites; got " + spec.key());
      }
    }
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.close();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace

RunSummary run(Command cmd, const ExperimentConfig& cfg, const RunOptions& opt, std::ostream& log) {
  check_command(cmd, cfg);
  ExperimentConfig effective = cfg;
  if (cmd == Command::oracle_check && !wants(effective, Method::expansion)) {
    effective.methods.insert(effective.methods.begin(), Method::expansion);
  }
  const auto points = effective.points();
  const std::string name = effective.name.empty() ? command_name(cmd) : effective.name;

  try {
    std::filesystem::create_directories(opt.out_dir);
    if (opt.cache_dir) std::filesystem::create_directories(*opt.cache_dir);
  } catch (const std::filesystem::filesystem_error& e) {
    throw IoError(e.what());
  }

  std::vector<PointOutput> results(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        results[i] = evaluate_point(cmd, points[i], effective, opt, log, log_mu);
        if (!opt.quiet) {
          std::lock_guard lock(log_mu);
          log << "[" << (i + 1) << "/" << points.size() << "] " << points[i].key() << '\n';
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(opt.jobs, points.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  RunSummary summary;
  std::string csv = csv_header() + "\n";
  for (auto& r : results) {
    summary.cache_hits += r.cache_hit ? 1 : 0;
    summary.solves += r.solved ? 1 : 0;
    summary.max_oracle_delta = std::max(summary.max_oracle_delta, r.max_delta);
    if (!opt.quiet)
      for (const auto& n : r.notes) log << n << '\n';
    for (auto& row : r.rows) {
      csv += csv_line(row, opt.timing) + "\n";
      summary.rows.push_back(std::move(row));
    }
  }
  summary.check_failed = cmd == Command::oracle_check && !(summary.max_oracle_delta < effective.tolerance);

  summary.csv_path = opt.out_dir / (name + ".csv");
  summary.manifest_path = opt.out_dir / (name + ".manifest.json");
  write_text(summary.csv_path, csv);

  nlohmann::ordered_json m;
  m["tool"] = "spinmbqc";
  m["version"] = SPINMBQC_VERSION;
  m["command"] = command_name(cmd);
  m["config_sha256"] = sha256_hex(effective.canonical());
  m["config"] = nlohmann::ordered_json::parse(effective.canonical());
  m["csv"] = summary.csv_path.filename().string();
  m["csv_schema_version"] = kCsvSchemaVersion;
  m["columns"] = nlohmann::ordered_json::array();
  {
    std::stringstream hs(csv_header());
    std::string col;
    while (std::getline(hs, col, ',')) m["columns"].push_back(col);
  }
  m["rows"] = summary.rows.size();
  m["points"] = points.size();
  m["jobs"] = jobs;
  m["cache_hits"] = summary.cache_hits;
  m["dmrg_solves"] = summary.solves;
  if (cmd == Command::oracle_check) {
    m["oracle_check"] = {{"tolerance", effective.tolerance},
                         {"max_delta", summary.max_oracle_delta},
                         {"passed", !summary.check_failed}};
  }
  write_text(summary.manifest_path, m.dump(2) + "\n");
  return summary;
}

}  // namespace spinmbqc::cli
